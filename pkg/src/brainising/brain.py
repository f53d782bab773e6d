"""Policy-gradient Boltzmann learning against a noisy energy oracle.

Each iteration draws a batch from the current sampler, reads one noisy
energy per sample, and steps the parameters along the REINFORCE estimate
of the free-energy gradient with the batch-mean reward as baseline:

    g = (1/S) sum_s (r_s - mean(r)) * score(x_s) + grad(-H(q)),   r = beta * E~(x)

The Bernoulli family can be updated either in logit space (default) or
directly on the probabilities m with clamping.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import rng as rngmod
from .errors import DimensionError, DivergenceError
from .hamiltonians import magnetization
from .oracle import NoisyOracle
from .records import RunRecord
from .variational import DEFAULT_CLIP, BernoulliField, GaussianMixture1D

PARAMETERIZATIONS = ("logit", "mean")


@dataclass(frozen=True)
class BrainConfig:
    beta: float
    batch_size: int = 100
    learning_rate: float = 1.0
    lr_halflife: int | None = None  # step size eta / (1 + t / halflife); None keeps it constant
    max_iterations: int = 1000
    window: int = 50
    tolerance: float | None = None  # None means 1e-4 * N
    init: str = "uniform"
    init_scale: float = 0.01
    seed: int = 0
    parameterization: str = "logit"
    clip: float = DEFAULT_CLIP

    def __post_init__(self):
        if self.beta < 0:
            raise ValueError("beta must be non-negative")
        if self.batch_size < 2:
            raise ValueError("batch_size must be at least 2 (the baseline is a batch mean)")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.lr_halflife is not None and self.lr_halflife < 1:
            raise ValueError("lr_halflife must be positive")
        if self.max_iterations < 1 or self.window < 1:
            raise ValueError("max_iterations and window must be positive")
        if self.init not in ("uniform", "perturbed"):
            raise ValueError(f"unknown init {self.init!r}")
        if self.parameterization not in PARAMETERIZATIONS:
            raise ValueError(f"parameterization must be one of {PARAMETERIZATIONS}")

    def step_size(self, iteration: int) -> float:
        if self.lr_halflife is None:
            return self.learning_rate
        return self.learning_rate / (1.0 + (iteration - 1) / self.lr_halflife)

    def tolerance_for(self, n: int) -> float:
        return 1e-4 * n if self.tolerance is None else float(self.tolerance)


def initial_field(n: int, cfg: BrainConfig) -> BernoulliField:
    if cfg.init == "uniform":
        return BernoulliField.uniform(n, cfg.clip)
    r = rngmod.stream(cfg.seed, rngmod.INIT)
    return BernoulliField(0.5 + cfg.init_scale * r.uniform(-1, 1, n), cfg.clip)


def baseline_advantages(rewards) -> np.ndarray:
    r = np.asarray(rewards, dtype=np.float64)
    return r - r.mean()


def batch_gradient(q: BernoulliField, X, rewards, parameterization: str = "logit") -> np.ndarray:
    """Baseline-subtracted REINFORCE gradient of the free-energy loss for one batch.

    Normalised by S - 1 rather than S: with the batch mean as baseline this is
    the leave-one-out estimator, which is unbiased, where 1/S shrinks the
    reward term by (S - 1) / S in expectation.
    """
    adv = baseline_advantages(rewards)
    if parameterization == "logit":
        # adv @ ((X + 1) / 2 - m) without the (S, N) float temporary
        total = adv.sum()
        return ((adv @ X + total) / 2 - total * q.m) / (len(adv) - 1) + q.logit_entropy_gradient()
    if parameterization == "mean":
        return adv @ q.score(X) / (len(adv) - 1) + q.entropy_gradient()
    raise ValueError(f"unknown parameterization {parameterization!r}")


def apply_step(q: BernoulliField, grad, learning_rate: float, parameterization: str = "logit") -> BernoulliField:
    if parameterization == "logit":
        bound = q.logit_bound
        theta = np.clip(q.logits - learning_rate * grad, -bound, bound)
        return BernoulliField.from_logits(theta, q.clip)
    return BernoulliField(q.m - learning_rate * grad, q.clip)


def exact_loss_gradient(q: BernoulliField, dist, parameterization: str = "mean") -> np.ndarray:
    """Gradient of -H(q) + beta * E_q[E] by full enumeration (small N only)."""
    X = dist.states
    p = np.exp(q.log_prob(X))
    r = dist.beta * dist.energies
    if parameterization == "logit":
        return (p * r) @ q.logit_score(X) + q.logit_entropy_gradient()
    return (p * r) @ q.score(X) + q.entropy_gradient()


def _moving_average_converged(losses: list, window: int, tol: float) -> bool:
    if len(losses) < 2 * window:
        return False
    a = np.mean(losses[-2 * window:-window])
    b = np.mean(losses[-window:])
    return abs(b - a) < tol


def train(q: BernoulliField | None, oracle: NoisyOracle, cfg: BrainConfig, until=None):
    """Fit a factorized Bernoulli sampler to exp(-beta E) using noisy reads.

    ``q=None`` starts from :func:`initial_field`. Returns ``(q, record)``.
    Stops after ``max_iterations`` or once the moving average of the loss
    estimate over ``window`` iterations moves by less than the tolerance.
    ``until(record)`` returning true also stops the run (used to measure
    evaluations-to-target without spending the rest of the budget).
    """
    h = oracle.hamiltonian
    n = h.n_spins
    if q is None:
        q = initial_field(n, cfg)
    if q.n != n:
        raise DimensionError(f"sampler has {q.n} spins, Hamiltonian has {n}")
    rng = rngmod.stream(cfg.seed, rngmod.SAMPLER)
    tol = cfg.tolerance_for(n)
    record = RunRecord(meta={"solver": "brain", "beta": cfg.beta, "parameterization": cfg.parameterization})
    losses = []
    for it in range(1, cfg.max_iterations + 1):
        X = q.sample(cfg.batch_size, rng)
        rewards = cfg.beta * oracle.measure_batch(X)
        loss = -q.entropy() + rewards.mean()
        grad = batch_gradient(q, X, rewards, cfg.parameterization)
        if not np.all(np.isfinite(grad)):
            raise DivergenceError(f"non-finite gradient at iteration {it}; reduce the learning rate")
        record.append(it, rewards.mean(), loss, np.abs(magnetization(X)).mean(), oracle.eval_count)
        q = apply_step(q, grad, cfg.step_size(it), cfg.parameterization)
        losses.append(loss)
        if _moving_average_converged(losses, cfg.window, tol):
            record.converged = True
            break
        if until is not None and until(record):
            break
    record.params = q.m.copy()
    return q, record


def sampled_abs_magnetization(q: BernoulliField, count: int = 1000, seed: int = 0) -> float:
    """|mean magnetization| over ``count`` fresh draws from q."""
    X = q.sample(count, rngmod.stream(seed, rngmod.EVAL))
    return abs(float(magnetization(X).mean()))


@dataclass
class SweepPoint:
    temperature: float
    sigma: float
    seed: int
    abs_mag: float
    evals: int
    record: RunRecord | None = None


def sweep_point(hamiltonian, sigma: float, temperature: float, cfg: BrainConfig, seed: int,
                q0: BernoulliField | None = None, eval_samples: int = 1000, keep_record: bool = False):
    oracle = NoisyOracle(hamiltonian, sigma, seed)
    q, rec = train(q0, oracle, replace(cfg, beta=1.0 / temperature, seed=seed))
    mag = sampled_abs_magnetization(q, eval_samples, seed)
    return SweepPoint(float(temperature), float(sigma), seed, mag, oracle.eval_count, rec if keep_record else None), q


def temperature_sweep(hamiltonian, sigmas, temps, cfg: BrainConfig, seeds=(1,), warm_start: bool = False,
                      eval_samples: int = 1000) -> list[SweepPoint]:
    """Train a fresh sampler at every (T, sigma, seed) and measure its |M|.

    With ``warm_start`` each temperature starts from the sampler trained at
    the previous (lower) temperature for the same sigma and seed.
    """
    temps = sorted(float(t) for t in temps)
    if any(t <= 0 for t in temps):
        raise ValueError("temperatures must be positive")
    out = []
    for sigma in sigmas:
        for seed in seeds:
            q = None
            for T in temps:
                pt, q_new = sweep_point(hamiltonian, sigma, T, cfg, seed, q if warm_start else None, eval_samples)
                q = q_new
                out.append(pt)
    out.sort(key=lambda p: (p.sigma, p.temperature, p.seed))
    return out


def noise_variance_delta(scores, energies, sigma: float, beta: float) -> float:
    """Closed-form increase of noise-induced gradient variance without a baseline.

    ``scores`` are the score components a_j of one parameter for a fixed
    batch and ``energies`` the exact E(x_j). Returns
    (sigma^2 beta^2 / s^3) (sum a) (sum_j a_j [2 E_j^2 - mean(E^2)]).
    """
    a = np.asarray(scores, dtype=np.float64)
    E = np.asarray(energies, dtype=np.float64)
    if a.shape != E.shape or a.ndim != 1:
        raise DimensionError("scores and energies must be matching vectors")
    s = a.size
    if s < 2:
        raise ValueError("need at least two samples")
    if sigma == 0:
        return 0.0
    sa = a.sum()
    if sa == 0:
        return 0.0
    return float(sigma**2 * beta**2 / s**3 * sa * np.sum(a * (2 * E**2 - np.mean(E**2))))


def noise_only_gradients(scores, energies, sigma: float, beta: float, realizations: int, rng):
    """Monte Carlo draws of the single-coordinate gradient with and without baseline.

    Only the oracle noise varies between realizations; the batch is fixed.
    Returns ``(plain, baselined)`` arrays of length ``realizations``.
    """
    a = np.asarray(scores, dtype=np.float64)
    E = np.asarray(energies, dtype=np.float64)
    s = a.size
    plain = np.empty(realizations)
    based = np.empty(realizations)
    chunk = max(1, (1 << 20) // s)
    for start in range(0, realizations, chunk):
        stop = min(realizations, start + chunk)
        r = beta * E * (1.0 + sigma * rng.standard_normal((stop - start, s)))
        plain[start:stop] = r @ a / s
        based[start:stop] = (r - r.mean(axis=1, keepdims=True)) @ a / s
    return plain, based


def train_gmm(q: GaussianMixture1D, oracle: NoisyOracle, cfg: BrainConfig):
    """Fit a two-component Gaussian mixture to exp(-beta E(x)) on a scalar landscape.

    The entropy gradient has no closed form; it is estimated from the same
    batch as E_q[log q * score], with its own batch-mean baseline.
    """
    if oracle.hamiltonian.discrete:
        raise DimensionError("train_gmm needs a continuous Hamiltonian")
    rng = rngmod.stream(cfg.seed, rngmod.SAMPLER)
    record = RunRecord(meta={"solver": "brain_gmm", "beta": cfg.beta})
    losses = []
    for it in range(1, cfg.max_iterations + 1):
        x = q.sample(cfg.batch_size, rng)
        rewards = cfg.beta * oracle.measure_batch(x)
        lq = q.log_prob(x)
        score = q.score(x)
        adv = baseline_advantages(rewards) + baseline_advantages(lq)
        grad = adv @ score / (len(x) - 1)
        if not np.all(np.isfinite(grad)):
            raise DivergenceError(f"non-finite gradient at iteration {it}; reduce the learning rate")
        loss = float(lq.mean() + rewards.mean())
        record.append(it, rewards.mean(), loss, abs(float(x.mean())), oracle.eval_count)
        q = GaussianMixture1D.from_params(q.params - cfg.step_size(it) * grad)
        losses.append(loss)
        if _moving_average_converged(losses, cfg.window, cfg.tolerance_for(1)):
            record.converged = True
            break
    record.params = q.params.copy()
    return q, record
