"""Markov chain baselines driven by the noisy oracle.

Single-spin-flip Metropolis (optionally with k-averaged reads), simulated
annealing, and parallel tempering. Proposal loops run in the kernel
selected by :mod:`brainising.kernels`. The random numbers are drawn here,
so both kernel backends produce identical chains.

Two read protocols are supported:

* ``cache_current_energy=True``: the current state's noisy read is kept
  from when it was accepted; each step reads only the proposal (one
  evaluation per step, plus one initial read).
* ``cache_current_energy=False``: both states are read afresh every step
  (two evaluations per step).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from . import rng as rngmod
from .hamiltonians import (
    Chain1D,
    CurieWeiss,
    DenseCoupling,
    Hamiltonian,
    NearestNeighbor2D,
    SpinConfig,
    as_spins,
    random_spins,
)
from .errors import DimensionError, UnsupportedError
from .oracle import NoisyOracle
from .records import RunRecord

# Refuse to materialise more than this many stored spins.
MAX_STORED_SPINS = 400_000_000


@dataclass(frozen=True)
class McmcConfig:
    beta: float
    steps: int
    burn_in: int = 0
    thinning: int = 1
    seed: int = 0
    cache_current_energy: bool = True
    record_every: int | None = None
    keep_samples: bool = True

    def __post_init__(self):
        if self.beta < 0:
            raise ValueError("beta must be non-negative")
        if self.steps < 1:
            raise ValueError("steps must be positive")
        if not 0 <= self.burn_in < self.steps:
            raise ValueError("need 0 <= burn_in < steps")
        if self.thinning < 1:
            raise ValueError("thinning must be positive")
        if self.record_every is not None and self.record_every < 1:
            raise ValueError("record_every must be positive")

    @property
    def n_samples(self) -> int:
        return (self.steps - self.burn_in - 1) // self.thinning + 1

    @property
    def reads_per_step(self) -> int:
        return 1 if self.cache_current_energy else 2


def _default_record_every(n: int) -> int:
    return max(n, 1000)


class _Chain:
    """Mutable chain state plus the model arrays the kernel needs."""

    _EMPTY_NBR = np.full((1, 1), -1, dtype=np.int64)
    _EMPTY_MAT = np.zeros((1, 1))
    _EMPTY_VEC = np.zeros(1)

    def __init__(self, h: Hamiltonian, x: np.ndarray):
        self.h = h
        self.x = np.array(x, dtype=np.int8)
        self.nbr, self.Jmat, self.hvec, self.local = self._EMPTY_NBR, self._EMPTY_MAT, self._EMPTY_VEC, self._EMPTY_VEC
        if isinstance(h, CurieWeiss):
            self.model, self.J = 0, h.J
            s = int(self.x.sum(dtype=np.int64))
            e = h.energy_from_sum(s)
        elif isinstance(h, (NearestNeighbor2D, Chain1D)):
            self.model, self.J = 1, h.J
            self.nbr = h.neighbor_table()
            b = h.bonds
            s = int((self.x[b[:, 0]].astype(np.int64) * self.x[b[:, 1]]).sum())
            e = (-h.J) * float(s)
        elif isinstance(h, DenseCoupling):
            self.model, self.J = 2, 0.0
            self.Jmat = np.ascontiguousarray(h.couplings)
            self.hvec = np.ascontiguousarray(h.fields)
            self.local = self.Jmat @ self.x.astype(np.float64)
            s = 0
            e = h.energy(self.x)
        else:
            raise UnsupportedError(f"no spin-flip kernel for {type(h).__name__}")
        self.istate = np.array([s], dtype=np.int64)
        # exact energy, current noisy read, best read so far
        self.fstate = np.array([e, e, np.inf])
        self.best = self.x.copy()
        self.accepted = 0

    @property
    def energy(self) -> float:
        return float(self.fstate[0])

    @property
    def read(self) -> float:
        return float(self.fstate[1])

    def abs_mag(self) -> float:
        if self.model == 0:
            return abs(int(self.istate[0])) / self.x.size
        return abs(float(self.x.mean(dtype=np.float64)))

    def advance(self, beta, sites, u, fac, cache, samples, first, stride):
        self.accepted += kernels.run_chain(
            self.model, self.x, self.istate, self.fstate, float(self.J), float(beta),
            self.nbr, self.Jmat, self.hvec, self.local,
            sites, u, fac, bool(cache), samples, int(first), int(stride),
        )
        if self.fstate[1] < self.fstate[2]:
            self.fstate[2] = self.fstate[1]
            self.best = self.x.copy()

    def swap_with(self, other: _Chain):
        for name in ("x", "istate", "fstate", "local"):
            a, b = getattr(self, name), getattr(other, name)
            setattr(self, name, b)
            setattr(other, name, a)


_NO_SAMPLES = np.zeros((0, 1), dtype=np.int8)


def _initial_spins(h: Hamiltonian, init, seed: int) -> np.ndarray:
    if init is None:
        return random_spins(h.n_spins, rngmod.stream(seed, rngmod.INIT))
    x = as_spins(init)
    if x.shape != (h.n_spins,):
        raise DimensionError(f"initial configuration has length {x.size}, Hamiltonian has {h.n_spins} spins")
    return x


def _run_segment(chain: _Chain, oracle: NoisyOracle, rng: np.random.Generator, beta: float, steps: int,
                 cache: bool, record: RunRecord, record_every: int, step0: int = 0,
                 sample_spec=None, samples=None, filled: int = 0) -> int:
    """Run ``steps`` proposals in blocks of ``record_every`` and append one row per block.

    ``sample_spec`` is ``(burn_in, thinning)`` counted from ``step0 = 0``.
    Returns the number of sample rows filled.
    """
    n = chain.x.size
    reads = 1 if cache else 2
    done = 0
    while done < steps:
        m = min(record_every, steps - done)
        sites = rng.integers(0, n, size=m)
        u = rng.random(m)
        fac = oracle.noise_factors(m * reads)
        out, first, stride = _NO_SAMPLES, 0, 1
        if sample_spec is not None and samples is not None:
            burn, thin = sample_spec
            g0 = step0 + done
            if g0 + m > burn:
                first = max(0, burn - g0)
                off = (g0 + first - burn) % thin
                if off:
                    first += thin - off
                count = 0 if first >= m else (m - 1 - first) // thin + 1
                count = min(count, len(samples) - filled)
                out = samples[filled:filled + count]
                stride = thin
        chain.advance(beta, sites, u, fac, cache, out, first, stride)
        filled += len(out)
        done += m
        record.append(step0 + done, beta * chain.read, beta * chain.energy, chain.abs_mag(), oracle.eval_count)
    return filled


def metropolis_chain(oracle: NoisyOracle, cfg: McmcConfig, init=None):
    """Single-spin-flip Metropolis under noisy reads.

    Proposals flip one uniformly chosen spin; acceptance is
    ``min(1, exp(-beta * (read(x') - read(x))))``. Returns
    ``(samples, record)``. ``samples`` has shape ``(cfg.n_samples, N)``
    (empty if ``keep_samples`` is false): the state after step ``t`` is
    stored for ``t >= burn_in`` with ``(t - burn_in) % thinning == 0``.
    ``record.meta`` carries the acceptance count and the final state.
    """
    h = oracle.hamiltonian
    x = _initial_spins(h, init, cfg.seed)
    chain = _Chain(h, x)
    cache = cfg.cache_current_energy
    if cache:
        chain.fstate[1] = chain.energy * oracle.noise_factors(1)[0]
    n = h.n_spins
    if cfg.keep_samples:
        if cfg.n_samples * n > MAX_STORED_SPINS:
            raise ValueError(f"{cfg.n_samples} samples of {n} spins is too many; raise thinning or set keep_samples=False")
        samples = np.empty((cfg.n_samples, n), dtype=np.int8)
    else:
        samples = None
    record = RunRecord(meta={"solver": "metropolis", "beta": cfg.beta, "cache_current_energy": cache})
    rng = rngmod.stream(cfg.seed, rngmod.SAMPLER)
    every = cfg.record_every or _default_record_every(n)
    filled = _run_segment(chain, oracle, rng, cfg.beta, cfg.steps, cache, record, every,
                          sample_spec=(cfg.burn_in, cfg.thinning), samples=samples)
    if samples is not None:
        assert filled == len(samples)
    record.params = chain.x.copy()
    record.meta.update(accepted=chain.accepted, final_state=chain.x.copy(), final_energy=chain.energy)
    return (samples if samples is not None else np.zeros((0, n), dtype=np.int8)), record


def averaged_metropolis(oracle: NoisyOracle, cfg: McmcConfig, init=None):
    """Metropolis where every read is a k-average.

    The averaging depth is the oracle's ``averaging_k``, so evaluation
    accounting already charges k per read. With k = 1 this is exactly
    :func:`metropolis_chain`.
    """
    samples, record = metropolis_chain(oracle, cfg, init)
    record.meta["solver"] = "averaged_metropolis"
    record.meta["averaging_k"] = oracle.averaging_k
    return samples, record


@dataclass
class AnnealResult:
    best: SpinConfig
    best_read: float
    best_energy: float
    record: RunRecord


def simulated_annealing(oracle: NoisyOracle, schedule, init=None, seed: int = 0,
                        cache_current_energy: bool = True, record_every: int | None = None) -> AnnealResult:
    """Metropolis segments at a non-decreasing sequence of inverse temperatures.

    ``schedule`` is a list of ``(beta, steps)``. The returned configuration
    is the one with the lowest noisy read seen at the end of any proposal
    block, so ``record_every`` sets how often candidates are checked.
    """
    schedule = [(float(b), int(s)) for b, s in schedule]
    if not schedule:
        raise ValueError("empty annealing schedule")
    betas = [b for b, _ in schedule]
    if any(b2 < b1 for b1, b2 in zip(betas, betas[1:])):
        raise ValueError("annealing betas must be non-decreasing")
    if any(s < 1 for _, s in schedule):
        raise ValueError("every stage needs at least one step")
    h = oracle.hamiltonian
    chain = _Chain(h, _initial_spins(h, init, seed))
    if cache_current_energy:
        chain.fstate[1] = chain.energy * oracle.noise_factors(1)[0]
    rng = rngmod.stream(seed, rngmod.SAMPLER)
    every = record_every or _default_record_every(h.n_spins)
    record = RunRecord(meta={"solver": "simulated_annealing"})
    step0 = 0
    for beta, steps in schedule:
        _run_segment(chain, oracle, rng, beta, steps, cache_current_energy, record, every, step0=step0)
        step0 += steps
    record.params = chain.x.copy()
    best = SpinConfig(chain.best, h.spin_shape)
    return AnnealResult(best, float(chain.fstate[2]), h.energy(chain.best), record)


def geometric_schedule(beta_start: float, beta_end: float, stages: int, steps_per_stage: int):
    return [(float(b), steps_per_stage) for b in np.geomspace(beta_start, beta_end, stages)]


@dataclass(frozen=True)
class PtConfig:
    replicas: int = 30
    t_min: float = 0.33
    t_max: float = 2.0
    temperatures: tuple | None = None
    swap_interval: int = 4000
    steps: int = 400_000
    seed: int = 0
    cache_current_energy: bool = False
    tail_fraction: float = 0.2

    def __post_init__(self):
        temps = self.ladder()
        if len(temps) < 2:
            raise ValueError("parallel tempering needs at least two replicas")
        if np.any(np.diff(temps) < 0) or np.any(temps <= 0):
            raise ValueError("temperature ladder must be positive and increasing")
        if self.temperatures is None and not self.t_min < self.t_max:
            raise ValueError("need t_min < t_max")
        if self.swap_interval < 1 or self.steps < self.swap_interval:
            raise ValueError("need 1 <= swap_interval <= steps")
        if not 0 < self.tail_fraction <= 1:
            raise ValueError("tail_fraction must lie in (0, 1]")

    def ladder(self) -> np.ndarray:
        if self.temperatures is not None:
            return np.asarray(self.temperatures, dtype=np.float64)
        return np.geomspace(self.t_min, self.t_max, self.replicas)


@dataclass
class PtResult:
    temperatures: np.ndarray
    final_abs_mag: np.ndarray
    tail_abs_mag: np.ndarray
    swap_log: list = field(default_factory=list)
    records: list = field(default_factory=list)

    @property
    def swap_acceptance(self) -> np.ndarray:
        """Acceptance rate of swaps between ladder slots i and i+1."""
        R = len(self.temperatures)
        att = np.zeros(R - 1)
        acc = np.zeros(R - 1)
        for i, _, ok, _ in self.swap_log:
            att[i] += 1
            acc[i] += ok
        return np.divide(acc, att, out=np.zeros_like(acc), where=att > 0)

    def swap_rows(self):
        return [(i, j, int(ok), step) for i, j, ok, step in self.swap_log]


def parallel_tempering(oracle_factory, cfg: PtConfig) -> PtResult:
    """Replica exchange over a temperature ladder with noisy swap decisions.

    ``oracle_factory(r)`` must return a fresh oracle for ladder slot ``r``;
    all slots should share the Hamiltonian and noise level but use distinct
    seeds. Every ``swap_interval`` proposals, adjacent slots (i, i+1) are
    offered an exchange accepted with probability
    ``min(1, exp((beta_i - beta_j) (read_i - read_j)))``. Without caching,
    both reads are fresh measurements charged to the slots' oracles.
    """
    temps = cfg.ladder()
    betas = 1.0 / temps
    R = len(temps)
    oracles = [oracle_factory(r) for r in range(R)]
    h = oracles[0].hamiltonian
    cache = cfg.cache_current_energy
    init_rng = rngmod.stream(cfg.seed, rngmod.INIT)
    chains = [_Chain(h, random_spins(h.n_spins, init_rng)) for _ in range(R)]
    if cache:
        for c, o in zip(chains, oracles):
            c.fstate[1] = c.energy * o.noise_factors(1)[0]
    rngs = [rngmod.stream(cfg.seed, rngmod.SAMPLER, r) for r in range(R)]
    swap_rng = rngmod.stream(cfg.seed, rngmod.SWAP)
    records = [RunRecord(meta={"solver": "parallel_tempering", "temperature": float(t)}) for t in temps]
    swap_log = []
    done = 0
    while done < cfg.steps:
        m = min(cfg.swap_interval, cfg.steps - done)
        for r in range(R):
            _run_segment(chains[r], oracles[r], rngs[r], betas[r], m, cache, records[r], m, step0=done)
        done += m
        if done % cfg.swap_interval:
            break
        for i in range(R - 1):
            a, b = chains[i], chains[i + 1]
            if cache:
                ra, rb = a.read, b.read
            else:
                ra = a.energy * oracles[i].noise_factors(1)[0]
                rb = b.energy * oracles[i + 1].noise_factors(1)[0]
            log_acc = (betas[i] - betas[i + 1]) * (ra - rb)
            u = swap_rng.random()
            ok = bool(log_acc >= 0 or u < np.exp(log_acc))
            if ok:
                a.fstate[1], b.fstate[1] = ra, rb
                a.swap_with(b)
            swap_log.append((i, i + 1, ok, done))
    final = np.array([c.abs_mag() for c in chains])
    tail = np.array([_tail_mean(rec.batch_abs_mag, cfg.tail_fraction) for rec in records])
    for rec, c in zip(records, chains):
        rec.params = c.x.copy()
    return PtResult(temps, final, tail, swap_log, records)


def _tail_mean(values, fraction: float) -> float:
    v = np.asarray(values, dtype=np.float64)
    k = max(1, int(round(len(v) * fraction)))
    return float(v[-k:].mean())


def continuous_metropolis(oracle: NoisyOracle, beta: float, steps: int, step_size: float = 0.5,
                          x0: float = 0.0, burn_in: int = 0, thinning: int = 1, seed: int = 0,
                          cache_current_energy: bool = True) -> np.ndarray:
    """Gaussian random-walk Metropolis on a scalar landscape (e.g. DoubleWell)."""
    if oracle.hamiltonian.discrete:
        raise UnsupportedError("continuous_metropolis needs a continuous Hamiltonian")
    if not 0 <= burn_in < steps or thinning < 1:
        raise ValueError("need 0 <= burn_in < steps and thinning >= 1")
    rng = rngmod.stream(seed, rngmod.SAMPLER)
    energy = oracle.hamiltonian.energies
    reads = 1 if cache_current_energy else 2
    x = float(x0)
    e = float(energy(np.array([x]))[0])
    cur = e * oracle.noise_factors(1)[0] if cache_current_energy else e
    out = []
    block = 4096
    for start in range(0, steps, block):
        m = min(block, steps - start)
        jumps = step_size * rng.standard_normal(m)
        u = rng.random(m)
        fac = oracle.noise_factors(m * reads).reshape(m, reads)
        for t in range(m):
            if not cache_current_energy:
                cur = e * fac[t, 0]
            y = x + float(jumps[t])
            e_new = float(energy(np.array([y]))[0])
            new = e_new * fac[t, -1]
            d = new - cur
            if d <= 0 or u[t] < np.exp(-beta * d):
                x, e, cur = y, e_new, new
            g = start + t
            if g >= burn_in and (g - burn_in) % thinning == 0:
                out.append(x)
    return np.asarray(out)
