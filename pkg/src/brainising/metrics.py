"""Evaluation metrics over finished runs: ESS, fidelity, time to solution,
critical temperature, and curve fits."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from .records import RunRecord, table_csv

# Published reference values, for display beside regenerated numbers.
GOLDEN = {
    "noise_samples_quadratic": (339.9, 416.7, 1190.5),
    "scaling_noiseless": (63.6, 0.94),
    "scaling_noisy_exponent": 1.55,
    "tc_curie_weiss": 0.87,
    "tc_nearest_neighbor_2d": 2.2,
    "fidelity_3pct": {"mcmc": 0.51, "brain": 0.98},
    "acceleration_3pct": 192.0,
    "ess_brain": 0.005,
    "ess_best_mcmc": 5.71e-4,
}


def log_weights(log_q, energies, beta) -> np.ndarray:
    A = -beta * np.asarray(energies, dtype=np.float64) - np.asarray(log_q, dtype=np.float64)
    if not np.all(np.isfinite(A)):
        raise FloatingPointError("non-finite importance log-weights")
    return A


def ess_from_log_weights(A) -> float:
    """Normalized effective sample size (sum w)^2 / (n sum w^2), w = exp(A)."""
    A = np.asarray(A, dtype=np.float64)
    if A.size == 0:
        raise ValueError("need at least one sample")
    if not np.all(np.isfinite(A)):
        raise FloatingPointError("non-finite importance log-weights")
    # centring first makes a shift cancel before any rounding-sensitive step
    A = A - A.max()
    log_ess = 2 * logsumexp(A) - logsumexp(2 * A)
    return float(min(1.0, np.exp(log_ess) / A.size))


def ess(log_q, energies, beta) -> float:
    """Importance-sampling ESS of samples from q against exp(-beta E), divided by n."""
    return ess_from_log_weights(log_weights(log_q, energies, beta))


def integrated_autocorrelation_time(series, c: float = 5.0) -> float:
    """Integrated autocorrelation time with Sokal's self-consistent window."""
    x = np.asarray(series, dtype=np.float64)
    n = x.size
    if n < 2:
        return 1.0
    x = x - x.mean()
    var = x @ x
    if var == 0:
        return float(n)
    f = np.fft.rfft(x, 2 * n)
    acf = np.fft.irfft(f * np.conj(f))[:n] / var
    tau = 2 * np.cumsum(acf) - 1
    window = np.arange(n) >= c * tau
    m = int(np.argmax(window)) if window.any() else n - 1
    return float(max(1.0, tau[m]))


def chain_ess(series) -> float:
    """Autocorrelation ESS of a Markov chain observable, divided by its length."""
    n = len(series)
    return min(1.0, 1.0 / integrated_autocorrelation_time(series)) if n > 1 else 1.0


def fidelity(abs_magnetization: float) -> float:
    """Fraction of the ferromagnetic optimum |M| = 1 that was reached."""
    return float(np.clip(abs(abs_magnetization), 0.0, 1.0))


def smoothed(values, window: int = 10) -> np.ndarray:
    """Trailing moving average; the first rows average what is available."""
    v = np.asarray(values, dtype=np.float64)
    c = np.concatenate([[0.0], np.cumsum(v)])
    idx = np.arange(1, v.size + 1)
    lo = np.maximum(0, idx - window)
    return (c[idx] - c[lo]) / (idx - lo)


def time_to_solution(record: RunRecord, target_abs_mag: float, window: int = 10):
    """First cumulative eval count where smoothed |M| reaches the target, else None."""
    mags = record.column("batch_abs_mag")
    if mags.size == 0:
        return None
    hit = np.flatnonzero(smoothed(mags, window) >= target_abs_mag)
    return int(record.column("cum_evals")[hit[0]]) if hit.size else None


def converged_abs_mag(record: RunRecord, tail_fraction: float = 0.2) -> float:
    """Mean |M| over the final ``tail_fraction`` of a trace."""
    m = record.column("batch_abs_mag")
    k = max(1, int(round(m.size * tail_fraction)))
    return float(m[-k:].mean())


def estimate_tc(temperatures, abs_mags) -> float:
    """Temperature of steepest |M| change, by central differences on the grid."""
    T = np.asarray(temperatures, dtype=np.float64)
    M = np.asarray(abs_mags, dtype=np.float64)
    if T.size < 3 or T.shape != M.shape:
        raise ValueError("need at least three matching (T, |M|) points")
    order = np.argsort(T)
    T, M = T[order], M[order]
    slope = np.abs(np.gradient(M, T))
    return float(T[int(np.argmax(slope))])


def fit_quadratic(x, y):
    """Least-squares (a, b, c) for y = a x^2 + b x + c."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.size < 3 or np.unique(x).size < 3:
        raise ValueError("quadratic fit needs at least three distinct x values")
    a, b, c = np.polyfit(x, y, 2)
    return float(a), float(b), float(c)


def fit_power(n, y):
    """Least-squares fit of y = c n^p in log-log space; returns (c, p)."""
    n = np.asarray(n, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if n.size < 2 or np.unique(n).size < 2:
        raise ValueError("power-law fit needs at least two distinct sizes")
    if np.any(n <= 0) or np.any(y <= 0):
        raise ValueError("power-law fit needs positive data")
    p, logc = np.polyfit(np.log(n), np.log(y), 1)
    return float(np.exp(logc)), float(p)


@dataclass
class SweepTable:
    """Sweep results aggregated over seeds: one row per (sigma, T)."""

    rows: list = field(default_factory=list)  # (T, sigma, mean, std, seeds, evals)

    @classmethod
    def from_points(cls, points):
        groups: dict = {}
        for p in points:
            groups.setdefault((p.sigma, p.temperature), []).append(p)
        rows = []
        for (sigma, T), pts in sorted(groups.items()):
            mags = np.array([p.abs_mag for p in pts])
            rows.append((T, sigma, float(mags.mean()), float(mags.std()), len(pts),
                         int(np.sum([p.evals for p in pts]))))
        return cls(rows)

    def sigmas(self):
        return sorted({r[1] for r in self.rows})

    def curve(self, sigma):
        sel = sorted((r for r in self.rows if r[1] == sigma), key=lambda r: r[0])
        return np.array([r[0] for r in sel]), np.array([r[2] for r in sel])

    def tc(self, sigma) -> float:
        return estimate_tc(*self.curve(sigma))

    def to_csv(self, path=None) -> str:
        return table_csv(("temperature", "sigma", "abs_mag_mean", "abs_mag_std", "n_seeds", "cum_evals"),
                         self.rows, path)
