"""Simulated analog Ising machine readout.

A read of configuration x returns E(x) * (1 + eta_bar), where eta_bar is the
mean of ``averaging_k`` iid N(0, sigma^2) draws. The noise is purely
relative, so E(x) = 0 always reads back as exactly 0.
"""

from __future__ import annotations

import numpy as np

from . import rng as rngmod
from .hamiltonians import Hamiltonian


class NoisyOracle:
    """Noisy energy oracle with a monotone evaluation counter.

    Every inner Gaussian draw counts as one evaluation, so a read with
    ``averaging_k = k`` costs k. Single-owner: not safe to share between
    threads without external locking.
    """

    def __init__(self, hamiltonian: Hamiltonian, sigma: float = 0.0, seed: int = 0, averaging_k: int = 1):
        if sigma < 0:
            raise ValueError(f"sigma must be >= 0, got {sigma}")
        if averaging_k < 1 or int(averaging_k) != averaging_k:
            raise ValueError(f"averaging_k must be a positive integer, got {averaging_k}")
        self.hamiltonian = hamiltonian
        self.sigma = float(sigma)
        self.seed = int(seed)
        self.averaging_k = int(averaging_k)
        self._rng = rngmod.stream(self.seed, rngmod.ORACLE)
        self._count = 0

    @property
    def eval_count(self) -> int:
        return self._count

    def noise_factors(self, n: int) -> np.ndarray:
        """Draw the multiplicative factors (1 + eta_bar) for ``n`` reads.

        Charged to the counter exactly as ``n`` calls to :meth:`measure`.
        Compiled solver kernels consume these directly.
        """
        k = self.averaging_k
        eta = self._rng.standard_normal((n, k))
        self._count += n * k
        if k == 1:
            return 1.0 + self.sigma * eta[:, 0]
        return 1.0 + self.sigma * eta.mean(axis=1)

    def measure(self, x) -> float:
        return float(self.hamiltonian.energy(x) * self.noise_factors(1)[0])

    def measure_batch(self, X) -> np.ndarray:
        """Noisy energies for every row of ``X`` (one read per row)."""
        e = self.hamiltonian.energies(X)
        return e * self.noise_factors(len(e))

    def fork(self, seed: int) -> NoisyOracle:
        """Fresh oracle on the same Hamiltonian and noise level, counter at 0."""
        return NoisyOracle(self.hamiltonian, self.sigma, seed, self.averaging_k)

    def __repr__(self):
        return (
            f"NoisyOracle({type(self.hamiltonian).__name__}, sigma={self.sigma}, "
            f"k={self.averaging_k}, evals={self._count})"
        )
