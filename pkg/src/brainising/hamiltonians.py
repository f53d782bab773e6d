"""Noiseless energy models, spin configurations and exact enumeration.

Spins are always encoded as ``int8`` arrays of -1/+1. Batched routines take
an ``(S, N)`` array and return one energy per row.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from .errors import CapacityError, DimensionError, UnsupportedError

MAX_ENUMERATION_SPINS = 20


@dataclass(frozen=True)
class SpinConfig:
    """A vector of +/-1 spins plus the lattice shape it lives on."""

    spins: np.ndarray
    shape: str = "chain"

    def __post_init__(self):
        s = np.asarray(self.spins)
        if s.ndim != 1:
            raise DimensionError(f"spins must be one-dimensional, got shape {s.shape}")
        if not np.all((s == 1) | (s == -1)):
            raise ValueError("every spin must be exactly -1 or +1")
        if self.shape not in ("chain", "square"):
            raise ValueError(f"unknown shape {self.shape!r}")
        if self.shape == "square" and math.isqrt(s.size) ** 2 != s.size:
            raise DimensionError(f"square shape needs N = L^2, got N={s.size}")
        s = s.astype(np.int8)
        s.setflags(write=False)
        object.__setattr__(self, "spins", s)

    @classmethod
    def aligned(cls, n: int, sign: int = 1, shape: str = "chain") -> SpinConfig:
        return cls(np.full(n, sign, dtype=np.int8), shape)

    @classmethod
    def random(cls, n: int, rng: np.random.Generator, shape: str = "chain") -> SpinConfig:
        return cls(random_spins(n, rng), shape)

    @property
    def n(self) -> int:
        return self.spins.size

    @property
    def side(self) -> int:
        if self.shape != "square":
            raise AttributeError("only square configurations have a side length")
        return math.isqrt(self.n)

    def grid(self) -> np.ndarray:
        return self.spins.reshape(self.side, self.side)

    def __neg__(self) -> SpinConfig:
        return SpinConfig(-self.spins, self.shape)

    def __len__(self) -> int:
        return self.n


def random_spins(n: int, rng: np.random.Generator) -> np.ndarray:
    return np.where(rng.random(n) < 0.5, -1, 1).astype(np.int8)


def as_spins(x) -> np.ndarray:
    """Unwrap a SpinConfig (or pass an array through) as an int8 array."""
    if isinstance(x, SpinConfig):
        return x.spins
    return np.asarray(x, dtype=np.int8)


def magnetization(x) -> float | np.ndarray:
    """Mean spin (1/N) sum x_i. Accepts one configuration or an (S, N) batch."""
    s = as_spins(x)
    return s.mean(axis=-1, dtype=np.float64) if s.ndim > 1 else float(s.mean(dtype=np.float64))


class Hamiltonian:
    """Base class. Subclasses implement ``energies`` on an (S, N) batch."""

    discrete = True
    n_spins: int

    def energy(self, x) -> float:
        s = as_spins(x)
        if s.ndim != 1:
            raise DimensionError("energy() takes a single configuration; use energies() for batches")
        return float(self.energies(s[None, :])[0])

    def energies(self, X) -> np.ndarray:
        raise NotImplementedError

    def _check(self, X) -> np.ndarray:
        X = as_spins(X)
        if X.ndim == 1:
            X = X[None, :]
        if X.shape[1] != self.n_spins:
            raise DimensionError(
                f"{type(self).__name__} has {self.n_spins} spins, got configuration of length {X.shape[1]}"
            )
        return X

    @property
    def spin_shape(self) -> str:
        return "chain"


@dataclass(frozen=True)
class CurieWeiss(Hamiltonian):
    """All-to-all ferromagnet, H = -(J/2N) sum_{i != j} s_i s_j.

    Evaluated in O(N) through sum_{i != j} s_i s_j = (sum s)^2 - N.
    """

    n: int
    J: float = 1.0
    square: bool = False

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.J <= 0:
            raise ValueError("CurieWeiss benchmark requires J > 0")
        if self.square and math.isqrt(self.n) ** 2 != self.n:
            raise DimensionError(f"square CurieWeiss needs N = L^2, got {self.n}")

    @property
    def n_spins(self) -> int:
        return self.n

    @property
    def spin_shape(self) -> str:
        return "square" if self.square else "chain"

    @property
    def coefficient(self) -> float:
        return -(self.J / (2 * self.n))

    def energies(self, X) -> np.ndarray:
        X = self._check(X)
        s = X.sum(axis=1, dtype=np.int64)
        return self.coefficient * (s * s - self.n)

    def energy_from_sum(self, s: int) -> float:
        return self.coefficient * (s * s - self.n)

    def ground_energy(self) -> float:
        return -self.J * (self.n - 1) / 2


def _lattice_bonds_1d(n: int, boundary: str) -> np.ndarray:
    i = np.arange(n - 1)
    bonds = np.stack([i, i + 1], axis=1)
    if boundary == "periodic":
        bonds = np.vstack([bonds, [[n - 1, 0]]])
    return bonds


def _lattice_bonds_2d(L: int, boundary: str) -> np.ndarray:
    idx = np.arange(L * L).reshape(L, L)
    if boundary == "periodic":
        right = np.stack([idx.ravel(), np.roll(idx, -1, axis=1).ravel()], axis=1)
        down = np.stack([idx.ravel(), np.roll(idx, -1, axis=0).ravel()], axis=1)
    else:
        right = np.stack([idx[:, :-1].ravel(), idx[:, 1:].ravel()], axis=1)
        down = np.stack([idx[:-1, :].ravel(), idx[1:, :].ravel()], axis=1)
    return np.vstack([right, down])


class _BondModel(Hamiltonian):
    """Uniform-coupling model on an explicit bond list: H = -J sum_bonds s_i s_j."""

    J: float
    bonds: np.ndarray

    def energies(self, X) -> np.ndarray:
        X = self._check(X)
        b = self.bonds
        total = (X[:, b[:, 0]].astype(np.int64) * X[:, b[:, 1]]).sum(axis=1)
        return (-self.J) * total

    def neighbor_table(self) -> np.ndarray:
        """(N, max_degree) int64 table of neighbours, padded with -1."""
        n = self.n_spins
        deg = np.bincount(self.bonds.ravel(), minlength=n)
        table = np.full((n, max(int(deg.max()), 1)), -1, dtype=np.int64)
        fill = np.zeros(n, dtype=np.int64)
        for i, j in self.bonds:
            table[i, fill[i]] = j
            fill[i] += 1
            table[j, fill[j]] = i
            fill[j] += 1
        return table


def _check_boundary(boundary: str, size: int, what: str):
    if boundary not in ("open", "periodic"):
        raise ValueError(f"boundary must be 'open' or 'periodic', got {boundary!r}")
    if boundary == "periodic" and size < 3:
        raise ValueError(f"periodic {what} needs size >= 3 (size {size} would double-count bonds)")


@dataclass(frozen=True)
class NearestNeighbor2D(_BondModel):
    """Square-lattice ferromagnet; each bond (right and down neighbour) counted once."""

    L: int
    J: float = 1.0
    boundary: str = "periodic"
    bonds: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.J <= 0:
            raise ValueError("NearestNeighbor2D benchmark requires J > 0")
        _check_boundary(self.boundary, self.L, "lattice")
        object.__setattr__(self, "bonds", _lattice_bonds_2d(self.L, self.boundary))

    @property
    def n_spins(self) -> int:
        return self.L * self.L

    @property
    def spin_shape(self) -> str:
        return "square"

    def ground_energy(self) -> float:
        return -self.J * len(self.bonds)


@dataclass(frozen=True)
class Chain1D(_BondModel):
    n: int
    J: float = 1.0
    boundary: str = "open"
    bonds: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("a chain needs at least two spins")
        _check_boundary(self.boundary, self.n, "chain")
        object.__setattr__(self, "bonds", _lattice_bonds_1d(self.n, self.boundary))

    @property
    def n_spins(self) -> int:
        return self.n


@dataclass(frozen=True)
class DenseCoupling(Hamiltonian):
    """General Ising model H = -sum_{i<j} J_ij s_i s_j - sum_i h_i s_i."""

    couplings: np.ndarray
    fields: np.ndarray | None = None

    def __post_init__(self):
        J = np.array(self.couplings, dtype=np.float64)
        if J.ndim != 2 or J.shape[0] != J.shape[1]:
            raise DimensionError(f"coupling matrix must be square, got {J.shape}")
        if not np.allclose(J, J.T, rtol=0, atol=0):
            raise ValueError("coupling matrix must be symmetric")
        if np.any(np.diag(J) != 0):
            raise ValueError("coupling matrix must have a zero diagonal")
        h = np.zeros(J.shape[0]) if self.fields is None else np.array(self.fields, dtype=np.float64)
        if h.shape != (J.shape[0],):
            raise DimensionError(f"field vector must have length {J.shape[0]}, got {h.shape}")
        J.setflags(write=False)
        h.setflags(write=False)
        object.__setattr__(self, "couplings", J)
        object.__setattr__(self, "fields", h)

    @property
    def n_spins(self) -> int:
        return self.couplings.shape[0]

    def energies(self, X) -> np.ndarray:
        X = self._check(X).astype(np.float64)
        return -0.5 * np.einsum("si,ij,sj->s", X, self.couplings, X) - X @ self.fields

    @classmethod
    def curie_weiss(cls, n: int, J: float = 1.0) -> DenseCoupling:
        """Dense couplings equivalent to ``CurieWeiss(n, J)`` (J_ij = J/N)."""
        M = np.full((n, n), J / n)
        np.fill_diagonal(M, 0.0)
        return cls(M)


@dataclass(frozen=True)
class DoubleWell(Hamiltonian):
    """Continuous 1-D landscape E(x) = A (x^2 - x0^2)^2 + B x."""

    A: float = 1.0
    B: float = 0.2
    x0: float = 1.0

    discrete = False
    n_spins = None  # type: ignore[assignment]

    def __post_init__(self):
        if self.A <= 0 or self.x0 <= 0:
            raise ValueError("DoubleWell needs A > 0 and x0 > 0")

    def energy(self, x) -> float:
        if isinstance(x, SpinConfig) or np.ndim(x) != 0:
            raise DimensionError("DoubleWell takes a real scalar")
        return float(self.energies(np.asarray([x], dtype=np.float64))[0])

    def energies(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        return self.A * (X * X - self.x0**2) ** 2 + self.B * X

    def density_grid(self, beta: float, points: int = 4001, span: float = 3.0):
        """Boltzmann density on a uniform grid over [-span*x0, span*x0],
        normalised by the trapezoidal rule."""
        xs = np.linspace(-span * self.x0, span * self.x0, points)
        logw = -beta * self.energies(xs)
        w = np.exp(logw - logw.max())
        return xs, w / np.trapezoid(w, xs)


def energy(h: Hamiltonian, x) -> float:
    return h.energy(x)


@dataclass(frozen=True)
class ExactDistribution:
    """Boltzmann distribution over every configuration of a small system.

    Row k of ``states`` is the configuration whose bits (spin +1 = 1, first
    spin most significant) spell k; see :meth:`index_of`.
    """

    states: np.ndarray
    energies: np.ndarray
    probabilities: np.ndarray
    logZ: float
    beta: float

    @property
    def n(self) -> int:
        return self.states.shape[1]

    def index_of(self, X) -> np.ndarray:
        X = as_spins(X)
        bits = (X > 0).astype(np.int64)
        weights = 1 << np.arange(self.n - 1, -1, -1, dtype=np.int64)
        return bits @ weights

    def histogram(self, X) -> np.ndarray:
        """Empirical frequencies of the configurations in batch ``X``."""
        idx = self.index_of(X)
        return np.bincount(idx, minlength=len(self.probabilities)) / len(idx)

    def total_variation(self, freqs: np.ndarray) -> float:
        return 0.5 * float(np.abs(np.asarray(freqs) - self.probabilities).sum())


def all_states(n: int) -> np.ndarray:
    return np.array(list(itertools.product((-1, 1), repeat=n)), dtype=np.int8).reshape(-1, n)


def enumerate_boltzmann(h: Hamiltonian, beta: float) -> ExactDistribution:
    if not h.discrete:
        raise UnsupportedError(f"{type(h).__name__} is continuous; use density_grid instead")
    n = h.n_spins
    if n > MAX_ENUMERATION_SPINS:
        raise CapacityError(f"exact enumeration limited to {MAX_ENUMERATION_SPINS} spins, got {n}")
    if beta < 0:
        raise ValueError("beta must be non-negative")
    states = all_states(n)
    E = h.energies(states)
    logw = -beta * E
    logZ = float(logsumexp(logw))
    p = np.exp(logw - logZ)
    p /= p.sum()
    return ExactDistribution(states, E, p, logZ, float(beta))
