"""Variational sampling families: factorized Bernoulli over spins and a
two-component 1-D Gaussian mixture.

Both expose exact log-densities and per-sample score vectors. Instances are
immutable; training produces new instances.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import log_softmax, logsumexp, softmax

from .errors import DimensionError
from .hamiltonians import as_spins

DEFAULT_CLIP = 1e-4
# Rows drawn per chunk when sampling large fields; keeps the uniform buffer small.
_SAMPLE_CHUNK = 1 << 22


@dataclass(frozen=True)
class BernoulliField:
    """Independent spins, spin j is +1 with probability ``m[j]``.

    ``m`` is clipped to [clip, 1 - clip] on construction, so log-densities
    and scores are always finite.
    """

    m: np.ndarray
    clip: float = DEFAULT_CLIP

    def __post_init__(self):
        if not 0 < self.clip < 0.5:
            raise ValueError("clip must lie in (0, 0.5)")
        m = np.clip(np.asarray(self.m, dtype=np.float64), self.clip, 1 - self.clip)
        if m.ndim != 1:
            raise DimensionError("m must be a vector")
        if not np.all(np.isfinite(m)):
            raise FloatingPointError("non-finite Bernoulli parameters")
        m.setflags(write=False)
        object.__setattr__(self, "m", m)

    @classmethod
    def uniform(cls, n: int, clip: float = DEFAULT_CLIP) -> BernoulliField:
        return cls(np.full(n, 0.5), clip)

    @classmethod
    def from_logits(cls, theta, clip: float = DEFAULT_CLIP) -> BernoulliField:
        theta = np.asarray(theta, dtype=np.float64)
        return cls(1.0 / (1.0 + np.exp(-theta)), clip)

    @property
    def n(self) -> int:
        return self.m.size

    @property
    def logits(self) -> np.ndarray:
        return np.log(self.m) - np.log1p(-self.m)

    @property
    def logit_bound(self) -> float:
        return float(np.log(1 - self.clip) - np.log(self.clip))

    def mean_magnetization(self) -> float:
        return float(np.mean(2 * self.m - 1))

    def _check(self, X) -> np.ndarray:
        X = as_spins(X)
        if X.shape[-1] != self.n:
            raise DimensionError(f"field has {self.n} spins, configuration has {X.shape[-1]}")
        return X

    def sample(self, count: int, rng: np.random.Generator) -> np.ndarray:
        """Draw ``count`` iid configurations as an int8 array of shape (count, N)."""
        if count < 1:
            raise ValueError("count must be >= 1")
        out = np.empty((count, self.n), dtype=np.int8)
        m32 = self.m.astype(np.float32)
        rows = max(1, _SAMPLE_CHUNK // self.n)
        for start in range(0, count, rows):
            stop = min(count, start + rows)
            u = rng.random((stop - start, self.n), dtype=np.float32)
            np.less(u, m32, out=out[start:stop].view(np.bool_))
        out *= 2
        out -= 1
        return out

    def log_prob(self, X):
        X = self._check(X)
        lp = np.where(X > 0, np.log(self.m), np.log1p(-self.m)).sum(axis=-1)
        return float(lp) if np.ndim(lp) == 0 else lp

    def entropy(self) -> float:
        m = self.m
        return float(-(m * np.log(m) + (1 - m) * np.log1p(-m)).sum())

    def score(self, X) -> np.ndarray:
        """Gradient of log q(x) with respect to m, per configuration."""
        X = self._check(X)
        m = self.m
        return (X - (2 * m - 1)) / (2 * m * (1 - m))

    def entropy_gradient(self) -> np.ndarray:
        """Gradient of the negative entropy with respect to m."""
        return np.log(self.m) - np.log1p(-self.m)

    def logit_score(self, X) -> np.ndarray:
        """Gradient of log q(x) with respect to the logits log(m / (1 - m))."""
        X = self._check(X)
        return (X + 1) / 2 - self.m

    def logit_entropy_gradient(self) -> np.ndarray:
        m = self.m
        return m * (1 - m) * self.entropy_gradient()

    def to_row(self) -> list[float]:
        return [float(v) for v in self.m]


@dataclass(frozen=True)
class GaussianMixture1D:
    """Mixture of K=2 univariate Gaussians.

    Weights are carried as unconstrained logits and mapped through softmax,
    so they stay on the simplex under any update.
    """

    logits: np.ndarray
    means: np.ndarray
    stds: np.ndarray

    MIN_STD = 1e-6

    def __post_init__(self):
        arrs = []
        for name in ("logits", "means", "stds"):
            a = np.asarray(getattr(self, name), dtype=np.float64).copy()
            if a.shape != (2,):
                raise DimensionError(f"{name} must have length 2, got shape {a.shape}")
            arrs.append(a)
        arrs[2] = np.maximum(arrs[2], self.MIN_STD)
        if not np.all(np.isfinite(arrs[1])) or not np.all(np.isfinite(arrs[2])):
            raise FloatingPointError("non-finite mixture parameters")
        for name, a in zip(("logits", "means", "stds"), arrs):
            a.setflags(write=False)
            object.__setattr__(self, name, a)

    @classmethod
    def from_weights(cls, weights, means, stds) -> GaussianMixture1D:
        w = np.asarray(weights, dtype=np.float64)
        if np.any(w < 0) or abs(w.sum() - 1) > 1e-12:
            raise ValueError("weights must be non-negative and sum to 1")
        with np.errstate(divide="ignore"):
            return cls(np.log(w), means, stds)

    @property
    def weights(self) -> np.ndarray:
        return softmax(self.logits)

    @property
    def params(self) -> np.ndarray:
        """Flat parameter vector (logit_1, logit_2, mu_1, mu_2, sd_1, sd_2)."""
        return np.concatenate([self.logits, self.means, self.stds])

    @classmethod
    def from_params(cls, theta) -> GaussianMixture1D:
        theta = np.asarray(theta, dtype=np.float64)
        return cls(theta[0:2], theta[2:4], theta[4:6])

    def sample(self, count: int, rng: np.random.Generator) -> np.ndarray:
        if count < 1:
            raise ValueError("count must be >= 1")
        comp = (rng.random(count) >= self.weights[0]).astype(np.int64)
        return self.means[comp] + self.stds[comp] * rng.standard_normal(count)

    def _component_logpdf(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)[..., None]
        z = (x - self.means) / self.stds
        return -0.5 * z * z - np.log(self.stds) - 0.5 * np.log(2 * np.pi)

    def log_prob(self, x):
        lp = logsumexp(self._component_logpdf(x) + log_softmax(self.logits), axis=-1)
        return float(lp) if np.ndim(lp) == 0 else lp

    def responsibilities(self, x) -> np.ndarray:
        joint = self._component_logpdf(x) + log_softmax(self.logits)
        return np.exp(joint - logsumexp(joint, axis=-1, keepdims=True))

    def score(self, x) -> np.ndarray:
        """d log q / d params for each x, columns ordered like :attr:`params`."""
        x = np.asarray(x, dtype=np.float64)
        r = self.responsibilities(x)
        d = x[..., None] - self.means
        s2 = self.stds**2
        d_logits = r - self.weights
        d_means = r * d / s2
        d_stds = r * (d * d / (s2 * self.stds) - 1 / self.stds)
        return np.concatenate([d_logits, d_means, d_stds], axis=-1)
