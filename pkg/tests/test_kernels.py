"""Both kernel backends against each other and against a direct re-implementation."""

import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from brainising import Chain1D, CurieWeiss, DenseCoupling, NearestNeighbor2D, kernels
from brainising import _pykernels
from brainising.mcmc import _Chain

try:
    from brainising import _ckernels
except ImportError:
    _ckernels = None

needs_ext = pytest.mark.skipif(_ckernels is None, reason="compiled kernel not built")


def _dense(n, seed):
    rng = np.random.default_rng(seed)
    J = rng.normal(size=(n, n))
    J = (J + J.T) / 2
    np.fill_diagonal(J, 0.0)
    return DenseCoupling(J, rng.normal(size=n))


MODELS = {
    "cw": lambda: CurieWeiss(12, 1.0),
    "nn2d": lambda: NearestNeighbor2D(4, 0.8),
    "nn2d_open": lambda: NearestNeighbor2D(3, 1.0, "open"),
    "chain": lambda: Chain1D(7, 1.2),
    "dense": lambda: _dense(9, 0),
}


def _run(mod, h, x0, steps, beta, cache, seed, first=0, stride=1):
    rng = np.random.default_rng(seed)
    n = h.n_spins
    sites = rng.integers(0, n, steps)
    u = rng.random(steps)
    fac = 1.0 + 0.1 * rng.standard_normal(2 * steps)
    c = _Chain(h, x0)
    c.fstate[1] = c.energy * (1.0 + 0.1 * rng.standard_normal())
    rows = 0 if first >= steps else (steps - 1 - first) // stride + 1
    samples = np.zeros((rows, n), dtype=np.int8)
    acc = mod.run_chain(c.model, c.x, c.istate, c.fstate, float(c.J), beta, c.nbr, c.Jmat, c.hvec, c.local,
                        sites, u, fac, cache, samples, first, stride)
    return acc, c, samples


def _reference(h, x0, steps, beta, cache, seed):
    """Straight Metropolis on full energy recomputation, same random numbers."""
    rng = np.random.default_rng(seed)
    n = h.n_spins
    sites = rng.integers(0, n, steps)
    u = rng.random(steps)
    fac = 1.0 + 0.1 * rng.standard_normal(2 * steps)
    x = np.array(x0, dtype=np.int8)
    e = h.energy(x)
    cur = e * (1.0 + 0.1 * rng.standard_normal())
    r = acc = 0
    for t in range(steps):
        if not cache:
            cur = e * fac[r]
            r += 1
        y = x.copy()
        y[sites[t]] *= -1
        e_new = h.energy(y)
        new = e_new * fac[r]
        r += 1
        d = new - cur
        if d <= 0 or u[t] < np.exp(-beta * d):
            x, e, cur = y, e_new, new
            acc += 1
    return acc, x, e


@pytest.mark.parametrize("name", sorted(MODELS))
@pytest.mark.parametrize("cache", [False, True])
def test_python_kernel_matches_reference(name, cache):
    h = MODELS[name]()
    x0 = np.where(np.random.default_rng(1).random(h.n_spins) < 0.5, -1, 1)
    acc, c, _ = _run(_pykernels, h, x0, 3000, 0.7, cache, seed=5)
    racc, rx, re = _reference(h, x0, 3000, 0.7, cache, seed=5)
    assert acc == racc
    np.testing.assert_array_equal(c.x, rx)
    assert c.energy == pytest.approx(re, abs=1e-9)


@needs_ext
@pytest.mark.parametrize("name", sorted(MODELS))
@pytest.mark.parametrize("cache", [False, True])
def test_backends_bit_identical(name, cache):
    h = MODELS[name]()
    x0 = np.ones(h.n_spins, dtype=np.int8)
    a = _run(_pykernels, h, x0, 5000, 1.1, cache, seed=3, first=100, stride=7)
    b = _run(_ckernels, h, x0, 5000, 1.1, cache, seed=3, first=100, stride=7)
    assert a[0] == b[0]
    np.testing.assert_array_equal(a[1].x, b[1].x)
    np.testing.assert_array_equal(a[1].istate, b[1].istate)
    assert a[1].fstate[0] == b[1].fstate[0] and a[1].fstate[1] == b[1].fstate[1]
    np.testing.assert_array_equal(a[2], b[2])
    np.testing.assert_array_equal(a[1].local, b[1].local)


@needs_ext
@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31), st.floats(0.05, 5.0), st.booleans(), st.integers(0, 40), st.integers(1, 9))
def test_backends_agree_property(seed, beta, cache, first, stride):
    h = CurieWeiss(10)
    x0 = np.where(np.random.default_rng(seed).random(10) < 0.5, -1, 1)
    a = _run(_pykernels, h, x0, 300, beta, cache, seed, first, stride)
    b = _run(_ckernels, h, x0, 300, beta, cache, seed, first, stride)
    assert a[0] == b[0]
    np.testing.assert_array_equal(a[2], b[2])


def test_sample_rows_follow_first_and_stride():
    h = CurieWeiss(6)
    x0 = np.ones(6, dtype=np.int8)
    _, _, s = _run(_pykernels, h, x0, 50, 0.0, False, 0, first=10, stride=4)
    assert s.shape == (10, 6)
    assert np.all(np.abs(s) == 1)


def test_env_flag_forces_python():
    code = "from brainising import kernels; print(kernels.BACKEND)"
    env = {**os.environ, "BRAINISING_PURE_PYTHON": "1"}
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


def test_backend_name():
    assert kernels.BACKEND == ("cython" if _ckernels is not None else "python")
