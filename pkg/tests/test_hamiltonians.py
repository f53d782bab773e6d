import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from brainising import (
    Chain1D,
    CurieWeiss,
    DenseCoupling,
    DoubleWell,
    NearestNeighbor2D,
    SpinConfig,
    energy,
    enumerate_boltzmann,
    magnetization,
)
from brainising.errors import CapacityError, DimensionError, UnsupportedError
from brainising.hamiltonians import all_states


def spins(n):
    return st.lists(st.sampled_from([-1, 1]), min_size=n, max_size=n).map(lambda v: np.array(v, dtype=np.int8))


# ---------------------------------------------------------------- energies

def test_cw_aligned():
    assert energy(CurieWeiss(4, 1.0), np.ones(4)) == pytest.approx(-1.5, abs=1e-15)


def test_cw_two_up_two_down():
    assert energy(CurieWeiss(4, 1.0), [1, 1, -1, -1]) == pytest.approx(0.5, abs=1e-15)


def test_cw_matches_pairwise_sum():
    rng = np.random.default_rng(0)
    n = 9
    h = CurieWeiss(n, 1.3)
    for _ in range(20):
        x = rng.choice([-1, 1], n)
        pair = sum(x[i] * x[j] for i in range(n) for j in range(n) if i != j)
        assert h.energy(x) == pytest.approx(-1.3 / (2 * n) * pair, abs=1e-12)


def test_cw_ground_energy():
    h = CurieWeiss(10, 2.0)
    assert h.energy(np.ones(10)) == pytest.approx(-2.0 * 9 / 2)


def test_nn2d_periodic_aligned():
    assert energy(NearestNeighbor2D(3, 1.0), np.ones(9)) == -18.0


def test_nn2d_open_aligned():
    # 2 * L * (L - 1) bonds
    assert NearestNeighbor2D(4, 1.0, "open").energy(np.ones(16)) == -24.0


def test_nn2d_checkerboard_is_highest():
    L = 4
    x = np.array([(-1) ** (i + j) for i in range(L) for j in range(L)])
    assert NearestNeighbor2D(L).energy(x) == 2 * L * L


def test_nn2d_rejects_periodic_l2():
    with pytest.raises(ValueError):
        NearestNeighbor2D(2, 1.0, "periodic")


def test_chain_open():
    assert Chain1D(6).energy(np.ones(6)) == -5.0
    assert Chain1D(6, boundary="periodic").energy(np.ones(6)) == -6.0


def test_double_well_minimum():
    assert energy(DoubleWell(A=1, B=0, x0=1), 1.0) == 0.0


def test_double_well_rejects_spins():
    with pytest.raises(DimensionError):
        DoubleWell().energy(np.ones(3))


def test_size_mismatch():
    with pytest.raises(DimensionError):
        CurieWeiss(4).energy(np.ones(5))
    with pytest.raises(DimensionError):
        NearestNeighbor2D(3).energies(np.ones((2, 8)))


def test_dense_rejects_asymmetric_and_diagonal():
    with pytest.raises(ValueError):
        DenseCoupling(np.array([[0.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(ValueError):
        DenseCoupling(np.eye(2))


def test_dense_mimics_cw():
    n = 12
    rng = np.random.default_rng(1)
    X = rng.choice([-1, 1], (100, n))
    np.testing.assert_allclose(
        DenseCoupling.curie_weiss(n, 1.0).energies(X), CurieWeiss(n, 1.0).energies(X), rtol=0, atol=1e-12
    )


@settings(max_examples=60, deadline=None)
@given(spins(16))
def test_flip_symmetry(x):
    for h in (CurieWeiss(16), NearestNeighbor2D(4), NearestNeighbor2D(4, boundary="open"), Chain1D(16)):
        assert h.energy(x) == h.energy(-x)


@settings(max_examples=40, deadline=None)
@given(spins(9))
def test_energy_deterministic(x):
    h = NearestNeighbor2D(3)
    assert h.energy(x) == h.energy(x.copy())


@settings(max_examples=40, deadline=None)
@given(spins(9))
def test_nn2d_matches_neighbor_loop(x):
    L = 3
    g = x.reshape(L, L).astype(int)
    e = -sum(g[i, j] * (g[i, (j + 1) % L] + g[(i + 1) % L, j]) for i in range(L) for j in range(L))
    assert NearestNeighbor2D(L).energy(x) == e


# ---------------------------------------------------------------- spin configs

def test_spinconfig_validation():
    with pytest.raises(ValueError):
        SpinConfig(np.array([1, 0, -1]))
    with pytest.raises(DimensionError):
        SpinConfig(np.ones(5), "square")
    s = SpinConfig.aligned(9, -1, "square")
    assert s.side == 3 and s.grid().shape == (3, 3)
    assert (-s).spins.sum() == 9


def test_magnetization():
    assert magnetization(np.ones(5)) == 1.0
    assert magnetization(-np.ones(5)) == -1.0
    assert magnetization([1, -1, 1, -1]) == 0.0
    np.testing.assert_array_equal(magnetization(np.array([[1, 1], [1, -1]])), [1.0, 0.0])


# ---------------------------------------------------------------- enumeration

def test_two_spin_chain():
    d = enumerate_boltzmann(Chain1D(2), 1.0)
    Z = 2 * math.e + 2 / math.e
    assert math.exp(d.logZ) == pytest.approx(Z, rel=1e-12)
    assert d.probabilities[d.index_of(np.array([[1, 1]]))[0]] == pytest.approx(math.e / Z, rel=1e-12)
    assert Z == pytest.approx(6.1723, abs=1e-4)


def test_beta_zero_uniform():
    d = enumerate_boltzmann(CurieWeiss(5), 0.0)
    np.testing.assert_allclose(d.probabilities, 1 / 32, rtol=1e-12)


def test_chain_concentrates_on_aligned():
    d = enumerate_boltzmann(Chain1D(6), 20.0)
    idx = d.index_of(np.array([[1] * 6, [-1] * 6]))
    assert d.probabilities[idx] == pytest.approx([0.5, 0.5], abs=1e-6)


@pytest.mark.parametrize("h", [Chain1D(6), CurieWeiss(8), NearestNeighbor2D(3), CurieWeiss(12), Chain1D(10)])
@pytest.mark.parametrize("beta", [0.2, 1.0, 3.0])
def test_probabilities_normalised(h, beta):
    p = enumerate_boltzmann(h, beta).probabilities
    assert np.all(p >= 0)
    assert abs(p.sum() - 1) < 1e-12


def test_enumeration_limits():
    with pytest.raises(CapacityError):
        enumerate_boltzmann(CurieWeiss(21), 1.0)
    with pytest.raises(UnsupportedError):
        enumerate_boltzmann(DoubleWell(), 1.0)


def test_index_round_trip():
    S = all_states(5)
    d = enumerate_boltzmann(Chain1D(5), 0.5)
    np.testing.assert_array_equal(d.index_of(S), np.arange(32))
    np.testing.assert_allclose(d.histogram(S), 1 / 32)


def test_double_well_density_normalised():
    xs, p = DoubleWell().density_grid(2.0)
    assert len(xs) == 4001 and xs[0] == -3.0 and xs[-1] == 3.0
    assert np.trapezoid(p, xs) == pytest.approx(1.0, abs=1e-12)
    # B > 0 tilts the landscape: the left well is deeper
    assert p[xs < 0].sum() > p[xs > 0].sum()
