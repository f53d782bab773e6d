import numpy as np
import pytest

from brainising import Chain1D, CurieWeiss, DoubleWell, NoisyOracle
from brainising.errors import DimensionError


def test_noiseless_is_exact():
    o = NoisyOracle(CurieWeiss(4), 0.0, seed=3)
    assert o.measure(np.ones(4)) == -1.5
    assert o.eval_count == 1


def test_noiseless_bit_identical():
    h = CurieWeiss(64, 0.7)
    X = np.random.default_rng(0).choice([-1, 1], (50, 64))
    np.testing.assert_array_equal(NoisyOracle(h, 0.0).measure_batch(X), h.energies(X))


def test_noise_statistics():
    # mean within 3 sigma |E| / 100, std within 5% of sigma |E|
    h = CurieWeiss(4)
    x = np.ones(4)
    E = h.energy(x)
    o = NoisyOracle(h, 0.03, seed=11)
    reads = np.array([o.measure(x) for _ in range(10_000)])
    assert abs(reads.mean() - E) <= 3 * 0.03 * abs(E) / 100
    assert abs(reads.std() - 0.03 * abs(E)) <= 0.05 * 0.03 * abs(E)


def test_averaging_shrinks_std():
    h = CurieWeiss(4)
    x = np.ones(4)
    o1 = NoisyOracle(h, 0.03, seed=1)
    o50 = NoisyOracle(h, 0.03, seed=2, averaging_k=50)
    s1 = np.std([o1.measure(x) for _ in range(10_000)])
    s50 = np.std([o50.measure(x) for _ in range(10_000)])
    assert s1 / s50 == pytest.approx(np.sqrt(50), rel=0.10)


def test_eval_count():
    h = CurieWeiss(4)
    o = NoisyOracle(h, 0.1)
    assert o.eval_count == 0
    for _ in range(3):
        o.measure(np.ones(4))
    assert o.eval_count == 3
    o50 = NoisyOracle(h, 0.1, averaging_k=50)
    o50.measure(np.ones(4))
    o50.measure(np.ones(4))
    assert o50.eval_count == 100
    o50.measure_batch(np.ones((7, 4)))
    assert o50.eval_count == 100 + 7 * 50


def test_same_seed_same_stream():
    h = Chain1D(6)
    X = np.random.default_rng(5).choice([-1, 1], (30, 6))
    a, b = NoisyOracle(h, 0.05, seed=9), NoisyOracle(h, 0.05, seed=9)
    np.testing.assert_array_equal([a.measure(x) for x in X], [b.measure(x) for x in X])
    assert not np.array_equal(NoisyOracle(h, 0.05, seed=10).measure_batch(X), a.measure_batch(X))


def test_fresh_noise_per_call():
    o = NoisyOracle(CurieWeiss(4), 0.03)
    x = np.ones(4)
    for _ in range(100):
        assert o.measure(x) != o.measure(x)


def test_zero_energy_reads_zero():
    # relative noise only: E = 0 reads back as exactly 0
    o = NoisyOracle(DoubleWell(1, 0, 1), 0.5)
    assert all(o.measure(1.0) == 0.0 for _ in range(20))


def test_batch_matches_scalar_reads():
    h = CurieWeiss(8)
    X = np.random.default_rng(2).choice([-1, 1], (20, 8))
    a, b = NoisyOracle(h, 0.1, seed=4), NoisyOracle(h, 0.1, seed=4)
    np.testing.assert_allclose(a.measure_batch(X), [b.measure(x) for x in X], rtol=1e-15)
    assert a.eval_count == b.eval_count == 20


def test_validation():
    with pytest.raises(ValueError):
        NoisyOracle(CurieWeiss(4), -0.1)
    with pytest.raises(ValueError):
        NoisyOracle(CurieWeiss(4), 0.1, averaging_k=0)
    with pytest.raises(DimensionError):
        NoisyOracle(CurieWeiss(4), 0.1).measure(np.ones(3))


def test_fork_resets_counter():
    o = NoisyOracle(CurieWeiss(4), 0.1, seed=1, averaging_k=3)
    o.measure(np.ones(4))
    f = o.fork(2)
    assert f.eval_count == 0 and f.averaging_k == 3 and f.sigma == 0.1
