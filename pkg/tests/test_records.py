import numpy as np
import pytest

from brainising import RunRecord
from brainising import rng as rngmod
from brainising.records import params_csv, read_table, table_csv


def _rec():
    r = RunRecord()
    r.append(1, -0.1, 0.3333333333333333, 0.25, 10)
    r.append(2, 1e-17, -2.5, 0.5, 20)
    return r


def test_csv_round_trip_exact():
    r = _rec()
    text = r.to_csv()
    assert text.splitlines()[0] == "# schema=1"
    assert text.splitlines()[1] == "iter,mean_reward,loss_est,batch_abs_mag,cum_evals"
    back = RunRecord.from_csv(text)
    assert back.loss_est == r.loss_est and back.mean_reward == r.mean_reward
    assert back.to_csv() == text


def test_csv_file(tmp_path):
    p = tmp_path / "sub" / "run.csv"
    _rec().to_csv(p)
    assert RunRecord.from_csv(p).cum_evals == [10, 20]
    assert not list(p.parent.glob(".*tmp*"))


def test_cum_evals_nondecreasing():
    r = _rec()
    with pytest.raises(ValueError):
        r.append(3, 0, 0, 0, 5)


def test_missing_columns():
    with pytest.raises(ValueError):
        RunRecord.from_csv("# schema=1\niter,cum_evals\n1,2\n")


def test_table_and_params():
    text = table_csv(("a", "b"), [(1, 0.1), (2, np.float64(1 / 3))])
    rows = read_table(text)
    assert rows[1]["b"] == repr(1 / 3) and rows[0]["a"] == "1"
    assert params_csv([0.5, 0.25]).splitlines()[1:] == ["p1,p2", "0.5,0.25"]


def test_streams_independent_and_reproducible():
    a = rngmod.stream(7, rngmod.ORACLE).random(5)
    b = rngmod.stream(7, rngmod.ORACLE).random(5)
    c = rngmod.stream(7, rngmod.SAMPLER).random(5)
    d = rngmod.stream(8, rngmod.ORACLE).random(5)
    np.testing.assert_array_equal(a, b)
    assert not np.allclose(a, c) and not np.allclose(a, d)
    assert not np.allclose(rngmod.stream(1, 2, 0).random(3), rngmod.stream(1, 2, 1).random(3))
    with pytest.raises(ValueError):
        rngmod.stream(-1)
