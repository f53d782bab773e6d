import hashlib
import subprocess
import sys
import textwrap
from pathlib import Path

import pytest

from brainising.errors import ConfigError
from brainising.harness import config as hc
from brainising.harness.cli import main
from brainising.harness.config import EXPERIMENTS, bundled_configs, load_config, parse_config, validate_config

SMALL_PT = textwrap.dedent("""\
    experiment: pt_compare
    seeds: [1]
    sigmas: [0.0]
    hamiltonian: {model: curie_weiss, L: 4, J: 1.0}
    pt: {replicas: 3, swap_interval: 50, steps: 500}
""")


def _write(tmp_path, text, name="c.yaml"):
    p = tmp_path / name
    p.write_text(textwrap.dedent(text))
    return p


# ---------------------------------------------------------------- validation

def test_every_experiment_has_a_valid_bundled_config():
    bundled = bundled_configs()
    assert set(bundled) == set(EXPERIMENTS)
    for name, path in bundled.items():
        assert validate_config(path) == [], name
        assert load_config(path).experiment == name


def test_missing_seeds_names_field(tmp_path):
    errs = validate_config(_write(tmp_path, "experiment: six_spin\nbetas: [1.0]\n"))
    assert len(errs) == 1 and errs[0].field == "seeds"


def test_negative_sigma_is_range_error(tmp_path):
    p = _write(tmp_path, """\
        experiment: cw_sweep
        seeds: [1]
        temperatures: [0.5, 1.0, 1.5]
        sigmas: [0.0, -0.1]
    """)
    (err,) = validate_config(p)
    assert err.field == "sigmas[1]"
    assert "out of range" in err.message
    assert err.line == 4


def test_unknown_nested_key_has_line(tmp_path):
    p = _write(tmp_path, """\
        experiment: scaling
        seeds: [1]
        brain:
          batch_size: 10
          learnin_rate: 0.1
    """)
    (err,) = validate_config(p)
    assert err.field == "brain.learnin_rate" and err.line == 5
    assert "line 5" in str(err)


def test_yaml_syntax_error_has_line(tmp_path):
    (err,) = validate_config(_write(tmp_path, "experiment: six_spin\nseeds: [1, 2\nbetas: [1]\n"))
    assert err.field == "<syntax>" and err.line is not None


@pytest.mark.parametrize("text, field", [
    ("experiment: nope\nseeds: [1]\n", "experiment"),
    ("experiment: six_spin\nseeds: []\nbetas: [1]\n", "seeds"),
    ("experiment: six_spin\nseeds: [1.5]\nbetas: [1]\n", "seeds[0]"),
    ("experiment: six_spin\nseeds: [1]\n", "betas"),
    ("experiment: cw_sweep\nseeds: [1]\ntemperatures: [2.0, 1.0, 0.5]\n", "temperatures"),
    ("experiment: pt_compare\nseeds: [1]\npt: {t_min: 2.0, t_max: 1.0}\n", "pt.t_min"),
    ("experiment: pt_compare\nseeds: [1]\nmcmc: {steps: 10, burn_in: 10}\n", "mcmc.burn_in"),
    ("experiment: nn2d_sweep\nseeds: [1]\ntemperatures: [1, 2, 3]\nhamiltonian: {model: nearest_neighbor_2d, L: 2}\n",
     "hamiltonian.L"),
    ("experiment: scaling\nseeds: [1]\nbrain: {warm_start: 1}\n", "brain.warm_start"),
    ("experiment: scaling\nseeds: [1]\nbrain: 3\n", "brain"),
    ("- 1\n- 2\n", "<root>"),
    ("", "<root>"),
])
def test_bad_fields(text, field):
    with pytest.raises(ConfigError) as exc:
        parse_config(text)
    assert exc.value.field == field


def test_temperature_range_form():
    cfg = parse_config("experiment: cw_sweep\nseeds: [1]\ntemperatures: {start: 0.1, stop: 2.0, points: 20}\n")
    assert len(cfg.temperatures) == 20 and cfg.temperatures[0] == 0.1 and cfg.temperatures[-1] == 2.0


def test_hash_ignores_out_and_follows_content():
    a = parse_config(SMALL_PT)
    b = parse_config(SMALL_PT + "out: elsewhere\n")
    c = parse_config(SMALL_PT.replace("steps: 500", "steps: 600"))
    assert a.hash() == b.hash() != c.hash()
    d = a.with_overrides(seed=9, out="x")
    assert d.seeds == [9] and d.out == "x" and a.seeds == [1]


# ---------------------------------------------------------------- CLI

def test_cli_list(capsys):
    assert main(["list-experiments"]) == 0
    out = capsys.readouterr().out
    assert all(name in out for name in EXPERIMENTS)


def test_cli_validate_codes(tmp_path, capsys):
    assert main(["validate", "six_spin"]) == 0
    bad = _write(tmp_path, "experiment: six_spin\nbetas: [1]\n")
    assert main(["validate", str(bad)]) == 1
    assert "seeds" in capsys.readouterr().err
    assert main(["validate", str(tmp_path / "missing.yaml")]) == 2


def test_cli_run_invalid_config_exits_1(tmp_path):
    bad = _write(tmp_path, "experiment: six_spin\nseeds: [1]\nsigmas: [-0.1]\nbetas: [1]\n")
    assert main(["run", str(bad), "--out", str(tmp_path / "o")]) == 1


def test_cli_run_unwritable_exits_2(tmp_path):
    cfg = _write(tmp_path, SMALL_PT)
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert main(["run", str(cfg), "--out", str(blocker / "sub")]) == 2


def test_cli_run_writes_manifest(tmp_path, capsys):
    cfg = _write(tmp_path, SMALL_PT)
    out = tmp_path / "run"
    assert main(["run", str(cfg), "--out", str(out)]) == 0
    manifest = (out / "manifest.csv").read_text().splitlines()
    assert manifest[0] == "# schema=1" and manifest[1] == "file,sha256,config_hash,seed"
    h = parse_config(SMALL_PT).hash()
    for line in manifest[2:]:
        name, digest, chash, seed = line.split(",")
        assert hashlib.sha256((out / name).read_bytes()).hexdigest() == digest
        assert chash == h
    summary = (out / "summary.txt").read_text()
    assert f"config_hash: {h}" in summary
    assert "coldest_abs_mag" in capsys.readouterr().out


def test_cli_output_precedence(tmp_path, monkeypatch):
    cfg = _write(tmp_path, SMALL_PT)
    monkeypatch.setenv("BRAINISING_OUT", str(tmp_path / "env"))
    assert main(["run", str(cfg)]) == 0
    assert (tmp_path / "env" / "pt_compare" / "manifest.csv").exists()
    cfg2 = _write(tmp_path, SMALL_PT + f"out: {tmp_path / 'fromfile'}\n", "c2.yaml")
    assert main(["run", str(cfg2)]) == 0
    assert (tmp_path / "fromfile" / "manifest.csv").exists()


def test_cli_seed_override(tmp_path):
    cfg = _write(tmp_path, SMALL_PT.replace("seeds: [1]", "seeds: [1, 2]"))
    out = tmp_path / "o"
    assert main(["run", str(cfg), "--seed", "2", "--out", str(out)]) == 0
    names = sorted(p.name for p in out.glob("pt_s*.csv"))
    assert names == ["pt_s0_seed2.csv", "pt_swaps_s0_seed2.csv"]


def test_cli_module_entry(tmp_path):
    r = subprocess.run([sys.executable, "-m", "brainising.harness.cli", "list-experiments"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and "scaling" in r.stdout


def test_bundled_budgets_documented():
    for name, path in bundled_configs().items():
        assert load_config(path).budget_minutes is not None, name


def test_schema_doc_lists_every_experiment():
    doc = Path(hc.__file__).parents[3] / "docs" / "schemas.md"
    if not doc.exists():
        pytest.skip("docs not shipped with this install")
    text = doc.read_text()
    assert all(f"**{name}" in text or name in text for name in EXPERIMENTS)


def test_full_scale_configs_validate():
    full = Path(__file__).parents[1] / "scripts" / "full"
    paths = sorted(full.glob("*.yaml"))
    assert paths
    for p in paths:
        assert validate_config(p) == [], p.name
