"""Experiment configuration files: YAML parsing and schema validation.

A config is a YAML mapping. Top-level keys:

    experiment     one of EXPERIMENTS (required)
    seeds          non-empty list of non-negative integers (required)
    sigmas         list of relative noise levels >= 0
    temperatures   list of positive floats, or {start, stop, points}
    betas          list of inverse temperatures >= 0
    hamiltonian    model and size (see HAMILTONIAN_FIELDS)
    brain, mcmc, pt  solver settings
    params         experiment-specific settings
    out            output directory
    budget_minutes documented wall-clock budget on a laptop-class machine

Values given on the command line override the file, which overrides the
built-in defaults.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from ..errors import ConfigError

EXPERIMENTS = (
    "double_well",
    "six_spin",
    "cw_sweep",
    "nn2d_sweep",
    "convergence_race",
    "noise_ablation",
    "sample_size_ablation",
    "scaling",
    "ess_compare",
    "pt_compare",
    "variance_check",
)

MODELS = ("curie_weiss", "nearest_neighbor_2d", "chain_1d", "dense_curie_weiss", "double_well")


class _Check:
    def __init__(self, kind, low=None, high=None, low_open=False, choices=None, elem=None, nonempty=False):
        self.kind, self.low, self.high, self.low_open = kind, low, high, low_open
        self.choices, self.elem, self.nonempty = choices, elem, nonempty

    def __call__(self, name, value):
        k = self.kind
        if k == "list":
            if not isinstance(value, list):
                raise ConfigError(name, f"expected a list, got {type(value).__name__}")
            if self.nonempty and not value:
                raise ConfigError(name, "must not be empty")
            return [self.elem(f"{name}[{i}]", v) for i, v in enumerate(value)]
        if k == "bool":
            if not isinstance(value, bool):
                raise ConfigError(name, "expected true or false")
            return value
        if k == "str":
            if not isinstance(value, str):
                raise ConfigError(name, "expected a string")
            if self.choices and value not in self.choices:
                raise ConfigError(name, f"must be one of {', '.join(self.choices)}; got {value!r}")
            return value
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(name, f"expected a number, got {value!r}")
        if k == "int":
            if int(value) != value:
                raise ConfigError(name, f"expected an integer, got {value!r}")
            value = int(value)
        else:
            value = float(value)
            if not np.isfinite(value):
                raise ConfigError(name, "must be finite")
        if self.low is not None and (value < self.low or (self.low_open and value == self.low)):
            op = ">" if self.low_open else ">="
            raise ConfigError(name, f"out of range: must be {op} {self.low}, got {value}")
        if self.high is not None and value > self.high:
            raise ConfigError(name, f"out of range: must be <= {self.high}, got {value}")
        return value


def _int(low=None, high=None):
    return _Check("int", low, high)


def _float(low=None, high=None, low_open=False):
    return _Check("float", low, high, low_open)


def _list(elem, nonempty=True):
    return _Check("list", elem=elem, nonempty=nonempty)


def _enum(*choices):
    return _Check("str", choices=choices)


_BOOL = _Check("bool")

HAMILTONIAN_FIELDS = {
    "model": _enum(*MODELS),
    "n": _int(1),
    "L": _int(2),
    "J": _float(0, low_open=True),
    "boundary": _enum("open", "periodic"),
    "A": _float(0, low_open=True),
    "B": _float(),
    "x0": _float(0, low_open=True),
}

BRAIN_FIELDS = {
    "batch_size": _int(2),
    "learning_rate": _float(0, low_open=True),
    "lr_halflife": _int(1),
    "max_iterations": _int(1),
    "window": _int(1),
    "tolerance": _float(0),
    "init": _enum("uniform", "perturbed"),
    "parameterization": _enum("logit", "mean"),
    "clip": _float(0, 0.5, low_open=True),
    "eval_samples": _int(1),
    "warm_start": _BOOL,
    "symmetrize": _BOOL,
}

MCMC_FIELDS = {
    "steps": _int(1),
    "burn_in": _int(0),
    "thinning": _int(1),
    "cache_current_energy": _BOOL,
    "record_every": _int(1),
    "averaging_k": _int(1),
    "step_size": _float(0, low_open=True),
}

PT_FIELDS = {
    "replicas": _int(2),
    "t_min": _float(0, low_open=True),
    "t_max": _float(0, low_open=True),
    "swap_interval": _int(1),
    "steps": _int(1),
    "cache_current_energy": _BOOL,
}

PARAM_FIELDS = {
    "target": _float(0, 1),
    "tail_fraction": _float(0, 1, low_open=True),
    "sizes": _list(_int(1)),
    "batch_sizes": _list(_int(2)),
    "averaging": _list(_int(1)),
    "samples": _int(1),
    "bins": _int(2),
    "realizations": _int(1),
    "batch": _int(2),
    "coordinate": _int(0),
    "batch_per_spin": _float(0, low_open=True),
    "gmm_init_means": _list(_float()),
    "gmm_init_stds": _list(_float(0, low_open=True)),
    "mcmc_matched_budget": _BOOL,
    "noisy_ess": _BOOL,
}

TOP_FIELDS = {
    "experiment": _enum(*EXPERIMENTS),
    "seeds": _list(_int(0)),
    "sigmas": _list(_float(0)),
    "betas": _list(_float(0)),
    "out": _Check("str"),
    "budget_minutes": _float(0, low_open=True),
}

SECTIONS = {"hamiltonian": HAMILTONIAN_FIELDS, "brain": BRAIN_FIELDS, "mcmc": MCMC_FIELDS, "pt": PT_FIELDS,
            "params": PARAM_FIELDS}

REQUIRED = ("experiment", "seeds")


@dataclass
class ExperimentConfig:
    experiment: str
    seeds: list
    sigmas: list = field(default_factory=lambda: [0.0])
    temperatures: list = field(default_factory=list)
    betas: list = field(default_factory=list)
    hamiltonian: dict = field(default_factory=dict)
    brain: dict = field(default_factory=dict)
    mcmc: dict = field(default_factory=dict)
    pt: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)
    out: str | None = None
    budget_minutes: float | None = None
    source: str | None = None

    def as_dict(self) -> dict:
        keys = ("experiment", "seeds", "sigmas", "temperatures", "betas", "hamiltonian", "brain", "mcmc", "pt",
                "params")
        return {k: getattr(self, k) for k in keys}

    def hash(self) -> str:
        """Stable digest of everything that affects results (not out/budget)."""
        blob = json.dumps(self.as_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    def with_overrides(self, seed=None, out=None) -> ExperimentConfig:
        d = dict(self.__dict__)
        if seed is not None:
            d["seeds"] = [int(seed)]
        if out is not None:
            d["out"] = str(out)
        return ExperimentConfig(**d)


def _line_index(node, prefix="", out=None) -> dict:
    """Map dotted key paths to 1-based source lines."""
    out = {} if out is None else out
    if isinstance(node, yaml.MappingNode):
        for k, v in node.value:
            path = f"{prefix}.{k.value}" if prefix else str(k.value)
            out[path] = k.start_mark.line + 1
            _line_index(v, path, out)
    elif isinstance(node, yaml.SequenceNode):
        for i, v in enumerate(node.value):
            out[f"{prefix}[{i}]"] = v.start_mark.line + 1
            _line_index(v, f"{prefix}[{i}]", out)
    return out


def _temperatures(value, name="temperatures"):
    if isinstance(value, dict):
        extra = set(value) - {"start", "stop", "points"}
        if extra:
            raise ConfigError(f"{name}.{sorted(extra)[0]}", "unknown key")
        for k in ("start", "stop", "points"):
            if k not in value:
                raise ConfigError(f"{name}.{k}", "missing required field")
        a = _float(0, low_open=True)(f"{name}.start", value["start"])
        b = _float(0, low_open=True)(f"{name}.stop", value["stop"])
        n = _int(2)(f"{name}.points", value["points"])
        if not a < b:
            raise ConfigError(name, "start must be below stop")
        return [float(t) for t in np.linspace(a, b, n)]
    temps = _list(_float(0, low_open=True))(name, value)
    if sorted(temps) != temps:
        raise ConfigError(name, "temperatures must be listed in ascending order")
    return temps


def _validate_mapping(data: dict) -> ExperimentConfig:
    if not isinstance(data, dict):
        raise ConfigError("<root>", "config must be a mapping of keys to values")
    for k in REQUIRED:
        if k not in data:
            raise ConfigError(k, "missing required field")
    kw = {}
    for key, value in data.items():
        if key in TOP_FIELDS:
            kw[key] = TOP_FIELDS[key](key, value)
        elif key == "temperatures":
            kw[key] = _temperatures(value)
        elif key in SECTIONS:
            if not isinstance(value, dict):
                raise ConfigError(key, "expected a mapping")
            spec = SECTIONS[key]
            sec = {}
            for sk, sv in value.items():
                if sk not in spec:
                    raise ConfigError(f"{key}.{sk}", "unknown key")
                sec[sk] = spec[sk](f"{key}.{sk}", sv)
            kw[key] = sec
        else:
            raise ConfigError(str(key), "unknown key")
    cfg = ExperimentConfig(**kw)
    _cross_checks(cfg)
    return cfg


def _cross_checks(cfg: ExperimentConfig):
    h = cfg.hamiltonian
    model = h.get("model")
    if model == "nearest_neighbor_2d" and h.get("boundary", "periodic") == "periodic" and h.get("L", 3) < 3:
        raise ConfigError("hamiltonian.L", "periodic lattices need L >= 3")
    m = cfg.mcmc
    if "burn_in" in m and "steps" in m and m["burn_in"] >= m["steps"]:
        raise ConfigError("mcmc.burn_in", "must be smaller than mcmc.steps")
    p = cfg.pt
    if "t_min" in p and "t_max" in p and p["t_min"] >= p["t_max"]:
        raise ConfigError("pt.t_min", "must be below pt.t_max")
    if "swap_interval" in p and "steps" in p and p["swap_interval"] > p["steps"]:
        raise ConfigError("pt.swap_interval", "must not exceed pt.steps")
    needs_temps = {"cw_sweep", "nn2d_sweep"}
    if cfg.experiment in needs_temps and len(cfg.temperatures) < 3:
        raise ConfigError("temperatures", "a sweep needs at least three temperatures")
    if cfg.experiment in ("double_well", "six_spin", "ess_compare") and not cfg.betas:
        raise ConfigError("betas", "at least one inverse temperature is required")


def parse_config(text: str, source: str | None = None) -> ExperimentConfig:
    """Parse and validate YAML text; errors carry the field name and line."""
    try:
        node = yaml.compose(text, Loader=yaml.SafeLoader)
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        line = mark.line + 1 if mark is not None else None
        raise ConfigError("<syntax>", str(getattr(exc, "problem", exc)), line) from None
    if data is None:
        raise ConfigError("<root>", "config file is empty")
    lines = _line_index(node)
    try:
        cfg = _validate_mapping(data)
    except ConfigError as exc:
        line = exc.line
        if line is None:
            key = exc.field
            while key and key not in lines:
                key = key.rsplit(".", 1)[0] if "." in key else ""
            line = lines.get(key)
        raise ConfigError(exc.field, exc.message, line) from None
    cfg.source = source
    return cfg


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    return parse_config(path.read_text(), str(path))


def validate_config(path) -> list[ConfigError]:
    """Empty list when the file is valid, otherwise the first error found."""
    try:
        load_config(path)
    except ConfigError as exc:
        return [exc]
    return []


def bundled_configs() -> dict:
    root = Path(__file__).with_name("configs")
    return {p.stem: p for p in sorted(root.glob("*.yaml"))}
