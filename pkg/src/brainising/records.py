"""Per-iteration run traces and their CSV form.

Every CSV written by the package starts with a ``# schema=1`` comment line.
Floats are written with ``repr`` so files round-trip exactly and reruns are
byte-identical.
"""

from __future__ import annotations

import csv
import io
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

SCHEMA_LINE = "# schema=1"
RUN_COLUMNS = ("iter", "mean_reward", "loss_est", "batch_abs_mag", "cum_evals")


@dataclass
class RunRecord:
    """Trace of one training run or Markov chain.

    For BRAIN each row is one gradient step: ``mean_reward`` is the batch mean
    of beta * noisy energy, and ``loss_est`` is -H(q) + beta * that mean. For
    MCMC each row closes a block of proposals: ``mean_reward`` is beta times
    the chain's current noisy read, and ``loss_est`` is beta times its exact
    energy. In both cases ``batch_abs_mag`` is |M| and ``cum_evals`` is the
    oracle counter.
    """

    iters: list[int] = field(default_factory=list)
    mean_reward: list[float] = field(default_factory=list)
    loss_est: list[float] = field(default_factory=list)
    batch_abs_mag: list[float] = field(default_factory=list)
    cum_evals: list[int] = field(default_factory=list)
    params: np.ndarray | None = None
    converged: bool = False
    meta: dict = field(default_factory=dict)

    def append(self, it: int, mean_reward: float, loss_est: float, batch_abs_mag: float, cum_evals: int):
        if self.cum_evals and cum_evals < self.cum_evals[-1]:
            raise ValueError("cum_evals must be non-decreasing")
        self.iters.append(int(it))
        self.mean_reward.append(float(mean_reward))
        self.loss_est.append(float(loss_est))
        self.batch_abs_mag.append(float(batch_abs_mag))
        self.cum_evals.append(int(cum_evals))

    def __len__(self) -> int:
        return len(self.iters)

    def column(self, name: str) -> np.ndarray:
        attr = {"iter": "iters"}.get(name, name)
        return np.asarray(getattr(self, attr))

    def rows(self):
        return zip(self.iters, self.mean_reward, self.loss_est, self.batch_abs_mag, self.cum_evals)

    def to_csv(self, path=None) -> str:
        buf = io.StringIO()
        buf.write(SCHEMA_LINE + "\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(RUN_COLUMNS)
        for it, r, l, m, c in self.rows():
            w.writerow([it, repr(r), repr(l), repr(m), c])
        text = buf.getvalue()
        if path is not None:
            write_atomic(path, text)
        return text

    @classmethod
    def from_csv(cls, source) -> RunRecord:
        text = Path(source).read_text() if not _looks_like_csv(source) else source
        lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
        reader = csv.DictReader(lines)
        missing = set(RUN_COLUMNS) - set(reader.fieldnames or ())
        if missing:
            raise ValueError(f"run CSV missing columns: {sorted(missing)}")
        rec = cls()
        for row in reader:
            rec.append(
                int(row["iter"]),
                float(row["mean_reward"]),
                float(row["loss_est"]),
                float(row["batch_abs_mag"]),
                int(row["cum_evals"]),
            )
        return rec


def _looks_like_csv(source) -> bool:
    return isinstance(source, str) and "\n" in source


def write_atomic(path, text: str):
    """Write via a temporary file and rename so readers never see partial output."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(f".{path.name}.tmp{os.getpid()}")
    tmp.write_text(text)
    os.replace(tmp, path)


def table_csv(header, rows, path=None) -> str:
    """Schema-tagged CSV for an arbitrary table. Floats use ``repr``."""
    buf = io.StringIO()
    buf.write(SCHEMA_LINE + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    text = buf.getvalue()
    if path is not None:
        write_atomic(path, text)
    return text


def params_csv(values, path=None) -> str:
    """Parameter snapshot as a single flat row ``p1, ..., pN``."""
    vals = list(values)
    return table_csv([f"p{i + 1}" for i in range(len(vals))], [vals], path)


def read_table(source) -> list[dict]:
    text = Path(source).read_text() if not _looks_like_csv(source) else source
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(lines))
