"""CSV ingestion, deterministic report writing and run configuration."""

from __future__ import annotations

import csv
import json
import os
import tempfile
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Optional

import numpy as np

from .pipeline import SurvivalDataset
from .smoothing import SamplingGrid

RESERVED = ("id", "time", "status", "group")


class InputError(ValueError):
    """Malformed or inconsistent input files."""


def _number(cell: str, where: str) -> float:
    try:
        v = float(cell)
    except ValueError:
        raise InputError(f"{where}: non-numeric value {cell!r}") from None
    if not np.isfinite(v):
        raise InputError(f"{where}: non-finite value {cell!r}")
    return v


def read_curves(path) -> tuple[SamplingGrid, list[str], np.ndarray]:
    """Curves file: header ``label,s_1..s_J``, then rows ``id,x_1..x_J``."""
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if len(rows) < 2:
        raise InputError(f"{path}: need a grid row and at least one curve")
    head = rows[0]
    s = [_number(c, f"{path} row 1 col {j + 2}") for j, c in enumerate(head[1:])]
    try:
        grid = SamplingGrid.from_points(s)
    except ValueError as exc:
        raise InputError(f"{path}: bad grid: {exc}") from None
    ids, values = [], []
    for i, r in enumerate(rows[1:], start=2):
        if len(r) != len(head):
            raise InputError(f"{path} row {i}: expected {len(head)} cells, found {len(r)}")
        ids.append(r[0].strip())
        values.append([_number(c, f"{path} row {i} col {j + 2}") for j, c in enumerate(r[1:])])
    if len(set(ids)) != len(ids):
        raise InputError(f"{path}: duplicate subject ids")
    return grid, ids, np.array(values)


def dummy_code(values: list[str], name: str) -> tuple[np.ndarray, list[str]]:
    """Reference coding; the first level seen is the reference."""
    levels = list(dict.fromkeys(values))
    cols = [f"{name}[{lv}]" for lv in levels[1:]]
    M = np.array([[1.0 if v == lv else 0.0 for lv in levels[1:]] for v in values]).reshape(len(values), -1)
    return M, cols


def read_subjects(path) -> dict:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        rows = list(reader)
    for col in ("id", "time", "status"):
        if col not in header:
            raise InputError(f"{path}: missing column {col!r}")
    if not rows:
        raise InputError(f"{path}: no subjects")
    ids, time, status, group = [], [], [], []
    for i, r in enumerate(rows, start=2):
        if any(v is None or v.strip() == "" for v in r.values()):
            raise InputError(f"{path} row {i}: missing value")
        ids.append(r["id"].strip())
        t = _number(r["time"], f"{path} row {i} column 'time'")
        if t <= 0:
            raise InputError(f"{path} row {i} column 'time': nonpositive time {t}")
        time.append(t)
        d = _number(r["status"], f"{path} row {i} column 'status'")
        if d not in (0.0, 1.0):
            raise InputError(f"{path} row {i} column 'status': status must be 0 or 1")
        status.append(int(d))
        if "group" in header:
            group.append(r["group"].strip())
    if len(set(ids)) != len(ids):
        raise InputError(f"{path}: duplicate subject ids")
    blocks, names = [], []
    for col in header:
        if col in RESERVED:
            continue
        cells = [r[col].strip() for r in rows]
        try:
            blocks.append(np.array([float(c) for c in cells])[:, None])
            names.append(col)
        except ValueError:
            M, cols = dummy_code(cells, col)
            blocks.append(M)
            names.extend(cols)
    Z = np.hstack(blocks) if blocks else np.zeros((len(rows), 0))
    return {"ids": ids, "time": np.array(time), "status": np.array(status), "Z": Z,
            "names": names, "group": np.array(group) if group else None}


def ingest(subjects_csv, curves_csv) -> SurvivalDataset:
    """Validated dataset from a subjects file and a curves file.

    Subjects are ordered as in the subjects file; every id must appear in
    both files exactly once.
    """
    sub = read_subjects(subjects_csv)
    grid, curve_ids, X = read_curves(curves_csv)
    pos = {cid: k for k, cid in enumerate(curve_ids)}
    missing = [i for i in sub["ids"] if i not in pos]
    if missing:
        raise InputError(f"{curves_csv}: no curve for subject id {missing[0]!r}")
    extra = sorted(set(curve_ids) - set(sub["ids"]))
    if extra:
        raise InputError(f"{subjects_csv}: no subject row for curve id {extra[0]!r}")
    curves = X[[pos[i] for i in sub["ids"]]]
    return SurvivalDataset(time=sub["time"], status=sub["status"], Z=sub["Z"], curves=curves,
                           grid=grid, group=sub["group"], ids=np.array(sub["ids"]),
                           covariate_names=tuple(sub["names"]))


# ---------------------------------------------------------------------------
# writing
# ---------------------------------------------------------------------------


def fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return str(v)


def csv_text(header, rows) -> str:
    lines = [",".join(header)]
    lines += [",".join(fmt(v) for v in r) for r in rows]
    return "\n".join(lines) + "\n"


def dump_json(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"


def write_outputs(out_dir, files: dict[str, str]) -> None:
    """Write every file through a temporary sibling and rename it into place."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name, text in files.items():
        fd, tmp = tempfile.mkstemp(dir=out, prefix=f".{name}.", suffix=".tmp")
        try:
            with os.fdopen(fd, "w", newline="") as fh:
                fh.write(text)
            os.replace(tmp, out / name)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise


def write_curves_csv(path, grid: SamplingGrid, ids, curves) -> None:
    rows = [[i, *row] for i, row in zip(ids, curves)]
    write_outputs(Path(path).parent, {Path(path).name: csv_text(["id", *map(fmt, grid.points)], rows)})


def write_subjects_csv(path, data: SurvivalDataset, names=None) -> None:
    names = list(names or [f"z{k + 1}" for k in range(data.Z.shape[1])])
    header = ["id", "time", "status", *(["group"] if data.group is not None else []), *names]
    ids = data.ids if data.ids is not None else [f"s{k + 1}" for k in range(data.n)]
    rows = []
    for k in range(data.n):
        row = [ids[k], data.time[k], int(data.status[k])]
        if data.group is not None:
            row.append(data.group[k])
        rows.append(row + list(data.Z[k]))
    write_outputs(Path(path).parent, {Path(path).name: csv_text(header, rows)})


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------


@dataclass
class RunConfig:
    n_basis: int = 8
    order: int = 4
    ridge: float = 1e-8
    fpca_threshold: float = 0.85
    frailty: bool = True
    fixed_alpha: float = 0.0  # > 0 holds the frailty variance fixed
    alpha_init: float = 0.5
    tol_inner: float = 1e-7
    tol_outer: float = 1e-5
    max_inner: int = 50
    max_outer: int = 30
    seed: int = 20240101
    jobs: int = 1
    replications: int = 100
    bootstrap_reps: int = 500
    n: int = 250
    tau: float = 0.01
    phi: float = 0.01

    def validate(self) -> "RunConfig":
        if self.n_basis < self.order:
            raise InputError("n_basis must be >= order")
        if not 0 < self.fpca_threshold < 1:
            raise InputError("fpca_threshold must lie in (0, 1)")
        if self.fixed_alpha < 0:
            raise InputError("fixed_alpha must be nonnegative")
        if self.ridge < 0:
            raise InputError("ridge must be nonnegative")
        if min(self.tol_inner, self.tol_outer, self.alpha_init) <= 0:
            raise InputError("tolerances and alpha_init must be positive")
        if min(self.max_inner, self.max_outer, self.jobs, self.replications, self.bootstrap_reps) < 1:
            raise InputError("counts must be >= 1")
        return self

    def as_text(self) -> str:
        return "".join(f"{f.name}={fmt(getattr(self, f.name))}\n" for f in fields(self))


def _coerce(name: str, raw: str, typ):
    if typ is bool or typ == "bool":
        low = raw.strip().lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise InputError(f"config {name}: expected a boolean, got {raw!r}")
    try:
        return (int if typ in (int, "int") else float)(raw)
    except ValueError:
        raise InputError(f"config {name}: bad value {raw!r}") from None


def load_config(path: Optional[str], overrides: dict) -> RunConfig:
    """Defaults, then ``key=value`` lines from ``path``, then ``overrides``."""
    cfg = RunConfig()
    types = {f.name: f.type for f in fields(RunConfig)}
    if path:
        with open(path) as fh:
            for ln, line in enumerate(fh, start=1):
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise InputError(f"{path} line {ln}: expected key=value")
                key, val = (x.strip() for x in line.split("=", 1))
                key = key.replace("-", "_")
                if key not in types:
                    raise InputError(f"{path} line {ln}: unknown key {key!r}")
                setattr(cfg, key, _coerce(key, val, types[key]))
    for key, val in overrides.items():
        if val is not None:
            setattr(cfg, key, val)
    return cfg.validate()
