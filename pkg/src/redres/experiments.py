"""Config-driven experiment runner with CSV and JSON-lines output.

Configs are plain text, one `key = value` per line; values are integers,
rationals written p/q, bare strings, or bracketed lists of those.  Grid keys
take lists and the run covers their cartesian product.  Every grid point is
validated against the library caps before anything runs, so a config that
would blow a budget fails fast with a line number; failures of individual
rows during the run are recorded in the row's error column instead of
aborting the sweep.

Exact quantities are serialized as p/q strings so reruns are byte-identical;
floats use repr, which is also deterministic for equal inputs.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import os
import re
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable

from . import fracsolve, singular
from .arith import is_squarefree, primorial, totient
from .moments import M_direct, M_H_CAP, M_K_CAP, M_Q_CAP
from .singular import R_mod_q, gallagher_ratio


class ConfigError(ValueError):
    """Raised when an experiment config is malformed or violates a cap."""


Value = int | Fraction | str
_INT_RE = re.compile(r"^-?\d+$")
_RAT_RE = re.compile(r"^-?\d+/\d+$")


def _parse_scalar(text: str, lineno: int) -> Value:
    text = text.strip()
    if not text:
        raise ConfigError(f"line {lineno}: empty value")
    if _INT_RE.match(text):
        return int(text)
    if _RAT_RE.match(text):
        return Fraction(text)
    return text


def _parse_value(text: str, lineno: int) -> Value | list[Value]:
    text = text.strip()
    if text.startswith("["):
        if not text.endswith("]"):
            raise ConfigError(f"line {lineno}: unterminated list")
        inner = text[1:-1].strip()
        if not inner:
            return []
        return [_parse_scalar(part, lineno) for part in inner.split(",")]
    return _parse_scalar(text, lineno)


@dataclass
class ExperimentConfig:
    experiment: str
    grid: dict[str, list[Value]]
    out: str | None = None
    fmt: str = "csv"
    workers: int | None = None

    def effective_workers(self) -> int:
        if self.workers is not None:
            return self.workers
        return int(os.environ.get("REDRES_WORKERS", "1"))


def parse_config_text(text: str) -> ExperimentConfig:
    experiment = None
    out = None
    fmt = "csv"
    workers = None
    grid: dict[str, list[Value]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value")
        key, _, rest = line.partition("=")
        key = key.strip()
        value = _parse_value(rest, lineno)
        if key == "experiment":
            if not isinstance(value, str):
                raise ConfigError(f"line {lineno}: experiment must be a name")
            experiment = value
        elif key == "out":
            out = str(value)
        elif key == "format":
            if value not in ("csv", "jsonl"):
                raise ConfigError(f"line {lineno}: format must be csv or jsonl")
            fmt = str(value)
        elif key == "workers":
            if not isinstance(value, int) or value < 1:
                raise ConfigError(f"line {lineno}: workers must be a positive integer")
            workers = value
        else:
            if key in grid:
                raise ConfigError(f"line {lineno}: duplicate key {key!r}")
            grid[key] = value if isinstance(value, list) else [value]
    if experiment is None:
        raise ConfigError("config is missing the experiment key")
    if experiment not in EXPERIMENTS:
        raise ConfigError(
            f"unknown experiment {experiment!r}; available: {', '.join(EXPERIMENTS)}"
        )
    spec = EXPERIMENTS[experiment]
    missing = [p for p in spec.params if p not in grid]
    extra = [p for p in grid if p not in spec.params]
    if missing:
        raise ConfigError(f"experiment {experiment}: missing grid keys {missing}")
    if extra:
        raise ConfigError(f"experiment {experiment}: unknown grid keys {extra}")
    return ExperimentConfig(experiment, grid, out, fmt, workers)


def parse_config_file(path: str) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config_text(fh.read())


def config_to_text(cfg: ExperimentConfig) -> str:
    lines = [f"experiment = {cfg.experiment}"]
    for key, values in cfg.grid.items():
        lines.append(f"{key} = [" + ", ".join(str(v) for v in values) + "]")
    if cfg.out is not None:
        lines.append(f"out = {cfg.out}")
    lines.append(f"format = {cfg.fmt}")
    if cfg.workers is not None:
        lines.append(f"workers = {cfg.workers}")
    return "\n".join(lines) + "\n"


def _need_int(point: dict[str, Value], key: str, lo: int = 1) -> int:
    v = point[key]
    if not isinstance(v, int) or v < lo:
        raise ConfigError(f"{key} must be an integer >= {lo}, got {v!r}")
    return v


def _validate_count_scaling(point: dict[str, Value]) -> None:
    k = _need_int(point, "k")
    n = _need_int(point, "n")
    q = _need_int(point, "Q")
    if k > fracsolve.K_CAP or k % 2 == 0:
        raise ConfigError(f"k must be odd and at most {fracsolve.K_CAP}, got {k}")
    size = len(fracsolve.fractions_in_box(n, q))
    if size ** ((k + 1) // 2) > fracsolve.MITM_SIDE_BUDGET:
        raise ConfigError(f"box n={n} Q={q} k={k} exceeds the search budget")


def _run_count_scaling(point: dict[str, Value], workers: int) -> dict[str, Any]:
    k, n, q = point["k"], point["n"], point["Q"]
    c = fracsolve.BoxConstraint(k, n, q)
    rep = fracsolve.count_box(c, method="mitm", workers=workers)
    ref = fracsolve.reference_bounds(c)["upper_shape"]
    return {
        "count": rep.total,
        "upper_shape": ref,
        "ratio": rep.total / ref,
        "elapsed_s": rep.elapsed_seconds,
    }


def _validate_moment_growth(point: dict[str, Value]) -> None:
    q = _need_int(point, "q")
    h = _need_int(point, "h")
    k = _need_int(point, "k", lo=0)
    if q > M_Q_CAP or h > M_H_CAP or k > M_K_CAP:
        raise ConfigError(f"moment point q={q} h={h} k={k} exceeds caps")
    if not is_squarefree(q):
        raise ConfigError(f"q must be squarefree, got {q}")


def _run_moment_growth(point: dict[str, Value], workers: int) -> dict[str, Any]:
    q, h, k = point["q"], point["h"], point["k"]
    m = M_direct(q, h, k, workers=workers)
    ph = totient(q) / q * h
    ref = q * (ph + ph ** ((max(k, 1) - 1) / 2))
    return {
        "M_exact": m,
        "M_float": float(m),
        "reference": ref,
        "ratio": float(m) / ref if ref else float("nan"),
    }


def _validate_rk_growth(point: dict[str, Value]) -> None:
    h = _need_int(point, "h")
    k = _need_int(point, "k")
    y = _need_int(point, "y", lo=2)
    if k > singular.K_CAP:
        raise ConfigError(f"k exceeds cap {singular.K_CAP}")
    if y > 100:
        raise ConfigError("y above 100 makes the modulus too composite to factor")
    if h ** k > 10**6:
        raise ConfigError(f"tuple grid h^k = {h ** k} exceeds the sum budget")


def _run_rk_growth(point: dict[str, Value], workers: int) -> dict[str, Any]:
    h, k, y = point["h"], point["k"], point["y"]
    q = primorial(y)
    r = R_mod_q(h, k, q, workers=workers)
    ref = float(h) ** ((k - 1) / 2)
    return {
        "q": q,
        "R_exact": r,
        "R_float": float(r),
        "reference": ref,
        "ratio": float(r) / ref,
    }


def _validate_gallagher(point: dict[str, Value]) -> None:
    _validate_rk_growth(point)


def _run_gallagher(point: dict[str, Value], workers: int) -> dict[str, Any]:
    h, k, y = point["h"], point["k"], point["y"]
    q = primorial(y)
    ratio = gallagher_ratio(h, k, q, workers=workers)
    return {"q": q, "ratio": ratio, "drift": abs(ratio - 1)}


def _validate_degenerate_split(point: dict[str, Value]) -> None:
    k = _need_int(point, "k")
    n = _need_int(point, "n")
    q = _need_int(point, "Q")
    if k > fracsolve.CLASSIFY_K_CAP or k % 2 == 0:
        raise ConfigError(f"k must be odd and at most {fracsolve.CLASSIFY_K_CAP}")
    size = len(fracsolve.fractions_in_box(n, q))
    if size ** ((k + 1) // 2) > fracsolve.MITM_SIDE_BUDGET:
        raise ConfigError(f"box n={n} Q={q} k={k} exceeds the search budget")


def _run_degenerate_split(point: dict[str, Value], workers: int) -> dict[str, Any]:
    k, n, q = point["k"], point["n"], point["Q"]
    c = fracsolve.BoxConstraint(k, n, q, target=0)
    rep = fracsolve.classify_degenerate(c, workers=workers)
    heuristic = n ** (k - 1) * q
    return {
        "total": rep.total,
        "degenerate": rep.degenerate,
        "non_degenerate": rep.non_degenerate,
        "heuristic": heuristic,
        "nondeg_ratio": rep.non_degenerate / heuristic,
    }


@dataclass
class ExperimentSpec:
    params: tuple[str, ...]
    columns: tuple[str, ...]
    validate: Callable[[dict[str, Value]], None]
    run: Callable[[dict[str, Value], int], dict[str, Any]]


EXPERIMENTS: dict[str, ExperimentSpec] = {
    "count-scaling": ExperimentSpec(
        ("k", "n", "Q"),
        ("k", "n", "Q", "count", "upper_shape", "ratio", "elapsed_s", "error"),
        _validate_count_scaling,
        _run_count_scaling,
    ),
    "moment-growth": ExperimentSpec(
        ("q", "h", "k"),
        ("q", "h", "k", "M_exact", "M_float", "reference", "ratio", "error"),
        _validate_moment_growth,
        _run_moment_growth,
    ),
    "rk-growth": ExperimentSpec(
        ("h", "k", "y"),
        ("h", "k", "y", "q", "R_exact", "R_float", "reference", "ratio", "error"),
        _validate_rk_growth,
        _run_rk_growth,
    ),
    "gallagher-drift": ExperimentSpec(
        ("h", "k", "y"),
        ("h", "k", "y", "q", "ratio", "drift", "error"),
        _validate_gallagher,
        _run_gallagher,
    ),
    "degenerate-split": ExperimentSpec(
        ("k", "n", "Q"),
        ("k", "n", "Q", "total", "degenerate", "non_degenerate", "heuristic",
         "nondeg_ratio", "error"),
        _validate_degenerate_split,
        _run_degenerate_split,
    ),
}


def iter_grid(cfg: ExperimentConfig) -> list[dict[str, Value]]:
    spec = EXPERIMENTS[cfg.experiment]
    keys = spec.params
    points = []
    for combo in itertools.product(*(cfg.grid[k] for k in keys)):
        points.append(dict(zip(keys, combo)))
    return points


def run_experiment(cfg: ExperimentConfig) -> list[dict[str, Any]]:
    spec = EXPERIMENTS[cfg.experiment]
    points = iter_grid(cfg)
    # all caps are checked before any row runs
    for point in points:
        try:
            spec.validate(point)
        except ConfigError as exc:
            raise ConfigError(f"grid point {point}: {exc}") from None
    workers = cfg.effective_workers()
    rows = []
    for point in points:
        row: dict[str, Any] = dict(point)
        try:
            row.update(spec.run(point, workers))
            row["error"] = ""
        except Exception as exc:  # row-level failure, sweep continues
            row["error"] = f"{type(exc).__name__}: {exc}"
        rows.append({col: row.get(col, "") for col in spec.columns})
    return rows


def format_cell(value: Any) -> str:
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def rows_to_csv(rows: list[dict[str, Any]], columns: tuple[str, ...]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_cell(row[c]) for c in columns])
    return buf.getvalue()


def rows_to_jsonl(rows: list[dict[str, Any]], columns: tuple[str, ...]) -> str:
    lines = []
    for row in rows:
        obj = {}
        for c in columns:
            v = row[c]
            obj[c] = format_cell(v) if isinstance(v, Fraction) else v
        lines.append(json.dumps(obj, sort_keys=False))
    return "\n".join(lines) + "\n"


def render_rows(cfg: ExperimentConfig, rows: list[dict[str, Any]]) -> str:
    columns = EXPERIMENTS[cfg.experiment].columns
    if cfg.fmt == "jsonl":
        return rows_to_jsonl(rows, columns)
    return rows_to_csv(rows, columns)
