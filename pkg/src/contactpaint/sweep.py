"""Experiment grids: rows of wall configurations x estimation/localization columns.

Sweep file, schema version 1::

    schema_version: 1
    gamma_deg: [-15, -10, 0, 10, 15]          # rows vary the wall rotation
    # segment_angles_deg: [[-10, 0, 10], ...] # ...or the segment triples
    seeds: 10                                  # count from first_seed, or an explicit list
    first_seed: 0
    columns: [est_noisy, est_gt, noest_gt]     # optional subset / order

Each cell is the mean rmse over seeds. Ground-truth columns have no random
input, so they are simulated once per row and reused for every seed.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from .errors import ScenarioError
from .mission import run_mission
from .scenario import SCHEMA_VERSION, Scenario, load_yaml_with_lines, parse_mapping

COLUMNS: dict[str, tuple[bool, str]] = {
    "est_noisy": (True, "noisy"),
    "est_gt": (True, "gt"),
    "noest_gt": (False, "gt"),
}
_SWEEP_KEYS = {"schema_version", "gamma_deg", "segment_angles_deg", "seeds", "first_seed", "columns"}


@dataclass(frozen=True)
class SweepRow:
    label: str
    overrides: dict


@dataclass(frozen=True)
class SweepSpec:
    rows: tuple[SweepRow, ...]
    seeds: tuple[int, ...]
    columns: tuple[str, ...] = tuple(COLUMNS)


@dataclass(frozen=True)
class CellRun:
    row: str
    column: str
    seed: int
    rmse_cm: float
    failed_dots: int
    error: str = ""


@dataclass
class SweepResult:
    spec: SweepSpec
    runs: list[CellRun]

    def cell(self, row: str, column: str) -> float:
        vals = [r.rmse_cm for r in self.runs if r.row == row and r.column == column and not r.error]
        vals = [v for v in vals if math.isfinite(v)]
        return sum(vals) / len(vals) if vals else float("nan")

    def cell_failures(self, row: str, column: str) -> int:
        return sum(1 for r in self.runs if r.row == row and r.column == column and (r.error or r.failed_dots))

    def table(self) -> list[dict[str, Any]]:
        out = []
        for row in self.spec.rows:
            d: dict[str, Any] = {"config": row.label}
            for col in self.spec.columns:
                d[col] = self.cell(row.label, col)
            out.append(d)
        return out

    def table_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["config", *self.spec.columns])
        for r in self.table():
            w.writerow([r["config"], *(format(r[c], ".4f") for c in self.spec.columns)])
        return buf.getvalue()

    def table_json(self) -> str:
        rows = []
        for r in self.table():
            rows.append(
                {
                    "config": r["config"],
                    **{c: (None if math.isnan(r[c]) else r[c]) for c in self.spec.columns},
                    "failures": {c: self.cell_failures(r["config"], c) for c in self.spec.columns},
                }
            )
        return json.dumps({"seeds": list(self.spec.seeds), "rows": rows}, indent=2) + "\n"

    def cells_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["config", "column", "seed", "rmse_cm", "failed_dots", "error"])
        for r in self.runs:
            w.writerow([r.row, r.column, r.seed, format(r.rmse_cm, ".6f"), r.failed_dots, r.error])
        return buf.getvalue()


def _label_angles(angles: list[float]) -> str:
    return "|".join(format(a, "+g") if a else "0" for a in angles)


def parse_sweep(text: str, source: str | None = None) -> SweepSpec:
    raw, lines = load_yaml_with_lines(text, source)

    def fail(key: str | None, msg: str):
        raise ScenarioError(msg, line=lines.get((key,) if key else ()), path=source)

    if not isinstance(raw, dict):
        fail(None, "sweep file must be a mapping")
    for k in raw:
        if k not in _SWEEP_KEYS:
            fail(k, f"{k}: unknown key (allowed: {', '.join(sorted(_SWEEP_KEYS))})")
    if raw.get("schema_version") != SCHEMA_VERSION:
        fail("schema_version" if "schema_version" in raw else None, f"schema_version must be {SCHEMA_VERSION}")
    has_g, has_s = "gamma_deg" in raw, "segment_angles_deg" in raw
    if has_g == has_s:
        fail(None, "give exactly one of gamma_deg or segment_angles_deg")

    def num(v: Any, key: str) -> float:
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
            fail(key, f"{key}: expected finite numbers, got {v!r}")
        return float(v)

    rows: list[SweepRow] = []
    if has_g:
        vals = raw["gamma_deg"]
        if not isinstance(vals, list) or not vals:
            fail("gamma_deg", "gamma_deg: expected a non-empty list")
        for g in vals:
            g = num(g, "gamma_deg")
            rows.append(SweepRow(f"{g:+g}" if g else "0", {"true_gamma_deg": g}))
    else:
        vals = raw["segment_angles_deg"]
        if not isinstance(vals, list) or not vals:
            fail("segment_angles_deg", "segment_angles_deg: expected a non-empty list of lists")
        for tri in vals:
            if not isinstance(tri, list) or not tri:
                fail("segment_angles_deg", "segment_angles_deg: each row is a list of angles")
            angles = [num(a, "segment_angles_deg") for a in tri]
            rows.append(SweepRow(_label_angles(angles), {"wall": {"segment_angles_deg": angles, "breakpoints_x_m": None}}))
    if len({r.label for r in rows}) != len(rows):
        fail(None, "duplicate sweep rows")

    seeds_raw = raw.get("seeds", 10)
    first = raw.get("first_seed", 0)
    if isinstance(first, bool) or not isinstance(first, int) or first < 0:
        fail("first_seed", "first_seed: expected a non-negative integer")
    if isinstance(seeds_raw, list):
        if not seeds_raw or any(isinstance(s, bool) or not isinstance(s, int) or s < 0 for s in seeds_raw):
            fail("seeds", "seeds: expected non-negative integers")
        seeds = tuple(seeds_raw)
    elif isinstance(seeds_raw, int) and not isinstance(seeds_raw, bool) and seeds_raw > 0:
        seeds = tuple(range(first, first + seeds_raw))
    else:
        fail("seeds", "seeds: expected a positive count or a list")

    cols = raw.get("columns", list(COLUMNS))
    if not isinstance(cols, list) or not cols or any(c not in COLUMNS for c in cols):
        fail("columns", f"columns: choose from {', '.join(COLUMNS)}")
    return SweepSpec(tuple(rows), seeds, tuple(cols))


def load_sweep(path: str | Path) -> SweepSpec:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioError(f"cannot read sweep file: {exc.strerror}", path=str(path)) from None
    return parse_sweep(text, str(path))


def cell_scenario(base: Scenario, row: SweepRow, column: str, seed: int) -> Scenario:
    estimation, loc = COLUMNS[column]
    return base.with_overrides(**row.overrides, estimation=estimation, localization=loc, seed=seed)


def _run_cell(args: tuple[dict, str, str, int]) -> CellRun:
    data, row, column, seed = args
    try:
        rep = run_mission(parse_mapping(data).config)
        return CellRun(row, column, seed, rep.rmse_cm, len(rep.failures))
    except Exception as exc:  # a cell must not sink the table
        return CellRun(row, column, seed, float("nan"), 0, f"{type(exc).__name__}: {exc}")


def run_sweep(base: Scenario, spec: SweepSpec, jobs: int = 1) -> SweepResult:
    tasks: list[tuple[dict, str, str, int]] = []
    shared: dict[tuple[str, str], int] = {}  # seed-independent cells, simulated once
    for row in spec.rows:
        for col in spec.columns:
            seeds = spec.seeds[:1] if COLUMNS[col][1] == "gt" else spec.seeds
            if COLUMNS[col][1] == "gt":
                shared[(row.label, col)] = spec.seeds[0]
            for s in seeds:
                # validate eagerly so a bad override fails before any simulation
                tasks.append((cell_scenario(base, row, col, s).data, row.label, col, s))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            done = list(pool.map(_run_cell, tasks))
    else:
        done = [_run_cell(t) for t in tasks]

    runs: list[CellRun] = []
    for r in done:
        if (r.row, r.column) in shared:
            runs.extend(CellRun(r.row, r.column, s, r.rmse_cm, r.failed_dots, r.error) for s in spec.seeds)
        else:
            runs.append(r)
    return SweepResult(spec, runs)
