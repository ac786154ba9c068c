"""Command-line front end.

``contactpaint SCENARIO [--out DIR]`` runs one mission and writes report.csv
(or report.json), summary.json, events.csv, drawing.svg and wallmodel.svg.
With ``--sweep FILE`` the scenario becomes the base of an experiment grid
and table.csv (or table.json) plus cells.csv are written instead.

Every artifact is rendered in memory first; nothing is written unless the
whole run succeeded.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .errors import ScenarioError
from .mission import run_mission
from .report import TelemetryRecorder, events_csv, report_csv, report_json, summary_json, write_text
from .scenario import Scenario, bundled_names, bundled_path, load_scenario
from .svg import drawing_svg, wallmodel_svg
from .sweep import load_sweep, run_sweep

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_INPUT = 2

log = logging.getLogger("contactpaint")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="contactpaint", description="Simulate contact-based dot painting with an aerial robot.")
    p.add_argument("scenario", nargs="?", help="scenario YAML file, or the name of a bundled scenario")
    p.add_argument("--out", default="out", help="output directory (default: %(default)s)")
    p.add_argument("--seed", type=int, help="override the scenario seed")
    p.add_argument("--no-estimation", action="store_true", help="disable frame and wall-shape estimation")
    p.add_argument("--localization", choices=("gt", "noisy"), help="override the localization mode")
    p.add_argument("--sweep", metavar="FILE", help="run an experiment grid over the scenario (file or bundled name)")
    p.add_argument("--format", choices=("csv", "json"), default="csv", help="per-dot report / table format")
    p.add_argument("--telemetry", action="store_true", help="also write per-step telemetry.csv")
    p.add_argument("--jobs", type=int, default=1, help="parallel sweep workers (default: %(default)s)")
    p.add_argument("--echo", action="store_true", help="print the normalized scenario and exit")
    p.add_argument("--list", action="store_true", help="list bundled scenarios and exit")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def resolve_scenario(arg: str) -> Path:
    path = Path(arg)
    if path.exists() or path.suffix or "/" in arg:
        return path
    name = arg if arg.endswith(".yaml") else arg + ".yaml"
    if name in bundled_names():
        return bundled_path(name)
    return path


def apply_flags(sc: Scenario, args: argparse.Namespace) -> Scenario:
    changes = {}
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.no_estimation:
        changes["estimation"] = False
    if args.localization is not None:
        changes["localization"] = args.localization
    return sc.with_overrides(**changes) if changes else sc


def render_run(sc: Scenario, fmt: str = "csv", telemetry: bool = False) -> dict[str, str]:
    rec = TelemetryRecorder() if telemetry else None
    rep = run_mission(sc.config, telemetry=rec)
    for d in rep.failures:
        log.warning("dot %d not painted: %s", d.index, d.status)
    files = {
        f"report.{fmt}": report_csv(rep) if fmt == "csv" else report_json(rep),
        "summary.json": summary_json(rep, sc.data),
        "events.csv": events_csv(rep),
        "drawing.svg": drawing_svg(rep),
        "wallmodel.svg": wallmodel_svg(rep),
    }
    if rec is not None:
        files["telemetry.csv"] = rec.to_csv()
    print(f"{sc.config.name}: rmse {rep.rmse_cm:.3f} cm over {len(rep.painted)} dots, {len(rep.failures)} failed")
    return files


def render_sweep(sc: Scenario, sweep_file: str, fmt: str = "csv", jobs: int = 1) -> dict[str, str]:
    spec = load_sweep(resolve_scenario(sweep_file))
    res = run_sweep(sc, spec, jobs=max(1, jobs))
    for row in spec.rows:
        for col in spec.columns:
            n = res.cell_failures(row.label, col)
            if n:
                log.warning("sweep cell %s/%s: %d run(s) with failures", row.label, col, n)
    table = res.table_csv()
    print(table, end="")
    return {
        f"table.{fmt}": table if fmt == "csv" else res.table_json(),
        "cells.csv": res.cells_csv(),
    }


def write_artifacts(out: Path, files: dict[str, str]) -> None:
    out.mkdir(parents=True, exist_ok=True)
    for name, text in files.items():
        write_text(out / name, text)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    if args.list:
        for n in bundled_names():
            print(n)
        return EXIT_OK
    if args.scenario is None:
        print("error: a scenario file is required", file=sys.stderr)
        return EXIT_INPUT
    try:
        sc = apply_flags(load_scenario(resolve_scenario(args.scenario)), args)
        if args.echo:
            print(sc.echo(), end="")
            return EXIT_OK
        if args.sweep:
            files = render_sweep(sc, args.sweep, args.format, args.jobs)
        else:
            files = render_run(sc, args.format, args.telemetry)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    write_artifacts(Path(args.out), files)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
