"""Serialization of mission reports: per-dot rows, summary, events, telemetry."""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import Any, Iterable

from .flightsim import TELEMETRY_FIELDS
from .mission import MissionReport

REPORT_FIELDS = (
    "index",
    "kind",
    "ref_x_m",
    "ref_y_m",
    "ref_z_m",
    "applied_x_m",
    "applied_y_m",
    "error_cm",
    "gamma_hat_deg",
    "delta_hat_x_m",
    "delta_hat_y_m",
    "segment_id",
    "segment_a",
    "segment_b",
    "status",
)

EVENT_FIELDS = ("t_s", "kind", "dot", "gamma_hat_deg", "delta_hat_x_m", "delta_hat_y_m", "detail")


def fmt(v: Any) -> str:
    """Fixed textual form so identical runs give identical bytes."""
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        return format(v, ".10g")
    return str(v)


def _num(v: float | None) -> float | None:
    if v is None or (isinstance(v, float) and not math.isfinite(v)):
        return None
    return v


def report_rows(report: MissionReport) -> list[dict[str, Any]]:
    rows = []
    for d in report.dots:
        est = d.estimate
        rows.append(
            {
                "index": d.index,
                "kind": "bootstrap" if d.bootstrap else "dot",
                "ref_x_m": d.ref_w.x,
                "ref_y_m": d.ref_w.y,
                "ref_z_m": d.height,
                "applied_x_m": None if d.applied_w is None else d.applied_w.x,
                "applied_y_m": None if d.applied_w is None else d.applied_w.y,
                "error_cm": d.error_cm,
                "gamma_hat_deg": None if est is None else math.degrees(est.gamma),
                "delta_hat_x_m": None if est is None else est.delta.x,
                "delta_hat_y_m": None if est is None else est.delta.y,
                "segment_id": d.segment_id,
                "segment_a": None if d.segment is None else d.segment[0],
                "segment_b": None if d.segment is None else d.segment[1],
                "status": d.status,
            }
        )
    return rows


def _csv_text(fields: Iterable[str], rows: Iterable[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    fields = list(fields)
    w.writerow(fields)
    for r in rows:
        w.writerow([fmt(r.get(f)) for f in fields])
    return buf.getvalue()


def report_csv(report: MissionReport) -> str:
    return _csv_text(REPORT_FIELDS, report_rows(report))


def report_json(report: MissionReport) -> str:
    rows = [{k: _num(v) if isinstance(v, float) else v for k, v in r.items()} for r in report_rows(report)]
    return json.dumps(rows, indent=1) + "\n"


def events_csv(report: MissionReport) -> str:
    rows = [
        {
            "t_s": e.t,
            "kind": e.kind,
            "dot": e.dot,
            "gamma_hat_deg": math.degrees(e.gamma),
            "delta_hat_x_m": e.delta.x,
            "delta_hat_y_m": e.delta.y,
            "detail": e.detail,
        }
        for e in report.events
    ]
    return _csv_text(EVENT_FIELDS, rows)


def summary(report: MissionReport, scenario_echo: dict | None = None) -> dict[str, Any]:
    cfg = report.config
    est = report.estimate
    wm = report.wall_model
    kinds = [e.kind for e in report.events]
    return {
        "name": cfg.name,
        "seed": cfg.seed,
        "rmse_cm": _num(report.rmse_cm),
        "n_dots": sum(1 for d in report.dots if not d.bootstrap),
        "n_painted": len(report.painted),
        "n_failed": len(report.failures),
        "estimation_enabled": cfg.estimation_enabled,
        "localization": cfg.localization,
        "wall_model_enabled": cfg.uses_wall_model,
        "duration_s": report.duration_s,
        "landings": kinds.count("land"),
        "final_estimate": {
            "gamma_hat_deg": math.degrees(est.gamma),
            "delta_hat_m": [est.delta.x, est.delta.y],
            "residual_rms_m": est.residual_rms,
            "n_contacts": est.n_contacts,
        },
        "true_transform": {
            "gamma_deg": math.degrees(cfg.true_transform.gamma),
            "delta_m": [cfg.true_transform.delta.x, cfg.true_transform.delta.y],
        },
        "wall_model": None
        if wm is None
        else [{"a": s.a, "b": s.b, "slope_deg": math.degrees(math.atan(s.a)), "support": list(sup)} for s, sup in zip(wm.segments, wm.support)],
        "failures": [{"index": d.index, "status": d.status} for d in report.failures],
        "config": scenario_echo,
    }


def summary_json(report: MissionReport, scenario_echo: dict | None = None) -> str:
    return json.dumps(summary(report, scenario_echo), indent=2) + "\n"


class TelemetryRecorder:
    """Collects simulator telemetry tuples; pass as the ``telemetry`` callback."""

    def __init__(self) -> None:
        self.rows: list[tuple] = []

    def __call__(self, row: tuple) -> None:
        self.rows.append(row)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(TELEMETRY_FIELDS)
        for r in self.rows:
            w.writerow([fmt(v) for v in r])
        return buf.getvalue()


def write_text(path: Path, text: str) -> None:
    path.write_text(text, encoding="utf-8", newline="")
