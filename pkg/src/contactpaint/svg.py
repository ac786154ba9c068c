"""Minimal SVG plots: desired vs obtained drawing, and the wall-model overlay."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence
from xml.sax.saxutils import escape

from .frames import Point2, wall_to_rho
from .mission import MissionReport


def _f(v: float) -> str:
    return format(v, ".2f")


@dataclass
class Canvas:
    """Data-coordinate canvas with y pointing up."""

    x_min: float
    x_max: float
    y_min: float
    y_max: float
    width: int = 720
    height: int = 480
    margin: int = 50
    items: list[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.x_max <= self.x_min:
            self.x_min, self.x_max = self.x_min - 0.5, self.x_min + 0.5
        if self.y_max <= self.y_min:
            self.y_min, self.y_max = self.y_min - 0.5, self.y_min + 0.5

    def px(self, x: float, y: float) -> tuple[float, float]:
        w = self.width - 2 * self.margin
        h = self.height - 2 * self.margin
        u = self.margin + (x - self.x_min) / (self.x_max - self.x_min) * w
        v = self.height - self.margin - (y - self.y_min) / (self.y_max - self.y_min) * h
        return u, v

    def circle(self, x: float, y: float, r: float, style: str) -> None:
        u, v = self.px(x, y)
        self.items.append(f'<circle cx="{_f(u)}" cy="{_f(v)}" r="{r}" {style}/>')

    def polyline(self, pts: Sequence[tuple[float, float]], style: str) -> None:
        s = " ".join(f"{_f(u)},{_f(v)}" for u, v in (self.px(x, y) for x, y in pts))
        self.items.append(f'<polyline points="{s}" fill="none" {style}/>')

    def text(self, u: float, v: float, s: str, anchor: str = "start", size: int = 12) -> None:
        self.items.append(f'<text x="{_f(u)}" y="{_f(v)}" font-size="{size}" text-anchor="{anchor}" font-family="sans-serif">{escape(s)}</text>')

    def axes(self, xlabel: str, ylabel: str, title: str) -> None:
        x0, y0 = self.px(self.x_min, self.y_min)
        x1, y1 = self.px(self.x_max, self.y_max)
        self.items.append(f'<rect x="{_f(x0)}" y="{_f(y1)}" width="{_f(x1 - x0)}" height="{_f(y0 - y1)}" fill="none" stroke="#888"/>')
        self.text(0.5 * (x0 + x1), self.height - 12, xlabel, "middle")
        self.items.append(f'<text x="14" y="{_f(0.5 * (y0 + y1))}" font-size="12" text-anchor="middle" font-family="sans-serif" transform="rotate(-90 14 {_f(0.5 * (y0 + y1))})">{escape(ylabel)}</text>')
        self.text(0.5 * (x0 + x1), 24, title, "middle", 14)
        for x in _ticks(self.x_min, self.x_max):
            u, _ = self.px(x, self.y_min)
            self.text(u, y0 + 14, _tick_label(x), "middle", 10)
        for y in _ticks(self.y_min, self.y_max):
            _, v = self.px(self.x_min, y)
            self.text(x0 - 4, v + 3, _tick_label(y), "end", 10)

    def legend(self, entries: Sequence[tuple[str, str]]) -> None:
        u = self.width - self.margin - 150
        for k, (label, color) in enumerate(entries):
            v = self.margin + 14 + 16 * k
            self.items.append(f'<rect x="{_f(u)}" y="{_f(v - 8)}" width="10" height="10" fill="{color}"/>')
            self.text(u + 16, v + 1, label, size=11)

    def render(self) -> str:
        head = f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.width}" height="{self.height}" viewBox="0 0 {self.width} {self.height}">'
        return "\n".join([head, '<rect width="100%" height="100%" fill="white"/>', *self.items, "</svg>"]) + "\n"


def _ticks(lo: float, hi: float, n: int = 6) -> list[float]:
    raw = (hi - lo) / n
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=mag)
    start = math.ceil(lo / step) * step
    out = []
    k = 0
    while start + k * step <= hi + 1e-12:
        out.append(start + k * step)
        k += 1
    return out


def _tick_label(v: float) -> str:
    s = format(v, ".2f").rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def _bounds(xs: Sequence[float], ys: Sequence[float], pad: float) -> tuple[float, float, float, float]:
    return min(xs) - pad, max(xs) + pad, min(ys) - pad, max(ys) + pad


def drawing_svg(report: MissionReport) -> str:
    """Desired (open) and obtained (filled) dots in the drawing plane, x vs height."""
    dots = [d for d in report.dots if not d.bootstrap]
    xs = [d.desired_w.x for d in dots] + [d.applied_w.x for d in dots if d.applied_w is not None]
    zs = [d.height for d in dots]
    c = Canvas(*_bounds(xs, zs, 0.2))
    c.axes("wall x (m)", "height (m)", f"{report.config.name}: desired vs obtained, rmse {report.rmse_cm:.2f} cm")
    for d in dots:
        c.circle(d.desired_w.x, d.height, 4, 'fill="none" stroke="#1f77b4" stroke-width="1.2"')
    for d in dots:
        if d.applied_w is not None:
            c.circle(d.applied_w.x, d.height, 2.5, 'fill="#d62728"')
    c.legend([("desired", "#1f77b4"), ("obtained", "#d62728")])
    return c.render()


def wallmodel_svg(report: MissionReport) -> str:
    """Top view in the localization frame: true wall, contacts and fitted segments."""
    cfg = report.config
    t = cfg.true_transform
    contacts = [d.contact_rho for d in report.dots if d.contact_rho is not None]
    refs_x = [d.ref_w.x for d in report.dots]
    lo, hi = min(refs_x) - 0.3, max(refs_x) + 0.3
    n = 200
    wall_pts = [wall_to_rho(Point2(x, report.wall.y_at(x)), t) for x in (lo + (hi - lo) * k / n for k in range(n + 1))]
    segs = []
    wm = report.wall_model
    if wm is not None:
        for line, sup in zip(wm.segments, wm.support):
            sx = [wm.contacts[i].x for i in sup if i in wm.contacts]
            if sx:
                a, b = min(sx) - 0.1, max(sx) + 0.1
                segs.append([(a, line(a)), (b, line(b))])
    xs = [p.x for p in wall_pts] + [p.x for p in contacts] + [p[0] for s in segs for p in s]
    ys = [p.y for p in wall_pts] + [p.y for p in contacts] + [p[1] for s in segs for p in s]
    c = Canvas(*_bounds(xs, ys, 0.15))
    nseg = 0 if wm is None else len(wm.segments)
    c.axes("x (m, localization frame)", "y (m, localization frame)", f"{cfg.name}: wall model, {nseg} segment(s)")
    c.polyline([(p.x, p.y) for p in wall_pts], 'stroke="#555" stroke-width="3" stroke-opacity="0.5"')
    palette = ("#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf")
    for k, s in enumerate(segs):
        c.polyline(s, f'stroke="{palette[k % len(palette)]}" stroke-width="1.5"')
    for p in contacts:
        c.circle(p.x, p.y, 2, 'fill="#d62728"')
    c.legend([("true wall", "#888"), ("contacts", "#d62728"), ("model segments", palette[0])])
    return c.render()
