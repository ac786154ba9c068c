"""Bundled 140-dot sample drawing (3.5 m wide, 2.1 m high).

A 10-column by 14-row dot matrix centred on the wall-frame origin: x runs
from +1.75 m to -1.75 m, heights from 0.5 m to 2.6 m. Columns are 0.39 m
apart, so consecutive columns are far enough for a 10 degree change of wall
inclination to show up as a clear jump in contact depth.
"""

from __future__ import annotations

from .frames import Point2

WIDTH_M = 3.5
HEIGHT_M = 2.1
BASE_Z_M = 0.5
N_COLUMNS = 10
N_ROWS = 14


def sample_drawing(columns: int = N_COLUMNS, rows: int = N_ROWS) -> list[tuple[float, float]]:
    """``(x_m, z_m)`` pairs of the bundled drawing in application order."""
    dots = []
    for c in range(columns):
        x = WIDTH_M * (0.5 - c / (columns - 1)) if columns > 1 else 0.0
        for r in range(rows):
            z = BASE_Z_M + (HEIGHT_M * r / (rows - 1) if rows > 1 else 0.0)
            dots.append((x, z))
    return order_dots(dots)


def order_dots(dots: list[tuple[float, float]]) -> list[tuple[float, float]]:
    """Right to left, ties broken top to bottom."""
    return sorted(dots, key=lambda d: (-d[0], -d[1]))


def to_wall_points(dots: list[tuple[float, float]]) -> tuple[list[Point2], list[float]]:
    """Split ``(x, z)`` dots into planar wall-frame points on ``y = 0`` and heights."""
    return [Point2(x, 0.0) for x, _ in dots], [z for _, z in dots]
