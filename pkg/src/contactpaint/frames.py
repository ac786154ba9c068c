"""Planar frame algebra for the wall frame, the localization frame and the body.

The wall frame is fixed to the painted surface, the localization frame is
anchored at the take-off pose of the vehicle and the body frame follows the
vehicle. Only the planar (x, y) part is modelled; the dot height travels as
separate payload.

A :class:`RigidTransform2` ``t`` describes the wall -> localization offset:
``delta`` is the localization origin expressed in the wall frame and
``gamma`` the rotation of the localization axes relative to the wall axes::

    p_rho = R(gamma)^T (p_w - delta)
    p_w   = R(gamma) p_rho + delta
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

TWO_PI = 2.0 * math.pi


def normalize_angle(a: float) -> float:
    """Wrap an angle to (-pi, pi]."""
    if not math.isfinite(a):
        raise ValueError(f"angle must be finite, got {a!r}")
    k = math.ceil((a - math.pi) / TWO_PI)
    out = a - k * TWO_PI
    # guard the rounding edge where a - k*2pi lands a hair outside
    if out <= -math.pi:
        out += TWO_PI
    elif out > math.pi:
        out -= TWO_PI
    return out


class Point2(NamedTuple):
    x: float
    y: float

    def __add__(self, other: "Point2") -> "Point2":  # type: ignore[override]
        return Point2(self.x + other[0], self.y + other[1])

    def __sub__(self, other: "Point2") -> "Point2":
        return Point2(self.x - other[0], self.y - other[1])

    def scale(self, k: float) -> "Point2":
        return Point2(k * self.x, k * self.y)

    def norm(self) -> float:
        return math.hypot(self.x, self.y)


def rotate(p: Point2, angle: float) -> Point2:
    c, s = math.cos(angle), math.sin(angle)
    return Point2(c * p[0] - s * p[1], s * p[0] + c * p[1])


def rotation_matrix(angle: float) -> tuple[tuple[float, float], tuple[float, float]]:
    c, s = math.cos(angle), math.sin(angle)
    return ((c, -s), (s, c))


@dataclass(frozen=True)
class Pose2:
    """Planar pose; ``yaw`` is kept in (-pi, pi]."""

    position: Point2
    yaw: float = 0.0
    frame: str = "rho"

    def __post_init__(self) -> None:
        x, y, yaw = float(self.position[0]), float(self.position[1]), float(self.yaw)
        if not (math.isfinite(x) and math.isfinite(y) and math.isfinite(yaw)):
            raise ValueError(f"pose components must be finite: {(x, y, yaw)!r}")
        object.__setattr__(self, "position", Point2(x, y))
        object.__setattr__(self, "yaw", normalize_angle(yaw))


@dataclass(frozen=True)
class RigidTransform2:
    """Wall -> localization frame offset (rotation ``gamma``, translation ``delta``)."""

    gamma: float = 0.0
    delta: Point2 = field(default_factory=lambda: Point2(0.0, 0.0))

    def __post_init__(self) -> None:
        g, dx, dy = float(self.gamma), float(self.delta[0]), float(self.delta[1])
        if not (math.isfinite(g) and math.isfinite(dx) and math.isfinite(dy)):
            raise ValueError(f"transform components must be finite: {(g, dx, dy)!r}")
        object.__setattr__(self, "gamma", normalize_angle(g))
        object.__setattr__(self, "delta", Point2(dx, dy))

    @classmethod
    def briefed(cls, standoff: float) -> "RigidTransform2":
        """Offset the operator is instructed to realise: facing the wall at ``standoff``."""
        return cls(0.0, Point2(0.0, -standoff))

    @property
    def matrix(self) -> tuple[tuple[float, float], tuple[float, float]]:
        return rotation_matrix(self.gamma)


IDENTITY = RigidTransform2()


def wall_to_rho(p_w: Point2, t: RigidTransform2) -> Point2:
    """Express a wall-frame point in the localization frame."""
    c, s = math.cos(t.gamma), math.sin(t.gamma)
    dx, dy = p_w[0] - t.delta.x, p_w[1] - t.delta.y
    return Point2(c * dx + s * dy, -s * dx + c * dy)


def rho_to_wall(p_rho: Point2, t: RigidTransform2) -> Point2:
    """Inverse of :func:`wall_to_rho`."""
    c, s = math.cos(t.gamma), math.sin(t.gamma)
    return Point2(c * p_rho[0] - s * p_rho[1] + t.delta.x, s * p_rho[0] + c * p_rho[1] + t.delta.y)


def direction_rho_to_wall(v_rho: Point2, t: RigidTransform2) -> Point2:
    """Rotate a free vector (velocity, normal) from the localization to the wall frame."""
    return rotate(v_rho, t.gamma)


def yaw_rho_to_wall(yaw_rho: float, t: RigidTransform2) -> float:
    return normalize_angle(yaw_rho + t.gamma)


def yaw_wall_to_rho(yaw_w: float, t: RigidTransform2) -> float:
    return normalize_angle(yaw_w - t.gamma)


def body_normal(yaw: float) -> Point2:
    """Unit +y_b axis (painting direction) of a body with the given yaw."""
    return Point2(-math.sin(yaw), math.cos(yaw))
