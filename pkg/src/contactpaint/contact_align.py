"""Weighted best-fit rigid transform from wall contacts.

Each contact pairs a reference dot (wall frame) with the position measured by
the vehicle when it touched the wall (localization frame). The estimator finds
the rotation ``gamma`` and translation ``delta`` minimising

    sum_j w_j * || R(gamma) c_j + delta - r_j ||^2

through the centroid / covariance / SVD route, with the determinant correction
that keeps the result a proper rotation. The 2x2 SVD is evaluated in closed
form, so no linear-algebra backend is involved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import DegenerateGeometry, TooFewContacts
from .frames import Point2, RigidTransform2, normalize_angle, wall_to_rho

Mat2 = tuple[tuple[float, float], tuple[float, float]]

# contact spread (squared metres) below which rotation is unobservable
_DEGENERATE_SPREAD = 1e-24


@dataclass(frozen=True)
class ContactRecord:
    ref_w: Point2
    contact_rho: Point2
    weight: float = 1.0

    def __post_init__(self) -> None:
        if not (self.weight > 0.0 and math.isfinite(self.weight)):
            raise ValueError(f"contact weight must be strictly positive, got {self.weight!r}")
        object.__setattr__(self, "ref_w", Point2(float(self.ref_w[0]), float(self.ref_w[1])))
        object.__setattr__(self, "contact_rho", Point2(float(self.contact_rho[0]), float(self.contact_rho[1])))


@dataclass(frozen=True)
class AlignmentEstimate:
    transform: RigidTransform2
    residual_rms: float = 0.0
    n_contacts: int = 0

    @property
    def gamma(self) -> float:
        return self.transform.gamma

    @property
    def delta(self) -> Point2:
        return self.transform.delta


def _matmul(a: Mat2, b: Mat2) -> Mat2:
    return (
        (a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]),
        (a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]),
    )


def _transpose(a: Mat2) -> Mat2:
    return ((a[0][0], a[1][0]), (a[0][1], a[1][1]))


def _det(a: Mat2) -> float:
    return a[0][0] * a[1][1] - a[0][1] * a[1][0]


def _rot(angle: float) -> Mat2:
    c, s = math.cos(angle), math.sin(angle)
    return ((c, -s), (s, c))


def svd_2x2(m: Mat2) -> tuple[Mat2, tuple[float, float], Mat2]:
    """Closed-form SVD ``m = U diag(s) Vt`` of a real 2x2 matrix.

    Singular values come back non-negative and sorted. ``U`` absorbs the
    reflection when ``det(m) < 0``, so ``det(V U^T)`` is -1 exactly in that case.
    """
    (a, b), (c, d) = m
    e = 0.5 * (a + d)
    f = 0.5 * (a - d)
    g = 0.5 * (c + b)
    h = 0.5 * (c - b)
    q = math.hypot(e, h)
    r = math.hypot(f, g)
    s1 = q + r
    s2 = q - r
    a1 = math.atan2(g, f)
    a2 = math.atan2(h, e)
    theta = 0.5 * (a2 - a1)
    phi = 0.5 * (a2 + a1)
    u = _rot(phi)
    vt = _rot(theta)
    if s2 < 0.0:
        s2 = -s2
        u = ((u[0][0], -u[0][1]), (u[1][0], -u[1][1]))
    return u, (s1, s2), vt


def solve_weighted_centroids(contacts: Sequence[ContactRecord]) -> tuple[Point2, Point2]:
    """Weighted centroids ``(contact centroid, reference centroid)``."""
    wsum = cx = cy = rx = ry = 0.0
    for k in contacts:
        w = k.weight
        wsum += w
        cx += w * k.contact_rho.x
        cy += w * k.contact_rho.y
        rx += w * k.ref_w.x
        ry += w * k.ref_w.y
    if not wsum > 0.0:
        raise TooFewContacts("total contact weight must be positive")
    return Point2(cx / wsum, cy / wsum), Point2(rx / wsum, ry / wsum)


def weighted_cost(contacts: Iterable[ContactRecord], t: RigidTransform2) -> float:
    """Objective value: weighted sum of squared alignment residuals."""
    c, s = math.cos(t.gamma), math.sin(t.gamma)
    dx, dy = t.delta
    total = 0.0
    for k in contacts:
        px, py = k.contact_rho
        ex = c * px - s * py + dx - k.ref_w.x
        ey = s * px + c * py + dy - k.ref_w.y
        total += k.weight * (ex * ex + ey * ey)
    return total


def estimate_rigid_transform(contacts: Sequence[ContactRecord]) -> AlignmentEstimate:
    """Best-fit (gamma, delta) mapping contact points onto their reference dots.

    Raises
    ------
    TooFewContacts
        Fewer than two contacts.
    DegenerateGeometry
        All contact points (or all reference dots) coincide.
    """
    n = len(contacts)
    if n < 2:
        raise TooFewContacts(f"need at least 2 contacts, got {n}")
    pc, pr = solve_weighted_centroids(contacts)

    s00 = s01 = s10 = s11 = 0.0
    spread_c = spread_r = 0.0
    for k in contacts:
        w = k.weight
        xx, xy = k.contact_rho.x - pc.x, k.contact_rho.y - pc.y
        yx, yy = k.ref_w.x - pr.x, k.ref_w.y - pr.y
        s00 += w * xx * yx
        s01 += w * xx * yy
        s10 += w * xy * yx
        s11 += w * xy * yy
        spread_c += w * (xx * xx + xy * xy)
        spread_r += w * (yx * yx + yy * yy)
    if spread_c <= _DEGENERATE_SPREAD or spread_r <= _DEGENERATE_SPREAD:
        raise DegenerateGeometry("contact or reference points coincide; rotation is unobservable")

    u, _, vt = svd_2x2(((s00, s01), (s10, s11)))
    v = _transpose(vt)
    sign = 1.0 if _det(_matmul(v, _transpose(u))) >= 0.0 else -1.0
    rot = _matmul(_matmul(v, ((1.0, 0.0), (0.0, sign))), _transpose(u))
    gamma = math.atan2(rot[1][0], rot[0][0])

    c, s = math.cos(gamma), math.sin(gamma)
    delta = Point2(pr.x - (c * pc.x - s * pc.y), pr.y - (s * pc.x + c * pc.y))
    t = RigidTransform2(gamma, delta)

    wsum = sum(k.weight for k in contacts)
    rms = math.sqrt(max(weighted_cost(contacts, t), 0.0) / wsum)
    return AlignmentEstimate(t, rms, n)


def update_targets(refs_w: Iterable[Point2], est: AlignmentEstimate | RigidTransform2) -> list[Point2]:
    """Localization-frame targets for reference dots under the current estimate.

    Uses the exact inverse of the contact -> wall map that the estimator fits,
    so ``rho_to_wall(target, est) == ref`` up to rounding.
    """
    t = est.transform if isinstance(est, AlignmentEstimate) else est
    return [wall_to_rho(p, t) for p in refs_w]


def yaw_reference(est: AlignmentEstimate | RigidTransform2) -> float:
    """Yaw that turns the painting axis onto the estimated wall normal."""
    t = est.transform if isinstance(est, AlignmentEstimate) else est
    return normalize_angle(-t.gamma)
