"""Online piecewise-linear model of a multi-segment wall.

The wall is described in the localization frame as an ordered list of lines
``y = a*x + b``. The first line passes through the first two contacts. Every
later contact is compared with the prediction of the current (last) line:
a discrepancy at or above ``epsilon_bar`` opens a new line through the last
two contacts, otherwise the current line is re-fitted by ordinary least
squares over its own supporting contacts plus the new one. Earlier lines are
frozen once a newer one exists.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .errors import VerticalLine
from .frames import Point2

DEFAULT_EPSILON_BAR = 0.05


@dataclass(frozen=True)
class Line2:
    a: float
    b: float

    def __call__(self, x: float) -> float:
        return self.a * x + self.b


@dataclass(frozen=True)
class WallModel:
    segments: tuple[Line2, ...]
    support: tuple[tuple[int, ...], ...]
    epsilon_bar: float = DEFAULT_EPSILON_BAR
    contacts: Mapping[int, Point2] = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self) -> None:
        if not self.epsilon_bar > 0.0:
            raise ValueError(f"epsilon_bar must be positive, got {self.epsilon_bar!r}")
        if len(self.segments) != len(self.support):
            raise ValueError("one support set per segment is required")

    @property
    def current(self) -> Line2:
        return self.segments[-1]

    def segment_id_of(self, contact_index: int) -> int | None:
        for sid, sup in enumerate(self.support):
            if contact_index in sup:
                return sid
        return None


def line_through(p: Point2, q: Point2) -> Line2:
    dx = q[0] - p[0]
    if dx == 0.0:
        raise VerticalLine(f"points share x = {p[0]!r}")
    a = (q[1] - p[1]) / dx
    return Line2(a, p[1] - a * p[0])


def ols_line(points: Sequence[Point2]) -> Line2:
    """Least-squares line minimising the vertical residuals."""
    n = len(points)
    if n < 2:
        raise VerticalLine(f"need at least 2 points, got {n}")
    mx = sum(p[0] for p in points) / n
    my = sum(p[1] for p in points) / n
    sxx = sum((p[0] - mx) ** 2 for p in points)
    if sxx == 0.0:
        raise VerticalLine("all support points share one x value")
    sxy = sum((p[0] - mx) * (p[1] - my) for p in points)
    a = sxy / sxx
    return Line2(a, my - a * mx)


def init_wall_model(
    c1: Point2,
    c2: Point2,
    epsilon_bar: float = DEFAULT_EPSILON_BAR,
    indices: tuple[int, int] = (1, 2),
) -> WallModel:
    line = line_through(c1, c2)
    return WallModel((line,), (tuple(indices),), epsilon_bar, {indices[0]: Point2(*c1), indices[1]: Point2(*c2)})


def prediction_error(current: Line2, ref_x: float, contact_y: float) -> float:
    """Gap between the height the current line predicts at ``ref_x`` and the contact."""
    return abs(current.a * ref_x + current.b - contact_y)


def update_wall_model(
    model: WallModel,
    i: int,
    ref_rho: Point2,
    contact_rho: Point2,
    prev_contact_rho: Point2,
    prev_index: int | None = None,
    min_split_dx: float = 0.0,
) -> WallModel:
    """Fold contact ``i`` into the model and return the new model.

    ``ref_rho`` is the commanded target of the dot (its x drives the
    discrepancy test), ``contact_rho`` the measured contact and
    ``prev_contact_rho`` the contact just before it. A split through two
    contacts closer than ``min_split_dx`` in x is refused with
    :class:`VerticalLine`, like an exactly vertical one.
    """
    if prev_index is None:
        prev_index = i - 1
    contact_rho = Point2(*contact_rho)
    contacts = dict(model.contacts)
    contacts[i] = contact_rho
    contacts.setdefault(prev_index, Point2(*prev_contact_rho))

    eps = prediction_error(model.current, ref_rho[0], contact_rho[1])
    if eps >= model.epsilon_bar:
        if abs(contact_rho[0] - prev_contact_rho[0]) < min_split_dx:
            raise VerticalLine(f"split points only {abs(contact_rho[0] - prev_contact_rho[0]):.3g} m apart in x")
        line = line_through(prev_contact_rho, contact_rho)
        return WallModel(
            model.segments + (line,),
            model.support + ((prev_index, i),),
            model.epsilon_bar,
            contacts,
        )

    sup = model.support[-1] + (i,)
    line = ols_line([contacts[k] for k in sup])
    return WallModel(model.segments[:-1] + (line,), model.support[:-1] + (sup,), model.epsilon_bar, contacts)


def project_next_target(model: WallModel, target_rho: Point2) -> Point2:
    """Move a target vertically (localization y) onto the current wall line."""
    x = target_rho[0]
    return Point2(x, model.current(x))
