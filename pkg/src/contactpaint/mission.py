"""Dot-painting mission executor and its report.

For every dot: compute the localization-frame target from the current
estimate, hover at the waiting point, approach along the commanded body
normal, paint on contact, go back to the waiting point and fold the contact
into the estimators. Flight time is budgeted; when it runs out the vehicle
returns home, lands and resets its localization while the estimate is kept.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

from .contact_align import AlignmentEstimate, ContactRecord, estimate_rigid_transform, yaw_reference
from .errors import DegenerateGeometry, NoContact, VerticalLine, WaypointTimeout
from .flightsim import ControllerConfig, NoiseModel, Simulator, WallGeometry
from .frames import Point2, Pose2, RigidTransform2, body_normal, normalize_angle, wall_to_rho
from .wall_model import (
    DEFAULT_EPSILON_BAR,
    WallModel,
    init_wall_model,
    project_next_target,
    update_wall_model,
)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class WallSpec:
    """True wall shape: segment inclinations (radians, left to right) and interior breakpoints."""

    angles: tuple[float, ...] = (0.0,)
    breakpoints: tuple[float, ...] = ()

    @property
    def is_flat(self) -> bool:
        return len(self.angles) == 1

    def build(self, anchor_x: float) -> WallGeometry:
        if self.is_flat and self.angles[0] == 0.0:
            return WallGeometry.flat()
        return WallGeometry.from_segments(self.angles, self.breakpoints, anchor_x)

    @classmethod
    def equal_thirds(cls, angles: Sequence[float], x_min: float, x_max: float) -> "WallSpec":
        """Split ``[x_min, x_max]`` into ``len(angles)`` equal-width segments."""
        n = len(angles)
        w = (x_max - x_min) / n
        return cls(tuple(angles), tuple(x_min + w * k for k in range(1, n)))


@dataclass(frozen=True)
class MissionConfig:
    dots_ref_w: tuple[Point2, ...]
    dot_heights: tuple[float, ...] | None = None
    true_transform: RigidTransform2 = field(default_factory=lambda: RigidTransform2(0.0, Point2(0.0, -1.1)))
    briefed_distance: float = 1.1
    wall: WallSpec = field(default_factory=WallSpec)
    estimation_enabled: bool = True
    segment_estimation: bool | None = None  # None: on for multi-segment walls
    localization: str = "gt"
    seed: int = 0
    battery_budget_s: float | None = 480.0
    epsilon_bar: float = DEFAULT_EPSILON_BAR
    min_split_dx: float = 0.2
    bootstrap_offset: float = 1.0
    use_bootstrap: bool = True
    dt: float = 0.02
    controller: ControllerConfig = field(default_factory=ControllerConfig)
    noise: NoiseModel | None = None  # None: chosen from ``localization``
    name: str = "mission"

    def __post_init__(self) -> None:
        if len(self.dots_ref_w) < 1:
            raise ValueError("a mission needs at least one dot")
        if self.localization not in ("gt", "noisy"):
            raise ValueError(f"localization must be 'gt' or 'noisy', got {self.localization!r}")
        if self.use_bootstrap and self.bootstrap_offset == 0.0:
            raise ValueError("bootstrap offset must be non-zero")
        if self.dot_heights is not None and len(self.dot_heights) != len(self.dots_ref_w):
            raise ValueError("dot_heights must match dots_ref_w")
        if not self.epsilon_bar > 0.0:
            raise ValueError("epsilon_bar must be > 0")

    @property
    def noise_model(self) -> NoiseModel:
        if self.noise is not None and self.localization == "noisy":
            return self.noise
        return NoiseModel.default_noisy() if self.localization == "noisy" else NoiseModel.ground_truth()

    @property
    def uses_wall_model(self) -> bool:
        if not self.estimation_enabled:
            return False
        if self.segment_estimation is None:
            return not self.wall.is_flat
        return self.segment_estimation


@dataclass
class DotResult:
    index: int
    bootstrap: bool
    ref_w: Point2
    height: float
    desired_w: Point2
    target_rho: Point2 | None = None
    yaw_ref: float = 0.0
    contact_rho: Point2 | None = None
    applied_w: Point2 | None = None
    error_m: float | None = None
    estimate: RigidTransform2 | None = None
    segment_id: int | None = None
    segment: tuple[float, float] | None = None
    status: str = "ok"
    t: float = 0.0

    @property
    def error_cm(self) -> float | None:
        return None if self.error_m is None else 100.0 * self.error_m


@dataclass
class Event:
    t: float
    kind: str
    dot: int
    gamma: float
    delta: Point2
    detail: str = ""


@dataclass
class MissionReport:
    config: MissionConfig
    dots: list[DotResult]
    events: list[Event]
    wall_model: WallModel | None
    estimate: AlignmentEstimate
    duration_s: float
    wall: WallGeometry

    @property
    def painted(self) -> list[DotResult]:
        return [d for d in self.dots if not d.bootstrap and d.error_m is not None]

    @property
    def applied_dots_w(self) -> list[Point2]:
        return [d.applied_w for d in self.dots if d.applied_w is not None and not d.bootstrap]

    @property
    def errors_cm(self) -> list[float]:
        return [d.error_cm for d in self.painted]

    @property
    def rmse_cm(self) -> float:
        return rmse_cm([d.error_m for d in self.painted])

    @property
    def failures(self) -> list[DotResult]:
        return [d for d in self.dots if d.status != "ok"]


def rmse_cm(errors_m: Sequence[float]) -> float:
    """Root mean square of distance errors, metres in, centimetres out."""
    if not errors_m:
        return float("nan")
    return 100.0 * math.sqrt(sum(e * e for e in errors_m) / len(errors_m))


def make_bootstrap_dot(dots_ref_w: Sequence[Point2], offset: float = 1.0) -> Point2:
    """Extra dot on the wall line, ``offset`` metres to the side of the first dot."""
    if not dots_ref_w:
        raise ValueError("need at least one reference dot")
    if offset == 0.0:
        raise ValueError("bootstrap offset must be non-zero")
    first = dots_ref_w[0]
    return Point2(first[0] + offset, first[1])


def compute_waiting_point(target_rho: Point2, offset_delta: float, yaw_ref: float) -> Pose2:
    """Hover pose ``offset_delta`` back from the target along the approach normal."""
    if not offset_delta > 0.0:
        raise ValueError("offset_delta must be > 0")
    n = body_normal(yaw_ref)
    return Pose2(Point2(target_rho[0] - offset_delta * n.x, target_rho[1] - offset_delta * n.y), yaw_ref)


def _desired_on_wall(ref: Point2, wall: WallGeometry) -> Point2:
    # drawing is kept undeformed along the wall: dots sit straight "above" their ref x
    return Point2(ref.x, wall.y_at(ref.x))


def run_mission(cfg: MissionConfig, telemetry=None) -> MissionReport:
    refs = list(cfg.dots_ref_w)
    heights = list(cfg.dot_heights) if cfg.dot_heights is not None else [0.0] * len(refs)
    xs = [p.x for p in refs]
    wall = cfg.wall.build(anchor_x=0.5 * (min(xs) + max(xs)))

    plan: list[tuple[Point2, float, bool]] = []
    if cfg.use_bootstrap:
        plan.append((make_bootstrap_dot(refs, cfg.bootstrap_offset), heights[0], True))
    plan.extend((p, h, False) for p, h in zip(refs, heights))

    sim = Simulator(wall, cfg.true_transform, cfg.controller, cfg.noise_model, cfg.seed, cfg.dt, telemetry)
    est = AlignmentEstimate(RigidTransform2.briefed(cfg.briefed_distance), 0.0, 0)
    model: WallModel | None = None
    contacts: list[ContactRecord] = []
    contact_targets: list[Point2] = []
    dots: list[DotResult] = []
    events: list[Event] = []

    def note(kind: str, dot: int, detail: str = "") -> None:
        events.append(Event(sim.t, kind, dot, est.transform.gamma, est.transform.delta, detail))
        log.info("t=%.1f s dot %d %s %s", sim.t, dot, kind, detail)

    for idx, (ref, height, is_boot) in enumerate(plan):
        res = DotResult(idx, is_boot, ref, height, _desired_on_wall(ref, wall))
        dots.append(res)

        if cfg.battery_budget_s is not None and sim.flight_time >= cfg.battery_budget_s:
            note("land", idx)
            try:
                sim.land_and_reset()
            except WaypointTimeout as exc:
                log.warning("return home failed before dot %d: %s", idx, exc)
            note("reset", idx)

        target = wall_to_rho(ref, est.transform)
        if cfg.estimation_enabled and model is not None:
            target = project_next_target(model, target)
            yaw_ref = normalize_angle(math.atan(model.current.a))
        elif cfg.estimation_enabled:
            yaw_ref = yaw_reference(est)
        else:
            yaw_ref = 0.0
        res.target_rho, res.yaw_ref = target, yaw_ref
        wait = compute_waiting_point(target, cfg.controller.offset_delta, yaw_ref)

        try:
            sim.goto_waypoint(wait)
            touch = sim.approach_and_touch(yaw_ref, wait)
        except (WaypointTimeout, NoContact) as exc:
            res.status = type(exc).__name__
            res.t = sim.t
            res.estimate = est.transform
            log.warning("dot %d skipped: %s", idx, exc)
            note("failure", idx, res.status)
            continue

        res.contact_rho = touch.measured.position
        res.applied_w = touch.applied_w
        res.error_m = (touch.applied_w - res.desired_w).norm()
        res.t = sim.t
        contacts.append(ContactRecord(ref, touch.measured.position))
        contact_targets.append(target)
        note("contact", idx)

        if cfg.estimation_enabled and len(contacts) >= 2:
            try:
                est = estimate_rigid_transform(contacts)
            except DegenerateGeometry as exc:
                log.warning("estimate kept after dot %d: %s", idx, exc)
        if cfg.uses_wall_model:
            n = len(contacts)
            try:
                if n == 2:
                    model = init_wall_model(contacts[0].contact_rho, contacts[1].contact_rho, cfg.epsilon_bar)
                elif n > 2 and model is not None:
                    before = len(model.segments)
                    model = update_wall_model(
                        model,
                        n,
                        contact_targets[-1],
                        contacts[-1].contact_rho,
                        contacts[-2].contact_rho,
                        min_split_dx=cfg.min_split_dx,
                    )
                    if len(model.segments) > before:
                        note("split", idx, f"a={model.current.a:.4f} b={model.current.b:.4f}")
            except VerticalLine as exc:
                log.debug("wall model kept after dot %d: %s", idx, exc)
            if model is not None:
                res.segment_id = len(model.segments) - 1
                res.segment = (model.current.a, model.current.b)
        res.estimate = est.transform

    return MissionReport(cfg, dots, events, model, est, sim.t, wall)
