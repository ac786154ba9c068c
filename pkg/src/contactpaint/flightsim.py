"""Deterministic planar flight simulation around a painted wall.

The plant is a point mass whose velocity and yaw rate follow their commands
through a first-order lag. The wall is an x-monotone polyline ``y = f(x)``
in the wall frame; the vehicle lives on the ``y < f(x)`` side. A step that
would cross the surface is clamped onto it, the velocity component pushing
into the wall is removed and the resulting velocity jump shows up in the
body-frame acceleration, which is what the contact detector watches.

Localization is a stand-in for a drifting visual odometry: the measured
pose is the true localization-frame pose plus a random-walk drift and white
noise. Landing at the home pad and resetting zeroes the drift.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .errors import NoContact, ResetWhileAirborne, WaypointTimeout
from .frames import (
    Point2,
    Pose2,
    RigidTransform2,
    body_normal,
    normalize_angle,
    rho_to_wall,
    wall_to_rho,
)

G = 9.81


# --------------------------------------------------------------------------- wall


class WallGeometry:
    """Piecewise-linear wall surface ``y = f(x)`` in the wall frame."""

    def __init__(self, vertices: Sequence[tuple[float, float]]):
        pts = [Point2(float(x), float(y)) for x, y in vertices]
        if len(pts) < 2:
            raise ValueError("a wall needs at least two vertices")
        for p, q in zip(pts, pts[1:]):
            if not q.x > p.x:
                raise ValueError("wall vertices must have strictly increasing x")
        self.vertices = tuple(pts)
        self._xs = [p.x for p in pts]

    @classmethod
    def flat(cls, x_min: float = -50.0, x_max: float = 50.0, y: float = 0.0) -> "WallGeometry":
        return cls([(x_min, y), (x_max, y)])

    @classmethod
    def from_segments(
        cls,
        angles: Sequence[float],
        breakpoints: Sequence[float],
        anchor_x: float,
        margin: float = 50.0,
    ) -> "WallGeometry":
        """Contiguous segments listed left to right, passing through ``(anchor_x, 0)``.

        ``angles`` are the segment inclinations in radians (slope ``tan(angle)``)
        and ``breakpoints`` the ``len(angles) - 1`` interior x values.
        """
        if len(breakpoints) != len(angles) - 1:
            raise ValueError("need exactly len(angles) - 1 breakpoints")
        bps = list(breakpoints)
        if any(not b2 > b1 for b1, b2 in zip(bps, bps[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        lo = min([anchor_x] + bps) - margin
        hi = max([anchor_x] + bps) + margin
        xs = [lo] + bps + [hi]
        slopes = [math.tan(a) for a in angles]
        k = bisect.bisect_right(bps, anchor_x)
        ys = [0.0] * len(xs)
        # segment k spans xs[k]..xs[k+1] and contains the anchor
        ys[k] = -slopes[k] * (anchor_x - xs[k])
        for j in range(k, len(slopes)):
            ys[j + 1] = ys[j] + slopes[j] * (xs[j + 1] - xs[j])
        for j in range(k - 1, -1, -1):
            ys[j] = ys[j + 1] - slopes[j] * (xs[j + 1] - xs[j])
        return cls(list(zip(xs, ys)))

    def segment_index(self, x: float) -> int:
        i = bisect.bisect_right(self._xs, x) - 1
        return min(max(i, 0), len(self.vertices) - 2)

    def slope(self, i: int) -> float:
        p, q = self.vertices[i], self.vertices[i + 1]
        return (q.y - p.y) / (q.x - p.x)

    def y_at(self, x: float) -> float:
        i = self.segment_index(x)
        p = self.vertices[i]
        return p.y + self.slope(i) * (x - p.x)

    def penetration(self, p: Point2) -> float:
        """Positive when ``p`` lies beyond the surface."""
        return p[1] - self.y_at(p[0])

    def inward_normal(self, x: float) -> Point2:
        m = self.slope(self.segment_index(x))
        k = 1.0 / math.hypot(m, 1.0)
        return Point2(-m * k, k)

    def first_crossing(self, p0: Point2, p1: Point2) -> Point2:
        """First point of segment ``p0 -> p1`` on the surface (``p1`` must be beyond it)."""
        g0 = self.penetration(p0)
        if g0 >= 0.0:
            return Point2(p0[0], self.y_at(p0[0]))
        dx = p1[0] - p0[0]
        cuts = [0.0, 1.0]
        if dx != 0.0:
            for vx in self._xs[1:-1]:
                s = (vx - p0[0]) / dx
                if 0.0 < s < 1.0:
                    cuts.append(s)
        cuts.sort()
        prev_s, prev_g = 0.0, g0
        for s in cuts[1:]:
            q = Point2(p0[0] + s * dx, p0[1] + s * (p1[1] - p0[1]))
            g = self.penetration(q)
            if g >= 0.0:
                u = prev_s + (s - prev_s) * (-prev_g) / (g - prev_g)
                x = p0[0] + u * dx
                y = p0[1] + u * (p1[1] - p0[1])
                return Point2(x, min(y, self.y_at(x)))
            prev_s, prev_g = s, g
        return Point2(p1[0], self.y_at(p1[0]))


# ----------------------------------------------------------------------- vehicle


@dataclass(frozen=True)
class VelocityCommand:
    """Wall-frame velocity and yaw-rate set point."""

    vx: float = 0.0
    vy: float = 0.0
    yaw_rate: float = 0.0


HOVER = VelocityCommand()


@dataclass(frozen=True)
class VehicleState:
    x: float = 0.0
    y: float = 0.0
    yaw: float = 0.0
    vx: float = 0.0
    vy: float = 0.0
    yaw_rate: float = 0.0
    body_accel_y: float = 0.0
    airborne: bool = True
    in_contact: bool = False
    t: float = 0.0

    @property
    def true_pose(self) -> Pose2:
        return Pose2(Point2(self.x, self.y), self.yaw, frame="w")

    @property
    def position(self) -> Point2:
        return Point2(self.x, self.y)

    @property
    def velocity(self) -> Point2:
        return Point2(self.vx, self.vy)


def step(
    state: VehicleState,
    command: VelocityCommand,
    wall: WallGeometry | None,
    dt: float,
    tau: float = 0.3,
) -> VehicleState:
    """Advance the plant by ``dt`` seconds (wall frame)."""
    if not 0.0 < dt <= 0.1:
        raise ValueError(f"dt must lie in (0, 0.1], got {dt!r}")
    if not state.airborne:
        return replace(state, vx=0.0, vy=0.0, yaw_rate=0.0, body_accel_y=0.0, in_contact=False, t=state.t + dt)

    alpha = 1.0 - math.exp(-dt / tau)
    vx = state.vx + alpha * (command.vx - state.vx)
    vy = state.vy + alpha * (command.vy - state.vy)
    wz = state.yaw_rate + alpha * (command.yaw_rate - state.yaw_rate)
    yaw = normalize_angle(state.yaw + wz * dt)
    nx, ny = state.x + vx * dt, state.y + vy * dt

    in_contact = False
    if wall is not None and wall.penetration(Point2(nx, ny)) > 0.0:
        hit = wall.first_crossing(Point2(state.x, state.y), Point2(nx, ny))
        nx, ny = hit
        n = wall.inward_normal(nx)
        vn = vx * n.x + vy * n.y
        if vn > 0.0:
            vx -= vn * n.x
            vy -= vn * n.y
        in_contact = True

    ax = (vx - state.vx) / dt
    ay = (vy - state.vy) / dt
    by = body_normal(yaw)
    return VehicleState(
        x=nx,
        y=ny,
        yaw=yaw,
        vx=vx,
        vy=vy,
        yaw_rate=wz,
        body_accel_y=ax * by.x + ay * by.y,
        airborne=True,
        in_contact=in_contact,
        t=state.t + dt,
    )


def detect_contact(body_accel_y: float, threshold_g: float = 0.25) -> bool:
    return abs(body_accel_y) > threshold_g * G


# ------------------------------------------------------------------ localization


@dataclass(frozen=True)
class NoiseModel:
    """Localization error model; all standard deviations, per step where noted."""

    position_std: float = 0.0
    yaw_std: float = 0.0
    drift_position_std: float = 0.0  # m per sqrt(step)
    drift_yaw_std: float = 0.0  # rad per sqrt(step)
    accel_std: float = 0.0  # m/s^2

    @classmethod
    def ground_truth(cls) -> "NoiseModel":
        return cls()

    @classmethod
    def default_noisy(cls) -> "NoiseModel":
        return cls(position_std=0.01, yaw_std=math.radians(0.5), drift_position_std=0.001)

    @property
    def is_noise_free(self) -> bool:
        return not any((self.position_std, self.yaw_std, self.drift_position_std, self.drift_yaw_std, self.accel_std))


class NormalStream:
    """Buffered standard-normal draws from a seeded numpy generator."""

    def __init__(self, seed: int | np.random.Generator, block: int = 8192):
        self._rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
        self._block = block
        self._buf: list[float] = []
        self._pos = 0

    def __call__(self) -> float:
        if self._pos >= len(self._buf):
            self._buf = self._rng.standard_normal(self._block).tolist()
            self._pos = 0
        v = self._buf[self._pos]
        self._pos += 1
        return v


@dataclass(frozen=True)
class LocalizationState:
    measured_pose: Pose2 = field(default_factory=lambda: Pose2(Point2(0.0, 0.0), 0.0))
    drift: tuple[float, float, float] = (0.0, 0.0, 0.0)


def measure_pose(
    state: VehicleState,
    loc: LocalizationState,
    rng: Callable[[], float] | None,
    noise: NoiseModel,
    true_transform: RigidTransform2,
) -> tuple[Pose2, LocalizationState]:
    """One localization update: truth in the localization frame + drift + white noise."""
    p = wall_to_rho(Point2(state.x, state.y), true_transform)
    yaw = state.yaw - true_transform.gamma
    dx, dy, dpsi = loc.drift
    # the random walk only advances in flight; on the pad the estimate holds still
    if rng is not None and state.airborne:
        if noise.drift_position_std:
            dx += noise.drift_position_std * rng()
            dy += noise.drift_position_std * rng()
        if noise.drift_yaw_std:
            dpsi += noise.drift_yaw_std * rng()
    mx, my, mpsi = p.x + dx, p.y + dy, yaw + dpsi
    if rng is not None:
        if noise.position_std:
            mx += noise.position_std * rng()
            my += noise.position_std * rng()
        if noise.yaw_std:
            mpsi += noise.yaw_std * rng()
    pose = Pose2(Point2(mx, my), mpsi)
    return pose, LocalizationState(pose, (dx, dy, dpsi))


def reset_localization(loc: LocalizationState, airborne: bool = False) -> LocalizationState:
    """Zero the accumulated drift; only allowed on the ground."""
    if airborne:
        raise ResetWhileAirborne("localization can only be reset after landing")
    return LocalizationState(loc.measured_pose, (0.0, 0.0, 0.0))


# -------------------------------------------------------------------- controller


@dataclass(frozen=True)
class ControllerConfig:
    kp: float = 1.2
    ki: float = 0.15
    kd: float = 0.0
    kp_yaw: float = 2.0
    ki_yaw: float = 0.1
    max_speed: float = 0.5
    max_yaw_rate: float = 1.0
    approach_speed: float = 0.25
    lateral_gain: float = 1.5
    contact_accel_threshold_g: float = 0.25
    waypoint_tolerance: float = 0.02
    yaw_tolerance: float = math.radians(1.0)
    settle_steps: int = 5
    max_waypoint_steps: int = 3000
    max_approach_distance: float = 2.5
    offset_delta: float = 0.8
    tau: float = 0.3
    integral_limit: float = 0.2

    def __post_init__(self) -> None:
        for name in ("kp", "ki", "kd", "kp_yaw", "ki_yaw"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} must be >= 0")
        if not self.contact_accel_threshold_g > 0.0:
            raise ValueError("contact threshold must be > 0")
        if not self.offset_delta > 0.0:
            raise ValueError("offset_delta must be > 0")
        if not self.approach_speed > 0.0:
            raise ValueError("approach_speed must be > 0")


@dataclass(frozen=True)
class Touch:
    """Outcome of one approach: measured contact and where the paint landed."""

    measured: Pose2
    applied_w: Point2
    t: float


TELEMETRY_FIELDS = (
    "t_s",
    "true_x_m",
    "true_y_m",
    "true_yaw_deg",
    "meas_x_m",
    "meas_y_m",
    "meas_yaw_deg",
    "body_accel_y_mps2",
    "airborne",
    "contact",
    "event",
)


class Simulator:
    """Closed-loop vehicle: plant, localization and the position/velocity controllers.

    Commands are issued in the localization frame from the *measured* pose; the
    plant converts them to the wall frame with the true offset.
    """

    def __init__(
        self,
        wall: WallGeometry | None,
        true_transform: RigidTransform2,
        controller: ControllerConfig | None = None,
        noise: NoiseModel | None = None,
        seed: int = 0,
        dt: float = 0.02,
        telemetry: Callable[[tuple], None] | None = None,
    ):
        self.wall = wall
        self.true_transform = true_transform
        self.cfg = controller or ControllerConfig()
        self.noise = noise or NoiseModel()
        self.dt = dt
        self._rng = None if self.noise.is_noise_free else NormalStream(seed)
        self._telemetry = telemetry
        home = true_transform.delta
        self.state = VehicleState(x=home.x, y=home.y, yaw=true_transform.gamma, airborne=True)
        self.loc = LocalizationState()
        self.flight_time = 0.0
        self._gc, self._gs = math.cos(true_transform.gamma), math.sin(true_transform.gamma)
        self._measure()

    # -- primitives -------------------------------------------------------

    @property
    def t(self) -> float:
        return self.state.t

    @property
    def measured(self) -> Pose2:
        return self.loc.measured_pose

    def _measure(self) -> None:
        _, self.loc = measure_pose(self.state, self.loc, self._rng, self.noise, self.true_transform)

    def _emit(self, event: str = "") -> None:
        if self._telemetry is None:
            return
        s, m = self.state, self.loc.measured_pose
        self._telemetry(
            (
                s.t,
                s.x,
                s.y,
                math.degrees(s.yaw),
                m.position.x,
                m.position.y,
                math.degrees(m.yaw),
                s.body_accel_y,
                int(s.airborne),
                int(s.in_contact),
                event,
            )
        )

    def imu_accel_y(self) -> float:
        a = self.state.body_accel_y
        if self._rng is not None and self.noise.accel_std:
            a += self.noise.accel_std * self._rng()
        return a

    def tick(self, vx_rho: float, vy_rho: float, yaw_rate: float) -> None:
        c, s = self._gc, self._gs
        cmd = VelocityCommand(c * vx_rho - s * vy_rho, s * vx_rho + c * vy_rho, yaw_rate)
        self.state = step(self.state, cmd, self.wall, self.dt, self.cfg.tau)
        if self.state.airborne:
            self.flight_time += self.dt
        self._measure()
        self._emit()

    def _yaw_rate(self, yaw_ref: float, integ: float) -> tuple[float, float]:
        e = normalize_angle(yaw_ref - self.measured.yaw)
        integ = max(-self.cfg.integral_limit, min(self.cfg.integral_limit, integ + e * self.dt))
        w = self.cfg.kp_yaw * e + self.cfg.ki_yaw * integ
        lim = self.cfg.max_yaw_rate
        return max(-lim, min(lim, w)), integ

    # -- behaviours -------------------------------------------------------

    def goto_waypoint(self, target: Pose2, max_steps: int | None = None) -> int:
        """PID hold on ``target`` until inside tolerance for ``settle_steps`` steps.

        Returns the number of steps used; raises :class:`WaypointTimeout`.
        """
        cfg = self.cfg
        max_steps = cfg.max_waypoint_steps if max_steps is None else max_steps
        tx, ty = target.position
        ix = iy = iyaw = 0.0
        prev_ex = prev_ey = None
        settled = 0
        for n in range(max_steps + 1):
            m = self.measured
            ex, ey = tx - m.position.x, ty - m.position.y
            eyaw = normalize_angle(target.yaw - m.yaw)
            if math.hypot(ex, ey) < cfg.waypoint_tolerance and abs(eyaw) < cfg.yaw_tolerance:
                settled += 1
                if settled >= cfg.settle_steps:
                    return n
            else:
                settled = 0
            if n == max_steps:
                break
            lim = cfg.integral_limit
            ix = max(-lim, min(lim, ix + ex * self.dt))
            iy = max(-lim, min(lim, iy + ey * self.dt))
            vx = cfg.kp * ex + cfg.ki * ix
            vy = cfg.kp * ey + cfg.ki * iy
            if cfg.kd and prev_ex is not None:
                vx += cfg.kd * (ex - prev_ex) / self.dt
                vy += cfg.kd * (ey - prev_ey) / self.dt
            prev_ex, prev_ey = ex, ey
            sp = math.hypot(vx, vy)
            if sp > cfg.max_speed:
                vx, vy = vx * cfg.max_speed / sp, vy * cfg.max_speed / sp
            w, iyaw = self._yaw_rate(target.yaw, iyaw)
            self.tick(vx, vy, w)
        raise WaypointTimeout(f"waypoint {tuple(target.position)} not reached in {max_steps} steps")

    def approach_and_touch(self, yaw_ref: float, retreat_to: Pose2 | None = None) -> Touch:
        """Fly along the commanded body normal until the IMU reports a contact.

        The approach line runs through ``retreat_to`` (the waiting point) or,
        when omitted, through the current position, and is held with a
        lateral correction. After the contact the vehicle returns to the
        start of that line.
        """
        cfg = self.cfg
        n = body_normal(yaw_ref)
        start = retreat_to.position if retreat_to is not None else self.measured.position
        iyaw = 0.0
        max_steps = int(math.ceil(cfg.max_approach_distance / (cfg.approach_speed * self.dt))) + 200
        touch = None
        for _ in range(max_steps):
            m = self.measured.position
            rel = Point2(m.x - start.x, m.y - start.y)
            along = rel.x * n.x + rel.y * n.y
            if along > cfg.max_approach_distance:
                break
            lat_x, lat_y = rel.x - along * n.x, rel.y - along * n.y
            vx = cfg.approach_speed * n.x - cfg.lateral_gain * lat_x
            vy = cfg.approach_speed * n.y - cfg.lateral_gain * lat_y
            w, iyaw = self._yaw_rate(yaw_ref, iyaw)
            self.tick(vx, vy, w)
            if detect_contact(self.imu_accel_y(), cfg.contact_accel_threshold_g):
                touch = Touch(self.measured, self.state.position, self.t)
                self._emit("contact")
                break
        back = retreat_to if retreat_to is not None else Pose2(start, yaw_ref)
        if touch is None:
            self.goto_waypoint(back)
            raise NoContact(f"no wall contact within {cfg.max_approach_distance} m")
        self.goto_waypoint(back)
        return touch

    def land_and_reset(self) -> None:
        """Fly home, land on the pad, reset localization and take off again."""
        self.goto_waypoint(Pose2(Point2(0.0, 0.0), 0.0))
        home = self.true_transform.delta
        # pad tag guides the touchdown onto the true take-off spot
        self.state = replace(
            self.state,
            x=home.x,
            y=home.y,
            yaw=self.true_transform.gamma,
            vx=0.0,
            vy=0.0,
            yaw_rate=0.0,
            body_accel_y=0.0,
            airborne=False,
            in_contact=False,
        )
        self._emit("land")
        self.loc = reset_localization(self.loc, self.state.airborne)
        self._measure()
        self._emit("reset")
        self.flight_time = 0.0
        self.state = replace(self.state, airborne=True)
        self._emit("takeoff")
