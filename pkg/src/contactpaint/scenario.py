"""Scenario files: versioned YAML with unit-suffixed keys.

A scenario is parsed into a *normalized* mapping (every key present, defaults
filled, degrees kept as written) and a :class:`MissionConfig` built from it.
Echoing the normalized mapping and loading it again yields the same config.

Schema version 1::

    schema_version: 1
    name: flat-gamma10
    seed: 0
    drawing: builtin            # or a list of [x_m, z_m] pairs, in application order
    true_gamma_deg: 10.0
    true_delta_m: [0.0, -1.1]
    briefed_distance_m: 1.1
    wall:
      segment_angles_deg: [0.0] # left to right
      breakpoints_x_m: null     # null: equal widths over the drawing
    estimation: true
    segment_estimation: auto    # auto | true | false
    localization: gt            # gt | noisy
    battery_budget_s: 480.0     # null disables landing cycles
    bootstrap_offset_m: 1.0
    epsilon_bar_m: 0.05
    min_split_dx_m: 0.2
    dt_s: 0.02
    controller: {...}           # see CONTROLLER_KEYS
    noise: {...}                # see NOISE_KEYS, used when localization is noisy
"""

from __future__ import annotations

import copy
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any, Callable

import yaml

from .drawing import sample_drawing, to_wall_points
from .errors import ScenarioError
from .flightsim import ControllerConfig, NoiseModel
from .frames import Point2, RigidTransform2
from .mission import MissionConfig, WallSpec

SCHEMA_VERSION = 1

# yaml key -> (ControllerConfig field, converter from file units)
CONTROLLER_KEYS: dict[str, tuple[str, Callable[[float], float]]] = {
    "kp": ("kp", float),
    "ki": ("ki", float),
    "kd": ("kd", float),
    "kp_yaw": ("kp_yaw", float),
    "ki_yaw": ("ki_yaw", float),
    "max_speed_mps": ("max_speed", float),
    "max_yaw_rate_rps": ("max_yaw_rate", float),
    "approach_speed_mps": ("approach_speed", float),
    "lateral_gain": ("lateral_gain", float),
    "contact_accel_threshold_g": ("contact_accel_threshold_g", float),
    "waypoint_tolerance_m": ("waypoint_tolerance", float),
    "yaw_tolerance_deg": ("yaw_tolerance", math.radians),
    "settle_steps": ("settle_steps", int),
    "max_waypoint_steps": ("max_waypoint_steps", int),
    "max_approach_distance_m": ("max_approach_distance", float),
    "offset_delta_m": ("offset_delta", float),
    "tau_s": ("tau", float),
    "integral_limit": ("integral_limit", float),
}
INT_CONTROLLER_KEYS = {"settle_steps", "max_waypoint_steps"}

NOISE_KEYS: dict[str, tuple[str, Callable[[float], float]]] = {
    "position_std_m": ("position_std", float),
    "yaw_std_deg": ("yaw_std", math.radians),
    "drift_position_std_m": ("drift_position_std", float),
    "drift_yaw_std_deg": ("drift_yaw_std", math.radians),
    "accel_std_mps2": ("accel_std", float),
}

_DEFAULT_CONTROLLER = {
    "kp": 1.2,
    "ki": 0.15,
    "kd": 0.0,
    "kp_yaw": 2.0,
    "ki_yaw": 0.1,
    "max_speed_mps": 0.5,
    "max_yaw_rate_rps": 1.0,
    "approach_speed_mps": 0.25,
    "lateral_gain": 1.5,
    "contact_accel_threshold_g": 0.25,
    "waypoint_tolerance_m": 0.02,
    "yaw_tolerance_deg": 1.0,
    "settle_steps": 5,
    "max_waypoint_steps": 3000,
    "max_approach_distance_m": 2.5,
    "offset_delta_m": 0.8,
    "tau_s": 0.3,
    "integral_limit": 0.2,
}

_DEFAULT_NOISE = {
    "position_std_m": 0.01,
    "yaw_std_deg": 0.5,
    "drift_position_std_m": 0.001,
    "drift_yaw_std_deg": 0.0,
    "accel_std_mps2": 0.0,
}

DEFAULTS: dict[str, Any] = {
    "schema_version": SCHEMA_VERSION,
    "name": "scenario",
    "seed": 0,
    "drawing": "builtin",
    "true_gamma_deg": 0.0,
    "true_delta_m": [0.0, -1.1],
    "briefed_distance_m": 1.1,
    "wall": {"segment_angles_deg": [0.0], "breakpoints_x_m": None},
    "estimation": True,
    "segment_estimation": "auto",
    "localization": "gt",
    "battery_budget_s": 480.0,
    "bootstrap_offset_m": 1.0,
    "epsilon_bar_m": 0.05,
    "min_split_dx_m": 0.2,
    "dt_s": 0.02,
    "controller": _DEFAULT_CONTROLLER,
    "noise": _DEFAULT_NOISE,
}


@dataclass(frozen=True)
class Scenario:
    data: dict
    config: MissionConfig

    def echo(self) -> str:
        return dump_scenario(self.data)

    def with_overrides(self, **changes: Any) -> "Scenario":
        """Replace top-level keys (file units) and rebuild the config."""
        data = copy.deepcopy(self.data)
        for k, v in changes.items():
            if k not in DEFAULTS:
                raise ScenarioError(f"unknown scenario key {k!r}")
            data[k] = v
        return parse_mapping(data)


# -- line bookkeeping ---------------------------------------------------------


def _index_lines(node: yaml.Node, path: tuple, out: dict) -> None:
    out[path] = node.start_mark.line + 1
    if isinstance(node, yaml.MappingNode):
        for k, v in node.value:
            key = k.value
            out[path + (key,)] = k.start_mark.line + 1
            _index_lines(v, path + (key,), out)
            out[path + (key,)] = k.start_mark.line + 1
    elif isinstance(node, yaml.SequenceNode):
        for i, v in enumerate(node.value):
            _index_lines(v, path + (i,), out)


class _Checker:
    """Raises :class:`ScenarioError` with the line of the offending key."""

    def __init__(self, lines: dict, source: str | None):
        self.lines = lines
        self.source = source

    def fail(self, path: tuple, msg: str):
        line = None
        p = path
        while p and line is None:
            line = self.lines.get(p)
            p = p[:-1]
        if line is None:
            line = self.lines.get(())
        dotted = ".".join(str(x) for x in path) or "<root>"
        raise ScenarioError(f"{dotted}: {msg}", line=line, path=self.source)

    def number(self, v: Any, path: tuple, *, positive=False, nonneg=False, integer=False) -> float | int:
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            self.fail(path, f"expected a number, got {v!r}")
        if integer and not isinstance(v, int):
            self.fail(path, f"expected an integer, got {v!r}")
        if not math.isfinite(v):
            self.fail(path, "must be finite")
        if positive and not v > 0:
            self.fail(path, f"must be > 0, got {v!r}")
        if nonneg and v < 0:
            self.fail(path, f"must be >= 0, got {v!r}")
        return v if integer else float(v)

    def mapping(self, v: Any, path: tuple, allowed: dict) -> dict:
        if not isinstance(v, dict):
            self.fail(path, "expected a mapping")
        for k in v:
            if k not in allowed:
                self.fail(path + (k,), f"unknown key (allowed: {', '.join(sorted(allowed))})")
        return v


# -- parsing ------------------------------------------------------------------


def _normalize(raw: Any, chk: _Checker) -> dict:
    if not isinstance(raw, dict):
        chk.fail((), "scenario must be a mapping")
    chk.mapping(raw, (), DEFAULTS)
    if "schema_version" not in raw:
        chk.fail((), "missing required key schema_version")
    if raw["schema_version"] != SCHEMA_VERSION:
        chk.fail(("schema_version",), f"unsupported schema version {raw['schema_version']!r} (expected {SCHEMA_VERSION})")

    d: dict[str, Any] = {}
    get = lambda k: raw.get(k, copy.deepcopy(DEFAULTS[k]))  # noqa: E731

    d["schema_version"] = SCHEMA_VERSION
    name = get("name")
    if not isinstance(name, str) or not name:
        chk.fail(("name",), "expected a non-empty string")
    d["name"] = name
    d["seed"] = chk.number(get("seed"), ("seed",), integer=True, nonneg=True)

    drawing = get("drawing")
    if drawing == "builtin":
        d["drawing"] = "builtin"
    elif isinstance(drawing, list):
        if not drawing:
            chk.fail(("drawing",), "needs at least one dot")
        dots = []
        for i, p in enumerate(drawing):
            if not isinstance(p, list) or len(p) != 2:
                chk.fail(("drawing", i), "each dot is a [x_m, z_m] pair")
            dots.append([chk.number(p[0], ("drawing", i, 0)), chk.number(p[1], ("drawing", i, 1))])
        d["drawing"] = dots
    else:
        chk.fail(("drawing",), "expected 'builtin' or a list of [x_m, z_m] pairs")

    d["true_gamma_deg"] = chk.number(get("true_gamma_deg"), ("true_gamma_deg",))
    if not -90.0 < d["true_gamma_deg"] < 90.0:
        chk.fail(("true_gamma_deg",), "must lie in (-90, 90)")
    delta = get("true_delta_m")
    if not isinstance(delta, list) or len(delta) != 2:
        chk.fail(("true_delta_m",), "expected [x_m, y_m]")
    d["true_delta_m"] = [chk.number(delta[0], ("true_delta_m", 0)), chk.number(delta[1], ("true_delta_m", 1))]
    d["briefed_distance_m"] = chk.number(get("briefed_distance_m"), ("briefed_distance_m",))

    wall = chk.mapping(get("wall"), ("wall",), DEFAULTS["wall"])
    angles = wall.get("segment_angles_deg", [0.0])
    if not isinstance(angles, list) or not angles:
        chk.fail(("wall", "segment_angles_deg"), "expected a non-empty list")
    angles = [chk.number(a, ("wall", "segment_angles_deg", i)) for i, a in enumerate(angles)]
    for i, a in enumerate(angles):
        if not -60.0 < a < 60.0:
            chk.fail(("wall", "segment_angles_deg", i), "segment angle must lie in (-60, 60)")
    bps = wall.get("breakpoints_x_m")
    if bps is not None:
        if not isinstance(bps, list):
            chk.fail(("wall", "breakpoints_x_m"), "expected a list or null")
        bps = [chk.number(b, ("wall", "breakpoints_x_m", i)) for i, b in enumerate(bps)]
        if len(bps) != len(angles) - 1:
            chk.fail(("wall", "breakpoints_x_m"), f"need {len(angles) - 1} breakpoints for {len(angles)} segments")
        if any(b1 <= b0 for b0, b1 in zip(bps, bps[1:])):
            chk.fail(("wall", "breakpoints_x_m"), "breakpoints must increase strictly")
    d["wall"] = {"segment_angles_deg": angles, "breakpoints_x_m": bps}

    for key in ("estimation",):
        v = get(key)
        if not isinstance(v, bool):
            chk.fail((key,), "expected true or false")
        d[key] = v
    seg = get("segment_estimation")
    if seg not in ("auto", True, False):
        chk.fail(("segment_estimation",), "expected auto, true or false")
    d["segment_estimation"] = seg
    loc = get("localization")
    if loc not in ("gt", "noisy"):
        chk.fail(("localization",), "expected gt or noisy")
    d["localization"] = loc

    budget = get("battery_budget_s")
    d["battery_budget_s"] = None if budget is None else chk.number(budget, ("battery_budget_s",), positive=True)
    d["bootstrap_offset_m"] = chk.number(get("bootstrap_offset_m"), ("bootstrap_offset_m",))
    if d["bootstrap_offset_m"] == 0.0:
        chk.fail(("bootstrap_offset_m",), "must be non-zero")
    d["epsilon_bar_m"] = chk.number(get("epsilon_bar_m"), ("epsilon_bar_m",), positive=True)
    d["min_split_dx_m"] = chk.number(get("min_split_dx_m"), ("min_split_dx_m",), nonneg=True)
    d["dt_s"] = chk.number(get("dt_s"), ("dt_s",), positive=True)
    if d["dt_s"] > 0.1:
        chk.fail(("dt_s",), "must be <= 0.1")

    ctrl = chk.mapping(get("controller"), ("controller",), CONTROLLER_KEYS)
    d["controller"] = {
        k: chk.number(ctrl.get(k, dv), ("controller", k), nonneg=True, integer=k in INT_CONTROLLER_KEYS)
        for k, dv in _DEFAULT_CONTROLLER.items()
    }
    noise = chk.mapping(get("noise"), ("noise",), NOISE_KEYS)
    d["noise"] = {k: chk.number(noise.get(k, dv), ("noise", k), nonneg=True) for k, dv in _DEFAULT_NOISE.items()}
    return d


def _build_config(d: dict, chk: _Checker) -> MissionConfig:
    dots = sample_drawing() if d["drawing"] == "builtin" else [tuple(p) for p in d["drawing"]]
    refs, heights = to_wall_points(dots)
    angles = tuple(math.radians(a) for a in d["wall"]["segment_angles_deg"])
    if d["wall"]["breakpoints_x_m"] is None:
        xs = [p.x for p in refs]
        if len(angles) > 1 and max(xs) == min(xs):
            chk.fail(("wall", "breakpoints_x_m"), "drawing has no width; give the breakpoints explicitly")
        wall = WallSpec.equal_thirds(angles, min(xs), max(xs)) if len(angles) > 1 else WallSpec(angles)
    else:
        wall = WallSpec(angles, tuple(d["wall"]["breakpoints_x_m"]))
    ctrl_kwargs = {CONTROLLER_KEYS[k][0]: CONTROLLER_KEYS[k][1](v) for k, v in d["controller"].items()}
    noise_kwargs = {NOISE_KEYS[k][0]: NOISE_KEYS[k][1](v) for k, v in d["noise"].items()}
    seg = d["segment_estimation"]
    try:
        controller = ControllerConfig(**ctrl_kwargs)
        return MissionConfig(
            dots_ref_w=tuple(refs),
            dot_heights=tuple(heights),
            true_transform=RigidTransform2(math.radians(d["true_gamma_deg"]), Point2(*d["true_delta_m"])),
            briefed_distance=d["briefed_distance_m"],
            wall=wall,
            estimation_enabled=d["estimation"],
            segment_estimation=None if seg == "auto" else seg,
            localization=d["localization"],
            seed=d["seed"],
            battery_budget_s=d["battery_budget_s"],
            epsilon_bar=d["epsilon_bar_m"],
            min_split_dx=d["min_split_dx_m"],
            bootstrap_offset=d["bootstrap_offset_m"],
            dt=d["dt_s"],
            controller=controller,
            noise=NoiseModel(**noise_kwargs),
            name=d["name"],
        )
    except ValueError as exc:
        chk.fail((), str(exc))


def parse_mapping(raw: Any, lines: dict | None = None, source: str | None = None) -> Scenario:
    chk = _Checker(lines or {}, source)
    data = _normalize(raw, chk)
    return Scenario(data, _build_config(data, chk))


def load_yaml_with_lines(text: str, source: str | None = None) -> tuple[Any, dict]:
    """Parse YAML text, returning the plain value and a ``path -> line`` map."""
    try:
        node = yaml.compose(text, Loader=yaml.SafeLoader)
        raw = yaml.safe_load(text)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark or exc.context_mark
        line = mark.line + 1 if mark is not None else None
        raise ScenarioError(f"YAML syntax error: {exc.problem or exc}", line=line, path=source) from None
    except yaml.YAMLError as exc:
        raise ScenarioError(f"YAML error: {exc}", path=source) from None
    lines: dict = {}
    if node is not None:
        _index_lines(node, (), lines)
    return raw, lines


def parse_scenario(text: str, source: str | None = None) -> Scenario:
    raw, lines = load_yaml_with_lines(text, source)
    return parse_mapping(raw, lines, source)


def load_scenario(path: str | Path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario: {exc.strerror}", path=str(path)) from None
    return parse_scenario(text, str(path))


def dump_scenario(data: dict) -> str:
    return yaml.safe_dump(data, sort_keys=False, default_flow_style=None)


def bundled_path(name: str) -> Path:
    """Path of a scenario or sweep file shipped with the package."""
    ref = resources.files("contactpaint") / "scenarios" / name
    with resources.as_file(ref) as p:
        return Path(p)


def bundled_names() -> list[str]:
    return sorted(p.name for p in (resources.files("contactpaint") / "scenarios").iterdir() if p.name.endswith(".yaml"))
