"""Contact-based dot painting with an aerial robot: frame estimation from wall
contacts, online piecewise-linear wall modelling and a planar flight simulator."""

from .contact_align import (
    AlignmentEstimate,
    ContactRecord,
    estimate_rigid_transform,
    solve_weighted_centroids,
    update_targets,
    yaw_reference,
)
from .errors import (
    ContactPaintError,
    DegenerateGeometry,
    NoContact,
    ResetWhileAirborne,
    ScenarioError,
    TooFewContacts,
    VerticalLine,
    WaypointTimeout,
)
from .frames import Point2, Pose2, RigidTransform2, normalize_angle, rho_to_wall, wall_to_rho
from .mission import MissionConfig, MissionReport, WallSpec, compute_waiting_point, make_bootstrap_dot, run_mission
from .scenario import Scenario, dump_scenario, load_scenario, parse_scenario
from .wall_model import Line2, WallModel, init_wall_model, ols_line, prediction_error, project_next_target, update_wall_model

__version__ = "0.1.0"

__all__ = [
    "AlignmentEstimate",
    "ContactPaintError",
    "ContactRecord",
    "DegenerateGeometry",
    "Line2",
    "MissionConfig",
    "MissionReport",
    "NoContact",
    "Point2",
    "Pose2",
    "ResetWhileAirborne",
    "RigidTransform2",
    "Scenario",
    "ScenarioError",
    "TooFewContacts",
    "VerticalLine",
    "WallModel",
    "WallSpec",
    "WaypointTimeout",
    "compute_waiting_point",
    "dump_scenario",
    "estimate_rigid_transform",
    "init_wall_model",
    "load_scenario",
    "make_bootstrap_dot",
    "normalize_angle",
    "ols_line",
    "parse_scenario",
    "prediction_error",
    "project_next_target",
    "rho_to_wall",
    "run_mission",
    "solve_weighted_centroids",
    "update_targets",
    "update_wall_model",
    "wall_to_rho",
    "yaw_reference",
]
