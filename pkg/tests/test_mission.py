import math
import statistics

import numpy as np
import pytest

from contactpaint.contact_align import yaw_reference
from contactpaint.drawing import sample_drawing, to_wall_points
from contactpaint.flightsim import ControllerConfig, NoiseModel
from contactpaint.frames import Point2, RigidTransform2, body_normal
from contactpaint.mission import (
    MissionConfig,
    WallSpec,
    compute_waiting_point,
    make_bootstrap_dot,
    rmse_cm,
    run_mission,
)

import oracles

REFS, HEIGHTS = to_wall_points(sample_drawing())


def cfg(gamma_deg=0.0, **kw):
    kw.setdefault("dots_ref_w", tuple(REFS))
    kw.setdefault("dot_heights", tuple(HEIGHTS))
    return MissionConfig(true_transform=RigidTransform2(math.radians(gamma_deg), Point2(0.0, -1.1)), **kw)


@pytest.fixture(scope="module")
def gt10_noest():
    return run_mission(cfg(10.0, estimation_enabled=False))


def test_drawing_shape():
    dots = sample_drawing()
    assert len(dots) == 140
    xs, zs = [d[0] for d in dots], [d[1] for d in dots]
    assert max(xs) - min(xs) == pytest.approx(3.5)
    assert max(zs) - min(zs) == pytest.approx(2.1)
    # right to left, top to bottom
    assert dots[0] == (max(xs), max(zs)) and dots[-1] == (min(xs), min(zs))
    assert all(a[0] >= b[0] for a, b in zip(dots, dots[1:]))


def test_single_dot_exact_offset():
    rep = run_mission(cfg(dots_ref_w=(Point2(0.0, 0.0),), dot_heights=(1.0,), use_bootstrap=False))
    assert len(rep.painted) == 1
    assert rep.painted[0].error_m < ControllerConfig().waypoint_tolerance


def test_bootstrap_dot():
    assert make_bootstrap_dot([Point2(0, 1)], 1.0) == (1.0, 1.0)
    with pytest.raises(ValueError):
        make_bootstrap_dot([Point2(0, 1)], 0.0)
    with pytest.raises(ValueError):
        make_bootstrap_dot([], 1.0)
    with pytest.raises(ValueError):
        cfg(bootstrap_offset=0.0)


def test_waiting_point():
    w = compute_waiting_point(Point2(0, 1.1), 0.4, 0.0)
    assert w.position == pytest.approx((0.0, 0.7)) and w.yaw == 0.0
    g = math.radians(-10)
    w = compute_waiting_point(Point2(0.3, 1.1), 0.4, g)
    n = body_normal(g)
    assert w.position == pytest.approx((0.3 - 0.4 * n.x, 1.1 - 0.4 * n.y))
    assert (Point2(0.3, 1.1) - w.position).norm() == pytest.approx(0.4)
    assert w.yaw == pytest.approx(g)
    with pytest.raises(ValueError):
        compute_waiting_point(Point2(0, 1.1), 0.0, 0.0)


def test_config_validation():
    with pytest.raises(ValueError):
        cfg(dots_ref_w=(), dot_heights=None)
    with pytest.raises(ValueError):
        cfg(localization="ptam")


def test_rmse_helper():
    assert rmse_cm([0.03, 0.04]) == pytest.approx(100 * math.sqrt((0.0009 + 0.0016) / 2))
    assert math.isnan(rmse_cm([]))


def test_bootstrap_excluded_and_order(gt10_noest):
    rep = gt10_noest
    assert rep.dots[0].bootstrap and rep.dots[0].index == 0
    assert len(rep.painted) == 140 and len(rep.errors_cm) == 140
    assert [d.index for d in rep.dots] == list(range(141))
    assert [d.ref_w for d in rep.dots[1:]] == REFS
    ts = [d.t for d in rep.dots]
    assert ts == sorted(ts)
    assert rep.rmse_cm >= 0.0


def test_without_estimation_matches_geometry(gt10_noest):
    # every dot lands where the uncorrected rotation sends it
    g = math.radians(10.0)
    expected = [abs(oracles.uncorrected_hit_x(p.x, g, -1.1, 1.1) - p.x) for p in REFS]
    got = [d.error_m for d in gt10_noest.painted]
    assert np.max(np.abs(np.array(got) - np.array(expected))) < 0.02
    assert gt10_noest.rmse_cm == pytest.approx(rmse_cm(expected), abs=1.0)
    assert gt10_noest.rmse_cm > 10.0


def test_gamma0_without_estimation_is_tight():
    rep = run_mission(cfg(0.0, estimation_enabled=False))
    assert rep.rmse_cm < 2.0
    assert not rep.failures


def test_gamma10_estimation_recovers_rotation():
    rep = run_mission(cfg(10.0))
    assert abs(math.degrees(rep.estimate.gamma) - 10.0) < 0.05
    assert not rep.failures
    # along-wall translation is what flat-wall contacts cannot pin down
    assert abs(rep.estimate.delta.y + 1.1) < 0.01


def test_estimate_persists_across_landing():
    rep = run_mission(cfg(10.0, battery_budget_s=120.0, dots_ref_w=tuple(REFS[:60]), dot_heights=tuple(HEIGHTS[:60])))
    lands = [k for k, e in enumerate(rep.events) if e.kind == "land"]
    assert lands
    for k in lands:
        land, reset = rep.events[k], rep.events[k + 1]
        assert reset.kind == "reset"
        assert land.gamma == reset.gamma and land.delta == reset.delta
    # the last estimate before the landing is the one the next dot starts from
    d = rep.events[lands[0]].dot
    before = rep.dots[d - 1].estimate
    assert (rep.events[lands[0]].gamma, rep.events[lands[0]].delta) == (before.gamma, before.delta)


def test_events_logged(gt10_noest):
    kinds = [e.kind for e in gt10_noest.events]
    assert kinds.count("contact") == 141
    assert "land" in kinds and "reset" in kinds


def test_failures_are_logged_and_skipped():
    ctrl = ControllerConfig(max_approach_distance=0.3)
    rep = run_mission(cfg(0.0, controller=ctrl, dots_ref_w=tuple(REFS[:3]), dot_heights=tuple(HEIGHTS[:3])))
    assert len(rep.dots) == 4
    assert all(d.status == "NoContact" for d in rep.dots)
    assert rep.painted == [] and math.isnan(rep.rmse_cm)
    assert rep.estimate.n_contacts == 0
    assert [e.kind for e in rep.events].count("failure") == 4


def test_yaw_follows_estimate():
    rep = run_mission(cfg(-15.0, dots_ref_w=tuple(REFS[:5]), dot_heights=tuple(HEIGHTS[:5])))
    for prev, d in zip(rep.dots, rep.dots[1:]):
        assert d.yaw_ref == pytest.approx(yaw_reference(prev.estimate))


def _gamma_errors_after(contacts, noise=None, seeds=range(20)):
    n = max(contacts) + 1
    out = {k: [] for k in contacts}
    for seed in seeds:
        c = cfg(10.0, localization="noisy", noise=noise, seed=seed, dots_ref_w=tuple(REFS[:n]), dot_heights=tuple(HEIGHTS[:n]))
        ok = [d for d in run_mission(c).dots if d.status == "ok"]
        for k in contacts:
            out[k].append(abs(math.degrees(ok[k - 1].estimate.gamma) - 10.0))
    return {k: statistics.median(v) for k, v in out.items()}


def test_estimate_improves_with_contacts_default_noise():
    med = _gamma_errors_after((2, 20))
    assert med[20] < med[2]


def test_estimate_improves_with_contacts_white_noise():
    med = _gamma_errors_after((2, 20), NoiseModel(position_std=0.01, yaw_std=math.radians(0.5)))
    assert med[20] < med[2]


def test_multi_segment_uses_wall_model():
    wall = WallSpec.equal_thirds([math.radians(a) for a in (-10, 0, 10)], min(p.x for p in REFS), max(p.x for p in REFS))
    rep = run_mission(cfg(0.0, wall=wall))
    assert rep.config.uses_wall_model
    assert rep.wall_model is not None and len(rep.wall_model.segments) == 3
    # targets after the model exists sit on its current line
    for d in rep.dots[3:]:
        assert d.segment_id is not None


def test_same_seed_same_report():
    c = cfg(10.0, localization="noisy", seed=3, dots_ref_w=tuple(REFS[:15]), dot_heights=tuple(HEIGHTS[:15]))
    a, b = run_mission(c), run_mission(c)
    assert [d.applied_w for d in a.dots] == [d.applied_w for d in b.dots]
    assert [d.estimate for d in a.dots] == [d.estimate for d in b.dots]
