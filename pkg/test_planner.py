"""
Tests for the planner: truncation orders, sketch widths, JL/median parameters.
"""
import dataclasses
import math
import os
import sys

import numpy as np
from pydantic import ValidationError

SCRIPT_DIR = os.path.dirname(os.path.abspath(__file__))
sys.path.append(os.path.join(SCRIPT_DIR, "src"))

from modules.errors import InfeasibleParametersError, InputShapeError
from modules.sketching.feature_maps import tail_bound_gs, tail_bound_hd
from modules.sketching.planner import (
    AccuracyTarget, PlannedConfig, estimate_radius, jl_plan, min_s_gs, min_s_hd, plan, plan_two_sample,
    sketch_dims, smallest_odd_at_least,
)


def test_min_s_gs_is_smallest_feasible():
    s = min_s_gs(2, 1.0, 1e-3, 4.0)
    assert s == 14
    assert 4 * 2 * math.e ** 4 * (2 * math.e / s) ** s <= 1e-3
    assert tail_bound_gs(2, 1.0, s - 1, 4.0) > 1e-3


def test_min_s_hd_is_smallest_feasible():
    s = min_s_hd(1.0, 1e-3, 4.0)
    assert s == 13
    assert tail_bound_hd(1.0, s, 4.0) <= 1e-3 < tail_bound_hd(1.0, s - 1, 4.0)


def test_min_s_returns_one_when_already_satisfied():
    assert min_s_gs(1, 0.1, tail_bound_gs(1, 0.1, 1, 4.0)) == 1
    assert min_s_hd(0.1, tail_bound_hd(0.1, 1, 4.0) * 1.01) == 1


def test_min_s_cap_is_infeasible():
    try:
        min_s_gs(4, 5.0, 1e-12, cap=10)
        assert False, "cap should make this infeasible"
    except InfeasibleParametersError:
        pass


def test_sketch_dims_examples():
    assert sketch_dims("gs", 2, 0.5, 8) == (64,)
    assert sketch_dims("hd", 3, 1.0, 8) == (8, 16, 24)
    assert sketch_dims("gs", 1, 1.0, 1) == (1,)
    assert sketch_dims("gs", 2, 0.5) == (160,)
    try:
        sketch_dims("gs", 2, 0.0)
        assert False, "epsilon = 0 should raise"
    except InputShapeError:
        pass


def test_jl_plan_examples():
    assert jl_plan(0.5, 0.5, c_med=1.0)[1] == 1
    assert jl_plan(0.5, 0.1)[0] == 32
    replicas = [jl_plan(0.5, delta)[1] for delta in (1e-1, 1e-3, 1e-6)]
    assert all(r % 2 == 1 for r in replicas)
    assert replicas == sorted(replicas) and replicas[-1] > replicas[0]
    assert smallest_odd_at_least(4.6) == 5
    assert smallest_odd_at_least(5.0) == 5
    assert smallest_odd_at_least(0.2) == 1


def test_accuracy_target_validation():
    AccuracyTarget(epsilon=0.5, alpha=1e-3, radius_linf=1.0, dimension=2)
    for bad in (dict(epsilon=1.5, alpha=1e-3, radius_linf=1.0, dimension=2),
                dict(epsilon=0.5, alpha=0.0, radius_linf=1.0, dimension=2),
                dict(epsilon=0.5, alpha=1e-3, dimension=2),
                dict(epsilon=0.5, alpha=1e-3, radius_linf=1.0, radius_l2=1.0, dimension=2)):
        try:
            AccuracyTarget(**bad)
            assert False, f"{bad} should not validate"
        except ValidationError:
            pass
    target = AccuracyTarget(epsilon=0.5, alpha=1e-3, radius_linf=1.0, dimension=2)
    try:
        target.radius_for("hd")
        assert False, "hd needs an L2 radius"
    except InputShapeError:
        pass


def test_plan_distance_gs_and_hd():
    gs = plan(AccuracyTarget(epsilon=0.5, alpha=1e-3, radius_linf=1.0, dimension=2), "gs")
    assert (gs.s, gs.dims, gs.xi) == (14, (160,), 4.0)
    assert gs.m == 160 and gs.jl_dim is None
    hd = plan(AccuracyTarget(epsilon=0.5, alpha=1e-3, radius_l2=1.0, dimension=2), "hd", with_jl=True)
    assert hd.s == 13 and hd.dims == tuple(80 * j for j in range(1, 14))
    assert hd.jl_dim == 32 and hd.replicas == 5


def test_plan_pca_uses_quadratic_xi():
    target = AccuracyTarget(epsilon=0.5, alpha=1e-2, radius_linf=1.0, dimension=2)
    planned = plan(target, "gs", task="pca", n=40)
    assert planned.xi == 4.0 * 40 * 40
    assert planned.s == min_s_gs(2, 1.0, 1e-2, 6400.0)
    try:
        plan(target, "gs", task="pca")
        assert False, "pca without n should raise"
    except InputShapeError:
        pass


def test_planned_config_validation_and_lines():
    target = AccuracyTarget(epsilon=0.5, alpha=1e-3, radius_linf=1.0, dimension=2)
    planned = plan(target, "gs")
    try:
        dataclasses.replace(planned, replicas=4)
        assert False, "even replica counts should raise"
    except InputShapeError:
        pass
    lines = planned.as_lines()
    assert lines[0] == "variant=gs"
    assert "s=14" in lines and "m=160" in lines and "jl_dim=none" in lines


def test_plan_two_sample_sets_alpha_from_n():
    planned = plan_two_sample(200, 2, 3.0)
    assert planned.alpha == 1.0 / 200
    assert planned.epsilon == 0.2
    assert planned.s == min_s_gs(2, 3.0, 1.0 / 200)


def test_estimate_radius():
    X = np.array([[0.5, -2.0], [1.0, 1.0]])
    assert estimate_radius(X, "gs") == 2.0
    assert estimate_radius(X, "hd") == np.linalg.norm([0.5, -2.0])
    assert estimate_radius(np.zeros((2, 2)), "gs") > 0


if __name__ == "__main__":
    for name, fn in list(globals().items()):
        if name.startswith("test_") and callable(fn):
            fn()
            print(f"✅ {name}")
