"""
Tests for JL post-compression and the median trick.
"""
import os
import sys

import numpy as np
from numpy.testing import assert_allclose, assert_array_equal

SCRIPT_DIR = os.path.dirname(os.path.abspath(__file__))
sys.path.append(os.path.join(SCRIPT_DIR, "src"))

from modules.errors import EmptyInputError, FingerprintMismatchError, InputShapeError
from modules.sketching.compress import (
    JlProjector, jl_project, median_estimate, replica_estimates, replica_seeds, replicated_dk2,
)
from modules.sketching.kernel_distance import error_budget, exact_dk2, sketched_dk2
from modules.sketching.planner import AccuracyTarget, jl_plan, plan
from modules.sketching.seeding import child_seed
from modules.sketching.sketchers import GaussianSketchLowD, embed_set


def small_plan(**kwargs):
    target = AccuracyTarget(epsilon=0.5, alpha=1e-3, radius_linf=1.0, dimension=2)
    return plan(target, "gs", **kwargs)


def test_jl_zero_and_shape():
    proj = JlProjector(64, 8, seed=0)
    assert_array_equal(jl_project(proj, np.zeros(64)), np.zeros(8))
    assert proj.project(np.ones((3, 64))).shape == (3, 8)
    assert set(np.unique(np.abs(proj.matrix))) == {1 / np.sqrt(8)}
    try:
        proj.project(np.ones(10))
        assert False, "wrong length should raise"
    except InputShapeError:
        pass


def test_jl_isometry_in_expectation():
    v = np.random.default_rng(0).standard_normal(32)
    norms = np.array([np.sum(JlProjector(32, 8, seed).project(v) ** 2) for seed in range(3000)])
    se = norms.std(ddof=1) / np.sqrt(norms.size)
    assert abs(norms.mean() - np.dot(v, v)) <= 4 * se


def test_projected_embeddings_carry_their_own_fingerprint():
    G = GaussianSketchLowD(2, 5, 64, seed=1)
    X = np.array([[0.1, 0.2], [0.3, -0.4]])
    plain = embed_set(G, X)
    projected = JlProjector(G.output_dim, 16, seed=2).project_embedding(plain)
    assert projected.vector.shape == (16,)
    assert projected.fingerprint != plain.fingerprint
    try:
        projected.squared_distance(plain)
        assert False, "projected and raw embeddings must not mix"
    except FingerprintMismatchError:
        pass
    other = JlProjector(G.output_dim, 16, seed=3).project_embedding(plain)
    try:
        projected.squared_distance(other)
        assert False, "different projectors must not mix"
    except FingerprintMismatchError:
        pass


def test_median_examples():
    assert median_estimate([2.5]) == 2.5
    assert median_estimate([3, 1, 2]) == 2
    for bad, exc in (([], EmptyInputError), ([1.0, 2.0], InputShapeError)):
        try:
            median_estimate(bad)
            assert False, f"{bad} should raise"
        except exc:
            pass


def test_replica_seeds_are_distinct_and_stable():
    seeds = replica_seeds(42, 7)
    assert len(set(seeds)) == 7
    assert seeds == replica_seeds(42, 7)


def test_replicated_distance_of_identical_sets_is_zero():
    P = np.random.default_rng(4).uniform(-1, 1, (6, 2))
    assert replicated_dk2(small_plan(), P, P, master_seed=0, replicas=3) == 0.0


def test_replicated_distance_is_median_and_thread_independent():
    rng = np.random.default_rng(5)
    P, Q = rng.uniform(-1, 1, (12, 2)), rng.uniform(-1, 1, (12, 2))
    planned = small_plan(with_jl=True)
    estimates = replica_estimates(planned, P, Q, master_seed=9, replicas=5, threads=1)
    assert len(estimates) == 5
    assert replicated_dk2(planned, P, Q, master_seed=9, replicas=5, threads=3) == sorted(estimates)[2]
    exact = exact_dk2(P, Q)
    assert abs(sorted(estimates)[2] - exact) <= 1.0 * exact + 1e-3


def test_replicated_uses_plan_defaults():
    rng = np.random.default_rng(6)
    P, Q = rng.uniform(-1, 1, (5, 2)), rng.uniform(-1, 1, (5, 2))
    planned = small_plan()
    assert len(replica_estimates(planned, P, Q, master_seed=1)) == planned.replicas
    assert_allclose(replicated_dk2(planned, P, Q, 1), replicated_dk2(planned, P, Q, 1), rtol=0)


def test_jl_preserves_pairwise_distance_at_planned_dim():
    jl_dim, _ = jl_plan(0.5, 0.1)
    rng = np.random.default_rng(7)
    a, b = rng.standard_normal(256), rng.standard_normal(256)
    target = np.sum((a - b) ** 2)
    hits = 0
    for seed in range(300):
        proj = JlProjector(256, jl_dim, seed)
        hits += abs(np.sum((proj.project(a) - proj.project(b)) ** 2) - target) <= 0.5 * target
    assert hits / 300 >= 2 / 3


def test_jl_composes_with_sketched_distance():
    planned = small_plan(with_jl=True)
    rng = np.random.default_rng(8)
    P, Q = rng.uniform(-1, 1, (10, 2)), rng.uniform(-1, 1, (10, 2))
    G = GaussianSketchLowD(2, planned.s, planned.dims[0], seed=11)
    fp, fq = embed_set(G, P), embed_set(G, Q)
    sketched = sketched_dk2(G, P, Q)
    hits = 0
    for seed in range(300):
        proj = JlProjector(G.output_dim, planned.jl_dim, child_seed(11, "projector", seed))
        projected = proj.project_embedding(fp).squared_distance(proj.project_embedding(fq))
        hits += abs(projected - sketched) <= planned.epsilon * sketched
    assert hits / 300 >= 2 / 3


def test_median_trick_failure_rate_within_delta():
    planned = small_plan()
    _, replicas = jl_plan(planned.epsilon, 0.1)
    assert replicas == 5
    failures, experiments = 0, 100
    for rep in range(experiments):
        rng = np.random.default_rng(100 + rep)
        P, Q = rng.uniform(-1, 1, (8, 2)), rng.uniform(-1, 1, (8, 2))
        exact = exact_dk2(P, Q)
        estimate = replicated_dk2(planned, P, Q, master_seed=rep, replicas=replicas)
        failures += abs(estimate - exact) > error_budget(exact, planned.epsilon, planned.alpha)
    slack = 3 * np.sqrt(0.1 * 0.9 / experiments)
    assert failures / experiments <= 0.1 + slack


if __name__ == "__main__":
    for name, fn in list(globals().items()):
        if name.startswith("test_") and callable(fn):
            fn()
            print(f"✅ {name}")
