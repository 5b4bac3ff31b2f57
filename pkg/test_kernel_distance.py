"""
Tests for exact, truncated and sketched kernel distances between point sets.
"""
import math
import os
import sys

import numpy as np
from numpy.testing import assert_allclose

SCRIPT_DIR = os.path.dirname(os.path.abspath(__file__))
sys.path.append(os.path.join(SCRIPT_DIR, "src"))

from modules.errors import InputShapeError
from modules.sketching.kernel_distance import (
    DistanceReport, distance_report, error_budget, exact_dk2, exact_kappa, signed_weight_form, sketched_dk2,
    sketched_kappa, truncated_dk2,
)
from modules.sketching.feature_maps import exact_gram
from modules.sketching.pointset import PointSet
from modules.sketching.sketchers import GaussianSketchLowD

LN2_STEP = math.sqrt(math.log(2.0))


def naive_kappa(P, Q):
    return math.fsum(math.exp(-math.fsum((a - b) ** 2 for a, b in zip(x, y))) for x in P for y in Q) / (len(P) * len(Q))


def test_exact_kappa_examples():
    x = np.array([[0.2, 0.7]])
    assert exact_kappa(x, x) == 1.0
    P = np.array([[0.0, 0.0]])
    Q = np.array([[LN2_STEP, 0.0], [-LN2_STEP, 0.0]])
    assert_allclose(exact_kappa(P, Q), 0.5, rtol=1e-14)


def test_exact_kappa_matches_naive_sum():
    rng = np.random.default_rng(0)
    for _ in range(5):
        P, Q = rng.uniform(-1, 1, (7, 3)), rng.uniform(-1, 1, (11, 3))
        assert_allclose(exact_kappa(P, Q), naive_kappa(P, Q), rtol=1e-13)


def test_exact_dk2_examples():
    P = np.random.default_rng(1).uniform(-1, 1, (6, 2))
    assert exact_dk2(P, P) == 0.0
    assert exact_dk2(P, P[::-1]) < 1e-14
    assert_allclose(exact_dk2([[0.0, 0.0]], [[LN2_STEP, 0.0]]), 1.0, rtol=1e-14)


def test_exact_dk2_is_symmetric_and_matches_quadratic_form():
    rng = np.random.default_rng(2)
    P, Q = rng.uniform(-1, 1, (5, 2)), rng.uniform(-1, 1, (8, 2))
    assert exact_dk2(P, Q) == exact_dk2(Q, P)
    assert_allclose(exact_dk2(P, Q), signed_weight_form(P, Q, exact_gram), rtol=1e-12)


def test_exact_distance_is_symmetric_across_row_blocks():
    for seed in range(6):
        rng = np.random.default_rng(seed)
        P, Q = rng.uniform(-1, 1, (700, 2)), rng.uniform(-1, 1, (300, 2))
        assert exact_kappa(P, Q) == exact_kappa(Q, P)
        assert exact_dk2(P, Q) == exact_dk2(Q, P)
    assert exact_kappa(P, Q, threads=3) == exact_kappa(Q, P, threads=1)


def test_dimension_mismatch_raises():
    try:
        exact_dk2(np.zeros((2, 2)), np.zeros((2, 3)))
        assert False, "dimension mismatch should raise"
    except InputShapeError:
        pass


def test_sketched_dk2_identical_sets_is_zero():
    G = GaussianSketchLowD(2, 8, 64, seed=1)
    P = PointSet(np.random.default_rng(3).uniform(-1, 1, (9, 2)))
    assert sketched_dk2(G, P, P) == 0.0


def test_sketched_dk2_seed_mean_is_truncated_distance():
    rng = np.random.default_rng(4)
    P, Q = rng.uniform(-1, 1, (4, 1)), rng.uniform(-1, 1, (4, 1))
    target = truncated_dk2(P, Q, 6, "gs")
    estimates = [sketched_dk2(GaussianSketchLowD(1, 6, 16, seed), P, Q) for seed in range(3000)]
    estimates = np.asarray(estimates)
    se = estimates.std(ddof=1) / np.sqrt(estimates.size)
    assert abs(estimates.mean() - target) <= 4 * se + 1e-12


def test_sketched_kappa_estimates_kappa():
    rng = np.random.default_rng(5)
    P, Q = rng.uniform(-0.5, 0.5, (10, 2)), rng.uniform(-0.5, 0.5, (10, 2))
    estimates = np.array([sketched_kappa(GaussianSketchLowD(2, 12, 256, seed), P, Q) for seed in range(200)])
    assert abs(estimates.mean() - exact_kappa(P, Q)) < 0.05


def test_error_budget_and_report():
    assert error_budget(0.0, 0.5, 1e-3) == 1e-3
    assert_allclose(error_budget(1.0, 0.5, 1e-3), 0.501)
    report = DistanceReport.build(sketched=1.2, epsilon=0.5, alpha=1e-3, exact=1.0)
    assert report.within_budget is True
    assert "within_budget=true" in report.as_lines()
    assert DistanceReport.build(sketched=1.6, epsilon=0.5, alpha=1e-3, exact=1.0).within_budget is False


def test_distance_report_without_exact():
    G = GaussianSketchLowD(2, 8, 64, seed=2)
    P, Q = np.array([[0.0, 0.0]]), np.array([[0.5, 0.5]])
    report = distance_report(G, P, Q, 0.5, 1e-3, with_exact=False)
    assert report.exact_dk2 is None and report.within_budget is None
    assert report.as_lines()[0].startswith("sketched_dk2=")


if __name__ == "__main__":
    for name, fn in list(globals().items()):
        if name.startswith("test_") and callable(fn):
            fn()
            print(f"✅ {name}")
