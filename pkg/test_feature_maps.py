"""
Tests for the deterministic Gaussian-kernel feature expansions and their tail bounds.
"""
import math
import os
import sys
from functools import reduce

import numpy as np
from numpy.testing import assert_allclose

SCRIPT_DIR = os.path.dirname(os.path.abspath(__file__))
sys.path.append(os.path.join(SCRIPT_DIR, "src"))

from modules.errors import InputShapeError
from modules.sketching.feature_maps import (
    exact_gaussian, exact_gram, hd_levels, level_coefficients, tail_bound_gs, tail_bound_hd, taylor_coords,
    taylor_factor, truncated_gram, truncated_kernel_gs, truncated_kernel_hd, truncation_remainder,
)


def test_exact_gaussian_closed_forms():
    x = np.array([0.3, -1.2, 2.0])
    assert exact_gaussian(x, x) == 1.0
    p = x + np.array([math.sqrt(math.log(2.0)), 0.0, 0.0])
    assert_allclose(exact_gaussian(x, p), 0.5, rtol=1e-14)


def test_exact_gaussian_against_fsum():
    rng = np.random.default_rng(0)
    for _ in range(20):
        x, p = rng.uniform(-2, 2, 3), rng.uniform(-2, 2, 3)
        expected = math.exp(-math.fsum((a - b) ** 2 for a, b in zip(x, p)))
        assert_allclose(exact_gaussian(x, p), expected, rtol=1e-14)


def test_exact_gram_shape_and_diagonal():
    X = np.random.default_rng(1).standard_normal((5, 2))
    K = exact_gram(X)
    assert K.shape == (5, 5)
    assert_allclose(np.diag(K), np.ones(5))
    assert_allclose(K, K.T)
    try:
        exact_gram(X, np.ones((3, 4)))
        assert False, "dimension mismatch should raise"
    except InputShapeError:
        pass


def test_taylor_factor_examples():
    assert_allclose(taylor_factor(0.0, 4).coords, [1.0, 0.0, 0.0, 0.0])
    e = math.exp(-1.0)
    assert_allclose(taylor_factor(1.0, 3).coords, [e, math.sqrt(2) * e, math.sqrt(2) * e], rtol=1e-14)


def test_taylor_coords_signs_and_shapes():
    coords = taylor_coords(-0.7, 5)
    direct = [math.exp(-0.49) * math.sqrt(2 ** i / math.factorial(i)) * (-0.7) ** i for i in range(5)]
    assert_allclose(coords, direct, rtol=1e-13)
    assert taylor_coords(np.zeros((3, 2)), 6).shape == (3, 2, 6)


def test_taylor_coords_stay_finite_for_large_inputs():
    coords = taylor_coords(30.0, 400)
    assert np.all(np.isfinite(coords))
    # sum of squares telescopes towards exp(-2 v^2) * exp(2 v^2) = 1 as s grows
    assert np.sum(coords ** 2) <= 1.0 + 1e-9


def test_truncated_gs_constant_term():
    for s in (1, 3, 8):
        assert_allclose(truncated_kernel_gs(np.zeros(2), np.zeros(2), s), 1.0)


def test_truncated_gs_equals_materialized_tensor():
    rng = np.random.default_rng(2)
    for _ in range(25):
        x, p = rng.uniform(-1, 1, 2), rng.uniform(-1, 1, 2)
        fx = reduce(np.kron, [taylor_coords(v, 3) for v in x])
        fp = reduce(np.kron, [taylor_coords(v, 3) for v in p])
        assert fx.shape == (9,)
        assert_allclose(truncated_kernel_gs(x, p, 3), np.dot(fx, fp), rtol=1e-12, atol=1e-15)


def test_truncated_gs_within_tail_bound():
    rng = np.random.default_rng(3)
    for s in (2, 5, 10, 20):
        x, p = rng.uniform(-1, 1, 2), rng.uniform(-1, 1, 2)
        gap = abs(truncated_kernel_gs(x, p, s) - exact_gaussian(x, p))
        assert gap <= tail_bound_gs(2, 1.0, s, 1.0) + 1e-12


def test_truncated_hd_examples():
    assert_allclose(truncated_kernel_hd(np.zeros(3), np.zeros(3), 4), 1.0)
    rng = np.random.default_rng(4)
    x, p = rng.uniform(-0.5, 0.5, 3), rng.uniform(-0.5, 0.5, 3)
    assert_allclose(truncated_kernel_hd(x, p, 1), math.exp(-np.dot(x, x) - np.dot(p, p)), rtol=1e-14)
    for _ in range(10):
        x, p = rng.standard_normal(4), rng.standard_normal(4)
        x, p = x / max(1.0, np.linalg.norm(x)), p / max(1.0, np.linalg.norm(p))
        assert abs(truncated_kernel_hd(x, p, 20) - exact_gaussian(x, p)) <= 1e-8


def test_hd_levels_norms():
    x = np.array([0.6, 0.8])
    levels = hd_levels(x, 4)
    assert [lv.level for lv in levels] == [1, 2, 3, 4]
    coefficients = level_coefficients(x, 4)
    expected = [math.exp(-1.0) * math.sqrt(2 ** a / math.factorial(a)) for a in range(4)]
    assert_allclose(coefficients, expected, rtol=1e-14)
    assert_allclose([lv.norm for lv in levels], expected, rtol=1e-14)


def test_truncated_grams_match_pairwise_kernels():
    rng = np.random.default_rng(5)
    X = rng.uniform(-1, 1, (4, 2))
    for variant, pairwise in (("gs", truncated_kernel_gs), ("hd", truncated_kernel_hd)):
        K = truncated_gram(X, 5, variant)
        for a in range(4):
            for b in range(4):
                assert_allclose(K[a, b], pairwise(X[a], X[b], 5), rtol=1e-12)


def test_tail_bound_formulas():
    assert_allclose(tail_bound_gs(1, 1.0, 10, 4.0), 4 * math.e ** 2 * (2 * math.e / 10) ** 10, rtol=1e-12)
    assert_allclose(tail_bound_hd(1.0, 12, 4.0), 4 * math.e ** 2 * (2 * math.e / 12) ** 12, rtol=1e-12)


def test_tail_bounds_decay_and_overflow():
    values = [tail_bound_gs(2, 1.0, s, 4.0) for s in range(12, 40)]
    assert all(b > a for a, b in zip(values[1:], values[:-1]))
    small = [tail_bound_hd(r, 5, 4.0) for r in (0.5, 0.1, 0.01)]
    assert small[0] > small[1] > small[2] > 0
    assert tail_bound_gs(50, 10.0, 1, 4.0) == math.inf
    try:
        tail_bound_hd(0.0, 3, 4.0)
        assert False, "R = 0 should raise"
    except InputShapeError:
        pass


def test_truncation_remainder_is_bounded():
    rng = np.random.default_rng(6)
    X = rng.uniform(-1, 1, (8, 2))
    w = rng.standard_normal(8)
    w *= 2.0 / np.sum(np.abs(w))
    gram = exact_gram(X)
    for s in range(1, 10):
        remainder = truncation_remainder(X, w, s, "gs", gram=gram)
        assert -1e-10 <= remainder <= tail_bound_gs(2, 1.0, s, 4.0) + 1e-10


if __name__ == "__main__":
    for name, fn in list(globals().items()):
        if name.startswith("test_") and callable(fn):
            fn()
            print(f"✅ {name}")
