"""
Deterministic feature expansions of the Gaussian kernel exp(-||x - p||^2).

Two truncated expansions are provided:

- the per-coordinate Taylor expansion (low-dimensional sketch): each coordinate x_j maps
  to a length-s vector y_x^(j) and the kernel factorizes over coordinates;
- the power-series expansion in <x, p> (high-dimensional sketch): level j carries
  sqrt(2^{j-1}/(j-1)!) exp(-||x||^2) x^{(x)(j-1)}.

Both truncated kernels under-approximate the exact kernel by a positive semidefinite
remainder, bounded by the closed-form tail bounds below. These functions are the
oracles every sketch is tested against.
"""
import math
from dataclasses import dataclass
from typing import List, Optional

import numpy as np
from scipy.spatial.distance import cdist
from scipy.special import gammaln

from modules.errors import InputShapeError

_LOG_MAX = math.log(np.finfo(np.float64).max)


def _as_points(x) -> np.ndarray:
    return np.asarray(x, dtype=np.float64)


def _check_pair(x: np.ndarray, p: np.ndarray):
    if x.ndim != 1 or x.shape != p.shape:
        raise InputShapeError(f"points must be equal-length vectors, got {x.shape} and {p.shape}")


def exact_gaussian(x, p) -> float:
    x, p = _as_points(x), _as_points(p)
    _check_pair(x, p)
    diff = x - p
    return float(np.exp(-np.dot(diff, diff)))


def exact_gram(X, Y=None) -> np.ndarray:
    """Kernel matrix exp(-||x_a - y_b||^2) between the rows of X and Y (Y defaults to X)."""
    X = np.atleast_2d(_as_points(X))
    Y = X if Y is None else np.atleast_2d(_as_points(Y))
    if X.shape[1] != Y.shape[1]:
        raise InputShapeError(f"dimension mismatch: {X.shape[1]} vs {Y.shape[1]}")
    return np.exp(-cdist(X, Y, "sqeuclidean"))


@dataclass(frozen=True, eq=False)
class TaylorFactor:
    coords: np.ndarray
    source_coordinate: float
    truncation_order: int


def taylor_coords(values, s: int) -> np.ndarray:
    """
    Taylor factor coordinates for every entry of ``values``; output shape values.shape + (s,).

    coords[i] = exp(-v^2) sqrt(2^i / i!) v^i for i = 0..s-1, run as the recurrence
    c_0 = exp(-v^2), c_{i+1} = c_i v sqrt(2/(i+1)) on magnitudes in log space so that
    neither 2^i/i! nor v^i over- or underflows on its own.
    """
    if s < 1:
        raise InputShapeError(f"truncation order must be >= 1, got {s}")
    v = _as_points(values)[..., None]
    steps = np.arange(1, s, dtype=np.float64)
    with np.errstate(divide="ignore"):
        log_abs = np.log(np.abs(v))
    increments = log_abs + 0.5 * np.log(2.0 / steps)
    log_mag = np.concatenate(
        [np.zeros(v.shape), np.cumsum(np.broadcast_to(increments, v.shape[:-1] + (s - 1,)), axis=-1)],
        axis=-1,
    ) - v * v
    powers = np.arange(s)
    signs = np.where(v < 0, np.where(powers % 2 == 1, -1.0, 1.0), 1.0)
    return signs * np.exp(log_mag)


def taylor_factor(x_j: float, s: int) -> TaylorFactor:
    return TaylorFactor(coords=taylor_coords(float(x_j), s), source_coordinate=float(x_j), truncation_order=s)


def level_coefficients(x, s: int) -> np.ndarray:
    """
    sqrt(2^{j-1}/(j-1)!) exp(-||x||^2) for levels j = 1..s.

    ``x`` is a d-vector or an (N, d) batch; the output has shape (s,) or (N, s).
    """
    if s < 1:
        raise InputShapeError(f"truncation order must be >= 1, got {s}")
    x = _as_points(x)
    sq_norm = np.sum(x * x, axis=-1)[..., None]
    a = np.arange(s, dtype=np.float64)
    return np.exp(0.5 * (a * math.log(2.0) - gammaln(a + 1.0)) - sq_norm)


@dataclass(frozen=True, eq=False)
class HDLevelSpec:
    """Level j of the power-series map: coefficient * base_point^{(x)(j-1)}, never materialized."""
    level: int
    coefficient: float
    base_point: np.ndarray

    @property
    def norm(self) -> float:
        return self.coefficient * float(np.linalg.norm(self.base_point)) ** (self.level - 1)


def hd_levels(x, s: int) -> List[HDLevelSpec]:
    x = _as_points(x)
    coefficients = level_coefficients(x, s)
    return [HDLevelSpec(level=j + 1, coefficient=float(c), base_point=x) for j, c in enumerate(coefficients)]


def truncated_kernel_gs(x, p, s: int) -> float:
    """Product over coordinates of <y_x^(j), y_p^(j)>; equals the inner product of the Kronecker products."""
    x, p = _as_points(x), _as_points(p)
    _check_pair(x, p)
    per_coordinate = np.sum(taylor_coords(x, s) * taylor_coords(p, s), axis=-1)
    return float(np.prod(per_coordinate))


def _power_series(t: np.ndarray, s: int) -> np.ndarray:
    """sum_{a < s} (2t)^a / a! evaluated elementwise."""
    total = np.zeros_like(t)
    term = np.ones_like(t)
    for a in range(s):
        total = total + term
        term = term * 2.0 * t / (a + 1)
    return total


def truncated_kernel_hd(x, p, s: int) -> float:
    x, p = _as_points(x), _as_points(p)
    _check_pair(x, p)
    if s < 1:
        raise InputShapeError(f"truncation order must be >= 1, got {s}")
    scale = math.exp(-float(np.dot(x, x)) - float(np.dot(p, p)))
    return float(scale * _power_series(np.asarray(np.dot(x, p)), s))


def truncated_gram_gs(X, s: int, Y=None) -> np.ndarray:
    """Truncated Taylor kernel matrix between the rows of X and Y."""
    X = np.atleast_2d(_as_points(X))
    Y = X if Y is None else np.atleast_2d(_as_points(Y))
    if X.shape[1] != Y.shape[1]:
        raise InputShapeError(f"dimension mismatch: {X.shape[1]} vs {Y.shape[1]}")
    fx, fy = taylor_coords(X, s), taylor_coords(Y, s)
    gram = np.ones((X.shape[0], Y.shape[0]))
    for j in range(X.shape[1]):
        gram *= fx[:, j, :] @ fy[:, j, :].T
    return gram


def truncated_gram_hd(X, s: int, Y=None) -> np.ndarray:
    """Truncated power-series kernel matrix between the rows of X and Y."""
    X = np.atleast_2d(_as_points(X))
    Y = X if Y is None else np.atleast_2d(_as_points(Y))
    if X.shape[1] != Y.shape[1]:
        raise InputShapeError(f"dimension mismatch: {X.shape[1]} vs {Y.shape[1]}")
    scale = np.exp(-np.sum(X * X, axis=1)[:, None] - np.sum(Y * Y, axis=1)[None, :])
    return scale * _power_series(X @ Y.T, s)


def _from_log(log_value: float) -> float:
    return math.inf if log_value > _LOG_MAX else math.exp(log_value)


def tail_bound_gs(d: int, L: float, s: int, xi: float) -> float:
    """xi d exp(2 d L^2) (2 e L^2 / s)^s, or +inf when it overflows."""
    if L <= 0 or s < 1 or xi <= 0 or d < 1:
        raise InputShapeError("tail_bound_gs needs d >= 1, L > 0, s >= 1, xi > 0")
    log_value = math.log(xi) + math.log(d) + 2.0 * d * L * L + s * math.log(2.0 * math.e * L * L / s)
    return _from_log(log_value)


def tail_bound_hd(R: float, s: int, xi: float) -> float:
    """xi exp(2 R^2) (2 e R^2 / s)^s, or +inf when it overflows."""
    if R <= 0 or s < 1 or xi <= 0:
        raise InputShapeError("tail_bound_hd needs R > 0, s >= 1, xi > 0")
    log_value = math.log(xi) + 2.0 * R * R + s * math.log(2.0 * math.e * R * R / s)
    return _from_log(log_value)


def truncated_gram(X, s: int, variant: str, Y=None) -> np.ndarray:
    if variant == "gs":
        return truncated_gram_gs(X, s, Y)
    if variant == "hd":
        return truncated_gram_hd(X, s, Y)
    raise InputShapeError(f"unknown variant {variant!r}")


def truncation_remainder(X, w, s: int, variant: str, gram: Optional[np.ndarray] = None) -> float:
    """w^T (K_X - K^trunc_{X,s}) w."""
    w = _as_points(w)
    exact = exact_gram(X) if gram is None else gram
    return float(w @ (exact - truncated_gram(X, s, variant)) @ w)
