"""
Turns accuracy targets into concrete sketch parameters.

The truncation order is the smallest s whose closed-form tail bound is at most alpha,
found by scanning s = 1, 2, ... (no asymptotic constants involved). Sketch widths follow
m = ceil(C d / eps^2) for the low-dimensional sketch and m_j = ceil(C j / eps^2) per level
for the high-dimensional one, with C the calibrated variance constant.
"""
import logging
import math
from dataclasses import dataclass, asdict
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from modules.errors import InfeasibleParametersError, InputShapeError
from modules.sketching.feature_maps import tail_bound_gs, tail_bound_hd

logger = logging.getLogger(__name__)

VARIANTS = ("gs", "hd")
DEFAULT_VARIANCE_CONSTANT = 20.0
DEFAULT_JL_CONSTANT = 8.0
DEFAULT_MEDIAN_CONSTANT = 2.0
DISTANCE_XI = 4.0
S_CAP = 100_000


class AccuracyTarget(BaseModel):
    """User-facing accuracy request; validated on construction."""
    model_config = ConfigDict(frozen=True)

    epsilon: float = Field(gt=0, lt=1)
    alpha: float = Field(gt=0)
    delta: float = Field(default=0.1, gt=0, lt=1)
    radius_linf: Optional[float] = Field(default=None, gt=0)
    radius_l2: Optional[float] = Field(default=None, gt=0)
    dimension: int = Field(ge=1)

    @model_validator(mode="after")
    def _needs_exactly_one_radius(self):
        if self.radius_linf is None and self.radius_l2 is None:
            raise ValueError("a domain radius is required (radius_linf for gs, radius_l2 for hd)")
        if self.radius_linf is not None and self.radius_l2 is not None:
            raise ValueError("give exactly one domain radius: radius_linf for gs or radius_l2 for hd")
        return self

    def radius_for(self, variant: str) -> float:
        radius = self.radius_linf if variant == "gs" else self.radius_l2
        if radius is None:
            name = "radius_linf" if variant == "gs" else "radius_l2"
            raise InputShapeError(f"variant {variant} requires {name}")
        return radius


@dataclass(frozen=True)
class PlannedConfig:
    variant: str
    d: int
    s: int
    dims: Tuple[int, ...]
    variance_constant: float
    epsilon: float
    alpha: float
    radius: float
    xi: float = DISTANCE_XI
    delta: Optional[float] = None
    jl_dim: Optional[int] = None
    replicas: int = 1

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise InputShapeError(f"unknown variant {self.variant!r}")
        if self.s < 1 or any(m < 1 for m in self.dims):
            raise InputShapeError("s and every sketch dimension must be >= 1")
        if self.replicas < 1 or self.replicas % 2 == 0:
            raise InputShapeError(f"replicas must be a positive odd integer, got {self.replicas}")
        if self.variant == "gs" and len(self.dims) != 1:
            raise InputShapeError("gs plans carry exactly one sketch dimension")
        if self.variant == "hd" and len(self.dims) != self.s:
            raise InputShapeError("hd plans carry one sketch dimension per level")

    @property
    def m(self) -> int:
        return int(sum(self.dims))

    def as_lines(self) -> List[str]:
        """Stable key=value rendering used by the `plan` command."""
        values = asdict(self)
        lines = []
        for key in ("variant", "d", "s", "epsilon", "alpha", "delta", "radius", "xi",
                    "variance_constant", "jl_dim", "replicas"):
            lines.append(f"{key}={values[key] if values[key] is not None else 'none'}")
        if self.variant == "gs":
            lines.insert(3, f"m={self.dims[0]}")
        else:
            lines.insert(3, "m_levels=" + ",".join(str(m) for m in self.dims))
            lines.insert(4, f"m={self.m}")
        return lines


def _min_s(bound, alpha: float, cap: int) -> int:
    if alpha <= 0:
        raise InfeasibleParametersError(f"alpha must be positive, got {alpha}")
    for s in range(1, cap + 1):
        if bound(s) <= alpha:
            return s
    raise InfeasibleParametersError(f"no truncation order s <= {cap} reaches alpha={alpha}")


def min_s_gs(d: int, L: float, alpha: float, xi: float = DISTANCE_XI, cap: int = S_CAP) -> int:
    """Smallest s with tail_bound_gs(d, L, s, xi) <= alpha."""
    s = _min_s(lambda t: tail_bound_gs(d, L, t, xi), alpha, cap)
    logger.debug("min_s_gs(d=%d, L=%g, alpha=%g, xi=%g) -> %d", d, L, alpha, xi, s)
    return s


def min_s_hd(R: float, alpha: float, xi: float = DISTANCE_XI, cap: int = S_CAP) -> int:
    """Smallest s with tail_bound_hd(R, s, xi) <= alpha."""
    s = _min_s(lambda t: tail_bound_hd(R, t, xi), alpha, cap)
    logger.debug("min_s_hd(R=%g, alpha=%g, xi=%g) -> %d", R, alpha, xi, s)
    return s


def sketch_dims(variant: str, d_or_s: int, epsilon: float, C: float = DEFAULT_VARIANCE_CONSTANT) -> Tuple[int, ...]:
    """gs: (ceil(C d / eps^2),); hd: (ceil(C j / eps^2) for j = 1..s)."""
    if not 0 < epsilon <= 1 or C <= 0:
        raise InputShapeError(f"need 0 < epsilon <= 1 and C > 0, got epsilon={epsilon}, C={C}")
    if variant == "gs":
        return (max(1, math.ceil(C * d_or_s / epsilon ** 2)),)
    if variant == "hd":
        return tuple(max(1, math.ceil(C * j / epsilon ** 2)) for j in range(1, d_or_s + 1))
    raise InputShapeError(f"unknown variant {variant!r}")


def smallest_odd_at_least(value: float) -> int:
    count = max(1, math.ceil(value - 1e-12))
    return count if count % 2 == 1 else count + 1


def jl_plan(epsilon: float, delta: float, c_jl: float = DEFAULT_JL_CONSTANT,
            c_med: float = DEFAULT_MEDIAN_CONSTANT) -> Tuple[int, int]:
    """(jl_dim, replicas) = (ceil(c_jl / eps^2), smallest odd >= c_med ln(1/delta))."""
    if not 0 < epsilon < 1 or not 0 < delta < 1:
        raise InputShapeError(f"epsilon and delta must lie in (0, 1), got {epsilon}, {delta}")
    jl_dim = max(1, math.ceil(c_jl / epsilon ** 2))
    replicas = smallest_odd_at_least(c_med * math.log(1.0 / delta))
    return jl_dim, replicas


def plan(target: AccuracyTarget, variant: str, task: str = "distance", n: Optional[int] = None,
         variance_constant: float = DEFAULT_VARIANCE_CONSTANT, with_jl: bool = False,
         c_jl: float = DEFAULT_JL_CONSTANT, c_med: float = DEFAULT_MEDIAN_CONSTANT,
         s_cap: int = S_CAP) -> PlannedConfig:
    """
    Full parameter plan for one sketch family.

    ``task="distance"`` uses xi = 4 (two uniform-weight sets); ``task="pca"`` uses
    xi = 4 n^2 and therefore needs ``n``.
    """
    if variant not in VARIANTS:
        raise InputShapeError(f"unknown variant {variant!r}")
    if task == "distance":
        xi = DISTANCE_XI
    elif task == "pca":
        if not n or n < 1:
            raise InputShapeError("pca plans need the number of points n")
        xi = 4.0 * n * n
    else:
        raise InputShapeError(f"unknown task {task!r}")

    radius = target.radius_for(variant)
    if variant == "gs":
        s = min_s_gs(target.dimension, radius, target.alpha, xi, s_cap)
        dims = sketch_dims("gs", target.dimension, target.epsilon, variance_constant)
    else:
        s = min_s_hd(radius, target.alpha, xi, s_cap)
        dims = sketch_dims("hd", s, target.epsilon, variance_constant)

    jl_dim, replicas = jl_plan(target.epsilon, target.delta, c_jl, c_med)
    planned = PlannedConfig(
        variant=variant, d=target.dimension, s=s, dims=dims, variance_constant=variance_constant,
        epsilon=target.epsilon, alpha=target.alpha, radius=radius, xi=xi, delta=target.delta,
        jl_dim=jl_dim if with_jl else None, replicas=replicas,
    )
    logger.debug("planned %s", planned)
    return planned


def plan_two_sample(n: int, d: int, radius: float, variant: str = "gs", epsilon: float = 0.2,
                    variance_constant: float = DEFAULT_VARIANCE_CONSTANT) -> PlannedConfig:
    """Two-sample recipe: constant epsilon with additive error alpha = 1/n, n = |P u Q|."""
    if n < 1:
        raise InputShapeError("n must be positive")
    kwargs = {"radius_linf": radius} if variant == "gs" else {"radius_l2": radius}
    target = AccuracyTarget(epsilon=epsilon, alpha=1.0 / n, dimension=d, **kwargs)
    return plan(target, variant, variance_constant=variance_constant)


def estimate_radius(X, variant: str) -> float:
    """Max-norm pass over the data: largest |x_j| for gs, largest ||x|| for hd."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if X.size == 0:
        raise InputShapeError("cannot estimate a radius from no points")
    if variant == "gs":
        radius = float(np.max(np.abs(X)))
    elif variant == "hd":
        radius = float(np.max(np.linalg.norm(X, axis=1)))
    else:
        raise InputShapeError(f"unknown variant {variant!r}")
    return radius if radius > 0 else 1e-12
