"""
Sketched rank-k Gaussian kernel PCA and the exact Gram-factor oracle.

Two independent sketches G (width m) and H (width r) of the same family are drawn.
With M = [G(x_i)]_i and N = [H(x_i)]_i, U is an orthonormal basis of col(M), W the top-k
left singular vectors of U^T N, and the returned basis is V = U W. The guarantee is
||B - V V^T B||_F^2 <= (1 + eps) ||B - [B]_k||_F^2 + alpha for any factor K_X = B B^T.
"""
import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np
import scipy.linalg

from modules.errors import InputShapeError, NumericalError
from modules.sketching.feature_maps import exact_gram
from modules.sketching.planner import estimate_radius, min_s_gs, min_s_hd
from modules.sketching.pointset import as_pointset
from modules.sketching.seeding import child_seed
from modules.sketching.sketchers import build_sketch, sketch_points

logger = logging.getLogger(__name__)

EIGEN_TOLERANCE = 1e-10
RANK_TOLERANCE = 1e-10
R_SCHEDULES = ("linear", "geometric")


@dataclass(frozen=True, eq=False)
class GramFactor:
    B: np.ndarray
    eigenvalues: np.ndarray
    eigen_clip_count: int


@dataclass(frozen=True, eq=False)
class RankKBasis:
    V: np.ndarray
    k: int
    m: int
    r: int
    s: int
    variant: str
    sketch_rank: int


def gram_factor(X) -> GramFactor:
    """Symmetric square root of K_X via eigendecomposition, negative eigenvalues clipped to 0."""
    X = as_pointset(X)
    K = exact_gram(X.points)
    try:
        eigenvalues, Q = scipy.linalg.eigh(K)
    except (np.linalg.LinAlgError, ValueError) as e:
        raise NumericalError(f"eigendecomposition of the Gram matrix failed: {e}")
    floor = -EIGEN_TOLERANCE * max(1.0, float(eigenvalues[-1]))
    if eigenvalues[0] < floor:
        raise NumericalError(f"Gram matrix has eigenvalue {eigenvalues[0]:.3e} below tolerance {floor:.1e}")
    negative = eigenvalues < 0
    clip_count = int(np.count_nonzero(negative))
    if clip_count:
        logger.debug("clipping %d negative Gram eigenvalue(s), smallest %.3e", clip_count, eigenvalues[0])
    clipped = np.where(negative, 0.0, eigenvalues)
    B = (Q * np.sqrt(clipped)) @ Q.T
    return GramFactor(B=B, eigenvalues=clipped, eigen_clip_count=clip_count)


def _cap_total(dims, max_dim: int, name: str):
    total = sum(dims)
    if total <= max_dim:
        return tuple(dims)
    scale = max_dim / total
    capped = tuple(max(1, int(math.floor(m * scale))) for m in dims)
    logger.warning("%s sketch width %d exceeds max_sketch_dim=%d; scaled to %d", name, total, max_dim, sum(capped))
    return capped


def kpca_dims(variant: str, d: int, s: int, k: int, epsilon: float, c_m: float = 1.0, c_r: float = 1.0,
              r_schedule: str = "linear", max_sketch_dim: int = 65536) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
    """
    Sketch widths for G and H.

    gs: m = ceil(c_m d (k^2 + k/eps)), r = ceil(c_r d m^2 / eps^2).
    hd: m_i = ceil(c_m i (k^2 + k/eps)), m = sum m_i, and r_i = ceil(c_r i m^2 / eps^2)
    ("linear") or ceil(c_r 3^i m^2 / eps^2) ("geometric"), i = 1..s.
    """
    if r_schedule not in R_SCHEDULES:
        raise InputShapeError(f"unknown r schedule {r_schedule!r}; expected one of {R_SCHEDULES}")
    base = k * k + k / epsilon
    if variant == "gs":
        m = math.ceil(c_m * d * base)
        m_dims = _cap_total((m,), max_sketch_dim, "G")
        r_dims = _cap_total((math.ceil(c_r * d * m_dims[0] ** 2 / epsilon ** 2),), max_sketch_dim, "H")
    elif variant == "hd":
        m_dims = _cap_total(tuple(math.ceil(c_m * i * base) for i in range(1, s + 1)), max_sketch_dim, "G")
        m_total = sum(m_dims)
        growth = (lambda i: i) if r_schedule == "linear" else (lambda i: 3.0 ** i)
        r_dims = _cap_total(tuple(math.ceil(c_r * growth(i) * m_total ** 2 / epsilon ** 2) for i in range(1, s + 1)),
                            max_sketch_dim, "H")
    else:
        raise InputShapeError(f"unknown variant {variant!r}")
    return m_dims, r_dims


def _orthonormal_completion(V: np.ndarray, n: int, k: int) -> np.ndarray:
    if V.shape[1] >= k:
        return V
    if V.shape[1] == 0:
        return np.eye(n)[:, :k]
    extra = scipy.linalg.null_space(V.T)[:, :k - V.shape[1]]
    return np.hstack([V, extra])


def kpca_fit(X, k: int, epsilon: float, alpha: float, variant: str = "gs", seed: int = 0,
             radius: Optional[float] = None, c_m: float = 1.0, c_r: float = 1.0, r_schedule: str = "linear",
             max_sketch_dim: int = 65536, s: Optional[int] = None) -> RankKBasis:
    X = as_pointset(X)
    n, d = X.n, X.d
    if not 1 <= k <= n:
        raise InputShapeError(f"k must satisfy 1 <= k <= n={n}, got {k}")
    if radius is None:
        radius = estimate_radius(X.points, variant)
    xi = 4.0 * n * n
    if s is None:
        s = min_s_gs(d, radius, alpha, xi) if variant == "gs" else min_s_hd(radius, alpha, xi)

    m_dims, r_dims = kpca_dims(variant, d, s, k, epsilon, c_m, c_r, r_schedule, max_sketch_dim)
    G = build_sketch(variant, d, s, m_dims, child_seed(seed, "kpca", "G"), radius)
    H = build_sketch(variant, d, s, r_dims, child_seed(seed, "kpca", "H"), radius)
    logger.debug("kpca: n=%d d=%d k=%d s=%d m=%d r=%d", n, d, k, s, G.output_dim, H.output_dim)

    M = sketch_points(G, X)
    N = sketch_points(H, X)

    Q, R, _ = scipy.linalg.qr(M, mode="economic", pivoting=True)
    scale = np.linalg.norm(M, 2)
    rank = int(np.count_nonzero(np.abs(np.diag(R)) > RANK_TOLERANCE * scale)) if scale > 0 else 0
    U = Q[:, :rank]

    if rank:
        left, _, _ = np.linalg.svd(U.T @ N, full_matrices=False)
        V = U @ left[:, :min(k, rank)]
    else:
        V = np.zeros((n, 0))
    if V.shape[1] < k:
        logger.debug("sketch rank %d < k=%d; completing the basis", rank, k)
    V = _orthonormal_completion(V, n, k)
    return RankKBasis(V=V, k=k, m=G.output_dim, r=H.output_dim, s=s, variant=variant, sketch_rank=rank)


def kpca_error(X, V: Union[RankKBasis, np.ndarray], k: int,
               factor: Optional[GramFactor] = None) -> Tuple[float, float]:
    """(||B - V V^T B||_F^2, ||B - [B]_k||_F^2) with B the exact Gram factor."""
    V = V.V if isinstance(V, RankKBasis) else np.asarray(V, dtype=np.float64)
    factor = factor or gram_factor(X)
    B = factor.B
    if V.shape[0] != B.shape[0]:
        raise InputShapeError(f"basis has {V.shape[0]} rows, data has {B.shape[0]} points")
    residual = float(np.sum((B - V @ (V.T @ B)) ** 2))
    singular = np.linalg.svd(B, compute_uv=False)
    optimum = float(np.sum(singular[k:] ** 2))
    return residual, optimum
