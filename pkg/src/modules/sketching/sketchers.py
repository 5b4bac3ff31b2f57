"""
The two drawn Gaussian-kernel sketches and the point-set mean embedding.

``GaussianSketchLowD`` (gs) pushes the d Taylor factors of a point through one
recursive tensor sketch of degree d. ``GaussianSketchHighD`` (hd) concatenates s blocks,
block j being the level-j coefficient times a degree-(j-1) tensor sketch of x^{(x)(j-1)}.
``embed_set`` averages point sketches into F(X), which is a mean (weights 1/|X|).
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Sequence, Union

import numpy as np

from modules.app_state import state
from modules.errors import FingerprintMismatchError, InputShapeError
from modules.sketching.feature_maps import level_coefficients, taylor_coords
from modules.sketching.pointset import PointSet, as_pointset
from modules.sketching.seeding import child_seed, config_fingerprint
from modules.sketching.tensor_sketch import RecursiveTensorSketchMap

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Embedding:
    vector: np.ndarray
    fingerprint: str
    count: int
    label: Optional[str] = None

    def require_compatible(self, other: "Embedding"):
        if self.fingerprint != other.fingerprint:
            raise FingerprintMismatchError(
                f"embeddings come from different sketches ({self.fingerprint[:12]} vs {other.fingerprint[:12]})")

    def squared_distance(self, other: "Embedding") -> float:
        self.require_compatible(other)
        diff = self.vector - other.vector
        return float(np.dot(diff, diff))

    def inner(self, other: "Embedding") -> float:
        self.require_compatible(other)
        return float(np.dot(self.vector, other.vector))


class _GaussianSketchBase:
    variant = ""

    def __init__(self, d: int, s: int, seed: int, radius: Optional[float] = None):
        if d < 1 or s < 1:
            raise InputShapeError(f"need d >= 1 and s >= 1, got d={d}, s={s}")
        self.d = int(d)
        self.s = int(s)
        self.seed = int(seed)
        self.radius = radius

    @property
    def output_dims(self) -> List[int]:
        raise NotImplementedError

    @property
    def output_dim(self) -> int:
        return int(sum(self.output_dims))

    @property
    def fingerprint_bytes(self) -> bytes:
        return config_fingerprint(self.variant, self.d, self.s, self.output_dims, self.seed)

    @property
    def fingerprint(self) -> str:
        return self.fingerprint_bytes.hex()

    def _prepare(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.shape[-1:] != (self.d,) or x.ndim > 2:
            raise InputShapeError(f"expected points of dimension {self.d}, got shape {x.shape}")
        if self.radius is not None:
            outside = self._radius_of(x) > self.radius * (1 + 1e-12)
            if np.any(outside):
                logger.warning("%d point(s) lie outside the declared radius %g; accuracy bounds do not apply",
                               int(np.count_nonzero(outside)), self.radius)
        return x

    def _radius_of(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def apply(self, x) -> np.ndarray:
        raise NotImplementedError


class GaussianSketchLowD(_GaussianSketchBase):
    """G(x) = T(y_x^(1) (x) ... (x) y_x^(d)) with T of degree d on R^s."""
    variant = "gs"

    def __init__(self, d: int, s: int, m: int, seed: int, radius: Optional[float] = None):
        super().__init__(d, s, seed, radius)
        self.m = int(m)
        self.rts = RecursiveTensorSketchMap(self.s, self.m, self.d, child_seed(self.seed, "gs"))

    @property
    def output_dims(self) -> List[int]:
        return [self.rts.output_dim]

    def _radius_of(self, x):
        return np.max(np.abs(x), axis=-1)

    def apply(self, x) -> np.ndarray:
        """Sketch one d-vector, or every row of an (N, d) batch."""
        x = self._prepare(x)
        factors = taylor_coords(x, self.s)
        return self.rts.apply_rank1([factors[..., j, :] for j in range(self.d)])


class GaussianSketchHighD(_GaussianSketchBase):
    """Concatenation over levels j of coefficient_j(x) * T_j(x^{(x)(j-1)})."""
    variant = "hd"

    def __init__(self, d: int, s: int, dims: Sequence[int], seed: int, radius: Optional[float] = None):
        super().__init__(d, s, seed, radius)
        if len(dims) != self.s:
            raise InputShapeError(f"need one sketch dimension per level: {len(dims)} given for s={self.s}")
        self.requested_dims = [int(m) for m in dims]
        self.maps = [
            RecursiveTensorSketchMap(self.d, m, j, child_seed(self.seed, "hd", j + 1))
            for j, m in enumerate(self.requested_dims)
        ]
        self.block_offsets = np.concatenate([[0], np.cumsum(self.output_dims)]).astype(int)

    @property
    def output_dims(self) -> List[int]:
        return [T.output_dim for T in self.maps]

    def _radius_of(self, x):
        return np.linalg.norm(x, axis=-1)

    def block(self, vector: np.ndarray, level: int) -> np.ndarray:
        """Coordinates of block ``level`` (1-based) of a sketch."""
        return vector[..., self.block_offsets[level - 1]:self.block_offsets[level]]

    def apply(self, x) -> np.ndarray:
        """Sketch one d-vector, or every row of an (N, d) batch."""
        x = self._prepare(x)
        batch = x.shape[0] if x.ndim == 2 else None
        coefficients = level_coefficients(x, self.s)
        blocks = [
            coefficients[..., j, None] * T.apply_power(x, batch_size=batch)
            for j, T in enumerate(self.maps)
        ]
        return np.concatenate(blocks, axis=-1)


GaussianSketch = Union[GaussianSketchLowD, GaussianSketchHighD]


def gs_apply(G: GaussianSketchLowD, x) -> np.ndarray:
    return G.apply(x)


def gshd_apply(G: GaussianSketchHighD, x) -> np.ndarray:
    return G.apply(x)


def build_sketch(variant: str, d: int, s: int, dims: Sequence[int], seed: int,
                 radius: Optional[float] = None) -> GaussianSketch:
    if variant == "gs":
        if len(dims) != 1:
            raise InputShapeError("gs sketches take a single dimension")
        return GaussianSketchLowD(d, s, dims[0], seed, radius)
    if variant == "hd":
        return GaussianSketchHighD(d, s, dims, seed, radius)
    raise InputShapeError(f"unknown variant {variant!r}")


def sketch_from_plan(planned, seed: int) -> GaussianSketch:
    """Draw the sketch a PlannedConfig describes."""
    return build_sketch(planned.variant, planned.d, planned.s, planned.dims, seed, planned.radius)


class CompensatedSum:
    """Neumaier-compensated running sum of equal-length vectors."""

    def __init__(self, dim: int):
        self.total = np.zeros(dim)
        self.compensation = np.zeros(dim)

    def add(self, v: np.ndarray):
        t = self.total + v
        bigger = np.abs(self.total) >= np.abs(v)
        self.compensation += np.where(bigger, (self.total - t) + v, (v - t) + self.total)
        self.total = t

    @property
    def value(self) -> np.ndarray:
        return self.total + self.compensation


def _chunks(points: np.ndarray, chunk_size: int):
    return [points[start:start + chunk_size] for start in range(0, points.shape[0], chunk_size)]


def _map_chunks(fn, chunks, threads: int):
    if threads <= 1 or len(chunks) <= 1:
        return [fn(chunk) for chunk in chunks]
    with ThreadPoolExecutor(max_workers=threads) as executor:
        return list(executor.map(fn, chunks))


def sketch_points(G: GaussianSketch, X, threads: Optional[int] = None,
                  chunk_size: Optional[int] = None) -> np.ndarray:
    """Per-point sketches as an (n, m) matrix, row i = G(x_i)."""
    X = as_pointset(X)
    chunks = _chunks(X.points, chunk_size or state.chunk_size)
    return np.vstack(_map_chunks(G.apply, chunks, threads or state.threads))


def embed_set(G: GaussianSketch, X: Union[PointSet, np.ndarray], threads: Optional[int] = None,
              chunk_size: Optional[int] = None) -> Embedding:
    """
    F(X) = (1/|X|) sum_{x in X} G(x), in one pass.

    Points are sketched in fixed-size chunks (possibly in parallel); chunk sums are
    combined in chunk order with compensated summation, so the thread count does not
    change the result.
    """
    X = as_pointset(X)
    if X.d != G.d:
        raise InputShapeError(f"point set has dimension {X.d}, sketch expects {G.d}")
    chunks = _chunks(X.points, chunk_size or state.chunk_size)
    partials = _map_chunks(lambda chunk: G.apply(chunk).sum(axis=0), chunks, threads or state.threads)
    accumulator = CompensatedSum(G.output_dim)
    for partial in partials:
        accumulator.add(partial)
    return Embedding(vector=accumulator.value / X.n, fingerprint=G.fingerprint, count=X.n, label=X.label)


def require_same_fingerprint(embeddings: Sequence[Embedding]):
    if not embeddings:
        return
    first = embeddings[0]
    for other in embeddings[1:]:
        first.require_compatible(other)
