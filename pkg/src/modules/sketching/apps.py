"""
Downstream applications of the set embedding: a resampling two-sample test and
nearest-neighbor search over a family of point sets.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from modules.app_state import state
from modules.errors import EmptyInputError, FingerprintMismatchError, InputShapeError
from modules.sketching.compress import JlProjector
from modules.sketching.kernel_distance import pointset_pair, sketched_dk2
from modules.sketching.planner import estimate_radius, plan_two_sample
from modules.sketching.pointset import as_pointset
from modules.sketching.seeding import child_seed, generator
from modules.sketching.sketchers import Embedding, GaussianSketch, embed_set, sketch_from_plan, sketch_points

logger = logging.getLogger(__name__)

RESAMPLE_MODES = ("iid_with_replacement", "permutation")
MIN_TRIALS = 20
TRIAL_BLOCK = 256


@dataclass(frozen=True, eq=False)
class TwoSampleResult:
    statistic: float
    threshold: float
    trials: int
    reject: bool
    resample_mode: str
    level: float
    null_statistics: np.ndarray = field(repr=False, default=None)

    def as_lines(self) -> List[str]:
        return [
            f"statistic={self.statistic!r}",
            f"threshold={self.threshold!r}",
            f"trials={self.trials}",
            f"level={self.level}",
            f"resample_mode={self.resample_mode}",
            f"reject={str(self.reject).lower()}",
        ]


def resample_indices(seed: int, trial: int, n_p: int, n_q: int, mode: str) -> Tuple[np.ndarray, np.ndarray]:
    """Indices into the stacked union P u Q for one resampling trial."""
    rng = generator(seed, "two_sample", trial)
    total = n_p + n_q
    if mode == "iid_with_replacement":
        return rng.integers(0, total, size=n_p), rng.integers(0, total, size=n_q)
    if mode == "permutation":
        order = rng.permutation(total)
        return order[:n_p], order[n_p:]
    raise InputShapeError(f"unknown resample mode {mode!r}; expected one of {RESAMPLE_MODES}")


def _resampled_statistics(E: np.ndarray, trials: Sequence[int], seed: int, n_p: int, n_q: int,
                          mode: str) -> np.ndarray:
    # row j of W holds the signed mean weights of trial j, so W @ E = F(P_j) - F(Q_j)
    total = n_p + n_q
    W = np.zeros((len(trials), total))
    for row, trial in enumerate(trials):
        idx_p, idx_q = resample_indices(seed, trial, n_p, n_q, mode)
        W[row] = np.bincount(idx_p, minlength=total) / n_p - np.bincount(idx_q, minlength=total) / n_q
    diff = W @ E
    return np.einsum("ij,ij->i", diff, diff)


def two_sample_test(P, Q, q: int = 1000, level: float = 0.05, G: Optional[GaussianSketch] = None,
                    resample_mode: str = "iid_with_replacement", seed: int = 0, variant: str = "gs",
                    threads: Optional[int] = None) -> TwoSampleResult:
    """
    Reject "P and Q come from one distribution" when the sketched D^2_K exceeds the
    empirical (1 - level)-quantile of q resampled statistics.

    Every point of P u Q is sketched once; trial j draws index sets with a generator
    derived from (seed, j) and evaluates its statistic from the cached sketches.
    When ``G`` is omitted, one is drawn from the two-sample plan (alpha = 1/|P u Q|).
    """
    P, Q = pointset_pair(P, Q)
    if q < MIN_TRIALS:
        raise InputShapeError(f"need at least {MIN_TRIALS} resampling trials, got {q}")
    if not 0 < level < 1:
        raise InputShapeError(f"level must lie in (0, 1), got {level}")
    if resample_mode not in RESAMPLE_MODES:
        raise InputShapeError(f"unknown resample mode {resample_mode!r}; expected one of {RESAMPLE_MODES}")

    pooled = P.union(Q)
    if G is None:
        planned = plan_two_sample(pooled.n, pooled.d, estimate_radius(pooled.points, variant), variant)
        G = sketch_from_plan(planned, child_seed(seed, "two_sample", "sketch"))
    threads = threads or state.threads

    statistic = sketched_dk2(G, P, Q, threads)
    E = sketch_points(G, pooled, threads)

    blocks = [list(range(start, min(start + TRIAL_BLOCK, q))) for start in range(0, q, TRIAL_BLOCK)]

    def run(block):
        return _resampled_statistics(E, block, seed, P.n, Q.n, resample_mode)

    if threads <= 1 or len(blocks) == 1:
        parts = [run(block) for block in blocks]
    else:
        with ThreadPoolExecutor(max_workers=threads) as executor:
            parts = list(executor.map(run, blocks))
    null_statistics = np.concatenate(parts)
    threshold = float(np.quantile(null_statistics, 1.0 - level))
    logger.debug("two-sample: statistic=%g threshold=%g (q=%d, mode=%s)", statistic, threshold, q, resample_mode)
    return TwoSampleResult(statistic=statistic, threshold=threshold, trials=q, reject=bool(statistic > threshold),
                           resample_mode=resample_mode, level=level, null_statistics=null_statistics)


class SetIndex:
    """
    Immutable linear-scan index over set embeddings drawn from one G.

    ``min_separation`` records the separation the caller assumes between indexed sets;
    it is metadata only.
    """

    def __init__(self, sketch: GaussianSketch, embeddings: Sequence[Embedding], labels: Sequence[str],
                 projector: Optional[JlProjector] = None, min_separation: Optional[float] = None):
        if not embeddings:
            raise EmptyInputError("an index needs at least one point set")
        self.sketch = sketch
        self.projector = projector
        self.labels = tuple(labels)
        self.embeddings = tuple(embeddings)
        self.fingerprint = self.embeddings[0].fingerprint
        for embedding in self.embeddings[1:]:
            if embedding.fingerprint != self.fingerprint:
                raise FingerprintMismatchError("index entries come from different sketches")
        self.min_separation = min_separation
        self._matrix = np.vstack([e.vector for e in self.embeddings])
        self._matrix.setflags(write=False)

    def __len__(self):
        return len(self.embeddings)

    def embed(self, Q) -> Embedding:
        Q = as_pointset(Q)
        if Q.d != self.sketch.d:
            raise InputShapeError(f"query has dimension {Q.d}, index expects {self.sketch.d}")
        embedding = embed_set(self.sketch, Q)
        if self.projector is not None:
            embedding = self.projector.project_embedding(embedding)
        return embedding

    def distances(self, embedding: Embedding) -> np.ndarray:
        """Sketched distance from ``embedding`` to every indexed set."""
        if embedding.fingerprint != self.fingerprint:
            raise FingerprintMismatchError(
                f"query embedding {embedding.fingerprint[:12]} does not match index {self.fingerprint[:12]}")
        diff = self._matrix - embedding.vector
        return np.sqrt(np.einsum("ij,ij->i", diff, diff))

    def query(self, Q) -> Tuple[str, float]:
        distances = self.distances(self.embed(Q))
        best = int(np.argmin(distances))  # first minimum, so ties go to the lowest index
        return self.labels[best], float(distances[best])

    def query_many(self, queries: Sequence) -> List[Tuple[str, float]]:
        return [self.query(Q) for Q in queries]


def nn_index_build(sets: Sequence, planned, master_seed: int, jl_dim: Optional[int] = None,
                   min_separation: Optional[float] = None, threads: Optional[int] = None) -> SetIndex:
    sets = [as_pointset(P) for P in sets]
    if not sets:
        raise EmptyInputError("an index needs at least one point set")
    dims = {P.d for P in sets}
    if len(dims) != 1:
        raise InputShapeError(f"point sets have inconsistent dimensions {sorted(dims)}")
    if sets[0].d != planned.d:
        raise InputShapeError(f"point sets have dimension {sets[0].d}, plan expects {planned.d}")

    G = sketch_from_plan(planned, child_seed(master_seed, "nn"))
    jl_dim = jl_dim if jl_dim is not None else planned.jl_dim
    projector = JlProjector(G.output_dim, jl_dim, child_seed(master_seed, "nn", "projector")) if jl_dim else None

    embeddings = []
    for P in sets:
        embedding = embed_set(G, P, threads)
        embeddings.append(projector.project_embedding(embedding) if projector else embedding)
    labels = [P.label if P.label is not None else str(i) for i, P in enumerate(sets)]
    logger.debug("built index of %d sets, width %d", len(sets), embeddings[0].vector.size)
    return SetIndex(G, embeddings, labels, projector, min_separation)


def nn_query(index: SetIndex, Q) -> Tuple[str, float]:
    return index.query(Q)
