"""
Exact and sketched squared kernel distance between point sets.

    kappa(P, Q) = 1/(|P||Q|) sum_{x in P} sum_{y in Q} exp(-||x - y||^2)
    D^2_K(P, Q) = kappa(P, P) - 2 kappa(P, Q) + kappa(Q, Q)

The sketched distance is ||F(P) - F(Q)||^2 for the mean embeddings under one drawn G.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import chain
from typing import Optional

import numpy as np

from modules.app_state import state
from modules.errors import InputShapeError
from modules.sketching.feature_maps import exact_gram, truncated_gram
from modules.sketching.pointset import PointSet, as_pointset
from modules.sketching.sketchers import GaussianSketch, embed_set

logger = logging.getLogger(__name__)

NEGATIVE_CLAMP = 1e-12


@dataclass(frozen=True)
class DistanceReport:
    sketched_dk2: float
    epsilon: float
    alpha: float
    exact_dk2: Optional[float] = None
    within_budget: Optional[bool] = None

    @classmethod
    def build(cls, sketched: float, epsilon: float, alpha: float, exact: Optional[float] = None):
        within = None
        if exact is not None:
            within = abs(sketched - exact) <= error_budget(exact, epsilon, alpha)
        return cls(sketched_dk2=sketched, epsilon=epsilon, alpha=alpha, exact_dk2=exact, within_budget=within)

    def as_lines(self):
        lines = []
        if self.exact_dk2 is not None:
            lines.append(f"exact_dk2={self.exact_dk2!r}")
        lines.append(f"sketched_dk2={self.sketched_dk2!r}")
        lines.append(f"epsilon={self.epsilon}")
        lines.append(f"alpha={self.alpha}")
        if self.exact_dk2 is not None:
            lines.append(f"budget={error_budget(self.exact_dk2, self.epsilon, self.alpha)!r}")
            lines.append(f"within_budget={str(self.within_budget).lower()}")
        return lines


def pointset_pair(P, Q):
    P, Q = as_pointset(P), as_pointset(Q)
    if P.d != Q.d:
        raise InputShapeError(f"dimension mismatch: {P.d} vs {Q.d}")
    return P, Q


def _block_sum(X: np.ndarray, Y: np.ndarray, threads: int, block: int) -> float:
    starts = range(0, X.shape[0], block)

    # a single fsum over every entry: independent of the block split
    def block_values(start):
        return exact_gram(X[start:start + block], Y).ravel()

    if threads <= 1 or X.shape[0] <= block:
        return math.fsum(chain.from_iterable(block_values(start) for start in starts))
    with ThreadPoolExecutor(max_workers=threads) as executor:
        return math.fsum(chain.from_iterable(executor.map(block_values, starts)))


def exact_kappa(P, Q, threads: Optional[int] = None) -> float:
    """Brute-force mean kernel value over all |P||Q| pairs, row blocks in parallel."""
    P, Q = pointset_pair(P, Q)
    total = _block_sum(P.points, Q.points, threads or state.threads, state.chunk_size)
    return total / (P.n * Q.n)


def exact_dk2(P, Q, threads: Optional[int] = None) -> float:
    P, Q = pointset_pair(P, Q)
    value = (exact_kappa(P, P, threads) + exact_kappa(Q, Q, threads)) - 2.0 * exact_kappa(P, Q, threads)
    if value < 0:
        if value < -NEGATIVE_CLAMP:
            logger.warning("exact D^2_K evaluated to %g; clamping to 0", value)
        value = 0.0
    return value


def signed_weights(P: PointSet, Q: PointSet) -> np.ndarray:
    """beta over the multiset union P u Q: +1/|P| on P's points, -1/|Q| on Q's."""
    return np.concatenate([np.full(P.n, 1.0 / P.n), np.full(Q.n, -1.0 / Q.n)])


def signed_weight_form(P, Q, gram_fn) -> float:
    """beta^T K beta over P u Q for any kernel-matrix function of the stacked points."""
    P, Q = pointset_pair(P, Q)
    beta = signed_weights(P, Q)
    stacked = np.vstack([P.points, Q.points])
    return float(beta @ gram_fn(stacked) @ beta)


def truncated_dk2(P, Q, s: int, variant: str) -> float:
    """beta^T K^trunc beta: the seed-average of the sketched distance."""
    return signed_weight_form(P, Q, lambda X: truncated_gram(X, s, variant))


def sketched_dk2(G: GaussianSketch, P, Q, threads: Optional[int] = None) -> float:
    P, Q = pointset_pair(P, Q)
    return embed_set(G, P, threads).squared_distance(embed_set(G, Q, threads))


def sketched_kappa(G: GaussianSketch, P, Q, threads: Optional[int] = None) -> float:
    """<F(P), F(Q)>, the sketched estimate of kappa(P, Q)."""
    P, Q = pointset_pair(P, Q)
    return embed_set(G, P, threads).inner(embed_set(G, Q, threads))


def error_budget(exact: float, epsilon: float, alpha: float) -> float:
    return epsilon * exact + alpha


def distance_report(G: GaussianSketch, P, Q, epsilon: float, alpha: float,
                    with_exact: bool = True) -> DistanceReport:
    sketched = sketched_dk2(G, P, Q)
    exact = exact_dk2(P, Q) if with_exact else None
    return DistanceReport.build(sketched, epsilon, alpha, exact)
