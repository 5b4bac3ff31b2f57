"""
Johnson-Lindenstrauss post-compression and the median trick.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Sequence

import numpy as np

from modules.app_state import state
from modules.errors import EmptyInputError, InputShapeError
from modules.sketching.kernel_distance import pointset_pair
from modules.sketching.seeding import child_seed, generator, random_signs
from modules.sketching.sketchers import Embedding, embed_set, sketch_from_plan

logger = logging.getLogger(__name__)


class JlProjector:
    """Dense seeded sign matrix R^m -> R^rho with entries +-1/sqrt(rho)."""

    def __init__(self, in_dim: int, out_dim: int, seed: int):
        if in_dim < 1 or out_dim < 1:
            raise InputShapeError(f"need positive dimensions, got in={in_dim}, out={out_dim}")
        self.in_dim = int(in_dim)
        self.out_dim = int(out_dim)
        self.seed = int(seed)
        rng = generator(self.seed, "jl")
        self.matrix = random_signs(rng, self.out_dim * self.in_dim).reshape(self.out_dim, self.in_dim)
        self.matrix /= np.sqrt(self.out_dim)
        self.matrix.setflags(write=False)

    def project(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=np.float64)
        if v.shape[-1] != self.in_dim or v.ndim > 2:
            raise InputShapeError(f"expected length {self.in_dim}, got shape {v.shape}")
        return v @ self.matrix.T

    def project_embedding(self, embedding: Embedding) -> Embedding:
        if embedding.vector.shape[-1] != self.in_dim:
            raise InputShapeError(f"embedding has length {embedding.vector.shape[-1]}, projector expects {self.in_dim}")
        return Embedding(vector=self.project(embedding.vector), fingerprint=f"{embedding.fingerprint}+jl:{self.out_dim}:{self.seed}",
                         count=embedding.count, label=embedding.label)


def jl_project(proj: JlProjector, v: np.ndarray) -> np.ndarray:
    return proj.project(v)


def median_estimate(values: Sequence[float]) -> float:
    """Exact middle order statistic of an odd-length list."""
    values = np.asarray(list(values), dtype=np.float64)
    if values.size == 0:
        raise EmptyInputError("median of an empty list")
    if values.size % 2 == 0:
        raise InputShapeError(f"median trick needs an odd number of values, got {values.size}")
    return float(np.partition(values, values.size // 2)[values.size // 2])


def replica_seeds(master_seed: int, replicas: int) -> List[int]:
    return [child_seed(master_seed, "replica", r) for r in range(replicas)]


def replica_estimates(planned, P, Q, master_seed: int, replicas: Optional[int] = None,
                      jl_dim: Optional[int] = None, threads: Optional[int] = None) -> List[float]:
    """
    Independent full pipelines: each replica draws its own G (and projector when
    ``jl_dim`` is set) and returns one sketched D^2_K estimate.
    """
    P, Q = pointset_pair(P, Q)
    replicas = replicas or planned.replicas
    jl_dim = jl_dim if jl_dim is not None else planned.jl_dim

    def run(seed: int) -> float:
        G = sketch_from_plan(planned, seed)
        fp, fq = embed_set(G, P, threads=1), embed_set(G, Q, threads=1)
        if jl_dim:
            projector = JlProjector(G.output_dim, jl_dim, child_seed(seed, "projector"))
            fp, fq = projector.project_embedding(fp), projector.project_embedding(fq)
        return fp.squared_distance(fq)

    seeds = replica_seeds(master_seed, replicas)
    threads = threads or state.threads
    if threads <= 1 or replicas == 1:
        estimates = [run(seed) for seed in seeds]
    else:
        with ThreadPoolExecutor(max_workers=threads) as executor:
            estimates = list(executor.map(run, seeds))
    logger.debug("replica estimates: %s", estimates)
    return estimates


def replicated_dk2(planned, P, Q, master_seed: int, replicas: Optional[int] = None,
                   jl_dim: Optional[int] = None, threads: Optional[int] = None) -> float:
    """Median of independent replica estimates (success probability 1 - delta)."""
    return median_estimate(replica_estimates(planned, P, Q, master_seed, replicas, jl_dim, threads))
