"""
CountSketch: the seeded base sketch at the leaves of every tensor sketch.
"""
from typing import Optional

import numpy as np
import scipy.sparse as sps

from modules.errors import InputShapeError
from modules.sketching.seeding import generator, random_signs


class CountSketchMap:
    """
    Linear map R^n -> R^m with ``result[j] = sum_{i: buckets[i] = j} signs[i] * x[i]``.

    Tables are fully determined by ``seed``. The map is stored as an m x n CSR matrix,
    so applying it to a batch of rows is a single sparse product.
    """

    def __init__(self, input_dim: int, output_dim: int, seed: int,
                 buckets: Optional[np.ndarray] = None, signs: Optional[np.ndarray] = None):
        if input_dim < 1 or output_dim < 1:
            raise InputShapeError(f"CountSketch dimensions must be positive, got n={input_dim}, m={output_dim}")
        self.input_dim = int(input_dim)
        self.output_dim = int(output_dim)
        self.seed = int(seed)

        if buckets is None or signs is None:
            rng = generator(self.seed, "count_sketch")
            buckets = rng.integers(0, self.output_dim, size=self.input_dim)
            signs = random_signs(rng, self.input_dim)
        buckets = np.array(buckets, dtype=np.int64)
        signs = np.array(signs, dtype=np.float64)
        if buckets.shape != (self.input_dim,) or signs.shape != (self.input_dim,):
            raise InputShapeError("buckets and signs must both have length input_dim")
        if buckets.min() < 0 or buckets.max() >= self.output_dim:
            raise InputShapeError("bucket indices must lie in [0, output_dim)")

        self.buckets = buckets
        self.signs = signs
        self.buckets.setflags(write=False)
        self.signs.setflags(write=False)
        self._matrix = sps.csr_matrix(
            (self.signs, (self.buckets, np.arange(self.input_dim))),
            shape=(self.output_dim, self.input_dim),
        )

    def apply(self, x: np.ndarray) -> np.ndarray:
        """Apply to a vector of length n or to each row of an (N, n) batch."""
        x = np.asarray(x, dtype=np.float64)
        if x.shape[-1:] != (self.input_dim,) or x.ndim > 2:
            raise InputShapeError(f"expected trailing dimension {self.input_dim}, got shape {x.shape}")
        return np.asarray(self._matrix @ x.T).T

    def to_dense(self) -> np.ndarray:
        """The explicit m x n matrix (small instances only)."""
        return self._matrix.toarray()

    def __repr__(self):
        return f"CountSketchMap(n={self.input_dim}, m={self.output_dim}, seed={self.seed})"


def count_sketch_apply(cs: CountSketchMap, x: np.ndarray) -> np.ndarray:
    return cs.apply(x)
