"""
Degree-2 tensor combiners and the recursive (binary tree) tensor sketch.

A ``RecursiveTensorSketchMap`` sketches degree-k tensors u_1 (x) ... (x) u_k in R^{n^k}
down to R^m without materializing them: every factor goes through its own CountSketch
leaf, and leaves are merged pairwise up a balanced binary tree of ``Tensor2Combiner``
nodes. Each combiner signs and permutes its two inputs and takes their circular
convolution with an FFT, so one application costs O(k m log m + k n).
"""
import itertools
from typing import List, Optional, Sequence, Tuple

import numpy as np
import scipy.fft

from modules.errors import InputShapeError
from modules.sketching.count_sketch import CountSketchMap
from modules.sketching.seeding import child_seed, generator, random_signs


def next_power_of_two(m: int) -> int:
    return 1 << (int(m) - 1).bit_length()


class Tensor2Combiner:
    """Bilinear map R^m x R^m -> R^m sketching a (x) b; m must be a power of two."""

    def __init__(self, dim: int, seed: int):
        if dim < 1 or dim & (dim - 1):
            raise InputShapeError(f"combiner dimension must be a power of two, got {dim}")
        self.dim = int(dim)
        self.seed = int(seed)
        rng = generator(self.seed, "combine")
        self.perm_a = rng.permutation(self.dim)
        self.sign_a = random_signs(rng, self.dim)
        self.perm_b = rng.permutation(self.dim)
        self.sign_b = random_signs(rng, self.dim)
        for table in (self.perm_a, self.sign_a, self.perm_b, self.sign_b):
            table.setflags(write=False)

    def _scatter(self, v: np.ndarray, perm: np.ndarray, signs: np.ndarray) -> np.ndarray:
        out = np.zeros_like(v)
        out[..., perm] = v * signs
        return out

    def combine(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        a = np.asarray(a, dtype=np.float64)
        b = np.asarray(b, dtype=np.float64)
        if a.shape[-1] != self.dim or b.shape[-1] != self.dim:
            raise InputShapeError(f"combiner expects length {self.dim}, got {a.shape} and {b.shape}")
        fa = scipy.fft.rfft(self._scatter(a, self.perm_a, self.sign_a), axis=-1)
        fb = scipy.fft.rfft(self._scatter(b, self.perm_b, self.sign_b), axis=-1)
        return scipy.fft.irfft(fa * fb, n=self.dim, axis=-1)

    def to_dense(self) -> np.ndarray:
        """The explicit m x m^2 matrix; column i*m + j is the image of e_i (x) e_j."""
        matrix = np.zeros((self.dim, self.dim * self.dim))
        i, j = np.meshgrid(np.arange(self.dim), np.arange(self.dim), indexing="ij")
        rows = (self.perm_a[i] + self.perm_b[j]) % self.dim
        matrix[rows.ravel(), (i * self.dim + j).ravel()] = (self.sign_a[i] * self.sign_b[j]).ravel()
        return matrix


def tensor2_combine(node: Tensor2Combiner, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return node.combine(a, b)


# Tree nodes: ("leaf", leaf_index) or ("node", combiner_index, left, right)
TreeNode = Tuple


class RecursiveTensorSketchMap:
    """Seeded linear map R^{n^k} -> R^m, m rounded up to a power of two."""

    def __init__(self, input_dim: int, output_dim: int, degree: int, seed: int):
        if input_dim < 1 or output_dim < 1 or degree < 0:
            raise InputShapeError(
                f"need n >= 1, m >= 1, k >= 0; got n={input_dim}, m={output_dim}, k={degree}")
        self.input_dim = int(input_dim)
        self.requested_dim = int(output_dim)
        self.output_dim = next_power_of_two(output_dim)
        self.degree = int(degree)
        self.seed = int(seed)

        self.leaf_maps: List[CountSketchMap] = [
            CountSketchMap(self.input_dim, self.output_dim, child_seed(self.seed, "leaf", i))
            for i in range(self.degree)
        ]
        self.combine_maps: List[Tensor2Combiner] = []
        self.tree: Optional[TreeNode] = self._build(0, self.degree) if self.degree else None

    def _build(self, lo: int, hi: int) -> TreeNode:
        if hi - lo == 1:
            return ("leaf", lo)
        mid = (lo + hi + 1) // 2
        left = self._build(lo, mid)
        right = self._build(mid, hi)
        index = len(self.combine_maps)
        self.combine_maps.append(Tensor2Combiner(self.output_dim, child_seed(self.seed, "node", index)))
        return ("node", index, left, right)

    def depth(self) -> int:
        def walk(node):
            if node is None or node[0] == "leaf":
                return 0
            return 1 + max(walk(node[2]), walk(node[3]))
        return walk(self.tree)

    def _evaluate(self, node: TreeNode, leaves: List[np.ndarray]) -> np.ndarray:
        if node[0] == "leaf":
            return leaves[node[1]]
        _, index, left, right = node
        return self.combine_maps[index].combine(self._evaluate(left, leaves), self._evaluate(right, leaves))

    def apply_rank1(self, factors: Sequence[np.ndarray], batch_size: Optional[int] = None) -> np.ndarray:
        """
        Sketch factors[0] (x) ... (x) factors[k-1].

        Each factor is a length-n vector, or an (N, n) batch where row r of the output
        sketches the tensor product of row r of every factor. For k = 0 the tensor is the
        scalar 1 and the result is the first standard basis vector (tiled ``batch_size``
        times when given).
        """
        if len(factors) != self.degree:
            raise InputShapeError(f"expected {self.degree} factors, got {len(factors)}")
        if self.degree == 0:
            unit = np.zeros(self.output_dim)
            unit[0] = 1.0
            return unit if batch_size is None else np.tile(unit, (batch_size, 1))

        arrays = [np.asarray(f, dtype=np.float64) for f in factors]
        shapes = {a.shape for a in arrays}
        if len(shapes) != 1:
            raise InputShapeError(f"factors must share one shape, got {sorted(shapes)}")
        shape = shapes.pop()
        if shape[-1] != self.input_dim or len(shape) > 2:
            raise InputShapeError(f"factors must have length {self.input_dim}, got shape {shape}")

        leaves = [cs.apply(a) for cs, a in zip(self.leaf_maps, arrays)]
        return self._evaluate(self.tree, leaves)

    def apply_power(self, x: np.ndarray, batch_size: Optional[int] = None) -> np.ndarray:
        """Sketch x^{(x) k} (k copies of the same vector or batch)."""
        return self.apply_rank1([x] * self.degree, batch_size=batch_size)

    def to_dense(self) -> np.ndarray:
        """Materialize the m x n^k matrix by sketching every basis tensor (tiny maps only)."""
        total = self.input_dim ** self.degree
        if total > 1 << 16:
            raise InputShapeError(f"refusing to materialize {total} columns")
        if self.degree == 0:
            return self.apply_rank1([])[:, None]
        identity = np.eye(self.input_dim)
        index = np.array(list(itertools.product(range(self.input_dim), repeat=self.degree)))
        factors = [identity[index[:, j]] for j in range(self.degree)]
        return self.apply_rank1(factors).T

    def __repr__(self):
        return (f"RecursiveTensorSketchMap(n={self.input_dim}, m={self.output_dim}, "
                f"k={self.degree}, seed={self.seed})")


def rts_new(n: int, m: int, k: int, seed: int) -> RecursiveTensorSketchMap:
    return RecursiveTensorSketchMap(n, m, k, seed)


def rts_apply_rank1(T: RecursiveTensorSketchMap, factors: Sequence[np.ndarray]) -> np.ndarray:
    return T.apply_rank1(factors)
