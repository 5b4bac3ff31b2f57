from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from modules.errors import EmptyInputError, InputShapeError


@dataclass(frozen=True, eq=False)
class PointSet:
    """An n x d multiset of points with uniform weights 1/n."""
    points: np.ndarray
    label: Optional[str] = None

    def __post_init__(self):
        points = np.array(self.points, dtype=np.float64)
        if points.ndim == 1:
            points = points[None, :]
        if points.ndim != 2:
            raise InputShapeError(f"points must form an n x d matrix, got shape {points.shape}")
        if points.shape[0] == 0:
            raise EmptyInputError("point set is empty")
        if points.shape[1] == 0:
            raise InputShapeError("points must have dimension d >= 1")
        if not np.all(np.isfinite(points)):
            raise InputShapeError("point set contains NaN or infinite entries")
        points.setflags(write=False)
        object.__setattr__(self, "points", points)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]

    def union(self, other: "PointSet") -> "PointSet":
        """Multiset union; duplicates keep their multiplicity."""
        if other.d != self.d:
            raise InputShapeError(f"dimension mismatch: {self.d} vs {other.d}")
        return PointSet(np.vstack([self.points, other.points]), self.label)

    def scaled(self, factor: float) -> "PointSet":
        return PointSet(self.points * factor, self.label)

    def __len__(self):
        return self.n


def as_pointset(X: Union[PointSet, np.ndarray, list]) -> PointSet:
    if isinstance(X, PointSet):
        return X
    X = np.asarray(X, dtype=np.float64)
    if X.size == 0:
        raise EmptyInputError("point set is empty")
    return PointSet(X)
