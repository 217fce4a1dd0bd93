"""Nonnegative points, boxes, product-order comparisons, and vertex sets.

The solver's vertex bookkeeping relies on *exact* floating-point order
relations: ties in domination are exact equality, and duplicates are
deduplicated by exact coordinate equality. Tolerances live in stopping
rules and bisection, never here.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def point(coords) -> np.ndarray:
    """Validate and return a nonnegative float64 vector."""
    x = np.asarray(coords, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError(f"point must be 1-D, got shape {x.shape}")
    if not np.all(x >= 0.0):
        raise ValueError("point coordinates must be nonnegative")
    return x


@dataclass(frozen=True)
class Box:
    """Axis-aligned box [lo, hi], lo <= hi componentwise.

    Polyblock boxes live in the nonnegative orthant; certification domains
    may have negative coordinates (e.g. constraint-value ranges), so only
    lo <= hi is enforced here.
    """

    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        lo = np.asarray(self.lo, dtype=np.float64)
        hi = np.asarray(self.hi, dtype=np.float64)
        if lo.shape != hi.shape or lo.ndim != 1:
            raise ValueError("box bounds must be 1-D vectors of equal length")
        if not np.all(lo <= hi):
            raise ValueError("box requires lo <= hi componentwise")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def dim(self) -> int:
        return self.lo.shape[0]

    @property
    def center(self) -> np.ndarray:
        return 0.5 * (self.lo + self.hi)

    def contains(self, x, tol: float = 0.0) -> bool:
        x = np.asarray(x, dtype=np.float64)
        return bool(np.all(x >= self.lo - tol) and np.all(x <= self.hi + tol))

    def sample(self, rng: np.random.Generator, count: int) -> np.ndarray:
        return rng.uniform(self.lo, self.hi, size=(count, self.dim))


def _check_same_dim(x: np.ndarray, y: np.ndarray) -> None:
    if x.shape != y.shape:
        raise ValueError(f"dimension mismatch: {x.shape} vs {y.shape}")


def dominates(x, y) -> bool:
    """True iff x_i <= y_i for all i (x is dominated by y)."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    _check_same_dim(x, y)
    return bool(np.all(x <= y))


def strictly_dominates(x, y) -> bool:
    """True iff x_i < y_i for all i."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    _check_same_dim(x, y)
    return bool(np.all(x < y))


def dedupe_exact(points: np.ndarray) -> np.ndarray:
    """Remove exact duplicate rows, keeping first occurrences in order."""
    if len(points) <= 1:
        return points
    seen: set[bytes] = set()
    keep = np.zeros(len(points), dtype=bool)
    for i, row in enumerate(points):
        key = row.tobytes()
        if key not in seen:
            seen.add(key)
            keep[i] = True
    return points[keep]


def maximal_rows(points: np.ndarray) -> np.ndarray:
    """Boolean mask of rows not dominated by any other (distinct) row."""
    m = len(points)
    keep = np.ones(m, dtype=bool)
    for i in range(m):
        if not keep[i]:
            continue
        # row i is removable if some other row dominates it strictly-or-equal
        # without being an exact duplicate
        le = np.all(points[i] <= points, axis=1)
        le[i] = False
        eq = np.all(points[i] == points, axis=1)
        eq[i] = False
        if np.any(le & ~eq):
            keep[i] = False
    return keep


class VertexSet:
    """A finite set of nonnegative vertices inside a common box [0, b].

    After :func:`prune_dominated` the set is an antichain under the product
    order (up to exact ties, which are deduplicated).
    """

    def __init__(self, points: np.ndarray):
        pts = np.asarray(points, dtype=np.float64)
        if pts.ndim != 2:
            raise ValueError("vertex set expects a 2-D array (rows are vertices)")
        if not np.all(pts >= 0.0):
            raise ValueError("vertices must be nonnegative")
        self.points = pts

    @classmethod
    def from_rows(cls, rows) -> "VertexSet":
        return cls(np.atleast_2d(np.asarray(rows, dtype=np.float64)))

    def __len__(self) -> int:
        return len(self.points)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __eq__(self, other) -> bool:
        if not isinstance(other, VertexSet):
            return NotImplemented
        return self.points.shape == other.points.shape and bool(
            np.all(self.points == other.points)
        )

    def __repr__(self) -> str:
        return f"VertexSet({len(self)} vertices, dim {self.dim})"

    def as_sorted_rows(self) -> np.ndarray:
        """Rows in lexicographic order (canonical form for comparisons)."""
        if len(self.points) == 0:
            return self.points
        order = np.lexsort(self.points.T[::-1])
        return self.points[order]


def prune_dominated(vertices: VertexSet) -> VertexSet:
    """Keep only the maximal elements under the product order.

    Exact duplicates collapse to a single representative; the rectangular
    hull of the set is unchanged.
    """
    pts = dedupe_exact(vertices.points)
    return VertexSet(pts[maximal_rows(pts)])
