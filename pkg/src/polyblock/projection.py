"""Projection oracles: point -> monotone projection onto the upper-bound set.

The monotone projection of x onto a normal set is the farthest point of
the ray {r x : r >= 0} inside the set. Four interchangeable strategies
compute it:

* bisection on the max constraint residual along the segment [0, x];
* closed-form radial inverses (quadratic constraints);
* numeric radial inverses (bracketing + bisection on the ray scale);
* learned radial-inverse surrogates (one model evaluation per constraint,
  no bisection).

Radial inverse of an increasing g at (x, y): the smallest r > 0 with
g(x/r) <= y, with inf of the empty set encoded as +inf. The projection is
x scaled by the reciprocal of the largest radial inverse at the constraint
thresholds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class ProjectionError(RuntimeError):
    """Projection could not be computed for the given ray."""


class EmptyProjectionRayError(ProjectionError):
    """The origin itself violates the constraints: no point of the ray is feasible."""


class UnboundedNormalSetError(ProjectionError):
    """Every constraint is slack along the whole ray (set unbounded in that direction)."""


@dataclass
class ProjectionCounters:
    """Oracle-call accounting; monotone nondecreasing."""

    constraint_evals: int = 0
    model_evals: int = 0
    projection_calls: int = 0
    unbounded_clamps: int = 0

    def snapshot(self) -> dict:
        return {
            "constraint_evals": self.constraint_evals,
            "model_evals": self.model_evals,
            "projection_calls": self.projection_calls,
            "unbounded_clamps": self.unbounded_clamps,
        }


# ------------------------------------------------------------------
# bisection projection
# ------------------------------------------------------------------


def bisection_project(
    x,
    constraints,
    thresholds,
    tol: float = 1e-4,
    counters: ProjectionCounters | None = None,
) -> np.ndarray:
    """Project x onto {g_i <= u_i} by bisection along the segment [0, x].

    If x itself is feasible it is returned unchanged (one residual
    evaluation, no bisection). Otherwise the bracket [r_min, r_max] starts
    at [0, 1] and halves until its width is <= tol, costing exactly
    ceil(log2(1/tol)) residual evaluations of all constraints, plus the
    initial guard.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    x = np.asarray(x, dtype=np.float64)
    thresholds = np.asarray(thresholds, dtype=np.float64)

    def residual(pt: np.ndarray) -> float:
        if counters is not None:
            counters.constraint_evals += len(constraints)
        return max(g(pt) - u for g, u in zip(constraints, thresholds))

    if residual(x) <= 0.0:
        return x

    r_max, r_min = 1.0, 0.0
    r = 0.5
    while r_max - r_min > tol:
        if residual(r * x) > 0.0:
            r_max = r
        else:
            r_min = r
        r = 0.5 * (r_max + r_min)
    if r_min == 0.0 and residual(np.zeros_like(x)) > 0.0:
        raise EmptyProjectionRayError("empty projection ray: origin is infeasible")
    return r_min * x


# ------------------------------------------------------------------
# radial inverses
# ------------------------------------------------------------------


def quad_radial_inverse(q, c, x, y: float) -> float:
    """Radial inverse of g(v) = v^T Q v + c^T v at (x, y), in closed form.

    Along the ray, g(x/r) = a/r^2 + b/r with a = x^T Q x, b = c^T x, both
    nonnegative, so the feasibility threshold solves a quadratic in r.
    Returns a value in [0, +inf]; +inf encodes an empty feasible ray.
    """
    q = np.asarray(q, dtype=np.float64)
    c = np.asarray(c, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    y = float(y)
    a = float(x @ q @ x)
    b = float(c @ x)
    if a == 0.0 and b == 0.0:
        # g is identically zero along the ray
        return 0.0 if y >= 0.0 else math.inf
    if y <= 0.0:
        return math.inf
    if a == 0.0:
        return b / y
    return 2.0 * a / (-b + math.sqrt(b * b + 4.0 * y * a))


def numeric_radial_inverse(
    g,
    x,
    y: float,
    tol: float = 1e-10,
    r_min_floor: float = 1e-9,
    r_max_cap: float = 1e6,
) -> float:
    """Radial inverse of an increasing oracle g by bracketing + bisection.

    The bracket expands/contracts geometrically from r = 1 until the
    feasibility condition g(x/r) <= y changes, then bisects to width tol
    and returns the bracket midpoint. Returns +inf when no r <= r_max_cap
    is feasible and ~0 when every probed r down to r_min_floor is.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    x = np.asarray(x, dtype=np.float64)
    y = float(y)

    def feasible(r: float) -> bool:
        val = float(g(x / r))
        if not math.isfinite(val):
            raise ProjectionError(f"non-finite constraint value at r={r!r}")
        return val <= y

    if np.all(x == 0.0):
        val = float(g(x))
        if not math.isfinite(val):
            raise ProjectionError("non-finite constraint value at origin")
        return 0.0 if val <= y else math.inf

    # feasibility in r is an up-set: bracket its lower edge geometrically
    if feasible(1.0):
        hi, lo = 1.0, 0.5
        while feasible(lo):
            hi = lo
            lo *= 0.5
            if lo < r_min_floor:
                return 0.0
    else:
        lo, hi = 1.0, 2.0
        while not feasible(hi):
            lo = hi
            hi *= 2.0
            if hi > r_max_cap:
                return math.inf

    while hi - lo > tol:
        mid = 0.5 * (hi + lo)
        if feasible(mid):
            hi = mid
        else:
            lo = mid
    return 0.5 * (hi + lo)


def project_via_radial_inverses(
    x,
    radial_inverses,
    thresholds,
    bound=None,
    on_unbounded: str = "error",
    counters: ProjectionCounters | None = None,
) -> np.ndarray:
    """Scale x by the reciprocal of the largest radial inverse at the thresholds.

    Any +inf radial inverse means the ray is infeasible beyond the origin
    (projection is 0). A largest value of 0 means every constraint is slack
    along the whole ray, which is impossible for a compact feasible set:
    raised as an error, or clamped to the box boundary along the ray when
    ``on_unbounded='clamp'`` (used with learned surrogates, which can
    underestimate). When a bound is supplied the result is clamped into
    [0, bound].
    """
    x = np.asarray(x, dtype=np.float64)
    thresholds = np.asarray(thresholds, dtype=np.float64)
    if np.all(x == 0.0):
        return np.zeros_like(x)
    rho_max = 0.0
    for rho, u in zip(radial_inverses, thresholds):
        val = float(rho(x, float(u)))
        if math.isinf(val):
            return np.zeros_like(x)
        rho_max = max(rho_max, val)
    if rho_max <= 0.0:
        if on_unbounded == "clamp" and bound is not None:
            if counters is not None:
                counters.unbounded_clamps += 1
            positive = x > 0.0
            scale = np.min(np.asarray(bound)[positive] / x[positive])
            return np.minimum(scale * x, bound)
        raise UnboundedNormalSetError("unbounded normal set: all radial inverses are 0")
    z = x / rho_max
    if bound is not None:
        z = np.minimum(z, np.asarray(bound, dtype=np.float64))
    return z


# ------------------------------------------------------------------
# oracle strategies
# ------------------------------------------------------------------


class ProjectionOracle:
    """Common interface: ``project(x)`` plus call accounting."""

    def __init__(self):
        self.counters = ProjectionCounters()

    def project(self, x) -> np.ndarray:
        self.counters.projection_calls += 1
        return self._project(np.asarray(x, dtype=np.float64))

    def _project(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError


class BisectionOracle(ProjectionOracle):
    """Ground-truth (or surrogate-constraint) projection via bisection."""

    def __init__(self, constraints, thresholds, tol: float = 1e-4):
        super().__init__()
        self.constraints = list(constraints)
        self.thresholds = np.asarray(thresholds, dtype=np.float64)
        self.tol = float(tol)

    def _project(self, x: np.ndarray) -> np.ndarray:
        return bisection_project(
            x, self.constraints, self.thresholds, tol=self.tol, counters=self.counters
        )


class ClosedFormRadialInverseOracle(ProjectionOracle):
    """Exact projection for quadratic constraints via closed-form radial inverses."""

    def __init__(self, quadratics, thresholds, bound=None):
        super().__init__()
        self.quadratics = list(quadratics)  # objects with .q and .c
        self.thresholds = np.asarray(thresholds, dtype=np.float64)
        self.bound = None if bound is None else np.asarray(bound, dtype=np.float64)
        self._inverses = [
            (lambda x, y, g=g: quad_radial_inverse(g.q, g.c, x, y)) for g in self.quadratics
        ]

    def _project(self, x: np.ndarray) -> np.ndarray:
        return project_via_radial_inverses(
            x, self._inverses, self.thresholds, bound=self.bound
        )


class NumericRadialInverseOracle(ProjectionOracle):
    """Projection via numeric radial inverses of arbitrary increasing oracles."""

    def __init__(self, constraints, thresholds, tol: float = 1e-10, bound=None):
        super().__init__()
        self.constraints = list(constraints)
        self.thresholds = np.asarray(thresholds, dtype=np.float64)
        self.tol = float(tol)
        self.bound = None if bound is None else np.asarray(bound, dtype=np.float64)

    def _project(self, x: np.ndarray) -> np.ndarray:
        counters = self.counters

        def make_rho(g):
            def counted(pt):
                counters.constraint_evals += 1
                return g(pt)

            return lambda x_, y_: numeric_radial_inverse(counted, x_, y_, tol=self.tol)

        inverses = [make_rho(g) for g in self.constraints]
        return project_via_radial_inverses(
            x, inverses, self.thresholds, bound=self.bound
        )


class LearnedRadialInverseOracle(ProjectionOracle):
    """Projection from learned radial-inverse surrogates: one model
    evaluation per constraint per call, no bisection.

    ``models`` are callables (x, y) -> predicted radial inverse. Outputs are
    clamped into [0, bound]; a nonpositive largest prediction (the model
    claims the whole ray is feasible) is clamped to the box boundary and
    counted in ``counters.unbounded_clamps``.
    """

    def __init__(self, models, thresholds, bound):
        super().__init__()
        self.models = list(models)
        self.thresholds = np.asarray(thresholds, dtype=np.float64)
        self.bound = np.asarray(bound, dtype=np.float64)

    def _project(self, x: np.ndarray) -> np.ndarray:
        counters = self.counters

        def make_rho(model):
            def rho(x_, y_):
                counters.model_evals += 1
                return float(model(x_, y_))

            return rho

        inverses = [make_rho(m) for m in self.models]
        return project_via_radial_inverses(
            x,
            inverses,
            self.thresholds,
            bound=self.bound,
            on_unbounded="clamp",
            counters=counters,
        )
