"""Polyblock outer approximation solver.

Maintains a finite vertex set whose rectangular hull is a shrinking outer
approximation of the feasible set. Each iteration projects the objective
argmax vertex onto the upper-bound set, updates the incumbent, cuts the
strictly-dominating cone, filters against the lower-bound set, and stops
once the incumbent is within eps of the vertex upper bound.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from polyblock.problem import MonotoneProblem
from polyblock.projection import ProjectionError, ProjectionOracle

CONVERGED = "converged"
ITER_LIMIT = "iter_limit"
VERTEX_STARVATION = "vertex_starvation"
PROJECTION_ERROR = "projection_error"


@dataclass
class PoaConfig:
    eps: float = 1e-3
    v_max: int = 10_000
    max_iters: int = 10_000
    origin_shift_alpha: float = 0.0

    def __post_init__(self):
        if self.eps <= 0:
            raise ValueError("eps must be positive")
        if self.v_max < 1:
            raise ValueError("v_max must be >= 1")


@dataclass
class PoaResult:
    best_point: np.ndarray | None
    best_value: float
    upper_bound: float
    iterations: int
    restarts: int
    projection_calls: int
    termination: str
    stalls: int = 0

    @property
    def gap(self) -> float:
        return self.upper_bound - self.best_value


def _argmax_vertex(vertices: np.ndarray, values: np.ndarray) -> int:
    """Index of the best-objective vertex; ties go to the lexicographically
    smallest coordinate vector, for deterministic runs."""
    best = values.max()
    tied = np.flatnonzero(values == best)
    if len(tied) == 1:
        return int(tied[0])
    rows = vertices[tied]
    order = np.lexsort(rows.T[::-1])
    return int(tied[order[0]])


def _filter_lower_set(problem: MonotoneProblem, rows: np.ndarray) -> np.ndarray:
    if problem.m_h == 0 or len(rows) == 0:
        return np.ones(len(rows), dtype=bool)
    return np.array([problem.in_lower_set(r) for r in rows], dtype=bool)


def _refine_parts(
    vertices: np.ndarray,
    z: np.ndarray,
    problem: MonotoneProblem | None = None,
) -> tuple[np.ndarray, np.ndarray, bool]:
    """One refinement step, split into (kept mask, new rows, removed_any)."""
    vertices = np.asarray(vertices, dtype=np.float64)
    z = np.asarray(z, dtype=np.float64)
    n = vertices.shape[1]
    strict = np.all(vertices > z, axis=1)
    if not np.any(strict):
        return np.ones(len(vertices), dtype=bool), np.zeros((0, n)), False
    removed = vertices[strict]

    m = len(removed)
    children = np.repeat(removed, n, axis=0)
    coords = np.tile(np.arange(n), m)
    children[np.arange(m * n), coords] = z[coords]
    parent_idx = np.repeat(np.flatnonzero(strict), n)

    # child is redundant iff dominated by any original vertex except its parent
    dominated = np.all(children[:, None, :] <= vertices[None, :, :], axis=2)
    dominated[np.arange(m * n), parent_idx] = False
    new_rows = children[~dominated.any(axis=1)]

    if problem is not None and len(new_rows):
        new_rows = new_rows[_filter_lower_set(problem, new_rows)]
    return ~strict, new_rows, True


def refine_vertices(
    vertices: np.ndarray,
    z: np.ndarray,
    problem: MonotoneProblem | None = None,
) -> np.ndarray:
    """One polyblock refinement step at projection point z.

    Every vertex s > z (strictly, all coordinates) is replaced by the n
    copies of s with one coordinate lowered to z's. New vertices dominated
    by any vertex other than their parent are dropped, which keeps the set
    an antichain without a quadratic prune; vertices failing lower-bound
    membership are discarded. If no vertex strictly dominates z the set is
    returned unchanged (the caller must detect the stall).
    """
    vertices = np.asarray(vertices, dtype=np.float64)
    kept_mask, new_rows, removed_any = _refine_parts(vertices, z, problem)
    if not removed_any:
        return vertices
    kept = vertices[kept_mask]
    return np.vstack([kept, new_rows]) if len(new_rows) else kept


def reduce_vertices(
    vertices: np.ndarray, values: np.ndarray, best_value: float, eps: float
) -> np.ndarray:
    """Mask of vertices whose objective can still beat the incumbent by eps."""
    if not np.isfinite(best_value):
        return np.ones(len(vertices), dtype=bool)
    return values + eps >= best_value


def origin_shift(problem: MonotoneProblem, alpha: float) -> MonotoneProblem:
    """Shift the feasible region away from the coordinate axes by alpha.

    The shifted problem maximizes f(x - alpha) over the shifted constraint
    sets; a shifted solution maps back by subtracting alpha. Evaluation at
    points below the shift uses the clamped positive part, which is exact
    for normal upper-bound sets; lower-bound membership additionally
    requires x >= alpha, encoded as extra coordinate constraints.
    """
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    if alpha == 0.0:
        return problem
    a = float(alpha)

    def shift_eval(fn):
        return lambda x: fn(np.maximum(np.asarray(x, dtype=np.float64) - a, 0.0))

    def shifted_objective(x):
        return problem.f(np.maximum(np.asarray(x, dtype=np.float64) - a, 0.0))

    def shifted_objective_batch(xs):
        return problem.f_many(np.maximum(np.asarray(xs, dtype=np.float64) - a, 0.0))

    lower = [shift_eval(h) for h in problem.lower_constraints]
    lower_thresholds = list(problem.lower_thresholds)
    for i in range(problem.n):
        lower.append(lambda x, i=i: float(np.asarray(x)[i]))
        lower_thresholds.append(a)

    return MonotoneProblem(
        n=problem.n,
        objective=shifted_objective,
        objective_batch=shifted_objective_batch,
        upper_constraints=[shift_eval(g) for g in problem.upper_constraints],
        upper_thresholds=problem.upper_thresholds.copy(),
        bound=problem.bound + a,
        lower_constraints=lower,
        lower_thresholds=np.asarray(lower_thresholds, dtype=np.float64),
    )


def solve(
    problem: MonotoneProblem,
    oracle: ProjectionOracle,
    cfg: PoaConfig = PoaConfig(),
    trace=None,
) -> PoaResult:
    """Run polyblock outer approximation to eps-optimality.

    ``trace``, when given, receives one text line per iteration:
    iteration, vertex count, upper bound, incumbent value.
    """
    b = problem.bound.copy()
    vertices = b[None, :]
    values = problem.f_many(vertices)
    best_point: np.ndarray | None = None
    best_value = -np.inf
    idx = 0
    x_hat = vertices[idx]
    f_hat = float(values[idx])
    iterations = 0
    restarts = 0
    stalls = 0
    calls_before = oracle.counters.projection_calls

    def result(termination: str, upper: float) -> PoaResult:
        return PoaResult(
            best_point=None if best_point is None else best_point.copy(),
            best_value=best_value,
            upper_bound=upper,
            iterations=iterations,
            restarts=restarts,
            projection_calls=oracle.counters.projection_calls - calls_before,
            termination=termination,
            stalls=stalls,
        )

    while True:
        if best_value + cfg.eps >= f_hat:
            return result(CONVERGED, f_hat)
        if iterations >= cfg.max_iters:
            return result(ITER_LIMIT, f_hat)
        iterations += 1

        try:
            z = oracle.project(x_hat)
        except ProjectionError:
            return result(PROJECTION_ERROR, f_hat)

        f_z = problem.f(z)
        if f_z > best_value and problem.in_lower_set(z):
            best_point, best_value = z.copy(), f_z

        # hard vertex cap: restart from the bounding vertex, keeping the
        # incumbent (reset happens after the projection, before the update)
        if len(vertices) > cfg.v_max:
            vertices = b[None, :]
            values = problem.f_many(vertices)
            restarts += 1

        kept_mask, new_rows, removed_any = _refine_parts(vertices, z, problem)
        if removed_any:
            kept = vertices[kept_mask]
            kept_values = values[kept_mask]
            new_values = problem.f_many(new_rows)
            vertices = np.vstack([kept, new_rows]) if len(new_rows) else kept
            values = np.concatenate([kept_values, new_values])
        else:
            # projection left the argmax vertex uncut: the oracle says it is
            # feasible, so score it against the incumbent and drop it
            stalls += 1
            if f_hat > best_value and problem.in_lower_set(x_hat):
                best_point, best_value = x_hat.copy(), f_hat
            drop = np.all(vertices == x_hat, axis=1)
            vertices = vertices[~drop]
            values = values[~drop]

        keep = reduce_vertices(vertices, values, best_value, cfg.eps)
        vertices = vertices[keep]
        values = values[keep]

        if len(vertices) == 0:
            if best_point is not None:
                # every remaining vertex was within eps of the incumbent
                return result(CONVERGED, best_value)
            return result(VERTEX_STARVATION, f_hat)

        idx = _argmax_vertex(vertices, values)
        x_hat = vertices[idx]
        f_hat = float(values[idx])

        if trace is not None:
            trace.write(f"{iterations}\t{len(vertices)}\t{f_hat!r}\t{best_value!r}\n")
