"""Monotone-problem data model, constraint oracles, and instance generators.

Canonical problem form: maximize an increasing objective over [0, b]
subject to increasing upper-bound constraints g_i(x) <= u_i and increasing
lower-bound constraints h_j(x) >= l_j. Generators produce three families:

* quadratic: x^T Q x + c^T x <= u with nonnegative Q, c;
* multiplicative: products of quadratic factors;
* transmit power: a synthetic noise-limited stepped-capacity model, cast
  to canonical form through the substitution y = 1 - p.

All built-in constraints are total on the nonnegative orthant, so they can
be probed outside [0, b] (bisection with small radial scalings needs this).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

from polyblock import serialize
from polyblock.geometry import point


# ------------------------------------------------------------------
# constraint functions
# ------------------------------------------------------------------


@dataclass(frozen=True)
class QuadraticConstraint:
    """g(x) = x^T Q x + c^T x with Q, c >= 0 (hence increasing on R^n_+)."""

    q: np.ndarray
    c: np.ndarray

    def __post_init__(self):
        q = np.asarray(self.q, dtype=np.float64)
        c = np.asarray(self.c, dtype=np.float64)
        if q.ndim != 2 or q.shape[0] != q.shape[1] or c.shape != (q.shape[0],):
            raise ValueError("quadratic constraint needs square Q and matching c")
        if np.any(q < 0) or np.any(c < 0):
            raise ValueError("quadratic constraint requires nonnegative Q and c")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "c", c)

    def __call__(self, x) -> float:
        x = np.asarray(x, dtype=np.float64)
        return float(x @ self.q @ x + self.c @ x)

    def eval_many(self, xs: np.ndarray) -> np.ndarray:
        xs = np.asarray(xs, dtype=np.float64)
        return np.einsum("mi,ij,mj->m", xs, self.q, xs) + xs @ self.c


@dataclass(frozen=True)
class MultiplicativeConstraint:
    """g(x) = prod_i (x^T Q_i x + c_i) with nonnegative parameters."""

    qs: np.ndarray  # (k, n, n)
    cs: np.ndarray  # (k,)

    def __post_init__(self):
        qs = np.asarray(self.qs, dtype=np.float64)
        cs = np.asarray(self.cs, dtype=np.float64)
        if qs.ndim != 3 or qs.shape[1] != qs.shape[2] or cs.shape != (qs.shape[0],):
            raise ValueError("multiplicative constraint needs (k,n,n) Qs and (k,) cs")
        if np.any(qs < 0) or np.any(cs < 0):
            raise ValueError("multiplicative constraint requires nonnegative parameters")
        object.__setattr__(self, "qs", qs)
        object.__setattr__(self, "cs", cs)

    def __call__(self, x) -> float:
        x = np.asarray(x, dtype=np.float64)
        factors = np.einsum("i,kij,j->k", x, self.qs, x) + self.cs
        return float(np.prod(factors))

    def eval_many(self, xs: np.ndarray) -> np.ndarray:
        xs = np.asarray(xs, dtype=np.float64)
        factors = np.einsum("mi,kij,mj->mk", xs, self.qs, xs) + self.cs
        return np.prod(factors, axis=1)


@dataclass(frozen=True)
class PathlossParams:
    """Synthetic noise-limited capacity model parameters.

    gain_i(s) = (dist(tower_i, s) + d0)^(-gamma); received rate is quantized
    to multiples of ``quantum`` bits, which makes capacity piecewise
    constant in the power vector.
    """

    gamma: float = 2.0
    d0: float = 0.01
    noise: float = 1.0
    quantum: float = 0.5


def tower_gains(towers: np.ndarray, user: np.ndarray, params: PathlossParams) -> np.ndarray:
    towers = np.asarray(towers, dtype=np.float64)
    user = np.asarray(user, dtype=np.float64)
    dist = np.sqrt(np.sum((towers - user) ** 2, axis=1))
    return (dist + params.d0) ** (-params.gamma)


def capacity(p, user, towers, params: PathlossParams = PathlossParams()) -> float:
    """Quantized noise-limited capacity, nondecreasing and piecewise constant in p."""
    p = np.asarray(p, dtype=np.float64)
    gains = tower_gains(towers, user, params)
    snr = float(p @ gains) / params.noise
    rate = np.log2(1.0 + max(snr, 0.0))
    return params.quantum * np.floor(rate / params.quantum)


def capacity_many(ps: np.ndarray, user, towers, params: PathlossParams) -> np.ndarray:
    ps = np.asarray(ps, dtype=np.float64)
    gains = tower_gains(towers, user, params)
    snr = np.maximum(ps @ gains, 0.0) / params.noise
    rate = np.log2(1.0 + snr)
    return params.quantum * np.floor(rate / params.quantum)


@dataclass(frozen=True)
class SteppedCapacityConstraint:
    """Capacity of one user as a function of the tower power vector.

    With ``negated`` set, evaluates the canonical transmit-power form
    g(y) = -capacity(1 - y, user), which is increasing in y; otherwise the
    raw capacity(p, user), increasing in p.
    """

    towers: np.ndarray  # (n, 2)
    user: np.ndarray  # (2,)
    params: PathlossParams
    negated: bool = True

    def __call__(self, x) -> float:
        x = np.asarray(x, dtype=np.float64)
        if self.negated:
            return -capacity(1.0 - x, self.user, self.towers, self.params)
        return capacity(x, self.user, self.towers, self.params)

    def eval_many(self, xs: np.ndarray) -> np.ndarray:
        xs = np.asarray(xs, dtype=np.float64)
        if self.negated:
            return -capacity_many(1.0 - xs, self.user, self.towers, self.params)
        return capacity_many(xs, self.user, self.towers, self.params)


@dataclass(frozen=True)
class LearnedConstraint:
    """Constraint backed by a trained surrogate conditioned on parameters z.

    ``model`` is any object with ``predict(x, z) -> float`` (see
    polyblock.neural); evaluation delegates to it.
    """

    model: Any
    z: np.ndarray

    def __call__(self, x) -> float:
        return float(self.model.predict(np.asarray(x, dtype=np.float64), self.z))


@dataclass(frozen=True)
class CustomConstraint:
    """Arbitrary increasing oracle."""

    fn: Callable[[np.ndarray], float]

    def __call__(self, x) -> float:
        return float(self.fn(np.asarray(x, dtype=np.float64)))


def eval_constraint(constraint, x) -> float:
    """Evaluate a constraint oracle at a point."""
    return float(constraint(np.asarray(x, dtype=np.float64)))


# ------------------------------------------------------------------
# problem container
# ------------------------------------------------------------------


@dataclass
class MonotoneProblem:
    """Objective oracle plus upper/lower constraint sets over [0, b]."""

    n: int
    objective: Callable[[np.ndarray], float]
    upper_constraints: list
    upper_thresholds: np.ndarray
    bound: np.ndarray
    lower_constraints: list = field(default_factory=list)
    lower_thresholds: np.ndarray = field(default_factory=lambda: np.zeros(0))
    objective_batch: Callable[[np.ndarray], np.ndarray] | None = None

    def __post_init__(self):
        self.upper_thresholds = np.asarray(self.upper_thresholds, dtype=np.float64)
        self.lower_thresholds = np.asarray(self.lower_thresholds, dtype=np.float64)
        self.bound = point(self.bound)
        if len(self.upper_constraints) != len(self.upper_thresholds):
            raise ValueError("upper constraint/threshold count mismatch")
        if len(self.lower_constraints) != len(self.lower_thresholds):
            raise ValueError("lower constraint/threshold count mismatch")

    @property
    def m_g(self) -> int:
        return len(self.upper_constraints)

    @property
    def m_h(self) -> int:
        return len(self.lower_constraints)

    def f(self, x) -> float:
        return float(self.objective(np.asarray(x, dtype=np.float64)))

    def f_many(self, xs: np.ndarray) -> np.ndarray:
        xs = np.asarray(xs, dtype=np.float64)
        if len(xs) == 0:
            return np.zeros(0)
        if self.objective_batch is not None:
            return np.asarray(self.objective_batch(xs), dtype=np.float64)
        return np.array([self.f(x) for x in xs])

    def upper_residual(self, x) -> float:
        """max_i (g_i(x) - u_i); <= 0 iff x is in the upper-bound set."""
        x = np.asarray(x, dtype=np.float64)
        return max(g(x) - u for g, u in zip(self.upper_constraints, self.upper_thresholds))

    def in_upper_set(self, x, tol: float = 0.0) -> bool:
        return self.upper_residual(x) <= tol

    def in_lower_set(self, x) -> bool:
        x = np.asarray(x, dtype=np.float64)
        return all(h(x) >= l for h, l in zip(self.lower_constraints, self.lower_thresholds))

    def violation(self, x) -> float:
        """Total positive part of upper-constraint residuals."""
        x = np.asarray(x, dtype=np.float64)
        return float(
            sum(
                max(g(x) - u, 0.0)
                for g, u in zip(self.upper_constraints, self.upper_thresholds)
            )
        )


# ------------------------------------------------------------------
# generated instances
# ------------------------------------------------------------------


@dataclass
class QuadraticInstance:
    n: int
    m_g: int
    seed: int
    q0: np.ndarray  # (n, n) objective
    qs: np.ndarray  # (m_g, n, n)
    cs: np.ndarray  # (m_g, n)
    thresholds: np.ndarray  # (m_g,)
    threshold_points: np.ndarray  # (m_g, n) per-constraint witnesses
    witness: np.ndarray  # (n,) componentwise min of the witnesses

    family = "quadratic"

    def constraint(self, j: int) -> QuadraticConstraint:
        return QuadraticConstraint(self.qs[j], self.cs[j])

    def z_vector(self, j: int) -> np.ndarray:
        # row-major Q then c; fixed order so one conditional model serves
        # the whole family
        return np.concatenate([self.qs[j].ravel(), self.cs[j]])

    @property
    def z_dim(self) -> int:
        return self.n * self.n + self.n


@dataclass
class MultiplicativeInstance:
    n: int
    m_g: int
    k: int
    seed: int
    q0: np.ndarray  # (n, n)
    qs: np.ndarray  # (m_g, k, n, n)
    cs: np.ndarray  # (m_g, k)
    thresholds: np.ndarray
    threshold_points: np.ndarray
    witness: np.ndarray

    family = "multiplicative"

    def constraint(self, j: int) -> MultiplicativeConstraint:
        return MultiplicativeConstraint(self.qs[j], self.cs[j])

    def z_vector(self, j: int) -> np.ndarray:
        return np.concatenate([self.qs[j].ravel(), self.cs[j]])

    @property
    def z_dim(self) -> int:
        return self.k * self.n * self.n + self.k


@dataclass
class PowerInstance:
    n: int
    m_g: int
    seed: int
    towers: np.ndarray  # (n, 2)
    users: np.ndarray  # (m_g, 2)
    params: PathlossParams
    power_witness: np.ndarray  # (n,) feasible power vector
    targets: np.ndarray  # (m_g,) capacity requirements

    family = "power"

    def constraint(self, j: int) -> SteppedCapacityConstraint:
        return SteppedCapacityConstraint(
            self.towers, self.users[j], self.params, negated=True
        )

    def z_vector(self, j: int) -> np.ndarray:
        # tower coordinates, user coordinates, then the capacity target
        return np.concatenate(
            [self.towers.ravel(), self.users[j], [self.targets[j]]]
        )

    @property
    def z_dim(self) -> int:
        return 2 * self.n + 3

    @property
    def witness(self) -> np.ndarray:
        # canonical-form witness (y = 1 - p)
        return 1.0 - self.power_witness


Instance = QuadraticInstance | MultiplicativeInstance | PowerInstance


# ------------------------------------------------------------------
# generators
# ------------------------------------------------------------------


def _quadratic_objective(q0: np.ndarray):
    def f(x: np.ndarray) -> float:
        return float(x @ q0 @ x)

    def f_batch(xs: np.ndarray) -> np.ndarray:
        return np.einsum("mi,ij,mj->m", xs, q0, xs)

    return f, f_batch


def quadratic_problem(instance: QuadraticInstance) -> MonotoneProblem:
    f, f_batch = _quadratic_objective(instance.q0)
    return MonotoneProblem(
        n=instance.n,
        objective=f,
        objective_batch=f_batch,
        upper_constraints=[instance.constraint(j) for j in range(instance.m_g)],
        upper_thresholds=instance.thresholds,
        bound=np.ones(instance.n),
    )


def generate_quadratic(n: int, m_g: int, seed: int) -> tuple[MonotoneProblem, QuadraticInstance]:
    """Indefinite quadratic programming instance with uniform [0,1] parameters.

    Thresholds come from evaluating each constraint at its own uniformly
    drawn point in [0, 0.5]^n, so that point (and hence the componentwise
    min over all of them, and the origin) is feasible.
    """
    if n < 1 or m_g < 1:
        raise ValueError("need n >= 1 and m_g >= 1")
    rng = np.random.default_rng(seed)
    q0 = rng.uniform(0.0, 1.0, size=(n, n))
    qs = rng.uniform(0.0, 1.0, size=(m_g, n, n))
    cs = rng.uniform(0.0, 1.0, size=(m_g, n))
    pts = rng.uniform(0.0, 0.5, size=(m_g, n))
    thresholds = np.array(
        [QuadraticConstraint(qs[j], cs[j])(pts[j]) for j in range(m_g)]
    )
    instance = QuadraticInstance(
        n=n,
        m_g=m_g,
        seed=seed,
        q0=q0,
        qs=qs,
        cs=cs,
        thresholds=thresholds,
        threshold_points=pts,
        witness=pts.min(axis=0),
    )
    return quadratic_problem(instance), instance


def multiplicative_problem(instance: MultiplicativeInstance) -> MonotoneProblem:
    f, f_batch = _quadratic_objective(instance.q0)
    return MonotoneProblem(
        n=instance.n,
        objective=f,
        objective_batch=f_batch,
        upper_constraints=[instance.constraint(j) for j in range(instance.m_g)],
        upper_thresholds=instance.thresholds,
        bound=np.ones(instance.n),
    )


def generate_multiplicative(
    n: int, m_g: int, k: int, seed: int
) -> tuple[MonotoneProblem, MultiplicativeInstance]:
    """Multiplicative programming instance: products of k quadratic factors."""
    if n < 1 or m_g < 1 or k < 1:
        raise ValueError("need n, m_g, k >= 1")
    rng = np.random.default_rng(seed)
    q0 = rng.uniform(0.0, 1.0, size=(n, n))
    qs = rng.uniform(0.0, 1.0, size=(m_g, k, n, n))
    cs = rng.uniform(0.0, 1.0, size=(m_g, k))
    pts = rng.uniform(0.0, 0.5, size=(m_g, n))
    thresholds = np.array(
        [MultiplicativeConstraint(qs[j], cs[j])(pts[j]) for j in range(m_g)]
    )
    instance = MultiplicativeInstance(
        n=n,
        m_g=m_g,
        k=k,
        seed=seed,
        q0=q0,
        qs=qs,
        cs=cs,
        thresholds=thresholds,
        threshold_points=pts,
        witness=pts.min(axis=0),
    )
    return multiplicative_problem(instance), instance


def to_canonical_power_problem(instance: PowerInstance) -> MonotoneProblem:
    """Cast power minimization to canonical form via y = 1 - p.

    Objective sum(y) is increasing; constraints -C(1-y, s_j) <= -c_j are
    increasing in y. A solution y* maps back to the power vector 1 - y*.
    """

    def f(y: np.ndarray) -> float:
        return float(np.sum(y))

    def f_batch(ys: np.ndarray) -> np.ndarray:
        return np.sum(ys, axis=1)

    return MonotoneProblem(
        n=instance.n,
        objective=f,
        objective_batch=f_batch,
        upper_constraints=[instance.constraint(j) for j in range(instance.m_g)],
        upper_thresholds=-instance.targets,
        bound=np.ones(instance.n),
    )


def generate_power(
    n: int,
    m_g: int,
    seed: int,
    params: PathlossParams = PathlossParams(),
) -> tuple[MonotoneProblem, PowerInstance]:
    """Transmit-power instance over the unit square.

    Capacity targets are the capacities achieved by a power vector drawn
    from [0.5, 1]^n (low draws would quantize every target to zero and make
    the instance degenerate), so that vector is feasible by construction.
    """
    if n < 1 or m_g < 1:
        raise ValueError("need n >= 1 and m_g >= 1")
    rng = np.random.default_rng(seed)
    towers = rng.uniform(0.0, 1.0, size=(n, 2))
    users = rng.uniform(0.0, 1.0, size=(m_g, 2))
    p_tilde = rng.uniform(0.5, 1.0, size=n)
    targets = np.array(
        [capacity(p_tilde, users[j], towers, params) for j in range(m_g)]
    )
    instance = PowerInstance(
        n=n,
        m_g=m_g,
        seed=seed,
        towers=towers,
        users=users,
        params=params,
        power_witness=p_tilde,
        targets=targets,
    )
    return to_canonical_power_problem(instance), instance


def make_problem(instance: Instance) -> MonotoneProblem:
    if isinstance(instance, QuadraticInstance):
        return quadratic_problem(instance)
    if isinstance(instance, MultiplicativeInstance):
        return multiplicative_problem(instance)
    if isinstance(instance, PowerInstance):
        return to_canonical_power_problem(instance)
    raise TypeError(f"unknown instance type {type(instance)!r}")


# ------------------------------------------------------------------
# training data
# ------------------------------------------------------------------


@dataclass
class ConstraintDataset:
    """Records (x, y, z) with g_z(x) = y; z is the flattened constraint parameter vector."""

    x: np.ndarray  # (m, n)
    y: np.ndarray  # (m,)
    z: np.ndarray  # (m, z_dim)

    def __len__(self) -> int:
        return len(self.x)


def sample_constraint_data(instance: Instance, count: int, seed: int) -> ConstraintDataset:
    """Sample supervised constraint evaluations from one instance.

    Inputs are uniform over [0, b]; the constraint index for each record is
    drawn uniformly. Deterministic under the seed.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    problem = make_problem(instance)
    rng = np.random.default_rng(seed)
    xs = rng.uniform(0.0, 1.0, size=(count, instance.n)) * problem.bound
    js = rng.integers(0, instance.m_g, size=count)
    ys = np.empty(count)
    zs = np.empty((count, instance.z_dim))
    constraints = [instance.constraint(j) for j in range(instance.m_g)]
    zvecs = [instance.z_vector(j) for j in range(instance.m_g)]
    for i in range(count):
        j = int(js[i])
        ys[i] = constraints[j](xs[i])
        zs[i] = zvecs[j]
    return ConstraintDataset(x=xs, y=ys, z=zs)


# ------------------------------------------------------------------
# serialization
# ------------------------------------------------------------------

_INSTANCE_FORMAT = "polyblock-instance/1"


def instance_to_document(instance: Instance) -> dict:
    doc: dict = {"format": _INSTANCE_FORMAT, "family": instance.family}
    if isinstance(instance, QuadraticInstance):
        doc.update(
            n=instance.n,
            m_g=instance.m_g,
            seed=instance.seed,
            q0=serialize.encode_array(instance.q0),
            qs=serialize.encode_array(instance.qs),
            cs=serialize.encode_array(instance.cs),
            thresholds=serialize.encode_array(instance.thresholds),
            threshold_points=serialize.encode_array(instance.threshold_points),
            witness=serialize.encode_array(instance.witness),
        )
    elif isinstance(instance, MultiplicativeInstance):
        doc.update(
            n=instance.n,
            m_g=instance.m_g,
            k=instance.k,
            seed=instance.seed,
            q0=serialize.encode_array(instance.q0),
            qs=serialize.encode_array(instance.qs),
            cs=serialize.encode_array(instance.cs),
            thresholds=serialize.encode_array(instance.thresholds),
            threshold_points=serialize.encode_array(instance.threshold_points),
            witness=serialize.encode_array(instance.witness),
        )
    elif isinstance(instance, PowerInstance):
        doc.update(
            n=instance.n,
            m_g=instance.m_g,
            seed=instance.seed,
            towers=serialize.encode_array(instance.towers),
            users=serialize.encode_array(instance.users),
            power_witness=serialize.encode_array(instance.power_witness),
            targets=serialize.encode_array(instance.targets),
            params={
                "gamma": serialize.encode_float(instance.params.gamma),
                "d0": serialize.encode_float(instance.params.d0),
                "noise": serialize.encode_float(instance.params.noise),
                "quantum": serialize.encode_float(instance.params.quantum),
            },
        )
    else:
        raise TypeError(f"cannot serialize {type(instance)!r}")
    return doc


def instance_from_document(doc: dict) -> Instance:
    if doc.get("format") != _INSTANCE_FORMAT:
        raise ValueError(f"not an instance document: {doc.get('format')!r}")
    family = doc["family"]
    if family == "quadratic":
        return QuadraticInstance(
            n=doc["n"],
            m_g=doc["m_g"],
            seed=doc["seed"],
            q0=serialize.decode_array(doc["q0"]),
            qs=serialize.decode_array(doc["qs"]),
            cs=serialize.decode_array(doc["cs"]),
            thresholds=serialize.decode_array(doc["thresholds"]),
            threshold_points=serialize.decode_array(doc["threshold_points"]),
            witness=serialize.decode_array(doc["witness"]),
        )
    if family == "multiplicative":
        return MultiplicativeInstance(
            n=doc["n"],
            m_g=doc["m_g"],
            k=doc["k"],
            seed=doc["seed"],
            q0=serialize.decode_array(doc["q0"]),
            qs=serialize.decode_array(doc["qs"]),
            cs=serialize.decode_array(doc["cs"]),
            thresholds=serialize.decode_array(doc["thresholds"]),
            threshold_points=serialize.decode_array(doc["threshold_points"]),
            witness=serialize.decode_array(doc["witness"]),
        )
    if family == "power":
        params = PathlossParams(
            gamma=serialize.decode_float(doc["params"]["gamma"]),
            d0=serialize.decode_float(doc["params"]["d0"]),
            noise=serialize.decode_float(doc["params"]["noise"]),
            quantum=serialize.decode_float(doc["params"]["quantum"]),
        )
        return PowerInstance(
            n=doc["n"],
            m_g=doc["m_g"],
            seed=doc["seed"],
            towers=serialize.decode_array(doc["towers"]),
            users=serialize.decode_array(doc["users"]),
            params=params,
            power_witness=serialize.decode_array(doc["power_witness"]),
            targets=serialize.decode_array(doc["targets"]),
        )
    raise ValueError(f"unknown family {family!r}")


def save_instance(instance: Instance, path) -> None:
    serialize.dump_document(instance_to_document(instance), path)


def load_instance(path) -> Instance:
    return instance_from_document(serialize.load_document(path))
