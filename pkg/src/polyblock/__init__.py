"""Monotone global optimization with polyblock outer approximation.

The solver consumes a single projection primitive (point -> monotone
projection onto the upper-bound feasible set) and is agnostic to how that
primitive is computed: exact bisection, closed-form radial inverses,
numeric radial inverses, or learned radial-inverse surrogates.
"""

from polyblock.geometry import Box, VertexSet, dominates, prune_dominated, strictly_dominates
from polyblock.poa import PoaConfig, PoaResult, solve
from polyblock.problem import (
    MonotoneProblem,
    generate_multiplicative,
    generate_power,
    generate_quadratic,
)
from polyblock.projection import (
    BisectionOracle,
    ClosedFormRadialInverseOracle,
    LearnedRadialInverseOracle,
    NumericRadialInverseOracle,
    bisection_project,
    numeric_radial_inverse,
    project_via_radial_inverses,
    quad_radial_inverse,
)

__all__ = [
    "Box",
    "VertexSet",
    "dominates",
    "strictly_dominates",
    "prune_dominated",
    "MonotoneProblem",
    "generate_quadratic",
    "generate_multiplicative",
    "generate_power",
    "PoaConfig",
    "PoaResult",
    "solve",
    "bisection_project",
    "quad_radial_inverse",
    "numeric_radial_inverse",
    "project_via_radial_inverses",
    "BisectionOracle",
    "ClosedFormRadialInverseOracle",
    "NumericRadialInverseOracle",
    "LearnedRadialInverseOracle",
]

__version__ = "0.1.0"
