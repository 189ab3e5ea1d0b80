"""Exact optimizers for the restricted problems and a brute-force LP oracle."""
from .mincostflow import (
    ArcBounds,
    LpSolution,
    min_cost_flow_bounded,
    restricted_bounds,
    restricted_min_cost_ssuf,
)
from .oracle import lp_oracle_enumerate
from .ringlp import (
    ring_linear_program,
    ring_linear_program_by_evaluation,
    ring_restricted_min_cost,
    ssuf_linear_program,
)
from .simplex import LinearProgram, solve_lp

__all__ = [
    "ArcBounds",
    "LinearProgram",
    "LpSolution",
    "lp_oracle_enumerate",
    "min_cost_flow_bounded",
    "restricted_bounds",
    "restricted_min_cost_ssuf",
    "ring_linear_program",
    "ring_linear_program_by_evaluation",
    "ring_restricted_min_cost",
    "ssuf_linear_program",
    "solve_lp",
]
