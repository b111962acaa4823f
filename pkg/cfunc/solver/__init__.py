"""
Continuation solver for the fiber of Phi, support checks and the biunimodular search
"""

from .fiber import FiberProblem, PhiSystem, StartPair, start_fiber, start_fiber_problem
from .tracking import SolveMethod, solve_equivariant, solve_odd_cfunctions, track, track_total_degree

__all__ = [
    "FiberProblem",
    "PhiSystem",
    "SolveMethod",
    "StartPair",
    "solve_equivariant",
    "solve_odd_cfunctions",
    "start_fiber",
    "start_fiber_problem",
    "track",
    "track_total_degree",
]
