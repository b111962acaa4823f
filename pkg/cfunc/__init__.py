"""
C-functions on cyclic groups: exact Jacobi sums, orbit classification,
transversality at characters and continuation counts
"""

__version__ = "1.0.0"

from .config import RunConfig
from .errors import CFunctionError
from .group_fourier import CyclicFn, DirichletChar, GroupCtx, dft, is_biunimodular, is_c_function
from .solver.tracking import SolveMethod, solve_equivariant, solve_odd_cfunctions

__all__ = [
    "CFunctionError",
    "CyclicFn",
    "DirichletChar",
    "GroupCtx",
    "RunConfig",
    "SolveMethod",
    "dft",
    "is_biunimodular",
    "is_c_function",
    "solve_equivariant",
    "solve_odd_cfunctions",
]
