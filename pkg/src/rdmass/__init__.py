"""Reaction-diffusion systems with mass-transport boundary conditions.

Exact polynomial fields, structural condition checks, a finite-volume
IMEX solver, Lyapunov functionals and run diagnostics.
"""

from .conditions import ConditionReport, Verdict
from .mesh import Mesh, build_interval, build_rectangle
from .model import VectorFieldModel
from .parser import ParseError, parse
from .poly import MultiPoly, linear_combination
from .solver import SolverConfig, Trajectory, integrate

__version__ = "0.1.0"

__all__ = [
    "ConditionReport", "Verdict", "Mesh", "build_interval", "build_rectangle", "VectorFieldModel",
    "ParseError", "parse", "MultiPoly", "linear_combination", "SolverConfig", "Trajectory", "integrate",
]
