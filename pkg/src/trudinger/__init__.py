"""Numerical laboratory for the doubly nonlinear equation ``u_t = Delta_p(u^{1/(p-1)})``."""

from .constants import ConstantsTable, IterationParams, caccioppoli_constants, constants_table
from .errors import (
    ConfigError,
    DomainError,
    InsufficientData,
    PreconditionError,
    SolverError,
    UnsupportedOperation,
)
from .exact import ExactSolution
from .fields import Field, RadialGrid, Trace
from .geometry import ModelManifold, Region, Shell
from .solver import SolverConfig, run, step

__version__ = "0.1.0"
