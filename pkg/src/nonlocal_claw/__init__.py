"""Finite-volume solvers for the one-dimensional nonlocal pair-interaction
conservation law.

The main entry points are re-exported here; see the submodules for details.
"""

from .kernels import Custom, KernelError, PowerLaw, custom_profile, kernel_moment
from .weights import Order, WeightTable, build_first_order, build_second_order
from .fluxes import BURGERS, FluxSpec, Numerical, numerical_flux
from .operators import BC, Discretization, Grid1D, SchemeKind, StateField, initial_average
from .stepping import CFLMode, Integrator, StepControl, run
from .diagnostics import ErrorTable, RunReport, l1_distance, total_variation

__version__ = "0.1.0"

__all__ = [
    "BC", "BURGERS", "CFLMode", "Custom", "Discretization", "ErrorTable", "FluxSpec",
    "Grid1D", "Integrator", "KernelError", "Numerical", "Order", "PowerLaw", "RunReport",
    "SchemeKind", "StateField", "StepControl", "WeightTable", "build_first_order",
    "build_second_order", "custom_profile", "initial_average", "kernel_moment",
    "l1_distance", "numerical_flux", "run", "total_variation",
]
