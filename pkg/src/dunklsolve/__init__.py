"""Dirichlet problems for the Dunkl Laplacian on domains away from the reflection hyperplanes."""

from .root_system import RootSystem, builtin, HyperplaneError
from .dunkl_core import (
    ScalarField,
    FieldDomainError,
    apply_dunkl_laplacian,
    apply_N,
    conjugation_residual,
)
from .geometry import (
    Box,
    Ball,
    Mask,
    GridDomain,
    AdmissibilityError,
    EmptyInteriorError,
    discretize,
    check_admissible,
    reflected_images,
)
from .elliptic_solver import (
    DiscreteOperator,
    SolutionField,
    SolverError,
    assemble,
    solve_schrodinger,
    green_apply,
    harmonic_measure_row,
)
from .dirichlet import (
    DunklSolution,
    HarmonicMeasure,
    boundary_data,
    solve_reduction,
    solve_direct,
    classical_solve,
    oracle_1d,
    harmonic_measure,
    weak_residual,
    bump,
    smoothness_probe,
)
from .expr import Expression, ExprError, ExprSyntaxError, ExprEvalError, parse

__version__ = "0.1.0"
