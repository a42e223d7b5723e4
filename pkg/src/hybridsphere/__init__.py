"""Hybrid kernel / spherical-polynomial interpolation on the unit sphere.

The interpolant is a Wendland-kernel expansion plus a spherical polynomial of
degree at most ``L``. Its coefficients solve a symmetric saddle-point system,
which is solved by MINRES with a block-diagonal preconditioner (additive
Schwarz for the kernel block, a diagonal Fourier-Legendre matrix for the
polynomial block).
"""

from .analysis import SpectrumReport, exact_precond_spectrum, infsup_estimate, jacobi_eigenvalues, schur_spectrum
from .assembly import (
    HybridSolution,
    SaddleSystem,
    apply_saddle,
    assemble_A,
    assemble_Lambda,
    assemble_rhs,
    build_system,
    evaluate_interpolant,
    native_norm,
    exp_bump_field,
)
from .harmonics import HarmonicBasis, addition_theorem_sum, dimension, eval_harmonic, eval_matrix
from .kernels import CoefficientTable, ZonalKernel, fourier_legendre_coeffs, kernel_value, legendre_P, wendland_psi
from .minres import SolveReport, minres_solve
from .points import (
    CapSpec,
    generate_equal_area,
    generate_experiment_set,
    geodesic_distance,
    mesh_norm,
    min_separation,
)
from .precond import (
    BlockDiagPreconditioner,
    SchwarzPreconditioner,
    apply_block,
    apply_schwarz,
    build_subdomains,
    exact_schur,
    schwarz_preconditioner,
    select_centers,
)

__version__ = "0.1.0"

__all__ = [
    "BlockDiagPreconditioner",
    "CapSpec",
    "CoefficientTable",
    "HarmonicBasis",
    "HybridSolution",
    "SaddleSystem",
    "SchwarzPreconditioner",
    "SolveReport",
    "SpectrumReport",
    "ZonalKernel",
    "addition_theorem_sum",
    "apply_block",
    "apply_saddle",
    "apply_schwarz",
    "assemble_A",
    "assemble_Lambda",
    "assemble_rhs",
    "build_subdomains",
    "build_system",
    "dimension",
    "eval_harmonic",
    "eval_matrix",
    "evaluate_interpolant",
    "exact_precond_spectrum",
    "exact_schur",
    "exp_bump_field",
    "fourier_legendre_coeffs",
    "generate_equal_area",
    "generate_experiment_set",
    "geodesic_distance",
    "infsup_estimate",
    "jacobi_eigenvalues",
    "kernel_value",
    "legendre_P",
    "mesh_norm",
    "min_separation",
    "minres_solve",
    "native_norm",
    "schur_spectrum",
    "schwarz_preconditioner",
    "select_centers",
    "wendland_psi",
]
