"""Experiment driver: build point sets and systems, solve, and compute spectra."""

from __future__ import annotations

import time
from dataclasses import dataclass, field, fields

import numpy as np

from .analysis import SpectrumReport, schur_spectrum
from .assembly import (
    HybridSolution,
    SaddleSystem,
    assemble_Lambda,
    build_system,
    cholesky,
    interpolation_residual,
    side_condition_residual,
)
from .kernels import ZonalKernel, fourier_legendre_coeffs
from .minres import SolveReport, minres_solve
from .points import CapSpec, generate_equal_area, generate_experiment_set
from .precond import (
    BlockDiagPreconditioner,
    DiagonalDual,
    ExactDual,
    ExactPrimal,
    IdentityPart,
    exact_schur,
    schwarz_preconditioner,
)

PRECONDITIONERS = ("none", "schwarz", "exact")
SCHUR_CHOICES = ("lambda", "exact")
RESIDUAL_MODES = ("absolute", "relative")


@dataclass
class ExperimentConfig:
    m: list[int] = field(default_factory=lambda: [0])
    N: list[int] = field(default_factory=lambda: [2000])
    L: list[int] = field(default_factory=lambda: [5])
    cap_radius: float = 0.1
    n_cap: int = 1000
    precond: str = "schwarz"
    schur: str = "lambda"
    rtol: float = 1e-9
    residual_mode: str = "absolute"
    max_iter: int | None = None
    nu: float | None = None
    mu: float | None = None
    field: str = "paper-f"
    output: str = "results"
    jobs: int = 1

    def validate(self) -> "ExperimentConfig":
        if self.precond == "block":
            self.precond = "schwarz"
        if self.precond not in PRECONDITIONERS:
            raise ValueError(f"precond must be one of {PRECONDITIONERS}, got {self.precond!r}")
        if self.schur not in SCHUR_CHOICES:
            raise ValueError(f"schur must be one of {SCHUR_CHOICES}, got {self.schur!r}")
        if self.residual_mode not in RESIDUAL_MODES:
            raise ValueError(f"residual_mode must be one of {RESIDUAL_MODES}")
        if any(m not in (0, 1, 2) for m in self.m):
            raise ValueError("kernel orders must be 0, 1 or 2")
        if any(L < 0 for L in self.L) or any(n < 2 for n in self.N):
            raise ValueError("need L >= 0 and N >= 2")
        if not self.rtol > 0.0:
            raise ValueError("rtol must be positive")
        CapSpec(radius=self.cap_radius)
        return self

    @classmethod
    def keys(cls) -> list[str]:
        return [f.name for f in fields(cls)]


def make_points(N: int, n_cap: int = 1000, cap_radius: float = 0.1) -> np.ndarray:
    """Capped experiment layout when ``n_cap > 0`` (and fits), else whole-sphere spiral."""
    if n_cap > 0 and N - n_cap >= 2:
        return generate_experiment_set(N, CapSpec(radius=cap_radius), n_cap)
    return generate_equal_area(N)


def make_preconditioner(
    sys: SaddleSystem,
    precond: str = "schwarz",
    schur: str = "lambda",
    nu: float | None = None,
    mu: float | None = None,
    factor=None,
):
    """Block-diagonal preconditioner for ``sys``, or ``None`` for ``precond='none'``."""
    if precond == "none":
        return None
    if precond == "schwarz":
        primal = schwarz_preconditioner(sys.points, sys.A, nu=nu, mu=mu)
    elif precond == "exact":
        factor = cholesky(sys.A) if factor is None else factor
        primal = ExactPrimal(sys.A, factor)
    else:
        raise ValueError(f"unknown preconditioner {precond!r}")
    if sys.M == 0:
        dual = IdentityPart()
    elif schur == "lambda":
        coeffs = fourier_legendre_coeffs(sys.kernel.order, sys.L)
        dual = DiagonalDual(assemble_Lambda(coeffs, sys.L))
    elif schur == "exact":
        dual = ExactDual(exact_schur(sys.A, sys.Q, factor))
    else:
        raise ValueError(f"unknown Schur approximation {schur!r}")
    return BlockDiagPreconditioner(primal, dual, sys.N)


@dataclass
class SolveResult:
    m: int
    N: int
    L: int
    precond: str
    report: SolveReport
    solution: HybridSolution
    interp_residual_inf: float
    side_condition_inf: float
    f_inf: float
    setup_time: float

    def row(self) -> dict:
        return {
            "m": self.m,
            "N": self.N,
            "L": self.L,
            "precond": self.precond,
            "iterations": self.report.iterations,
            "converged": str(self.report.converged).lower(),
            "residual": f"{self.report.residual_history[-1]:.6e}",
            "walltime_s": f"{self.report.wall_time + self.setup_time:.3f}",
            "interp_residual_inf": f"{self.interp_residual_inf:.6e}",
            "side_condition_inf": f"{self.side_condition_inf:.6e}",
        }


def solve_system(
    sys: SaddleSystem,
    precond: str = "schwarz",
    schur: str = "lambda",
    rtol: float = 1e-9,
    residual_mode: str = "absolute",
    max_iter: int | None = None,
    nu: float | None = None,
    mu: float | None = None,
) -> SolveResult:
    """Run preconditioned MINRES on an assembled system.

    With ``residual_mode='absolute'`` the iteration stops once the residual
    (in the preconditioner norm) is below ``rtol`` itself; ``'relative'``
    measures it against the initial residual.
    """
    t0 = time.perf_counter()
    pc = make_preconditioner(sys, precond, schur, nu, mu)
    setup = time.perf_counter() - t0
    b = sys.rhs
    tol = rtol
    if residual_mode == "absolute":
        # translate into the relative target minres_solve expects
        beta1 = np.sqrt(float(b @ (pc(b) if pc is not None else b)))
        tol = rtol / beta1 if beta1 > 0.0 else rtol
    if max_iter is None:
        max_iter = 5 * (sys.N + sys.M)
    x, report = minres_solve(sys.apply, pc, b, rtol=tol, max_iter=max_iter)
    sol = HybridSolution.from_vector(x, sys.N)
    label = precond if precond == "none" else f"{precond}+{schur}"
    return SolveResult(
        m=sys.kernel.order if sys.kernel else -1,
        N=sys.N,
        L=-1 if sys.L is None else sys.L,
        precond=label,
        report=report,
        solution=sol,
        interp_residual_inf=interpolation_residual(sys, sol),
        side_condition_inf=side_condition_residual(sys, sol),
        f_inf=float(np.max(np.abs(sys.f_values))),
        setup_time=setup,
    )


def solve_case(m: int, N: int, L: int, config: ExperimentConfig | None = None, points=None) -> SolveResult:
    config = ExperimentConfig() if config is None else config
    pts = make_points(N, config.n_cap, config.cap_radius) if points is None else points
    sys = build_system(pts, ZonalKernel(m), L, config.field)
    return solve_system(
        sys,
        precond=config.precond,
        schur=config.schur,
        rtol=config.rtol,
        residual_mode=config.residual_mode,
        max_iter=config.max_iter,
        nu=config.nu,
        mu=config.mu,
    )


def spectrum_case(points, m: int, L: int, factor=None, A=None) -> SpectrumReport:
    """Generalized eigenvalues of ``(Q^T A^{-1} Q, Lambda_L)`` for one point set."""
    from .assembly import assemble_A
    from .harmonics import eval_matrix

    kernel = ZonalKernel(m)
    if A is None:
        A = assemble_A(points, kernel)
    if factor is None:
        factor = cholesky(A)
    Q = eval_matrix(points, L)
    S = exact_schur(A, Q, factor)
    lam = assemble_Lambda(fourier_legendre_coeffs(m, L), L)
    return schur_spectrum(S, lam)
