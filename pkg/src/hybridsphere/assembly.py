"""Assembly of the hybrid kernel / spherical-polynomial interpolation system."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .harmonics import HarmonicBasis, degrees, eval_matrix
from .kernels import CoefficientTable, ZonalKernel, kernel_value
from .points import validate_points


class NotPositiveDefiniteError(np.linalg.LinAlgError):
    pass


def assemble_A(points, kernel: ZonalKernel, block: int = 1024) -> np.ndarray:
    """Kernel matrix ``A_ij = Phi(x_i . x_j)``; exactly symmetric, diagonal ``psi_m(0)``."""
    pts = validate_points(points)
    n = pts.shape[0]
    A = np.empty((n, n))
    for start in range(0, n, block):
        stop = min(start + block, n)
        A[start:stop] = kernel_value(kernel, pts[start:stop] @ pts.T)
    A += A.T
    A *= 0.5
    np.fill_diagonal(A, kernel.peak)
    return A


def cholesky(A: np.ndarray, what: str = "kernel matrix"):
    """``scipy.linalg.cho_factor`` with a readable error on failure."""
    try:
        return sla.cho_factor(A, lower=True, check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefiniteError(
            f"{what} of size {A.shape[0]} is not numerically positive definite ({exc})"
        ) from None


def assemble_Lambda(coeffs: CoefficientTable, L: int) -> np.ndarray:
    """Diagonal of the Schur approximation: ``1 / a_l`` repeated ``2l + 1`` times."""
    if L < 0:
        raise ValueError("degree must be nonnegative")
    if coeffs.l_max < L:
        raise ValueError(f"coefficients only known up to degree {coeffs.l_max}, need {L}")
    return 1.0 / np.asarray(coeffs.a)[degrees(L)]


def exp_bump_field(points) -> np.ndarray:
    """Smooth exponential plus a bump supported in the Euclidean 0.1-ball about the north pole."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    x, y, z = pts[:, 0], pts[:, 1], pts[:, 2]
    bump = np.clip(0.01 - x * x - y * y - (z - 1.0) ** 2, 0.0, None)
    return np.exp(x + y + z) + bump**2


FIELDS = {"paper-f": exp_bump_field}


def assemble_rhs(points, f, M: int) -> np.ndarray:
    """Stack ``f`` at the points over ``M`` zeros.

    ``f`` is a named field from ``FIELDS`` or a callable taking an ``(n, 3)`` array.
    """
    if isinstance(f, str):
        f = FIELDS[f]
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    values = np.asarray(f(pts), dtype=float).reshape(-1)
    if values.shape[0] != pts.shape[0]:
        raise ValueError("field must return one value per point")
    if not np.all(np.isfinite(values)):
        raise ValueError("field values must be finite")
    return np.concatenate((values, np.zeros(M)))


@dataclass
class SaddleSystem:
    """Blocks ``[[A, Q], [Q^T, 0]]`` and right-hand side ``(f_X, 0)``."""

    A: np.ndarray
    Q: np.ndarray
    rhs: np.ndarray
    kernel: ZonalKernel | None = None
    points: np.ndarray | None = None
    L: int | None = None

    @property
    def N(self) -> int:
        return self.A.shape[0]

    @property
    def M(self) -> int:
        return self.Q.shape[1]

    @property
    def f_values(self) -> np.ndarray:
        return self.rhs[: self.N]

    def apply(self, v: np.ndarray) -> np.ndarray:
        return apply_saddle(self, v)

    def dense(self) -> np.ndarray:
        """The full ``(N+M)`` square matrix; for small systems and checks only."""
        N, M = self.N, self.M
        K = np.zeros((N + M, N + M))
        K[:N, :N] = self.A
        K[:N, N:] = self.Q
        K[N:, :N] = self.Q.T
        return K

    def split(self, v: np.ndarray):
        return v[: self.N], v[self.N:]


def build_system(points, kernel: ZonalKernel, L: int | None, f="paper-f") -> SaddleSystem:
    """Assemble the interpolation system; ``L=None`` drops the polynomial block."""
    pts = validate_points(points)
    A = assemble_A(pts, kernel)
    if L is None:
        Q = np.zeros((pts.shape[0], 0))
    else:
        Q = eval_matrix(pts, HarmonicBasis(L))
    rhs = assemble_rhs(pts, f, Q.shape[1])
    return SaddleSystem(A=A, Q=Q, rhs=rhs, kernel=kernel, points=pts, L=L)


def apply_saddle(sys: SaddleSystem, v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.shape != (sys.N + sys.M,):
        raise ValueError(f"expected a vector of length {sys.N + sys.M}, got shape {v.shape}")
    v1, v2 = sys.split(v)
    return np.concatenate((sys.A @ v1 + sys.Q @ v2, sys.Q.T @ v1))


def native_norm(alpha, A: np.ndarray) -> float:
    """Native-space norm ``sqrt(alpha^T A alpha)`` of a kernel expansion."""
    alpha = np.asarray(alpha, dtype=float)
    return float(np.sqrt(max(float(alpha @ (A @ alpha)), 0.0)))


@dataclass
class HybridSolution:
    alpha: np.ndarray
    beta: np.ndarray

    @classmethod
    def from_vector(cls, x: np.ndarray, N: int) -> "HybridSolution":
        return cls(alpha=np.array(x[:N]), beta=np.array(x[N:]))


def evaluate_interpolant(sol: HybridSolution, points, kernel: ZonalKernel, L: int | HarmonicBasis, query) -> np.ndarray | float:
    """Kernel part plus polynomial part at one query point or an ``(q, 3)`` array."""
    if isinstance(L, HarmonicBasis):
        L = L.L
    q = np.asarray(query, dtype=float)
    single = q.ndim == 1
    q = np.atleast_2d(q)
    pts = np.asarray(points, dtype=float)
    u = kernel_value(kernel, q @ pts.T) @ sol.alpha
    if sol.beta.size:
        p = eval_matrix(q, L, warn=False) @ sol.beta
    else:
        p = np.zeros(q.shape[0])
    out = u + p
    return float(out[0]) if single else out


def interpolation_residual(sys: SaddleSystem, sol: HybridSolution) -> float:
    """``max_i |u + p - f|`` over the data points."""
    fitted = sys.A @ sol.alpha + sys.Q @ sol.beta
    return float(np.max(np.abs(fitted - sys.f_values)))


def side_condition_residual(sys: SaddleSystem, sol: HybridSolution) -> float:
    """``max |Q^T alpha|``; zero when the kernel part is orthogonal to the polynomials."""
    if sys.M == 0:
        return 0.0
    return float(np.max(np.abs(sys.Q.T @ sol.alpha)))
