"""Spectral checks: Schur complement against its diagonal approximation,
and the spectrum of the exactly preconditioned saddle matrix."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
from numba import njit

from .assembly import SaddleSystem, cholesky
from .precond import exact_schur


class JacobiConvergenceError(RuntimeError):
    pass


@njit(cache=True)
def _cyclic_sweep(A):
    """One row-cyclic Jacobi sweep in place over all pairs ``p < q``."""
    n = A.shape[0]
    for p in range(n - 1):
        for q in range(p + 1, n):
            apq = A[p, q]
            if apq == 0.0:
                continue
            app = A[p, p]
            aqq = A[q, q]
            theta = (aqq - app) / (2.0 * apq)
            if abs(theta) > 1e150:
                t = 0.5 / theta
            elif theta >= 0.0:
                t = 1.0 / (theta + np.sqrt(theta * theta + 1.0))
            else:
                t = -1.0 / (-theta + np.sqrt(theta * theta + 1.0))
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c
            for i in range(n):
                if i != p and i != q:
                    aip = A[p, i]
                    aiq = A[q, i]
                    A[p, i] = c * aip - s * aiq
                    A[i, p] = A[p, i]
                    A[q, i] = s * aip + c * aiq
                    A[i, q] = A[q, i]
            A[p, p] = app - t * apq
            A[q, q] = aqq + t * apq
            A[p, q] = 0.0
            A[q, p] = 0.0


@njit(cache=True)
def _off_norm(A):
    n = A.shape[0]
    total = 0.0
    for i in range(n):
        for j in range(n):
            if i != j:
                total += A[i, j] * A[i, j]
    return np.sqrt(total)


def jacobi_eigenvalues(S: np.ndarray, tol: float = 1e-12, max_sweeps: int = 60) -> np.ndarray:
    """Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.

    Sweeps visit the pairs ``p < q`` row by row until the off-diagonal
    Frobenius norm is at most ``tol * ||S||_F``.
    """
    S = np.asarray(S, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise ValueError("expected a square matrix")
    n = S.shape[0]
    if n == 0:
        return np.empty(0)
    A = np.ascontiguousarray(0.5 * (S + S.T))
    threshold = tol * np.linalg.norm(A)
    for _ in range(max_sweeps):
        if _off_norm(A) <= threshold:
            break
        _cyclic_sweep(A)
    else:
        if _off_norm(A) > threshold:
            raise JacobiConvergenceError(
                f"Jacobi did not converge in {max_sweeps} sweeps (off-diagonal norm {_off_norm(A):.3e})"
            )
    return np.sort(A.diagonal().copy())


@dataclass
class SpectrumReport:
    eigenvalues: np.ndarray

    @property
    def lambda_min(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def lambda_max(self) -> float:
        return float(self.eigenvalues[-1])

    @property
    def infsup_estimate(self) -> float:
        return infsup_estimate(self)


def schur_spectrum(S: np.ndarray, lam: np.ndarray) -> SpectrumReport:
    """Generalized eigenvalues of ``(S, diag(lam))`` via ``D^{-1/2} S D^{-1/2}``."""
    lam = np.asarray(lam, dtype=float)
    if np.any(lam <= 0.0):
        raise ValueError("diagonal must be positive")
    scale = 1.0 / np.sqrt(lam)
    T = S * scale[:, None] * scale[None, :]
    return SpectrumReport(jacobi_eigenvalues(T))


def infsup_estimate(report: SpectrumReport) -> float:
    """``sqrt(lambda_min)``: for this point set and degree the inf-sup constant is at least this large."""
    return float(np.sqrt(max(report.lambda_min, 0.0)))


def cluster(values: np.ndarray, gap: float = 1e-6) -> list[tuple[float, int]]:
    """Group sorted values whose neighbours differ by at most ``gap``; returns ``(mean, count)``."""
    values = np.sort(np.asarray(values, dtype=float))
    if values.size == 0:
        return []
    breaks = np.flatnonzero(np.diff(values) > gap) + 1
    return [(float(g.mean()), int(g.size)) for g in np.split(values, breaks)]


def exact_precond_spectrum(sys: SaddleSystem, gap: float = 1e-6) -> list[tuple[float, int]]:
    """Eigenvalue clusters of the saddle matrix preconditioned by ``blockdiag(A, S)``.

    Works with the symmetric form ``C^{-1} K C^{-T}``, ``C = blockdiag(L_A, L_S)``
    built from Cholesky factors, which is similar to ``P^{-1} K``.
    """
    N, M = sys.N, sys.M
    factor = cholesky(sys.A)
    H = np.zeros((N + M, N + M))
    H[:N, :N] = np.eye(N)
    if M:
        S = exact_schur(sys.A, sys.Q, factor)
        LS = np.linalg.cholesky(S)
        W = sla.solve_triangular(factor[0], sys.Q, lower=True, check_finite=False)
        B = sla.solve_triangular(LS, W.T, lower=True, check_finite=False).T
        H[:N, N:] = B
        H[N:, :N] = B.T
    return cluster(jacobi_eigenvalues(H), gap)
