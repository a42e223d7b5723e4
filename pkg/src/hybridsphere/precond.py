"""Additive Schwarz and block-diagonal preconditioners for the saddle system."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .assembly import NotPositiveDefiniteError, cholesky

MU_MAX = np.pi / 3


def default_overlap(n: int) -> tuple[float, float]:
    """Default ``(nu, mu)``: four mean spacings between centres, 25% wider subdomains."""
    spacing = np.sqrt(4.0 * np.pi / n)
    nu = 4.0 * spacing
    mu = min(1.25 * nu, np.nextafter(MU_MAX, 0.0))
    return nu, mu


def select_centers(points, nu: float) -> np.ndarray:
    """Greedy sweep in point order keeping points at least ``nu`` from every kept centre.

    Returns indices into ``points``.
    """
    if not 0.0 < nu < np.pi:
        raise ValueError(f"nu must lie in (0, pi), got {nu}")
    pts = np.asarray(points, dtype=float)
    kept = np.empty((pts.shape[0], 3))
    idx = []
    for i, p in enumerate(pts):
        if idx:
            # compare angles, not cosines, so the separation check matches geodesic_distance
            dots = kept[: len(idx)] @ p
            if np.arccos(np.clip(dots.max(), -1.0, 1.0)) < nu:
                continue
        kept[len(idx)] = p
        idx.append(i)
    return np.array(idx, dtype=int)


@dataclass
class SchwarzPreconditioner:
    """One-level additive Schwarz ``sum_j R_j^T A_j^{-1} R_j`` over overlapping caps."""

    center_indices: np.ndarray
    subdomains: list[np.ndarray]
    nu: float
    mu: float
    repaired: bool = False
    factors: list = field(default_factory=list, repr=False)

    @property
    def J(self) -> int:
        return len(self.subdomains)

    def factorize(self, A: np.ndarray) -> "SchwarzPreconditioner":
        factors = []
        for j, idx in enumerate(self.subdomains):
            try:
                factors.append(cholesky(A[np.ix_(idx, idx)], what=f"subdomain block {j}"))
            except NotPositiveDefiniteError as exc:
                raise NotPositiveDefiniteError(
                    f"local block of centre {j} (point {self.center_indices[j]}): {exc}"
                ) from None
        self.factors = factors
        return self

    def apply(self, r: np.ndarray) -> np.ndarray:
        return apply_schwarz(self, r)


def build_subdomains(points, center_indices, mu: float) -> SchwarzPreconditioner:
    """Subdomain ``j`` holds the points within ``mu`` of centre ``j``.

    Points left uncovered are appended to the subdomain of their nearest centre
    and ``repaired`` is set.
    """
    if not 0.0 < mu < MU_MAX:
        raise ValueError(f"mu must lie in (0, pi/3), got {mu}")
    pts = np.asarray(points, dtype=float)
    center_indices = np.asarray(center_indices, dtype=int)
    dots = np.clip(pts @ pts[center_indices].T, -1.0, 1.0)
    member = np.arccos(dots) <= mu
    member[center_indices, np.arange(center_indices.size)] = True
    uncovered = np.flatnonzero(~member.any(axis=1))
    repaired = uncovered.size > 0
    if repaired:
        nearest = np.argmax(dots[uncovered], axis=1)
        member[uncovered, nearest] = True
    subdomains = [np.flatnonzero(member[:, j]) for j in range(center_indices.size)]
    return SchwarzPreconditioner(center_indices, subdomains, nu=float("nan"), mu=mu, repaired=repaired)


def schwarz_preconditioner(points, A: np.ndarray, nu: float | None = None, mu: float | None = None) -> SchwarzPreconditioner:
    """Centres, subdomains and local factorizations in one call."""
    d_nu, d_mu = default_overlap(np.asarray(points).shape[0])
    nu = d_nu if nu is None else nu
    mu = d_mu if mu is None else mu
    pc = build_subdomains(points, select_centers(points, nu), mu)
    pc.nu = nu
    return pc.factorize(A)


def apply_schwarz(pc: SchwarzPreconditioner, r: np.ndarray) -> np.ndarray:
    if not pc.factors:
        raise RuntimeError("Schwarz preconditioner has not been factorized")
    z = np.zeros_like(r, dtype=float)
    for idx, fac in zip(pc.subdomains, pc.factors):
        z[idx] += sla.cho_solve(fac, r[idx], check_finite=False)
    return z


class ExactPrimal:
    """Exact ``A^{-1}`` through a Cholesky factorization."""

    def __init__(self, A: np.ndarray, factor=None):
        self.factor = cholesky(A) if factor is None else factor

    def apply(self, r: np.ndarray) -> np.ndarray:
        return sla.cho_solve(self.factor, r, check_finite=False)


def exact_schur(A: np.ndarray, Q: np.ndarray, factor=None) -> np.ndarray:
    """Schur complement ``Q^T A^{-1} Q`` as ``W^T W`` with ``W = L^{-1} Q``."""
    if factor is None:
        factor = cholesky(A)
    c, lower = factor
    W = sla.solve_triangular(c, Q, lower=lower, trans=0 if lower else 1, check_finite=False)
    S = W.T @ W
    return 0.5 * (S + S.T)


class DiagonalDual:
    """Inverse of the diagonal Schur approximation: multiply by ``a_l``."""

    def __init__(self, lam: np.ndarray):
        lam = np.asarray(lam, dtype=float)
        if np.any(lam <= 0.0):
            raise ValueError("diagonal Schur approximation must be positive")
        self.diagonal = lam
        self.inverse = 1.0 / lam

    def apply(self, r: np.ndarray) -> np.ndarray:
        return self.inverse * r


class ExactDual:
    def __init__(self, S: np.ndarray):
        self.factor = cholesky(S, what="Schur complement")

    def apply(self, r: np.ndarray) -> np.ndarray:
        return sla.cho_solve(self.factor, r, check_finite=False)


class IdentityPart:
    def apply(self, r: np.ndarray) -> np.ndarray:
        return r.copy()


@dataclass
class BlockDiagPreconditioner:
    """``blockdiag(Ahat, Shat)``; ``apply`` returns ``blockdiag(Ahat, Shat)^{-1} r``."""

    primal: object
    dual: object
    N: int

    def apply(self, r: np.ndarray) -> np.ndarray:
        return apply_block(self, r)

    __call__ = apply


def apply_block(pc: BlockDiagPreconditioner, r: np.ndarray) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    r1, r2 = r[: pc.N], r[pc.N:]
    z1 = pc.primal.apply(r1)
    z2 = pc.dual.apply(r2) if r2.size else r2.copy()
    return np.concatenate((z1, z2))
