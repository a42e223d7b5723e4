"""Preconditioned MINRES for symmetric, possibly indefinite, systems."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

Operator = Callable[[np.ndarray], np.ndarray]


class MinresError(RuntimeError):
    pass


class IndefinitePreconditionerError(MinresError):
    pass


@dataclass
class SolveReport:
    iterations: int = 0
    residual_history: list[float] = field(default_factory=list)
    converged: bool = False
    wall_time: float = 0.0
    message: str = ""

    @property
    def relative_residual(self) -> float:
        if not self.residual_history or self.residual_history[0] == 0.0:
            return 0.0
        return self.residual_history[-1] / self.residual_history[0]


def _identity(v):
    return v


def minres_solve(
    apply_operator: Operator,
    apply_preconditioner: Operator | None,
    b: np.ndarray,
    rtol: float = 1e-9,
    max_iter: int | None = None,
    x0: np.ndarray | None = None,
) -> tuple[np.ndarray, SolveReport]:
    """Solve ``K x = b`` with MINRES and an SPD preconditioner ``P``.

    ``apply_preconditioner`` maps ``v -> P^{-1} v``; ``None`` means no preconditioning.

    Stops when the residual measured in the ``P^{-1}`` norm has dropped by
    ``rtol`` relative to the starting residual. ``residual_history[k]`` is that
    norm after ``k`` iterations.
    """
    t0 = time.perf_counter()
    b = np.asarray(b, dtype=float)
    if not np.all(np.isfinite(b)):
        raise ValueError("right-hand side has non-finite entries")
    n = b.shape[0]
    if max_iter is None:
        max_iter = 5 * n
    precond = _identity if apply_preconditioner is None else apply_preconditioner
    eps = np.finfo(float).eps

    x = np.zeros(n) if x0 is None else np.array(x0, dtype=float)
    r1 = b - apply_operator(x) if x0 is not None else b.copy()
    y = precond(r1)
    beta1 = float(r1 @ y)
    if beta1 < 0.0:
        raise IndefinitePreconditionerError(f"preconditioner gave negative inner product {beta1:.3e}")
    report = SolveReport()
    if beta1 == 0.0:
        report.converged = True
        report.residual_history = [0.0]
        report.wall_time = time.perf_counter() - t0
        return x, report
    beta1 = np.sqrt(beta1)

    oldb = 0.0
    beta = beta1
    dbar = 0.0
    epsln = 0.0
    phibar = beta1
    cs, sn = -1.0, 0.0
    w = np.zeros(n)
    w2 = np.zeros(n)
    r2 = r1
    history = [beta1]
    target = rtol * beta1
    message = "iteration limit reached"

    itn = 0
    while itn < max_iter:
        itn += 1
        # Lanczos step: v_k = y / beta, orthogonalised against the previous two
        v = y / beta
        y = apply_operator(v)
        if itn >= 2:
            y = y - (beta / oldb) * r1
        alfa = float(v @ y)
        y = y - (alfa / beta) * r2
        r1, r2 = r2, y
        y = precond(r2)
        oldb = beta
        beta_sq = float(r2 @ y)
        if beta_sq < 0.0:
            raise IndefinitePreconditionerError(
                f"preconditioner gave negative inner product {beta_sq:.3e} at iteration {itn}"
            )
        beta = np.sqrt(beta_sq)

        # apply the previous rotation, then build the new one
        oldeps = epsln
        delta = cs * dbar + sn * alfa
        gbar = sn * dbar - cs * alfa
        epsln = sn * beta
        dbar = -cs * beta
        gamma = max(np.hypot(gbar, beta), eps)
        cs = gbar / gamma
        sn = beta / gamma
        phi = cs * phibar
        phibar = sn * phibar

        w1, w2 = w2, w
        w = (v - oldeps * w1 - delta * w2) / gamma
        x = x + phi * w
        history.append(abs(phibar))

        if abs(phibar) <= target:
            report.converged = True
            message = "converged"
            break
        if beta <= eps * beta1:
            # invariant Krylov space but residual not small: b not in the range
            message = f"Lanczos breakdown at iteration {itn} with residual {abs(phibar):.3e}"
            break

    report.iterations = itn
    report.residual_history = history
    report.message = message
    report.wall_time = time.perf_counter() - t0
    return x, report


def write_residual_log(path, report: SolveReport) -> None:
    lines = ["iteration,residual"]
    lines += [f"{k},{r:.16e}" for k, r in enumerate(report.residual_history)]
    Path(path).write_text("\n".join(lines) + "\n")
