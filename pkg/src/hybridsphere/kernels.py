"""Wendland kernels restricted to the sphere and their Legendre coefficients."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

WENDLAND_ORDERS = (0, 1, 2)


class QuadratureError(RuntimeError):
    pass


def wendland_psi(m: int, r):
    """Wendland function ``psi_m`` of the Euclidean distance ``r`` (support ``[0, 1]``)."""
    r = np.asarray(r, dtype=float)
    one_minus = np.clip(1.0 - r, 0.0, None)
    if m == 0:
        out = one_minus**2
    elif m == 1:
        out = one_minus**4 * (4.0 * r + 1.0)
    elif m == 2:
        out = one_minus**6 * (35.0 * r * r + 18.0 * r + 3.0)
    else:
        raise ValueError(f"Wendland order must be 0, 1 or 2, got {m}")
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class ZonalKernel:
    """Zonal kernel ``Phi(t) = psi_m(sqrt(2 - 2 t))`` on the unit sphere.

    ``decay_exponent`` is the algebraic decay rate of the Legendre coefficients,
    ``a_l ~ (l + 1) ** -decay_exponent``; it is informational only.
    """

    order: int
    decay_exponent: float = field(init=False)

    def __post_init__(self):
        if self.order not in WENDLAND_ORDERS:
            raise ValueError(f"Wendland order must be 0, 1 or 2, got {self.order}")
        object.__setattr__(self, "decay_exponent", 2.0 * self.order + 3.0)

    @property
    def peak(self) -> float:
        """``Phi(1) = psi_m(0)``, the diagonal of every interpolation matrix."""
        return wendland_psi(self.order, 0.0)

    def __call__(self, t):
        return kernel_value(self, t)


def kernel_value(kernel: ZonalKernel, t):
    """Evaluate ``Phi(t)``; exactly zero for ``t <= 1/2``."""
    t = np.asarray(t, dtype=float)
    r = np.sqrt(np.clip(2.0 - 2.0 * t, 0.0, None))
    out = np.where(t > 0.5, wendland_psi(kernel.order, r), 0.0)
    return float(out) if out.ndim == 0 else out


def legendre_P(l: int, t):
    """Legendre polynomial ``P_l(t)`` by the three-term recurrence (``P_l(1) = 1``)."""
    if l < 0:
        raise ValueError("degree must be nonnegative")
    t = np.asarray(t, dtype=float)
    p_prev = np.ones_like(t)
    if l == 0:
        return float(p_prev) if t.ndim == 0 else p_prev
    p = t.copy()
    for k in range(1, l):
        p_prev, p = p, ((2 * k + 1) * t * p - k * p_prev) / (k + 1)
    return float(p) if t.ndim == 0 else p


def legendre_table(l_max: int, t) -> np.ndarray:
    """All ``P_0 .. P_{l_max}`` at ``t``; shape ``(l_max + 1,) + t.shape``."""
    t = np.asarray(t)
    if t.dtype.kind != "f":
        t = t.astype(float)
    out = np.empty((l_max + 1,) + t.shape, dtype=t.dtype)
    out[0] = 1.0
    if l_max >= 1:
        out[1] = t
    for k in range(1, l_max):
        out[k + 1] = ((2 * k + 1) * t * out[k] - k * out[k - 1]) / (k + 1)
    return out


def gauss_legendre(n: int, tol: float = 1e-15, max_iter: int = 100, dtype=np.float64):
    """Gauss-Legendre nodes and weights on ``[-1, 1]`` by Newton's method.

    Nodes are returned in ascending order. Pass ``dtype=np.longdouble`` for
    extended-precision nodes.
    """
    if n < 1:
        raise ValueError("need at least one node")
    k = np.arange(1, n + 1, dtype=dtype)
    pi = np.arccos(dtype(-1))
    # Tricomi-type initial guess, accurate to O(n^-4)
    x = np.cos(pi * (k - dtype(0.25)) / (n + dtype(0.5))) * (1 - (n - dtype(1)) / (8 * dtype(n) ** 3))
    for _ in range(max_iter):
        p0 = np.ones_like(x)
        p1 = x.copy()
        for j in range(1, n):
            p0, p1 = p1, ((2 * j + 1) * x * p1 - j * p0) / (j + 1)
        # p1 = P_n(x), p0 = P_{n-1}(x)
        dp = n * (x * p1 - p0) / (x * x - 1.0)
        dx = p1 / dp
        x = x - dx
        if np.max(np.abs(dx)) <= tol:
            break
    else:
        raise QuadratureError(f"Gauss-Legendre Newton iteration did not converge for n={n}")
    p0 = np.ones_like(x)
    p1 = x.copy()
    for j in range(1, n):
        p0, p1 = p1, ((2 * j + 1) * x * p1 - j * p0) / (j + 1)
    dp = n * (x * p1 - p0) / (x * x - 1.0)
    w = 2 / ((1 - x * x) * dp * dp)
    return x[::-1].copy(), w[::-1].copy()


@dataclass(frozen=True)
class CoefficientTable:
    """Fourier-Legendre coefficients ``a_0 .. a_{l_max}`` of a zonal kernel."""

    order: int
    a: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        if a.ndim != 1 or a.size == 0:
            raise ValueError("coefficient table must be a nonempty 1-d array")
        if not np.all(np.isfinite(a)) or np.any(a <= 0.0):
            raise ValueError("coefficients must be finite and positive")
        a.setflags(write=False)
        object.__setattr__(self, "a", a)

    @property
    def l_max(self) -> int:
        return self.a.size - 1

    def __getitem__(self, l):
        return self.a[l]

    def __len__(self):
        return self.a.size


def default_nodes(l_max: int) -> int:
    return max(256, 2 * l_max + 64)


def fourier_legendre_coeffs(m: int, l_max: int, n_nodes: int | None = None) -> CoefficientTable:
    """Compute ``a_l = 2 pi int_{-1}^{1} Phi(t) P_l(t) dt`` for ``l = 0 .. l_max``.

    ``Phi`` vanishes for ``t <= 1/2``, so only ``[1/2, 1]`` contributes. There
    the substitution ``t = 1 - r**2 / 2`` turns the integrand into the
    polynomial ``psi_m(r) P_l(1 - r**2/2) r`` on ``[0, 1]``, which Gauss-Legendre
    integrates exactly once ``n_nodes >= l + 6``. The sum is carried out in
    extended precision because high-degree coefficients are small differences
    of O(1) terms.
    """
    if m not in WENDLAND_ORDERS:
        raise ValueError(f"Wendland order must be 0, 1 or 2, got {m}")
    if l_max < 0:
        raise ValueError("l_max must be nonnegative")
    if n_nodes is None:
        n_nodes = default_nodes(l_max)
    if n_nodes < 2 * l_max + 32:
        raise ValueError(f"n_nodes={n_nodes} too small for l_max={l_max} (need >= {2 * l_max + 32})")
    ld = np.longdouble
    x, w = gauss_legendre(n_nodes, dtype=ld)
    r = (x + 1) / 2
    one_minus = 1 - r
    psi = {
        0: one_minus**2,
        1: one_minus**4 * (4 * r + 1),
        2: one_minus**6 * (35 * r * r + 18 * r + 3),
    }[m]
    weights = w / 2 * psi * r
    P = legendre_table(l_max, 1 - r * r / 2)
    a = (2 * np.arccos(ld(-1)) * (P @ weights)).astype(np.float64)
    bad = np.flatnonzero(~np.isfinite(a) | (a <= 0.0))
    if bad.size:
        l = int(bad[0])
        raise QuadratureError(
            f"quadrature failure for m={m}: a_{l} = {a[l]!r} with {n_nodes} nodes "
            "(coefficient below round-off or non-finite)"
        )
    return CoefficientTable(m, a)


def format_coeffs(table: CoefficientTable, figure_column: bool | None = None) -> str:
    """CSV text ``l,a_l``; adds ``(l+1)^5*a_l`` for order 1 unless told otherwise."""
    if figure_column is None:
        figure_column = table.order == 1
    header = "l,a_l" + (",(l+1)^5*a_l" if figure_column else "")
    lines = [header]
    for l, a in enumerate(table.a):
        row = f"{l},{a:.16e}"
        if figure_column:
            row += f",{(l + 1) ** 5 * a:.16e}"
        lines.append(row)
    return "\n".join(lines) + "\n"


def write_coeffs(path, table: CoefficientTable, figure_column: bool | None = None) -> None:
    Path(path).write_text(format_coeffs(table, figure_column))


def read_coeffs(path, order: int) -> CoefficientTable:
    lines = Path(path).read_text().splitlines()
    if not lines or not lines[0].startswith("l,a_l"):
        raise ValueError(f"{path}: missing 'l,a_l' header")
    values = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        fields = line.split(",")
        if int(fields[0]) != len(values):
            raise ValueError(f"{path}:{lineno}: degrees must be consecutive from 0")
        values.append(float(fields[1]))
    return CoefficientTable(order, np.array(values))
