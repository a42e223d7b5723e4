"""Real orthonormal spherical harmonics on the unit sphere.

Columns of a degree-``L`` basis are ordered by degree ``l`` and, within a
degree, by ``k = 1 .. 2l+1``: ``k = 1`` is the zonal harmonic, ``k = 2j`` and
``k = 2j + 1`` are the ``cos(j phi)`` and ``sin(j phi)`` harmonics of order
``j``. No Condon-Shortley phase is applied.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

FOUR_PI = 4.0 * np.pi


def dimension(L: int) -> int:
    """Dimension of the spherical polynomials of degree at most ``L``."""
    if L < 0:
        raise ValueError("degree must be nonnegative")
    return (L + 1) ** 2


def flat_index(l: int, k: int) -> int:
    """Column of ``Y_{l,k}`` in the flat ordering (0-based)."""
    if l < 0 or not 1 <= k <= 2 * l + 1:
        raise ValueError(f"invalid harmonic index (l={l}, k={k})")
    return l * l + k - 1


def degrees(L: int) -> np.ndarray:
    """Degree ``l`` of every column of a degree-``L`` basis."""
    return np.repeat(np.arange(L + 1), 2 * np.arange(L + 1) + 1)


@dataclass(frozen=True)
class HarmonicBasis:
    L: int

    def __post_init__(self):
        if self.L < 0:
            raise ValueError("degree must be nonnegative")

    @property
    def M(self) -> int:
        return dimension(self.L)

    @property
    def degrees(self) -> np.ndarray:
        return degrees(self.L)


def _normalized_legendre(L: int, z: np.ndarray) -> np.ndarray:
    """Fully normalized associated Legendre functions ``pbar[l, m]`` at ``z``.

    ``pbar[l, m]`` includes the factor ``sqrt((2l+1)/(4 pi) (l-m)!/(l+m)!)`` so that
    ``pbar[l, 0]`` is the zonal harmonic. The normalization is carried inside
    the recurrence, which stays in range for ``l`` in the hundreds.
    """
    z = np.asarray(z, dtype=float)
    s = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
    out = np.zeros((L + 1, L + 1) + z.shape)
    out[0, 0] = 1.0 / np.sqrt(FOUR_PI)
    for m in range(1, L + 1):
        out[m, m] = np.sqrt((2.0 * m + 1.0) / (2.0 * m)) * s * out[m - 1, m - 1]
    for m in range(0, L):
        out[m + 1, m] = np.sqrt(2.0 * m + 3.0) * z * out[m, m]
        for l in range(m + 2, L + 1):
            a = np.sqrt((4.0 * l * l - 1.0) / (l * l - m * m))
            b = np.sqrt(((l - 1.0) ** 2 - m * m) / (4.0 * (l - 1.0) ** 2 - 1.0))
            out[l, m] = a * (z * out[l - 1, m] - b * out[l - 2, m])
    return out


def eval_matrix(points, L: int | HarmonicBasis, warn: bool = True) -> np.ndarray:
    """Matrix of ``Y_{l,k}(x_i)``, one row per point and ``(L+1)**2`` columns."""
    if isinstance(L, HarmonicBasis):
        L = L.L
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    n = pts.shape[0]
    M = dimension(L)
    if warn and n < M:
        warnings.warn(f"{n} points cannot give a full-rank matrix with {M} columns", stacklevel=2)
    phi = np.arctan2(pts[:, 1], pts[:, 0])
    pbar = _normalized_legendre(L, np.clip(pts[:, 2], -1.0, 1.0))
    Q = np.empty((n, M))
    root2 = np.sqrt(2.0)
    for l in range(L + 1):
        base = l * l
        Q[:, base] = pbar[l, 0]
        for j in range(1, l + 1):
            Q[:, base + 2 * j - 1] = root2 * pbar[l, j] * np.cos(j * phi)
            Q[:, base + 2 * j] = root2 * pbar[l, j] * np.sin(j * phi)
    return Q


def eval_harmonic(l: int, k: int, p) -> float:
    """Value of the single harmonic ``Y_{l,k}`` at the unit vector ``p``."""
    col = flat_index(l, k)
    return float(eval_matrix(np.reshape(p, (1, 3)), l, warn=False)[0, col])


def addition_theorem_sum(l: int, x, y) -> float:
    """``sum_k Y_{l,k}(x) Y_{l,k}(y)``, which should equal ``(2l+1)/(4 pi) P_l(x.y)``."""
    rows = eval_matrix(np.vstack((np.reshape(x, (1, 3)), np.reshape(y, (1, 3)))), l, warn=False)
    block = slice(l * l, (l + 1) ** 2)
    return float(rows[0, block] @ rows[1, block])
