"""Point sets on the unit sphere.

Point sets are plain ``(n, 3)`` float arrays of unit vectors. The helpers here
generate generalized-spiral (equal area) layouts, the capped layout used for the
interpolation experiments, and a couple of geometric measures.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

#: longitude increment constant of the generalized spiral
SPIRAL_CONSTANT = 3.6

UNIT_TOL = 1e-12
DISTINCT_TOL = 1e-10


@dataclass(frozen=True)
class CapSpec:
    """Spherical cap given by its axis and angular radius (radians)."""

    axis: tuple[float, float, float] = (0.0, 0.0, 1.0)
    radius: float = 0.1

    def __post_init__(self):
        if not 0.0 < self.radius < np.pi:
            raise ValueError(f"cap radius must lie in (0, pi), got {self.radius}")
        a = np.asarray(self.axis, dtype=float)
        if abs(np.linalg.norm(a) - 1.0) > UNIT_TOL:
            raise ValueError("cap axis must be a unit vector")

    def contains(self, points: np.ndarray) -> np.ndarray:
        """Boolean mask of points within (or on the rim of) the cap."""
        return geodesic_distance(points, np.asarray(self.axis, dtype=float)) <= self.radius


def geodesic_distance(a, b) -> np.ndarray | float:
    """Great-circle distance between unit vectors; broadcasts over leading axes."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    dot = np.clip(np.sum(a * b, axis=-1), -1.0, 1.0)
    out = np.arccos(dot)
    return float(out) if out.ndim == 0 else out


def validate_points(points) -> np.ndarray:
    """Return ``points`` as an ``(n, 3)`` array after checking the point-set invariants.

    Raises ``ValueError`` for empty input, non unit vectors or coincident points.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 3:
        raise ValueError(f"expected an (n, 3) array, got shape {pts.shape}")
    if pts.shape[0] < 1:
        raise ValueError("a point set needs at least one point")
    norms = np.linalg.norm(pts, axis=1)
    bad = np.flatnonzero(np.abs(norms - 1.0) > UNIT_TOL)
    if bad.size:
        raise ValueError(f"point {bad[0]} is not a unit vector (norm {norms[bad[0]]!r})")
    if pts.shape[0] > 1 and min_separation(pts) <= DISTINCT_TOL:
        raise ValueError("point set contains coincident points")
    return pts


def _spiral(heights: np.ndarray, n_eff: float) -> np.ndarray:
    # first and last point get longitude 0; the rest advance by 3.6/sqrt(n (1 - h^2))
    n = heights.size
    phi = np.zeros(n)
    if n > 2:
        inner = heights[1:-1]
        steps = SPIRAL_CONSTANT / np.sqrt(n_eff * (1.0 - inner * inner))
        # sequential reduction keeps bit-for-bit agreement with the recurrence
        acc = 0.0
        two_pi = 2.0 * np.pi
        for k, step in enumerate(steps, start=1):
            acc = (acc + step) % two_pi
            phi[k] = acc
    sin_theta = np.sqrt(np.clip(1.0 - heights * heights, 0.0, None))
    return np.column_stack((sin_theta * np.cos(phi), sin_theta * np.sin(phi), heights))


def generate_equal_area(n: int) -> np.ndarray:
    """Generalized spiral points on the whole sphere, ordered south to north.

    Heights are ``h_k = -1 + 2(k-1)/(n-1)`` and longitudes advance by
    ``3.6 / sqrt(n (1 - h_k^2))`` modulo ``2 pi``; the two poles get longitude 0.
    """
    n = int(n)
    if n < 2:
        raise ValueError(f"generate_equal_area needs n >= 2, got {n}")
    heights = -1.0 + 2.0 * np.arange(n) / (n - 1)
    heights[-1] = 1.0
    return _spiral(heights, n)


def generate_cap_spiral(n: int, cap: CapSpec) -> np.ndarray:
    """Spiral points restricted to a cap about the north pole.

    Heights run uniformly over ``[cos(radius), 1]``. The longitude increment uses
    the whole-sphere count with the same density, ``2 n / (1 - cos radius)``, so
    spacing along the spiral matches an equal-area layout of the cap.
    """
    n = int(n)
    if n < 0:
        raise ValueError("negative point count")
    if not np.allclose(cap.axis, (0.0, 0.0, 1.0)):
        raise NotImplementedError("only caps about the z axis are supported")
    if n == 0:
        return np.empty((0, 3))
    if n == 1:
        return np.array([[0.0, 0.0, 1.0]])
    h0 = np.cos(cap.radius)
    # the rim point must count as inside the cap after the arccos round trip
    while np.arccos(h0) > cap.radius:
        h0 = np.nextafter(h0, 2.0)
    heights = h0 + (1.0 - h0) * np.arange(n) / (n - 1)
    heights[-1] = 1.0
    n_eff = 2.0 * n / (1.0 - h0)
    return _spiral(heights, n_eff)


def generate_experiment_set(n_total: int, cap: CapSpec | None = None, n_cap: int = 1000) -> np.ndarray:
    """Whole-sphere spiral points outside ``cap`` followed by ``n_cap`` spiral points inside it.

    The whole-sphere count is increased from ``n_total - n_cap`` until enough
    points survive the cap discard; surplus survivors with the largest spiral
    index are dropped so the result has exactly ``n_total`` points.
    """
    cap = CapSpec() if cap is None else cap
    n_total, n_cap = int(n_total), int(n_cap)
    n_out = n_total - n_cap
    if n_cap < 0 or n_out < 1:
        raise ValueError(f"infeasible sizes: n_total={n_total}, n_cap={n_cap}")
    if n_out == 1:
        raise ValueError("need at least two points outside the cap")
    n_sphere = max(n_out, 2)
    while True:
        sphere = generate_equal_area(n_sphere)
        outside = sphere[~cap.contains(sphere)]
        if outside.shape[0] >= n_out:
            break
        n_sphere += n_out - outside.shape[0]
    outside = outside[:n_out]
    pts = np.vstack((outside, generate_cap_spiral(n_cap, cap)))
    return pts


def min_separation(points) -> float:
    """Smallest pairwise geodesic distance."""
    pts = np.asarray(points, dtype=float)
    n = pts.shape[0]
    if n < 2:
        raise ValueError("min_separation needs at least two points")
    # the closest pair has the largest dot product
    best = -1.0
    chunk = 1024
    for start in range(0, n - 1, chunk):
        block = pts[start:start + chunk]
        dots = block @ pts[start + 1:].T
        # mask out the diagonal and lower triangle within the block
        rows = np.arange(block.shape[0])[:, None] + start
        cols = np.arange(start + 1, n)[None, :]
        dots = np.where(cols > rows, dots, -np.inf)
        best = max(best, float(dots.max())) if dots.size else best
    return float(np.arccos(np.clip(best, -1.0, 1.0)))


def nearest_distance(points, probes) -> np.ndarray:
    """Distance from each probe to its nearest data point."""
    pts = np.asarray(points, dtype=float)
    probes = np.asarray(probes, dtype=float)
    best = np.empty(probes.shape[0])
    chunk = 2048
    for start in range(0, probes.shape[0], chunk):
        dots = probes[start:start + chunk] @ pts.T
        best[start:start + chunk] = dots.max(axis=1)
    return np.arccos(np.clip(best, -1.0, 1.0))


def mesh_norm(points, probe_density: int | None = None) -> float:
    """Estimate the mesh norm of ``points`` on a spiral probe grid.

    The value is the largest probe-to-nearest-point distance, so it never
    exceeds the true supremum. ``probe_density`` defaults to ``20 * n``.
    """
    pts = np.asarray(points, dtype=float)
    if probe_density is None:
        probe_density = 20 * pts.shape[0]
    probe_density = max(int(probe_density), 2)
    return float(nearest_distance(pts, generate_equal_area(probe_density)).max())


def write_points(path, points) -> None:
    """Write one ``x y z`` line per point with 17 significant digits."""
    pts = np.asarray(points, dtype=float)
    lines = [f"# {pts.shape[0]} points on the unit sphere"]
    lines += [" ".join(f"{v:.17e}" for v in row) for row in pts]
    Path(path).write_text("\n".join(lines) + "\n")


def read_points(path) -> np.ndarray:
    rows = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        if len(fields) != 3:
            raise ValueError(f"{path}:{lineno}: expected 3 fields, got {len(fields)}")
        rows.append([float(f) for f in fields])
    return validate_points(np.array(rows, dtype=float).reshape(-1, 3))
