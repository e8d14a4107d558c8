"""Domains, ray/exterior helpers and the point-cloud generators.

Points are always stored as float arrays of shape (n, d), also in 1D.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .kernel import pairwise_distances

DEDUP_TOL = 1e-12


def _as_points(x, dim: int) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if dim == 1 and arr.ndim <= 1:
        arr = arr.reshape(-1, 1)
    arr = np.atleast_2d(arr)
    if arr.shape[1] != dim:
        raise ValueError(f"expected points of dimension {dim}, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("point coordinates must be finite")
    return arr


def _unit_dirs(theta: np.ndarray) -> np.ndarray:
    return np.stack([np.cos(theta), np.sin(theta)], axis=-1)


# --------------------------------------------------------------------------- #
# Domains
# --------------------------------------------------------------------------- #

class Domain:
    """Open bounded region. Subclasses give membership and ray-exit geometry.

    The exterior is described as ``outside(outer) U holes`` where ``outer`` is a
    convex domain (the domain itself unless it has holes) and ``holes`` is a
    list of closed disks inside it.
    """

    dim: int

    @property
    def outer(self) -> "Domain":
        return self

    @property
    def holes(self) -> list["Disk"]:
        return []

    def contains(self, x) -> np.ndarray:
        raise NotImplementedError

    def distance_to_boundary(self, x) -> np.ndarray:
        raise NotImplementedError

    def exit_radius(self, x, dirs) -> np.ndarray:
        """Distance from interior point ``x`` along unit ``dirs`` to the first exit."""
        raise NotImplementedError

    def on_boundary(self, x, tol: float = 1e-12) -> np.ndarray:
        return self.distance_to_boundary(x) <= tol

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    def translated(self, shift) -> "Domain":
        raise NotImplementedError


@dataclass(frozen=True)
class Interval(Domain):
    a: float
    b: float
    dim: int = field(default=1, init=False)

    def __post_init__(self):
        if not self.a < self.b:
            raise ValueError("Interval requires a < b")

    def contains(self, x):
        p = _as_points(x, 1)[:, 0]
        return (p > self.a) & (p < self.b)

    def distance_to_boundary(self, x):
        p = _as_points(x, 1)[:, 0]
        return np.minimum(np.abs(p - self.a), np.abs(p - self.b))

    def exit_radius(self, x, dirs):
        x0 = float(np.ravel(x)[0])
        dirs = np.ravel(np.asarray(dirs, dtype=float))
        return np.where(dirs > 0, self.b - x0, x0 - self.a)

    def bounding_box(self):
        return np.array([self.a]), np.array([self.b])

    def translated(self, shift):
        s = float(np.ravel(shift)[0])
        return Interval(self.a + s, self.b + s)


@dataclass(frozen=True)
class Disk(Domain):
    center: tuple = (0.0, 0.0)
    radius: float = 1.0
    dim: int = field(default=2, init=False)

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("Disk requires radius > 0")
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))

    def _rel(self, x):
        return _as_points(x, 2) - np.asarray(self.center)

    def contains(self, x):
        p = self._rel(x)
        return np.einsum("ij,ij->i", p, p) < self.radius ** 2

    def distance_to_boundary(self, x):
        return np.abs(np.linalg.norm(self._rel(x), axis=1) - self.radius)

    def exit_radius(self, x, dirs):
        p = np.ravel(x) - np.asarray(self.center)
        dirs = np.atleast_2d(dirs)
        pd = dirs @ p
        disc = pd * pd - (p @ p - self.radius ** 2)
        return -pd + np.sqrt(np.maximum(disc, 0.0))

    def entry_interval(self, x, dirs):
        """Ray parameters (t_in, t_out) where the ray from an outside ``x`` crosses
        this disk; rays that miss get t_in = t_out = inf."""
        p = np.ravel(x) - np.asarray(self.center)
        dirs = np.atleast_2d(dirs)
        pd = dirs @ p
        disc = pd * pd - (p @ p - self.radius ** 2)
        hit = (disc > 0) & (pd < 0)
        root = np.sqrt(np.maximum(disc, 0.0))
        t_in = np.where(hit, -pd - root, np.inf)
        t_out = np.where(hit, -pd + root, np.inf)
        return t_in, t_out

    def bounding_box(self):
        c = np.asarray(self.center)
        return c - self.radius, c + self.radius

    def translated(self, shift):
        return Disk(tuple(np.asarray(self.center) + np.ravel(shift)), self.radius)


@dataclass(frozen=True)
class Rectangle(Domain):
    lo: tuple = (-1.0, -1.0)
    hi: tuple = (1.0, 1.0)
    dim: int = field(default=2, init=False)

    def __post_init__(self):
        lo = tuple(float(v) for v in self.lo)
        hi = tuple(float(v) for v in self.hi)
        if len(lo) != 2 or len(hi) != 2 or not all(l < h for l, h in zip(lo, hi)):
            raise ValueError("Rectangle requires lo < hi componentwise")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    def contains(self, x):
        p = _as_points(x, 2)
        return np.all((p > np.asarray(self.lo)) & (p < np.asarray(self.hi)), axis=1)

    def distance_to_boundary(self, x):
        p = _as_points(x, 2)
        lo, hi = np.asarray(self.lo), np.asarray(self.hi)
        inside = self.contains(p)
        d_in = np.min(np.minimum(p - lo, hi - p), axis=1)
        gap = np.maximum(np.maximum(lo - p, p - hi), 0.0)
        d_out = np.linalg.norm(gap, axis=1)
        return np.where(inside, d_in, d_out)

    def exit_radius(self, x, dirs):
        p = np.ravel(x)
        dirs = np.atleast_2d(dirs)
        lo, hi = np.asarray(self.lo), np.asarray(self.hi)
        with np.errstate(divide="ignore", invalid="ignore"):
            t = np.where(dirs > 0, (hi - p) / dirs, np.where(dirs < 0, (lo - p) / dirs, np.inf))
        return np.min(t, axis=1)

    def corner_angles(self, x) -> np.ndarray:
        """Polar angles, seen from ``x``, of the four corners in [0, 2 pi)."""
        p = np.ravel(x)
        lo, hi = self.lo, self.hi
        corners = np.array([[hi[0], hi[1]], [lo[0], hi[1]], [lo[0], lo[1]], [hi[0], lo[1]]])
        d = corners - p
        return np.sort(np.mod(np.arctan2(d[:, 1], d[:, 0]), 2 * np.pi))

    def bounding_box(self):
        return np.asarray(self.lo), np.asarray(self.hi)

    def translated(self, shift):
        s = np.ravel(shift)
        return Rectangle(tuple(np.asarray(self.lo) + s), tuple(np.asarray(self.hi) + s))


@dataclass(frozen=True)
class SquareMinusDisk(Domain):
    """Open square of half-width ``half_width`` minus the closed concentric disk."""

    half_width: float = 1.0
    inner_radius: float = 0.5
    center: tuple = (0.0, 0.0)
    dim: int = field(default=2, init=False)

    def __post_init__(self):
        if not 0 < self.inner_radius < self.half_width:
            raise ValueError("SquareMinusDisk requires 0 < inner_radius < half_width")
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))

    @property
    def outer(self):
        c = np.asarray(self.center)
        h = self.half_width
        return Rectangle(tuple(c - h), tuple(c + h))

    @property
    def holes(self):
        return [Disk(self.center, self.inner_radius)]

    def contains(self, x):
        p = _as_points(x, 2)
        in_sq = self.outer.contains(p)
        r = np.linalg.norm(p - np.asarray(self.center), axis=1)
        return in_sq & (r > self.inner_radius)

    def distance_to_boundary(self, x):
        p = _as_points(x, 2)
        return np.minimum(self.outer.distance_to_boundary(p), self.holes[0].distance_to_boundary(p))

    def exit_radius(self, x, dirs):
        r_sq = self.outer.exit_radius(x, dirs)
        t_in, _ = self.holes[0].entry_interval(x, dirs)
        return np.minimum(r_sq, t_in)

    def bounding_box(self):
        return self.outer.bounding_box()

    def translated(self, shift):
        return SquareMinusDisk(self.half_width, self.inner_radius,
                               tuple(np.asarray(self.center) + np.ravel(shift)))


# --------------------------------------------------------------------------- #
# Point clouds
# --------------------------------------------------------------------------- #

@dataclass
class PointCloud:
    """Interior points (rows of the operator equations) and boundary points."""

    interior: np.ndarray
    boundary: np.ndarray

    def __post_init__(self):
        dim = None
        for arr in (self.interior, self.boundary):
            a = np.asarray(arr, dtype=float)
            if a.size:
                dim = a.shape[1] if a.ndim == 2 else 1
        dim = dim or 1
        self.interior = np.asarray(self.interior, dtype=float).reshape(-1, dim)
        self.boundary = np.asarray(self.boundary, dtype=float).reshape(-1, dim)

    @property
    def dim(self) -> int:
        return self.interior.shape[1]

    @property
    def points(self) -> np.ndarray:
        return np.vstack([self.interior, self.boundary])

    @property
    def n_interior(self) -> int:
        return len(self.interior)

    @property
    def nbar(self) -> int:
        return len(self.interior) + len(self.boundary)

    def validate(self, domain: Domain, boundary_tol: float = 1e-12) -> None:
        """Check membership, boundary placement and absence of duplicates."""
        if self.n_interior and not np.all(domain.contains(self.interior)):
            raise ValueError("interior point outside the open domain")
        if len(self.boundary):
            d = domain.distance_to_boundary(self.boundary)
            if np.any(d > boundary_tol):
                raise ValueError(f"boundary point off the boundary by {d.max():.3e}")
        pts = self.points
        if len(pts) > 1:
            dist = pairwise_distances(pts, pts)
            np.fill_diagonal(dist, np.inf)
            if dist.min() <= DEDUP_TOL:
                raise ValueError("duplicate points in cloud")

    def to_csv(self, path) -> None:
        cols = ["x", "y", "z"][: self.dim]
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(cols + ["tag"])
            for p in self.interior:
                w.writerow([repr(float(v)) for v in p] + ["interior"])
            for p in self.boundary:
                w.writerow([repr(float(v)) for v in p] + ["boundary"])

    @classmethod
    def from_csv(cls, path) -> "PointCloud":
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        dim = len(rows[0]) - 1
        inner, bnd = [], []
        for row in rows[1:]:
            coords = [float(v) for v in row[:dim]]
            (inner if row[dim] == "interior" else bnd).append(coords)
        return cls(np.array(inner).reshape(-1, dim), np.array(bnd).reshape(-1, dim))


def _dedupe(points: np.ndarray) -> np.ndarray:
    keep: list[int] = []
    for i, p in enumerate(points):
        if all(np.linalg.norm(p - points[j]) > DEDUP_TOL for j in keep):
            keep.append(i)
    return points[keep]


def uniform_1d(nbar: int, a: float = -1.0, b: float = 1.0) -> PointCloud:
    """``nbar`` equispaced points on [a, b]; the endpoints are the boundary set."""
    if nbar < 3:
        raise ValueError("uniform_1d needs nbar >= 3")
    if not a < b:
        raise ValueError("uniform_1d needs a < b")
    x = np.linspace(a, b, nbar)
    return PointCloud(x[1:-1, None], np.array([[a], [b]]))


def chebyshev_1d(nbar: int, a: float = -1.0, b: float = 1.0) -> PointCloud:
    """Chebyshev-Gauss-Lobatto points on [a, b]."""
    if nbar < 3:
        raise ValueError("chebyshev_1d needs nbar >= 3")
    if not a < b:
        raise ValueError("chebyshev_1d needs a < b")
    t = -np.cos(np.pi * np.arange(nbar) / (nbar - 1))
    x = 0.5 * (a + b) + 0.5 * (b - a) * t
    x[0], x[-1] = a, b
    return PointCloud(x[1:-1, None], np.array([[a], [b]]))


def tensor_2d(n_side: int, lo: Sequence[float] = (-1.0, -1.0),
              hi: Sequence[float] = (1.0, 1.0)) -> PointCloud:
    """``n_side``^2 tensor grid on a rectangle; points on its edge are boundary."""
    if n_side < 2:
        raise ValueError("tensor_2d needs n_side >= 2")
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    if lo.shape != (2,) or hi.shape != (2,) or np.any(lo >= hi):
        raise ValueError("degenerate rectangle")
    xs = np.linspace(lo[0], hi[0], n_side)
    ys = np.linspace(lo[1], hi[1], n_side)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    pts = np.column_stack([X.ravel(), Y.ravel()])
    ix, iy = np.meshgrid(np.arange(n_side), np.arange(n_side), indexing="ij")
    edge = ((ix == 0) | (ix == n_side - 1) | (iy == 0) | (iy == n_side - 1)).ravel()
    return PointCloud(pts[~edge], pts[edge])


def disk_radial(n: int) -> PointCloud:
    """Points (l/n)(cos 2j pi/(n+1), sin 2j pi/(n+1)) on the unit disk.

    The origin appears once, the outer layer l = n is the boundary set, and the
    total count is n(n+1) + 1.
    """
    if n < 1:
        raise ValueError("disk_radial needs n >= 1")
    theta = 2.0 * np.pi * np.arange(n + 1) / (n + 1)
    dirs = _unit_dirs(theta)
    layers = [(l / n) * dirs for l in range(n + 1)]
    interior = _dedupe(np.vstack(layers[:-1]))
    return PointCloud(interior, layers[-1])


def elliptic_map(xh, yh):
    """Elliptic grid mapping of the unit disk onto the square [-1, 1]^2."""
    xh = np.asarray(xh, dtype=float)
    yh = np.asarray(yh, dtype=float)
    s2 = 2.0 * math.sqrt(2.0)
    u = xh * xh - yh * yh
    rads = (2 + u + s2 * xh, 2 + u - s2 * xh, 2 - u + s2 * yh, 2 - u - s2 * yh)
    # radicands are nonnegative on the closed unit disk; round-off can push them to -1e-16
    if min(np.min(r) for r in rads) < -1e-12:
        raise RuntimeError("elliptic mapping radicand is negative")
    r1, r2, r3, r4 = (np.sqrt(np.maximum(r, 0.0)) for r in rads)
    return 0.5 * (r1 - r2), 0.5 * (r3 - r4)


def annulus_mapped(n: int) -> PointCloud:
    """4n(n+1) points for the square-minus-disk domain.

    Layers 0.5 + l/(2n) with angles j pi/(2n) on the annulus 0.5 <= r <= 1 are
    pushed through :func:`elliptic_map`. The images of l = 0 and l = n are the
    boundary set.
    """
    if n < 1:
        raise ValueError("annulus_mapped needs n >= 1")
    theta = np.pi * np.arange(1, 4 * n + 1) / (2 * n)
    dirs = _unit_dirs(theta)
    interior, boundary = [], []
    for l in range(n + 1):
        r = 0.5 + l / (2.0 * n)
        x, y = elliptic_map(r * dirs[:, 0], r * dirs[:, 1])
        layer = np.column_stack([x, y])
        if l == n:
            # outer ring lands on the square; snap the last ulp so it sits on the edge
            layer = np.clip(layer, -1.0, 1.0)
        (boundary if l in (0, n) else interior).append(layer)
    inner = np.vstack(interior) if interior else np.empty((0, 2))
    return PointCloud(inner, np.vstack(boundary))


def exterior_rays(domain: Domain, x, n_angles: int = 256):
    """Directions from interior ``x`` and the radius where each ray leaves the domain.

    In 1D the directions are -1 and +1. In 2D they are ``n_angles`` equally spaced
    angles. Returns ``(directions, radii)``.
    """
    if not np.all(domain.contains(np.atleast_2d(np.ravel(x)))):
        raise ValueError("exterior_rays needs a point inside the domain")
    if domain.dim == 1:
        dirs = np.array([-1.0, 1.0])
        return dirs, domain.exit_radius(x, dirs)
    if n_angles < 4:
        raise ValueError("n_angles must be at least 4")
    theta = 2.0 * np.pi * np.arange(n_angles) / n_angles
    return theta, domain.exit_radius(x, _unit_dirs(theta))


def open_grid(domain: Domain, m: int) -> np.ndarray:
    """Error-sampling points: ``m`` open uniform points per axis of the bounding box,
    kept only where they fall inside the domain."""
    lo, hi = domain.bounding_box()
    axes = [np.linspace(l, h, m + 2)[1:-1] for l, h in zip(lo, hi)]
    if domain.dim == 1:
        pts = axes[0][:, None]
    else:
        grids = np.meshgrid(*axes, indexing="ij")
        pts = np.column_stack([g.ravel() for g in grids])
    return pts[domain.contains(pts)]
