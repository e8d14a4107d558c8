"""Integrals over the exterior of the domain weighted by |x_k - y|^{-(d+alpha)}.

Both integrals are computed in polar coordinates centred at the (interior)
point x_k, where the weight times the Jacobian is simply r^{-1-alpha}:

* the unbounded part outside the convex ``outer`` shape is a sum over ray
  directions of a radial integral from the exit radius to infinity;
* a bounded hole (square-minus-disk) uses polar coordinates about the hole
  centre, since x_k lies outside it.

Radial integrals use composite Gauss-Legendre panels. The angular resolution is
doubled until two successive results agree to ``rel_tol``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DataError, QuadratureError
from .geometry import Disk, Domain, Interval, Rectangle

_GL16 = np.polynomial.legendre.leggauss(16)
_GL32 = np.polynomial.legendre.leggauss(32)
# doublings of the angular rule before giving up
_MAX_DOUBLINGS = 6
# the Gaussian factor is below exp(-72) beyond this many 1/eps past the center
_GAUSS_REACH = 8.5
_PANEL_WIDTH = 1.5
# step of the log-radius panels used for the data integral
_LOG_STEP = 0.5
_HOLE_ANGLES = 128


@dataclass(frozen=True)
class QuadratureSpec:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-13
    truncation_tail_tol: float = 1e-13
    n_angles: int = 256

    def __post_init__(self):
        if min(self.rel_tol, self.abs_tol, self.truncation_tail_tol) <= 0:
            raise ValueError("quadrature tolerances must be positive")
        if self.n_angles < 16:
            raise ValueError("n_angles must be at least 16")


def _gl_on(a: np.ndarray, b: np.ndarray, rule=_GL16):
    """Nodes and weights of ``rule`` mapped to each interval [a_j, b_j] (flattened)."""
    t, w = rule
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    nodes = mid[:, None] + half[:, None] * t[None, :]
    weights = half[:, None] * w[None, :]
    return nodes.ravel(), weights.ravel()


def _check_interior(domain: Domain, x_k: np.ndarray):
    if not domain.contains(x_k[None, :])[0]:
        raise ValueError("exterior integrals need x_k strictly inside the domain")


def _angular_rule(outer: Domain, x_k: np.ndarray, n: int, odd_only: bool = False):
    """Directions, angular weights and exit radii for the unbounded exterior.

    For a disk the rule is the n-point periodic trapezoid; with ``odd_only`` only
    the nodes that are new relative to the n/2-point rule are returned, with the
    weights of the n-point rule.
    """
    if isinstance(outer, Interval):
        dirs = np.array([[-1.0], [1.0]])
        return dirs, np.ones(2), outer.exit_radius(x_k, dirs[:, 0])
    if isinstance(outer, Disk):
        j = np.arange(1, n, 2) if odd_only else np.arange(n)
        theta = 2.0 * np.pi * j / n
        w = np.full(theta.size, 2.0 * np.pi / n)
    elif isinstance(outer, Rectangle):
        # Gauss-Legendre on each sector between corner angles, where the exit
        # radius is a smooth function of the angle
        c = outer.corner_angles(x_k)
        lo = c
        hi = np.append(c[1:], c[0] + 2.0 * np.pi)
        m = max(n // 4, 4)
        theta, w = _gl_on(lo, hi, np.polynomial.legendre.leggauss(m))
    else:
        raise TypeError(f"unsupported outer shape {type(outer).__name__}")
    dirs = np.column_stack([np.cos(theta), np.sin(theta)])
    return dirs, w, outer.exit_radius(x_k, dirs)


def _kernel_radial_panels(R: np.ndarray, r_max: float, h_max: float):
    """Panel endpoints for each ray: geometric growth from R, then uniform up to r_max."""
    a_all, b_all, owner = [], [], []
    for j, r0 in enumerate(R):
        edges = [r0]
        width = r0
        while edges[-1] < r_max:
            width = min(width, h_max)
            edges.append(edges[-1] + width)
            width *= 2.0
        e = np.asarray(edges)
        a_all.append(e[:-1])
        b_all.append(e[1:])
        owner.append(np.full(len(e) - 1, j))
    return np.concatenate(a_all), np.concatenate(b_all), np.concatenate(owner)


def _outer_kernel_rule(outer, x_k, n, eps, alpha, reach, odd_only=False):
    dirs, w_ang, R = _angular_rule(outer, x_k, n, odd_only)
    h_max = _PANEL_WIDTH / eps
    r_max = max(R.max(), reach) + _GAUSS_REACH / eps
    a, b, owner = _kernel_radial_panels(R, r_max, h_max)
    r, w = _gl_on(a, b)
    k = _GL16[0].size
    d = np.repeat(owner, k)
    Y = x_k[None, :] + r[:, None] * dirs[d]
    W = w_ang[d] * w * r ** (-1.0 - alpha)
    return Y, W


def _hole_rule(hole: Disk, x_k, n, alpha, dim):
    """Polar rule over a closed disk not containing x_k, weighted by |x_k-y|^{-(d+alpha)}."""
    t, ws = _GL32
    rho = hole.radius
    s = 0.5 * rho * (t + 1.0)
    ws = 0.5 * rho * ws
    phi = 2.0 * np.pi * np.arange(n) / n
    S, P = np.meshgrid(s, phi, indexing="ij")
    Y = np.asarray(hole.center)[None, :] + np.column_stack(
        [(S * np.cos(P)).ravel(), (S * np.sin(P)).ravel()])
    area_w = (ws[:, None] * s[:, None] * np.full((1, n), 2.0 * np.pi / n)).ravel()
    dist = np.linalg.norm(Y - x_k[None, :], axis=1)
    return Y, area_w * dist ** (-(dim + alpha))


def _converged(prev, cur, spec: QuadratureSpec) -> bool:
    scale = np.max(np.abs(cur)) if np.size(cur) else 0.0
    return np.max(np.abs(cur - prev)) <= spec.rel_tol * scale + spec.abs_tol


def _refine(evaluate: Callable[..., np.ndarray], n0: int, spec: QuadratureSpec, what: str,
            nested: bool = False):
    """Evaluate at n0, 2 n0, ... until successive values agree.

    With ``nested`` the rule at 2n is the periodic trapezoid, so
    ``evaluate(n, odd_only=True)`` only supplies the new nodes and the previous
    sum is halved and reused.
    """
    prev = evaluate(n0)
    n = n0
    for _ in range(_MAX_DOUBLINGS):
        n *= 2
        cur = 0.5 * prev + evaluate(n, odd_only=True) if nested else evaluate(n)
        if _converged(prev, cur, spec):
            return cur
        prev = cur
    raise QuadratureError(f"{what} did not converge with {n} angular nodes")


def _gauss_matrix(Y: np.ndarray, centers: np.ndarray, eps2: float) -> np.ndarray:
    """exp(-eps2 |Y_m - c_i|^2) for all pairs, via one matrix product."""
    d2 = np.einsum("ij,ij->i", Y, Y)[:, None] + np.einsum("ij,ij->i", centers, centers)[None, :]
    d2 -= 2.0 * (Y @ centers.T)
    np.maximum(d2, 0.0, out=d2)
    d2 *= -eps2
    return np.exp(d2, out=d2)


def exterior_kernel_integrals(domain: Domain, x_k, centers, kernel, spec: QuadratureSpec | None = None) -> np.ndarray:
    """Integral over the exterior of exp(-eps^2 |y - x_i|^2) / |x_k - y|^{d+alpha}
    for every row x_i of ``centers``. Returns a vector of nonnegative values."""
    spec = spec or QuadratureSpec()
    x_k = np.asarray(x_k, dtype=float).ravel()
    centers = np.asarray(centers, dtype=float).reshape(-1, domain.dim)
    _check_interior(domain, x_k)
    alpha = kernel.alpha
    if not 0.0 < alpha < 2.0:
        raise ValueError("exterior integrals need 0 < alpha < 2")
    eps2 = kernel.epsilon ** 2
    eps = abs(kernel.epsilon)
    reach = float(np.max(np.linalg.norm(centers - x_k[None, :], axis=1))) if len(centers) else 0.0

    def outer_part(n, odd_only=False):
        Y, W = _outer_kernel_rule(domain.outer, x_k, n, eps, alpha, reach, odd_only)
        return W @ _gauss_matrix(Y, centers, eps2)

    if domain.dim == 1:
        total = outer_part(2)
    else:
        nested = isinstance(domain.outer, Disk)
        total = _refine(outer_part, spec.n_angles, spec, "exterior kernel integral", nested)
    for hole in domain.holes:
        def hole_part(n, hole=hole):
            Y, W = _hole_rule(hole, x_k, n, alpha, domain.dim)
            return W @ _gauss_matrix(Y, centers, eps2)
        total = total + _refine(hole_part, _HOLE_ANGLES, spec, "hole kernel integral")
    return total


def exterior_kernel_integral(domain: Domain, x_k, x_i, kernel, spec: QuadratureSpec | None = None) -> float:
    """Scalar version of :func:`exterior_kernel_integrals` for one center."""
    return float(exterior_kernel_integrals(domain, x_k, np.atleast_2d(np.ravel(x_i)), kernel, spec)[0])


def _eval_data(g, Y):
    vals = np.asarray(g(Y), dtype=float).reshape(-1)
    if vals.shape[0] != Y.shape[0]:
        raise DataError("boundary data returned the wrong number of values")
    if not np.all(np.isfinite(vals)):
        raise DataError("boundary data is not finite on the exterior")
    return vals


def _truncation_radius(g, x_k, dirs, R, alpha, p, spec, ang_measure):
    """Smallest R * 10^k whose tail bound max|g| R^{-alpha} / (alpha + p) is below tol."""
    base = max(float(R.max()), 1.0)
    for k in range(1, 301):
        rt = base * 10.0 ** k
        if not math.isfinite(rt):
            break
        gmax = float(np.max(np.abs(_eval_data(g, x_k[None, :] + rt * dirs))))
        tail = ang_measure * gmax * rt ** (-alpha) / (alpha + p)
        if tail < spec.truncation_tail_tol:
            return rt
    raise QuadratureError("no truncation radius meets the tail tolerance")


def exterior_data_integral(domain: Domain, x_k, g: Callable, alpha: float,
                           spec: QuadratureSpec | None = None,
                           tail_exponent_hint: float = 0.0) -> float:
    """Integral over the exterior of g(y) / |x_k - y|^{d+alpha}.

    ``g`` maps an (m, d) array of points to m values. ``tail_exponent_hint`` is
    an exponent p with |g(y)| = O(|y|^{-p}), used for the truncation radius.
    """
    spec = spec or QuadratureSpec()
    x_k = np.asarray(x_k, dtype=float).ravel()
    _check_interior(domain, x_k)
    if not 0.0 < alpha < 2.0:
        raise ValueError("exterior integrals need 0 < alpha < 2")
    p = max(float(tail_exponent_hint), 0.0)
    ang_measure = 1.0 if domain.dim == 1 else 2.0 * np.pi

    dirs0, _, R0 = _angular_rule(domain.outer, x_k, spec.n_angles)
    r_trunc = _truncation_radius(g, x_k, dirs0, R0, alpha, p, spec, ang_measure)

    def outer_part(n, odd_only=False):
        dirs, w_ang, R = _angular_rule(domain.outer, x_k, n, odd_only)
        # r = R e^s, so dr r^{-1-alpha} = r^{-alpha} ds
        s_end = np.log(r_trunc / R)
        counts = np.maximum(np.ceil(s_end / _LOG_STEP).astype(int), 1)
        owner = np.repeat(np.arange(len(R)), counts)
        start = np.concatenate([np.arange(c) for c in counts]) * _LOG_STEP
        stop = np.minimum(start + _LOG_STEP, s_end[owner])
        s, w = _gl_on(start, stop)
        k = _GL16[0].size
        d = np.repeat(owner, k)
        r = R[d] * np.exp(s)
        Y = x_k[None, :] + r[:, None] * dirs[d]
        W = w_ang[d] * w * r ** (-alpha)
        return np.atleast_1d(W @ _eval_data(g, Y))

    if domain.dim == 1:
        total = outer_part(2)[0]
    else:
        nested = isinstance(domain.outer, Disk)
        total = _refine(outer_part, spec.n_angles, spec, "exterior data integral", nested)[0]
    for hole in domain.holes:
        def hole_part(n, hole=hole):
            Y, W = _hole_rule(hole, x_k, n, alpha, domain.dim)
            return np.atleast_1d(W @ _eval_data(g, Y))
        total += _refine(hole_part, _HOLE_ANGLES, spec, "hole data integral")[0]
    return float(total)
