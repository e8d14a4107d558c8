"""Experiment drivers shared by the CLI and the acceptance tests.

Each runner returns plain dicts with the CSV columns so results are easy to
print, compare and serialise.
"""

from __future__ import annotations

import time
from typing import Optional

import numpy as np

from . import collocation as col
from .errors import ConditioningError
from .geometry import (Disk, Interval, PointCloud, Rectangle, SquareMinusDisk, annulus_mapped,
                       chebyshev_1d, disk_radial, open_grid, tensor_2d, uniform_1d)
from .kernel import RbfKernel, pairwise_distances
from .quadrature import QuadratureSpec
from .reference import ProblemCase, fdm_laplacian_2d, gauss_sine_case

DEFAULT_M_1D = 1000
DEFAULT_M_2D = 80


def case_cloud(case, nbar: Optional[int] = None, n: Optional[int] = None,
               points: str = "uniform") -> PointCloud:
    """Center/test points used in the experiments for ``case``."""
    dom = case.domain
    if isinstance(dom, Interval):
        if nbar is None:
            raise ValueError(f"case {case.name} needs --nbar")
        gen = {"uniform": uniform_1d, "chebyshev": chebyshev_1d}.get(points)
        if gen is None:
            raise ValueError(f"unknown point family {points!r}")
        return gen(nbar, dom.a, dom.b)
    if n is None:
        raise ValueError(f"case {case.name} needs --n")
    if isinstance(dom, Disk):
        return disk_radial(n)
    if isinstance(dom, SquareMinusDisk):
        return annulus_mapped(n)
    if isinstance(dom, Rectangle):
        return tensor_2d(n, dom.lo, dom.hi)
    raise ValueError(f"no point generator for {type(dom).__name__}")


def sample_points(domain, m_points: Optional[int] = None) -> np.ndarray:
    m = m_points or (DEFAULT_M_1D if domain.dim == 1 else DEFAULT_M_2D)
    return open_grid(domain, m)


def _row(case, alpha, eps, nbar, rms, cond, t0, **extra):
    row = {"case": case.name, "d": case.dim, "alpha": alpha, "epsilon": eps, "nbar": nbar,
           "rms": rms, "cond": cond, "seconds": time.perf_counter() - t0}
    row.update(extra)
    return row


def run_operator(case: ProblemCase, alpha: float, epsilon: float, cloud: PointCloud,
                 m_points: Optional[int] = None, quad: Optional[QuadratureSpec] = None) -> dict:
    """Interpolate the exact u on ``cloud`` and compare the discrete operator with
    the exact one on the error-sampling points."""
    t0 = time.perf_counter()
    case.check_alpha(alpha)
    if case.exact_lu is None:
        raise ValueError(f"case {case.name} has no exact operator values")
    kernel = RbfKernel(epsilon, case.dim, alpha)
    pts = cloud.points
    try:
        approx, rep = col.interpolate(kernel, cloud, cloud, case.exact_u(pts, alpha))
    except ConditioningError as exc:
        return _row(case, alpha, epsilon, cloud.nbar, None, exc.cond_estimate, t0)
    X = sample_points(case.domain, m_points)
    g = lambda Y: case.boundary_g(Y, alpha)
    approx_lu = col.apply_operator(approx, case.domain, alpha, g, quad, X, case.tail_exponent_hint)
    rms = col.rms_error(approx_lu, case.exact_lu(X, alpha))
    return _row(case, alpha, epsilon, cloud.nbar, rms, rep.cond_estimate, t0)


def run_solve(case: ProblemCase, alpha: float, epsilon: float, cloud: PointCloud,
              m_points: Optional[int] = None, quad: Optional[QuadratureSpec] = None) -> dict:
    """Poisson solve with the case's f and g; RMS of u_h against the exact u."""
    t0 = time.perf_counter()
    case.check_alpha(alpha)
    kernel = RbfKernel(epsilon, case.dim, alpha)
    problem = col.CollocationProblem(
        case.domain, kernel, cloud, cloud,
        lambda X: case.rhs_f(X, alpha), lambda X: case.boundary_g(X, alpha),
        quad or QuadratureSpec(), case.tail_exponent_hint)
    system = col.assemble(problem)
    try:
        rep = col.solve(system)
    except ConditioningError as exc:
        return _row(case, alpha, epsilon, cloud.nbar, None, exc.cond_estimate, t0)
    approx = col.RbfApproximant(kernel, cloud.points, rep.lam)
    X = sample_points(case.domain, m_points)
    rms = col.rms_error(col.evaluate(approx, X), case.exact_u(X, alpha))
    return _row(case, alpha, epsilon, cloud.nbar, rms, rep.cond_estimate, t0)


def run_compare_fdm(n_side: int, epsilon: float, m_points: Optional[int] = None,
                    case: Optional[ProblemCase] = None) -> list[dict]:
    """Five-point finite differences versus RBF collocation for -Delta on a tensor grid.

    The FDM error is measured at the interior grid nodes (the only places it is
    defined); the RBF error on the usual error-sampling grid.
    """
    case = case or gauss_sine_case()
    dom = case.domain
    t0 = time.perf_counter()
    lo, hi = np.asarray(dom.lo), np.asarray(dom.hi)
    xs = np.linspace(lo[0], hi[0], n_side)
    ys = np.linspace(lo[1], hi[1], n_side)
    if not np.isclose(xs[1] - xs[0], ys[1] - ys[0]):
        raise ValueError("compare-fdm needs a square grid spacing")
    Xg, Yg = np.meshgrid(xs, ys, indexing="ij")
    grid = np.column_stack([Xg.ravel(), Yg.ravel()])
    U = case.exact_u(grid, 2.0).reshape(n_side, n_side)
    inner = grid.reshape(n_side, n_side, 2)[1:-1, 1:-1].reshape(-1, 2)
    fdm = fdm_laplacian_2d(U, xs[1] - xs[0])
    fdm_rms = col.rms_error(fdm, case.exact_lu(inner, 2.0))
    rows = [_row(case, 2.0, epsilon, n_side * n_side, fdm_rms, None, t0, method="fdm")]
    cloud = tensor_2d(n_side, lo, hi)
    rows.append(dict(run_operator(case, 2.0, epsilon, cloud, m_points), method="rbf"))
    return rows


def interpolation_matrix(kernel: RbfKernel, cloud: PointCloud) -> np.ndarray:
    return kernel.phi(pairwise_distances(cloud.points, cloud.points))
