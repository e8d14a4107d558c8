"""Crank-Nicolson time stepping for the fractional diffusion problem.

With u_h(x, t_n) = sum_i lam_i^n phi(|x - x_i|) the scheme reads

    [B + dt/2 A; C] lam^{n+1} = [(B - dt/2 A) lam^n + dt/2 (f^n + f^{n+1} + w^n + w^{n+1}); g^{n+1}]

where B and C are the Gaussian matrices at interior and boundary test points and
A holds the operator coefficients. All three blocks are assembled once, and the
block matrix is factorised once.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.linalg as sla

from . import collocation as col
from .errors import ConditioningError
from .geometry import PointCloud
from .kernel import RbfKernel, pairwise_distances
from .quadrature import QuadratureSpec


@dataclass
class DiffusionSetup:
    """Assembled, time-independent data of one diffusion run.

    ``problem`` must provide ``domain``, ``exact_u(X, t)``, ``boundary_g(X, t)``
    and ``rhs_f(X, alpha, t)``. The boundary data must be affine in time,
    g(x, t) = g0(x) + t g1(x), so the exterior integrals are computed once.
    """

    problem: object
    kernel: RbfKernel
    cloud: PointCloud
    dt: float
    t_end: float
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    w_zero: np.ndarray
    w_unit: np.ndarray
    cond_estimate: float
    _lu: tuple = field(repr=False, default=None)

    @property
    def nbar(self) -> int:
        return self.cloud.nbar

    def w(self, t: float) -> np.ndarray:
        return self.w_zero + t * (self.w_unit - self.w_zero)

    def f(self, t: float) -> np.ndarray:
        return np.asarray(self.problem.rhs_f(self.cloud.interior, self.kernel.alpha, t), dtype=float)

    def g(self, t: float) -> np.ndarray:
        return np.asarray(self.problem.boundary_g(self.cloud.boundary, t), dtype=float)


@dataclass(frozen=True)
class TimestepState:
    step_index: int
    t: float
    lam: np.ndarray
    w: np.ndarray


def build_setup(problem, kernel: RbfKernel, cloud: PointCloud, dt: float, t_end: float,
                quad: Optional[QuadratureSpec] = None) -> DiffusionSetup:
    """Assemble A, B, C and the exterior data vector, then factorise the step matrix."""
    if dt == 0:
        raise ValueError("dt must be nonzero")
    if t_end < 0:
        raise ValueError("t_end must be nonnegative")
    problem.check_alpha(kernel.alpha)
    centers = cloud.points
    Xi, Xb = cloud.interior, cloud.boundary
    A = col.operator_rows(problem.domain, kernel, centers, Xi, quad)
    B = kernel.phi(pairwise_distances(Xi, centers))
    C = kernel.phi(pairwise_distances(Xb, centers))
    # affine data: w(t) = w(0) + t (w(1) - w(0)), two exterior integrals per row in total
    hint = getattr(problem, "tail_exponent_hint", 0.0)
    w0, w1 = (col.data_terms(problem.domain, kernel, Xi, lambda Y, t=t: problem.boundary_g(Y, t),
                             quad, hint) for t in (0.0, 1.0))
    setup = DiffusionSetup(problem, kernel, cloud, dt, t_end, A, B, C, w0, w1, np.nan)
    _factor(setup)
    return setup


def _step_matrix(setup: DiffusionSetup) -> np.ndarray:
    return np.vstack([setup.B + 0.5 * setup.dt * setup.A, setup.C])


def _factor(setup: DiffusionSetup) -> None:
    M = _step_matrix(setup)
    setup.cond_estimate = col.condition_number(M)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", sla.LinAlgWarning)
        lu, piv = sla.lu_factor(M, check_finite=False)
    if np.min(np.abs(np.diag(lu))) < 1e-300:
        raise ConditioningError("Crank-Nicolson matrix is numerically singular", setup.cond_estimate)
    setup._lu = (lu, piv)


def with_dt(setup: DiffusionSetup, dt: float) -> DiffusionSetup:
    """Same assembled blocks, different time step (refactorised)."""
    new = DiffusionSetup(setup.problem, setup.kernel, setup.cloud, dt, setup.t_end,
                         setup.A, setup.B, setup.C, setup.w_zero, setup.w_unit, np.nan)
    _factor(new)
    return new


def init(setup: DiffusionSetup, t0: float = 0.0) -> TimestepState:
    """Interpolate the initial data u(., t0) on all test points."""
    u0 = setup.problem.exact_u(setup.cloud.points, t0)
    if not np.any(u0):
        lam = np.zeros(setup.nbar)
    else:
        _, rep = col.interpolate(setup.kernel, setup.cloud, setup.cloud, u0)
        lam = rep.lam
    return TimestepState(0, t0, lam, setup.w(t0))


def step(setup: DiffusionSetup, state: TimestepState) -> TimestepState:
    """Advance one step of size ``setup.dt`` (negative dt steps backward)."""
    dt = setup.dt
    t0, t1 = state.t, state.t + dt
    w1 = setup.w(t1)
    top = ((setup.B - 0.5 * dt * setup.A) @ state.lam
           + 0.5 * dt * (setup.f(t0) + setup.f(t1) + state.w + w1))
    rhs = np.concatenate([top, setup.g(t1)])
    lam = sla.lu_solve(setup._lu, rhs, check_finite=False)
    return TimestepState(state.step_index + 1, t1, lam, w1)


def rms_at(setup: DiffusionSetup, state: TimestepState, X: np.ndarray) -> float:
    approx = col.RbfApproximant(setup.kernel, setup.cloud.points, state.lam)
    return col.rms_error(col.evaluate(approx, X), setup.problem.exact_u(X, state.t))


def run(setup: DiffusionSetup, X: np.ndarray, output_every: float = 0.1) -> list[dict]:
    """Step to ``t_end`` and record (t, rms, cond) at every multiple of ``output_every``."""
    state = init(setup)
    records = [{"t": state.t, "rms": rms_at(setup, state, X), "cond": setup.cond_estimate}]
    n_steps = int(round(setup.t_end / setup.dt))
    every = max(int(round(output_every / setup.dt)), 1)
    for n in range(1, n_steps + 1):
        state = step(setup, state)
        if n % every == 0 or n == n_steps:
            records.append({"t": state.t, "rms": rms_at(setup, state, X), "cond": setup.cond_estimate})
    return records
