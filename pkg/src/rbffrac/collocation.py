"""Assembly and solution of the Gaussian-RBF collocation systems.

The fractional Laplacian of the RBF expansion u_h = sum_i lam_i phi(|x - x_i|) at
an interior point x_k is

    sum_i lam_i [kappa(|x_k - x_i|) + zeta C K_ki] - zeta C D_k

with kappa the closed-form operator applied to one Gaussian, K_ki the exterior
integral of the i-th Gaussian, D_k the exterior integral of the data g, and
zeta = 0 at alpha = 2 so that no quadrature happens in the classical case.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.linalg as sla

from . import quadrature
from .errors import AssemblyError, ConditioningError, QuadratureError
from .geometry import Domain, PointCloud
from .kernel import RbfKernel, pairwise_distances
from .specfun import coeff_C

PointFn = Callable[[np.ndarray], np.ndarray]

_PIVOT_FLOOR = 1e-300


@dataclass
class CollocationProblem:
    domain: Domain
    kernel: RbfKernel
    centers: PointCloud
    tests: PointCloud
    rhs_f: PointFn
    boundary_g: PointFn
    quad: quadrature.QuadratureSpec = field(default_factory=quadrature.QuadratureSpec)
    tail_exponent_hint: float = 0.0

    def __post_init__(self):
        if self.centers.nbar != self.tests.nbar:
            raise ValueError("test and center sets must have the same size")


@dataclass
class LinearSystem:
    matrix: np.ndarray
    rhs: np.ndarray
    row_kind: list

    def __post_init__(self):
        if not np.all(np.isfinite(self.matrix)) or not np.all(np.isfinite(self.rhs)):
            raise AssemblyError("assembled system has non-finite entries")

    def to_csv(self, path) -> None:
        """Row-major dump: row kind, matrix entries, then the right-hand side."""
        n = self.matrix.shape[1]
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["kind"] + [f"a{i}" for i in range(n)] + ["rhs"])
            for kind, row, b in zip(self.row_kind, self.matrix, self.rhs):
                w.writerow([kind] + [f"{v:.17e}" for v in row] + [f"{b:.17e}"])


@dataclass(frozen=True)
class SolveReport:
    lam: np.ndarray
    cond_estimate: float
    residual_norm: float

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["i", "lambda"])
            for i, v in enumerate(self.lam):
                w.writerow([i, f"{v:.17e}"])
            w.writerow(["cond", f"{self.cond_estimate:.17e}"])
            w.writerow(["residual", f"{self.residual_norm:.17e}"])


@dataclass(frozen=True)
class RbfApproximant:
    kernel: RbfKernel
    centers: np.ndarray
    lam: np.ndarray

    def __post_init__(self):
        if len(self.centers) != len(self.lam):
            raise ValueError("one coefficient per center is required")

    def __call__(self, x) -> np.ndarray:
        return evaluate(self, x)


# --------------------------------------------------------------------------- #
# Linear algebra
# --------------------------------------------------------------------------- #

def condition_number(matrix: np.ndarray) -> float:
    """2-norm condition number from the singular values."""
    s = np.linalg.svd(matrix, compute_uv=False)
    return float(s[0] / s[-1]) if s[-1] > 0 else float("inf")


def solve(system: LinearSystem) -> SolveReport:
    """Dense direct solve.

    Symmetric matrices try Cholesky and fall back to a symmetric-indefinite
    factorisation. Everything else uses LU with partial pivoting.
    """
    A = np.asarray(system.matrix, dtype=float)
    b = np.asarray(system.rhs, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] != b.shape[0]:
        raise ValueError("solve needs a square system")
    cond = condition_number(A)
    if np.array_equal(A, A.T):
        try:
            c, low = sla.cho_factor(A, lower=True, check_finite=False)
            if np.min(np.abs(np.diag(c))) < _PIVOT_FLOOR:
                raise ConditioningError("singular Cholesky pivot", cond)
            lam = sla.cho_solve((c, low), b, check_finite=False)
        except sla.LinAlgError:
            try:
                with warnings.catch_warnings():
                    # ill-conditioning is reported through cond_estimate instead
                    warnings.simplefilter("ignore", sla.LinAlgWarning)
                    lam = sla.solve(A, b, assume_a="sym", check_finite=False)
            except sla.LinAlgError as exc:
                raise ConditioningError(f"symmetric solve failed: {exc}", cond) from exc
    else:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", sla.LinAlgWarning)
            lu, piv = sla.lu_factor(A, check_finite=False)
        if np.min(np.abs(np.diag(lu))) < _PIVOT_FLOOR:
            raise ConditioningError("numerically singular collocation matrix", cond)
        lam = sla.lu_solve((lu, piv), b, check_finite=False)
    if not np.all(np.isfinite(lam)):
        raise ConditioningError("solution is not finite", cond)
    res = float(np.linalg.norm(A @ lam - b))
    return SolveReport(lam, cond, res)


def rms_error(values, exact) -> float:
    values = np.asarray(values, dtype=float).ravel()
    exact = np.asarray(exact, dtype=float).ravel()
    if values.size == 0 or values.shape != exact.shape:
        raise ValueError("rms_error needs two non-empty vectors of equal length")
    return float(np.sqrt(np.mean((values - exact) ** 2)))


# --------------------------------------------------------------------------- #
# Approximant evaluation
# --------------------------------------------------------------------------- #

def _points(x, dim) -> np.ndarray:
    return np.asarray(x, dtype=float).reshape(-1, dim)


def evaluate(approx: RbfApproximant, x) -> np.ndarray:
    """u_h(x) = sum_i lam_i exp(-eps^2 |x - x_i|^2) at the rows of ``x``."""
    X = _points(x, approx.centers.shape[1])
    return approx.kernel.phi(pairwise_distances(X, approx.centers)) @ approx.lam


def interpolate(kernel: RbfKernel, centers: PointCloud, tests: PointCloud, samples):
    """Fit lam so that u_h matches ``samples`` at the test points."""
    samples = np.asarray(samples, dtype=float).ravel()
    if samples.size != tests.nbar:
        raise ValueError("one sample per test point is required")
    B = kernel.phi(pairwise_distances(tests.points, centers.points))
    report = solve(LinearSystem(B, samples, ["interpolation"] * len(samples)))
    return RbfApproximant(kernel, centers.points, report.lam), report


def operator_rows(domain: Domain, kernel: RbfKernel, centers, X, quad=None) -> np.ndarray:
    """Matrix of the discrete fractional Laplacian of each Gaussian at points ``X``.

    Entry (k, i) is kappa(|x_k - x_i|) + zeta C K_ki. For alpha = 2 the exterior
    integrals are not evaluated at all.
    """
    centers = _points(centers, kernel.dim)
    X = _points(X, kernel.dim)
    rows = kernel.frac_lap_phi(pairwise_distances(X, centers))
    rows = np.atleast_2d(rows).reshape(len(X), len(centers))
    if kernel.zeta == 0 or kernel.alpha == 0:
        return rows
    scale = coeff_C(kernel.dim, kernel.alpha)
    quad = quad or quadrature.QuadratureSpec()
    for k, xk in enumerate(X):
        try:
            K = quadrature.exterior_kernel_integrals(domain, xk, centers, kernel, quad)
        except QuadratureError as exc:
            col = _failing_column(domain, xk, centers, kernel, quad)
            raise AssemblyError(f"quadrature failed at row {k}, column {col}: {exc}", k, col) from exc
        rows[k] += scale * K
    return rows


def _failing_column(domain, xk, centers, kernel, quad):
    for i, xi in enumerate(centers):
        try:
            quadrature.exterior_kernel_integral(domain, xk, xi, kernel, quad)
        except QuadratureError:
            return i
    return None


def data_terms(domain: Domain, kernel: RbfKernel, X, g: PointFn, quad=None,
               tail_exponent_hint: float = 0.0) -> np.ndarray:
    """zeta C D_k: the exterior data contribution at each row of ``X``."""
    X = _points(X, kernel.dim)
    if kernel.zeta == 0 or kernel.alpha == 0:
        return np.zeros(len(X))
    scale = coeff_C(kernel.dim, kernel.alpha)
    quad = quad or quadrature.QuadratureSpec()
    out = np.empty(len(X))
    for k, xk in enumerate(X):
        try:
            out[k] = quadrature.exterior_data_integral(
                domain, xk, g, kernel.alpha, quad, tail_exponent_hint)
        except QuadratureError as exc:
            raise AssemblyError(f"data quadrature failed at row {k}: {exc}", k, None) from exc
    return scale * out


def apply_operator(approx: RbfApproximant, domain: Domain, alpha: float, boundary_g: PointFn,
                   quad=None, x=None, tail_exponent_hint: float = 0.0) -> np.ndarray:
    """Discrete (-Delta)^{alpha/2} u_h at interior points ``x``, where u_h is
    extended by ``boundary_g`` outside the domain."""
    kernel = approx.kernel.with_alpha(alpha)
    X = _points(x, kernel.dim)
    A = operator_rows(domain, kernel, approx.centers, X, quad)
    D = data_terms(domain, kernel, X, boundary_g, quad, tail_exponent_hint)
    return A @ approx.lam - D


def assemble(problem: CollocationProblem) -> LinearSystem:
    """Operator rows at interior test points, Dirichlet rows at boundary test points."""
    k = problem.kernel
    centers = problem.centers.points
    Xi = problem.tests.interior
    Xb = problem.tests.boundary
    A = operator_rows(problem.domain, k, centers, Xi, problem.quad)
    f = np.asarray(problem.rhs_f(Xi), dtype=float).reshape(-1) if len(Xi) else np.zeros(0)
    rhs_i = f + data_terms(problem.domain, k, Xi, problem.boundary_g, problem.quad,
                           problem.tail_exponent_hint)
    Bb = k.phi(pairwise_distances(Xb, centers)) if len(Xb) else np.zeros((0, len(centers)))
    gb = np.asarray(problem.boundary_g(Xb), dtype=float).reshape(-1) if len(Xb) else np.zeros(0)
    matrix = np.vstack([A.reshape(len(Xi), len(centers)), Bb])
    rhs = np.concatenate([rhs_i, gb])
    kinds = ["operator"] * len(Xi) + ["boundary"] * len(Xb)
    return LinearSystem(matrix, rhs, kinds)
