"""Exact solutions, manufactured data and independent oracles for the benchmark cases.

Every case function maps an (m, d) point array and the exponent alpha to an
m-vector. Cases that are time dependent take an extra time argument.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import integrate

from .geometry import Disk, Domain, Interval, Rectangle, SquareMinusDisk
from .specfun import coeff_C, gamma, hyp2f1

CaseFn = Callable[[np.ndarray, float], np.ndarray]


@dataclass
class ProblemCase:
    """A benchmark problem.

    ``exact_lu`` is the exact fractional Laplacian of ``exact_u`` on the domain
    (used by the operator mode), ``rhs_f`` the Poisson source and ``boundary_g``
    the data on the exterior (or on the boundary when alpha = 2).
    """

    name: str
    dim: int
    domain: Domain
    exact_u: CaseFn
    exact_lu: Optional[CaseFn]
    rhs_f: CaseFn
    boundary_g: CaseFn
    alpha_range: tuple = (0.0, 2.0)
    tail_exponent_hint: float = 0.0
    params: dict = field(default_factory=dict)

    def check_alpha(self, alpha: float) -> None:
        lo, hi = self.alpha_range
        if not lo <= alpha <= hi:
            raise ValueError(f"case {self.name} supports alpha in [{lo}, {hi}], got {alpha}")


def _r2(X) -> np.ndarray:
    A = np.asarray(X, dtype=float)
    return A.ravel() ** 2 if A.ndim <= 1 else np.einsum("ij,ij->i", A, A)


def _x1(X) -> np.ndarray:
    A = np.asarray(X, dtype=float)
    return A.ravel() if A.ndim <= 1 else A[:, 0]


def _zeros(X, alpha=None) -> np.ndarray:
    A = np.asarray(X)
    return np.zeros(A.size if A.ndim <= 1 else A.shape[0])


# --------------------------------------------------------------------------- #
# 1D cases
# --------------------------------------------------------------------------- #

def lorentzian_case() -> ProblemCase:
    """u = 1/(1+x^2) on (-2, 2) with the hypergeometric closed form of its Laplacian."""

    def u(X, alpha=None):
        return 1.0 / (1.0 + _x1(X) ** 2)

    def lu(X, alpha):
        x = _x1(X)
        return gamma(1.0 + alpha) * hyp2f1((1 + alpha) / 2, (2 + alpha) / 2, 0.5, -x * x).value

    return ProblemCase("lorentzian", 1, Interval(-2.0, 2.0), u, lu, lu, u,
                       alpha_range=(0.0, 2.0), tail_exponent_hint=2.0)


def compact_case(p: float) -> ProblemCase:
    """u = x (1 - x^2)_+^p on (-1, 1), zero outside."""
    if p <= -1:
        raise ValueError("compact_case needs p > -1")

    def u(X, alpha=None):
        x = _x1(X)
        return np.where(np.abs(x) < 1, x * np.clip(1 - x * x, 0, None) ** p, 0.0)

    def lu(X, alpha):
        x = _x1(X)
        if np.any(np.abs(x) >= 1):
            raise ValueError("the closed form holds for |x| < 1 only")
        pref = (2 ** alpha * (alpha + 1) * gamma((1 + alpha) / 2) * gamma(p + 1)
                / (math.sqrt(math.pi) * gamma(p + 1 - alpha / 2)))
        return pref * hyp2f1((alpha + 3) / 2, -p + alpha / 2, 1.5, x * x).value * x

    return ProblemCase("compact", 1, Interval(-1.0, 1.0), u, lu, lu, _zeros,
                       alpha_range=(0.0, 2.0), params={"p": p})


def benchmark_1d_case(s: int) -> ProblemCase:
    """Fractional Poisson benchmark with solution (1 - x^2)_+^{s + alpha/2} and g = 0."""
    if s < 0 or int(s) != s:
        raise ValueError("s must be a nonnegative integer")
    s = int(s)

    def u(X, alpha):
        x = _x1(X)
        return np.clip(1 - x * x, 0, None) ** (s + alpha / 2)

    def f(X, alpha):
        x = _x1(X)
        pref = (2 ** alpha * gamma((alpha + 1) / 2) * gamma(s + 1 + alpha / 2)
                / (math.sqrt(math.pi) * gamma(s + 1)))
        return pref * hyp2f1((alpha + 1) / 2, -s, 0.5, x * x).value

    return ProblemCase("bench1d", 1, Interval(-1.0, 1.0), u, f, f, _zeros,
                       alpha_range=(1e-12, 2.0), params={"s": s})


# --------------------------------------------------------------------------- #
# 2D cases
# --------------------------------------------------------------------------- #

def disk_case() -> ProblemCase:
    """f = 1 on the unit disk, g = 0."""

    def u(X, alpha):
        return (2.0 ** -alpha * gamma(1 + alpha / 2) ** -2
                * np.clip(1 - _r2(X), 0, None) ** (alpha / 2))

    def f(X, alpha):
        return np.ones(len(_r2(X)))

    return ProblemCase("disk", 2, Disk((0.0, 0.0), 1.0), u, f, f, _zeros,
                       alpha_range=(1e-12, 2.0))


def _radial_profile_lap(r2, alpha):
    """Fractional Laplacian of (1+|x|^2)^{-3/2} in 2D at squared radius r2."""
    return gamma(2 + alpha) * hyp2f1((2 + alpha) / 2, (3 + alpha) / 2, 1.0, -r2).value


def irregular_case() -> ProblemCase:
    """u = (1+|x|^2)^{-3/2} on the unit square minus the disk of radius 1/2."""

    def u(X, alpha=None):
        return (1.0 + _r2(X)) ** -1.5

    def f(X, alpha):
        return _radial_profile_lap(_r2(X), alpha)

    return ProblemCase("irregular", 2, SquareMinusDisk(1.0, 0.5), u, f, f, u,
                       alpha_range=(1e-12, 2.0), tail_exponent_hint=3.0)


_KAPPA = 1.0 / math.sqrt(2.0)


def diffusion_spatial(X) -> np.ndarray:
    """Spatial factor (1 + 0.5|x|^2)^{-3/2} of the diffusion solution."""
    return (1.0 + 0.5 * _r2(X)) ** -1.5


def diffusion_spatial_lap(X, alpha) -> np.ndarray:
    """Its fractional Laplacian, by rescaling the irregular-case profile with kappa."""
    return _KAPPA ** alpha * _radial_profile_lap(_KAPPA ** 2 * _r2(X), alpha)


@dataclass
class DiffusionCase:
    """u(x, t) = t (1 + 0.5|x|^2)^{-3/2} on (-1, 1)^2."""

    name: str = "diffusion"
    dim: int = 2
    domain: Domain = field(default_factory=lambda: Rectangle((-1.0, -1.0), (1.0, 1.0)))
    tail_exponent_hint: float = 3.0
    alpha_range: tuple = (1e-12, 2.0)

    def exact_u(self, X, t):
        return t * diffusion_spatial(X)

    def boundary_g(self, X, t):
        return t * diffusion_spatial(X)

    def rhs_f(self, X, alpha, t):
        # d/dt u + (-Delta)^{alpha/2} u
        return diffusion_spatial(X) + t * diffusion_spatial_lap(X, alpha)

    def check_alpha(self, alpha):
        lo, hi = self.alpha_range
        if not lo <= alpha <= hi:
            raise ValueError(f"case diffusion supports alpha in [{lo}, {hi}], got {alpha}")


def diffusion_case() -> DiffusionCase:
    return DiffusionCase()


def gauss_sine_case() -> ProblemCase:
    """u = exp(-|x|^2) sin(y) on (-1, 1)^2; the exact Laplacian is known for alpha = 2 only."""

    def u(X, alpha=None):
        X = np.asarray(X, dtype=float).reshape(-1, 2)
        return np.exp(-_r2(X)) * np.sin(X[:, 1])

    def lu(X, alpha):
        if alpha != 2:
            raise ValueError("the exact operator is only known for alpha = 2")
        X = np.asarray(X, dtype=float).reshape(-1, 2)
        y = X[:, 1]
        r2 = _r2(X)
        return -np.exp(-r2) * (np.sin(y) * (4 * r2 - 5) - 4 * y * np.cos(y))

    return ProblemCase("gausssine", 2, Rectangle((-1.0, -1.0), (1.0, 1.0)), u, lu, lu, u,
                       alpha_range=(0.0, 2.0), tail_exponent_hint=20.0)


# --------------------------------------------------------------------------- #
# Oracles
# --------------------------------------------------------------------------- #

def fdm_laplacian_2d(u_grid, h: float) -> np.ndarray:
    """Five-point approximation of -Delta u at the interior nodes of a tensor grid.

    ``u_grid`` is an (n, n) array indexed [ix, iy]; returns the (n-2)^2 interior
    values in the same (ix-major) order as :func:`rbffrac.geometry.tensor_2d`.
    """
    U = np.asarray(u_grid, dtype=float)
    if U.ndim != 2 or U.shape[0] < 3 or U.shape[1] < 3:
        raise ValueError("fdm_laplacian_2d needs an (n, m) tensor grid with n, m >= 3")
    if not h > 0:
        raise ValueError("grid spacing must be positive")
    c = U[1:-1, 1:-1]
    lap = (4 * c - U[2:, 1:-1] - U[:-2, 1:-1] - U[1:-1, 2:] - U[1:-1, :-2]) / (h * h)
    return lap.ravel()


def principal_value_1d(u: Callable[[float], float], x: float, alpha: float,
                       kinks=(), tol: float = 1e-12) -> float:
    """Fractional Laplacian of a 1D function at ``x`` from the singular integral.

    Pairing y = x + r and y = x - r gives the regular integrand
    (2u(x) - u(x+r) - u(x-r)) / r^{1+alpha} on (0, inf). ``kinks`` lists points
    where u is not smooth; they become quadrature breakpoints.
    """
    ux = u(x)

    def integrand(r):
        return (2 * ux - u(x + r) - u(x - r)) / r ** (1 + alpha)

    breaks = sorted({abs(k - x) for k in kinks if abs(k - x) > 0})
    edges = [0.0] + breaks + [max(breaks[-1] if breaks else 1.0, 1.0) * 2]
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        total += integrate.quad(integrand, a, b, epsabs=tol, epsrel=tol, limit=400)[0]
    total += integrate.quad(integrand, edges[-1], np.inf, epsabs=tol, epsrel=tol, limit=400)[0]
    return coeff_C(1, alpha) * total


CASES = {
    "lorentzian": lambda **kw: lorentzian_case(),
    "compact": lambda p=4.0, **kw: compact_case(p),
    "bench1d": lambda s=3, **kw: benchmark_1d_case(s),
    "disk": lambda **kw: disk_case(),
    "irregular": lambda **kw: irregular_case(),
    "diffusion": lambda **kw: diffusion_case(),
    "gausssine": lambda **kw: gauss_sine_case(),
}


def get_case(name: str, **params):
    if name not in CASES:
        raise KeyError(f"unknown case {name!r}; available: {', '.join(sorted(CASES))}")
    return CASES[name](**params)
