"""Gaussian radial basis function and its closed-form fractional Laplacian."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .specfun import coeff_c, hyp1f1


@dataclass(frozen=True)
class RbfKernel:
    """Gaussian RBF exp(-eps^2 r^2) in ``dim`` dimensions with exponent ``alpha``.

    ``alpha`` may be any value in [0, 2]: 0 gives the identity operator and 2 the
    classical negative Laplacian.
    """

    epsilon: float
    dim: int
    alpha: float

    def __post_init__(self):
        if not math.isfinite(self.epsilon) or self.epsilon == 0:
            raise DomainError("epsilon must be finite and nonzero")
        if self.dim not in (1, 2, 3):
            raise DomainError("dim must be 1, 2 or 3")
        if not 0.0 <= self.alpha <= 2.0:
            raise DomainError("alpha must lie in [0, 2]")

    @property
    def zeta(self) -> int:
        """1 - floor(alpha/2): switches the exterior terms off at alpha = 2."""
        return 1 - int(math.floor(self.alpha / 2.0))

    def with_alpha(self, alpha: float) -> "RbfKernel":
        return RbfKernel(self.epsilon, self.dim, alpha)

    def phi(self, r):
        """exp(-eps^2 r^2); ``r`` scalar or array, must be nonnegative."""
        r = np.asarray(r, dtype=float)
        if np.any(r < 0):
            raise DomainError("radius must be nonnegative")
        out = np.exp(-(self.epsilon ** 2) * r * r)
        return float(out) if out.ndim == 0 else out

    def frac_lap_phi(self, r):
        """(-Delta)^{alpha/2} of the Gaussian at distance ``r`` from its center.

        Equals c_{d,alpha} |eps|^alpha 1F1((d+alpha)/2; d/2; -eps^2 r^2).
        """
        r = np.asarray(r, dtype=float)
        if np.any(r < 0):
            raise DomainError("radius must be nonnegative")
        d, a = self.dim, self.alpha
        scale = coeff_c(d, a) * math.exp(a * math.log(abs(self.epsilon)))
        f = hyp1f1((d + a) / 2.0, d / 2.0, -(self.epsilon ** 2) * r * r).value
        out = scale * np.asarray(f)
        return float(out) if out.ndim == 0 else out


def pairwise_distances(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Euclidean distance matrix between rows of ``x`` (m, d) and ``y`` (n, d)."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    y = np.atleast_2d(np.asarray(y, dtype=float))
    diff = x[:, None, :] - y[None, :, :]
    return np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
