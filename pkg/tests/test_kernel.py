import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rbffrac.errors import DomainError
from rbffrac.kernel import RbfKernel, pairwise_distances


def classical(d, eps, r):
    # -Delta exp(-eps^2 |x|^2) by direct differentiation
    return eps ** 2 * (2 * d - 4 * eps ** 2 * r ** 2) * np.exp(-(eps ** 2) * r ** 2)


def test_phi_examples():
    assert RbfKernel(2.0, 1, 1.0).phi(0.0) == 1.0
    assert abs(RbfKernel(1.0, 1, 1.0).phi(1.0) - 0.36787944117) < 1e-11
    assert RbfKernel(-1.0, 1, 1.0).phi(1.0) == RbfKernel(1.0, 1, 1.0).phi(1.0)


def test_phi_negative_radius():
    k = RbfKernel(1.0, 2, 1.0)
    with pytest.raises(DomainError):
        k.phi(-0.1)
    with pytest.raises(DomainError):
        k.frac_lap_phi(np.array([0.1, -1e-3]))


@pytest.mark.parametrize("kw", [dict(epsilon=0.0, dim=1, alpha=1.0), dict(epsilon=1.0, dim=4, alpha=1.0),
                                dict(epsilon=1.0, dim=1, alpha=2.1), dict(epsilon=1.0, dim=1, alpha=-0.1),
                                dict(epsilon=float("nan"), dim=1, alpha=1.0)])
def test_kernel_invariants(kw):
    with pytest.raises(DomainError):
        RbfKernel(**kw)


def test_zeta_switch():
    assert RbfKernel(1.0, 1, 2.0).zeta == 0
    for a in (0.0, 0.5, 1.0, 1.999):
        assert RbfKernel(1.0, 1, a).zeta == 1


def test_frac_lap_examples():
    assert abs(RbfKernel(3.0, 1, 0.0).frac_lap_phi(0.7) - math.exp(-9 * 0.49)) < 1e-15
    assert abs(RbfKernel(1.0, 2, 2.0).frac_lap_phi(0.0) - 4.0) < 1e-14


@pytest.mark.parametrize("d", [1, 2, 3])
@pytest.mark.parametrize("eps", [0.5, 1.0, 2.0, -3.0])
def test_classical_limit(d, eps):
    r = np.linspace(0, 10, 401)
    v = RbfKernel(eps, d, 2.0).frac_lap_phi(r)
    ref = classical(d, eps, r)
    assert np.all(np.abs(v - ref) <= 1e-11 * np.maximum(1.0, np.abs(ref)))


@pytest.mark.parametrize("d", [1, 2, 3])
@pytest.mark.parametrize("eps", [0.3, 1.0, 4.0])
def test_identity_limit(d, eps):
    k = RbfKernel(eps, d, 0.0)
    r = np.linspace(0, 3.0 / eps, 200)
    np.testing.assert_allclose(k.frac_lap_phi(r), k.phi(r), rtol=1e-12, atol=0)


@settings(max_examples=80, deadline=None)
@given(eps=st.floats(0.2, 4.0), kappa=st.floats(0.25, 4.0), r=st.floats(0.0, 3.0),
       alpha=st.floats(0.05, 2.0), d=st.sampled_from([1, 2, 3]))
def test_scaling_law(eps, kappa, r, alpha, d):
    lhs = RbfKernel(kappa * eps, d, alpha).frac_lap_phi(r)
    rhs = kappa ** alpha * RbfKernel(eps, d, alpha).frac_lap_phi(kappa * r)
    assert abs(lhs - rhs) <= 1e-11 * max(abs(lhs), abs(rhs)) + 1e-300


def test_translation_invariance():
    # the operator value depends on |x - x0| only: shifting both points leaves it unchanged
    rng = np.random.default_rng(3)
    k = RbfKernel(1.7, 2, 1.3)
    x, x0 = rng.normal(size=(20, 2)), rng.normal(size=(20, 2))
    shift = np.array([12.5, -7.25])
    r1 = np.linalg.norm(x - x0, axis=1)
    r2 = np.linalg.norm((x + shift) - (x0 + shift), axis=1)
    np.testing.assert_allclose(k.frac_lap_phi(r2), k.frac_lap_phi(r1), rtol=1e-11)


@pytest.mark.parametrize("r", [0.3, 1.1])
def test_finite_difference_1d(r):
    eps, h = 1.3, 1e-4
    k = RbfKernel(eps, 1, 2.0)
    f = lambda x: math.exp(-eps * eps * x * x)
    fd = -(-f(r + 2 * h) + 16 * f(r + h) - 30 * f(r) + 16 * f(r - h) - f(r - 2 * h)) / (12 * h * h)
    assert abs(fd - k.frac_lap_phi(r)) < 1e-6


@pytest.mark.parametrize("r", [0.3, 1.1])
def test_finite_difference_2d(r):
    eps, h = 0.9, 1e-4
    k = RbfKernel(eps, 2, 2.0)
    f = lambda x, y: math.exp(-eps * eps * (x * x + y * y))
    x, y = r / math.sqrt(2), r / math.sqrt(2)
    lap = (f(x + h, y) + f(x - h, y) + f(x, y + h) + f(x, y - h) - 4 * f(x, y)) / (h * h)
    assert abs(-lap - k.frac_lap_phi(r)) < 1e-5


def test_fractional_values_between_limits():
    # sanity: at r = 0 the value is c_{d,a}|eps|^a which grows with alpha for eps > 1
    vals = [RbfKernel(2.0, 2, a).frac_lap_phi(0.0) for a in (0.0, 0.5, 1.0, 1.5, 2.0)]
    assert vals[0] == 1.0 and np.all(np.diff(vals) > 0)


def test_pairwise_distances():
    x = np.array([[0.0, 0.0], [3.0, 4.0]])
    np.testing.assert_allclose(pairwise_distances(x, x), [[0, 5], [5, 0]])
    assert pairwise_distances(np.array([0.0, 1.0]).reshape(-1, 1), np.array([[2.0]])).shape == (2, 1)
