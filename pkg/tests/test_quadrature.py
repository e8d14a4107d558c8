import math

import numpy as np
import pytest
from scipy import integrate

from rbffrac.errors import DataError
from rbffrac.geometry import Disk, Interval, Rectangle, SquareMinusDisk
from rbffrac.kernel import RbfKernel
from rbffrac.quadrature import QuadratureSpec, exterior_data_integral, exterior_kernel_integral, \
    exterior_kernel_integrals


# --------------------------------------------------------------------------- #
# brute-force oracles
# --------------------------------------------------------------------------- #

def midpoint(f, a, b, n):
    h = (b - a) / n
    x = a + h * (np.arange(n) + 0.5)
    return h * np.sum(f(x))


def brute_1d_kernel(a, b, xk, xi, eps, alpha, n=10**6):
    """Dense midpoint rule on both half-lines, cut where the Gaussian is below e^{-900}."""
    f = lambda y: np.exp(-eps * eps * (y - xi) ** 2) / np.abs(xk - y) ** (1 + alpha)
    span = 30.0 / abs(eps) + abs(xi) + max(abs(a), abs(b))
    return midpoint(f, b, b + span, n) + midpoint(f, a - span, a, n)


def brute_1d_data(a, b, xk, g, alpha, n=10**6, far=1e8):
    """Dense midpoint rule in s = log(|y - x_k|) out to |y - x_k| = far."""
    total = 0.0
    for sign, edge in ((1, b), (-1, a)):
        s0, s1 = math.log(abs(edge - xk)), math.log(far)
        f = lambda s, sign=sign: g(xk + sign * np.exp(s)) * np.exp(-alpha * s)
        total += midpoint(f, s0, s1, n)
    return total


def polar_disk_kernel(center, radius, xk, xi, eps, alpha):
    """scipy dblquad over rho > radius around the disk center (independent of x_k)."""
    cx, cy = center
    f = lambda th, rho: (rho * math.exp(-eps * eps * ((cx + rho * math.cos(th) - xi[0]) ** 2
                                                      + (cy + rho * math.sin(th) - xi[1]) ** 2))
                         / math.hypot(cx + rho * math.cos(th) - xk[0], cy + rho * math.sin(th) - xk[1])
                         ** (2 + alpha))
    rmax = radius + np.linalg.norm(np.subtract(xi, center)) + 9.0 / eps
    return integrate.dblquad(f, radius, rmax, 0.0, 2 * math.pi, epsabs=1e-13, epsrel=1e-11)[0]


# --------------------------------------------------------------------------- #
# kernel integral
# --------------------------------------------------------------------------- #

def test_interval_example_vs_midpoint():
    k = RbfKernel(1.0, 1, 1.0)
    fast = exterior_kernel_integral(Interval(-1, 1), 0.0, 0.0, k)
    f = lambda y: np.exp(-y * y) / y ** 2
    brute = 2 * midpoint(f, 1.0, 40.0, 10**6)
    assert abs(fast - brute) < 1e-6 * brute


def test_random_interval_configurations():
    rng = np.random.default_rng(5)
    for _ in range(30):
        a = rng.uniform(-3, -0.5)
        b = a + rng.uniform(0.8, 4)
        xk = rng.uniform(a + 0.05 * (b - a), b - 0.05 * (b - a))
        xi = rng.uniform(a, b)
        eps = rng.uniform(0.5, 5)
        alpha = rng.choice([0.3, 1.0, 1.7])
        fast = exterior_kernel_integral(Interval(a, b), xk, xi, RbfKernel(eps, 1, alpha))
        brute = brute_1d_kernel(a, b, xk, xi, eps, alpha)
        assert abs(fast - brute) <= 1e-6 * abs(brute) + 1e-14


@pytest.mark.parametrize("seed", range(12))
def test_random_disk_configurations(seed):
    rng = np.random.default_rng(100 + seed)
    center = rng.uniform(-1, 1, 2)
    radius = rng.uniform(0.5, 1.5)
    r_k, r_i = radius * np.sqrt(rng.uniform(0, 0.8, 2))
    t_k, t_i = rng.uniform(0, 2 * np.pi, 2)
    xk = center + r_k * np.array([math.cos(t_k), math.sin(t_k)])
    xi = center + r_i * np.array([math.cos(t_i), math.sin(t_i)])
    eps = rng.uniform(1.0, 4.0)
    alpha = [0.3, 1.0, 1.7][seed % 3]
    fast = exterior_kernel_integral(Disk(tuple(center), radius), xk, xi, RbfKernel(eps, 2, alpha))
    brute = polar_disk_kernel(center, radius, xk, xi, eps, alpha)
    assert abs(fast - brute) <= 1e-6 * abs(brute) + 1e-14


def test_rectangle_vs_dblquad():
    eps, alpha = 1.5, 0.8
    xk, xi = np.array([0.3, -0.4]), np.array([-0.5, 0.6])
    f = lambda y, x: (math.exp(-eps * eps * ((x - xi[0]) ** 2 + (y - xi[1]) ** 2))
                      / math.hypot(x - xk[0], y - xk[1]) ** (2 + alpha))
    L = 8.0
    opts = dict(epsabs=1e-14, epsrel=1e-11)
    brute = (integrate.dblquad(f, 1, L, -L, L, **opts)[0] + integrate.dblquad(f, -L, -1, -L, L, **opts)[0]
             + integrate.dblquad(f, -1, 1, 1, L, **opts)[0] + integrate.dblquad(f, -1, 1, -L, -1, **opts)[0])
    fast = exterior_kernel_integral(Rectangle((-1, -1), (1, 1)), xk, xi, RbfKernel(eps, 2, alpha))
    assert abs(fast - brute) <= 1e-6 * brute


def test_square_minus_disk_hole_part():
    # difference between the holed and plain square is exactly the hole integral
    eps, alpha = 1.2, 1.3
    xk, xi = np.array([0.7, 0.2]), np.array([-0.6, 0.55])
    k = RbfKernel(eps, 2, alpha)
    holed = exterior_kernel_integral(SquareMinusDisk(1.0, 0.5), xk, xi, k)
    plain = exterior_kernel_integral(Rectangle((-1, -1), (1, 1)), xk, xi, k)
    f = lambda th, rho: (rho * math.exp(-eps * eps * ((rho * math.cos(th) - xi[0]) ** 2
                                                      + (rho * math.sin(th) - xi[1]) ** 2))
                         / math.hypot(rho * math.cos(th) - xk[0], rho * math.sin(th) - xk[1]) ** (2 + alpha))
    hole = integrate.dblquad(f, 0, 0.5, 0, 2 * math.pi, epsabs=1e-14, epsrel=1e-12)[0]
    assert abs((holed - plain) - hole) <= 1e-8 * hole


def test_vector_matches_scalar():
    dom = Disk((0.0, 0.0), 1.0)
    k = RbfKernel(2.0, 2, 1.1)
    xk = np.array([0.2, 0.1])
    centers = np.array([[0.0, 0.0], [0.5, -0.3], [-0.7, 0.2]])
    vec = exterior_kernel_integrals(dom, xk, centers, k)
    for v, c in zip(vec, centers):
        assert abs(v - exterior_kernel_integral(dom, xk, c, k)) <= 1e-14 * v


def test_epsilon_monotone():
    dom = Disk((0.0, 0.0), 1.0)
    xk, xi = np.array([0.3, 0.0]), np.array([0.1, 0.2])
    vals = [exterior_kernel_integral(dom, xk, xi, RbfKernel(e, 2, 1.0)) for e in (1.0, 5.0, 50.0)]
    assert vals[2] < vals[1] < vals[0]


def test_radially_symmetric_case_independent_of_angles():
    dom = Disk((0.0, 0.0), 1.0)
    for alpha in (0.4, 1.0, 1.8):
        k = RbfKernel(1.3, 2, alpha)
        a = exterior_kernel_integral(dom, [0, 0], [0, 0], k, QuadratureSpec(n_angles=16))
        b = exterior_kernel_integral(dom, [0, 0], [0, 0], k, QuadratureSpec(n_angles=512))
        assert abs(a - b) <= 1e-13 * b
        # closed form: 2 pi int_1^inf exp(-eps^2 r^2) r^{-1-alpha} dr
        ref = 2 * math.pi * integrate.quad(lambda r: math.exp(-1.69 * r * r) * r ** (-1 - alpha),
                                           1, np.inf, epsabs=0, epsrel=1e-13)[0]
        assert abs(a - ref) <= 1e-10 * ref


def test_positivity():
    rng = np.random.default_rng(8)
    dom = SquareMinusDisk(1.0, 0.5)
    for _ in range(10):
        while True:
            xk = rng.uniform(-1, 1, 2)
            if dom.contains(xk[None, :])[0]:
                break
        xi = rng.uniform(-1, 1, 2)
        k = RbfKernel(rng.uniform(0.5, 6), 2, rng.uniform(0.1, 1.9))
        assert exterior_kernel_integral(dom, xk, xi, k) >= 0


def test_near_boundary_growth():
    dom = Disk((0.0, 0.0), 1.0)
    k = RbfKernel(2.0, 2, 1.2)
    xi = np.array([0.0, 0.3])
    vals = [exterior_kernel_integral(dom, [1 - d, 0.0], xi, k) for d in (0.2, 0.1, 0.05)]
    assert vals[0] <= vals[1] <= vals[2]


@pytest.mark.parametrize("domain", [Interval(-1.0, 2.0), Disk((0.2, -0.1), 1.1), Rectangle((-1, -1), (1, 2)),
                                    SquareMinusDisk(1.0, 0.5)])
def test_translation_consistency(domain):
    shift = np.array([3.25, -1.5])[: domain.dim]
    xk = np.array([0.7, 0.35])[: domain.dim]
    xi = np.array([-0.4, 0.2])[: domain.dim]
    k = RbfKernel(1.7, domain.dim, 0.9)
    g = lambda Y: 1.0 / (1.0 + np.sum((np.asarray(Y) - xi) ** 2, axis=1))
    g_shift = lambda Y: g(np.asarray(Y) - shift)
    moved = domain.translated(shift)
    a = exterior_kernel_integral(domain, xk, xi, k)
    b = exterior_kernel_integral(moved, xk + shift, xi + shift, k)
    assert abs(a - b) <= 1e-11 * abs(a)
    a = exterior_data_integral(domain, xk, g, 0.9, tail_exponent_hint=2.0)
    b = exterior_data_integral(moved, xk + shift, g_shift, 0.9, tail_exponent_hint=2.0)
    assert abs(a - b) <= 1e-11 * abs(a)


# --------------------------------------------------------------------------- #
# data integral
# --------------------------------------------------------------------------- #

def test_zero_data_is_exactly_zero():
    for dom, xk in ((Interval(-1, 1), 0.1), (Disk((0, 0), 1), [0.2, 0.3]), (SquareMinusDisk(), [0.8, 0.0])):
        zero = lambda Y: np.zeros(len(Y))
        assert exterior_data_integral(dom, xk, zero, 1.0) == 0.0


def test_constant_data_closed_form():
    one = lambda Y: np.ones(len(Y))
    v = exterior_data_integral(Interval(-1, 1), 0.0, one, 1.0, QuadratureSpec(truncation_tail_tol=1e-13))
    assert abs(v - 2.0) < 1e-10
    # general alpha, off-centre: int 1/|x-y|^{1+a} = ((1-x)^{-a} + (1+x)^{-a}) / a
    x, a = 0.3, 1.4
    v = exterior_data_integral(Interval(-1, 1), x, one, a)
    assert abs(v - ((1 - x) ** -a + (1 + x) ** -a) / a) < 1e-10
    # disk centre: 2 pi / alpha
    v = exterior_data_integral(Disk((0, 0), 1), [0.0, 0.0], one, 0.7)
    assert abs(v - 2 * math.pi / 0.7) < 1e-9


def test_lorentzian_data_vs_brute_force():
    g = lambda Y: 1.0 / (1.0 + np.ravel(Y) ** 2)
    for xk, alpha in ((0.0, 1.0), (1.5, 0.4), (-1.9, 1.6)):
        fast = exterior_data_integral(Interval(-2, 2), xk, g, alpha, tail_exponent_hint=2.0)
        brute = brute_1d_data(-2, 2, xk, lambda y: 1.0 / (1.0 + y * y), alpha)
        assert abs(fast - brute) <= 1e-8 * abs(brute)


def test_random_interval_data_configurations():
    rng = np.random.default_rng(21)
    for _ in range(8):
        a = rng.uniform(-2, -0.5)
        b = a + rng.uniform(1, 3)
        xk = rng.uniform(a + 0.1, b - 0.1)
        c = rng.uniform(-1, 1)
        alpha = rng.choice([0.3, 1.0, 1.7])
        gfun = lambda y, c=c: np.exp(-(y - c) ** 2) + 1.0 / (1.0 + y * y)
        fast = exterior_data_integral(Interval(a, b), xk, lambda Y: gfun(np.ravel(Y)), alpha,
                                      tail_exponent_hint=2.0)
        brute = brute_1d_data(a, b, xk, gfun, alpha)
        assert abs(fast - brute) <= 1e-6 * abs(brute)


def test_errors():
    k = RbfKernel(1.0, 1, 1.0)
    with pytest.raises(ValueError):
        exterior_kernel_integral(Interval(-1, 1), 1.0, 0.0, k)
    with pytest.raises(ValueError):
        exterior_kernel_integral(Disk((0, 0), 1), [1.5, 0.0], [0.0, 0.0], RbfKernel(1.0, 2, 1.0))
    with pytest.raises(DataError):
        exterior_data_integral(Interval(-1, 1), 0.0, lambda Y: np.full(len(Y), np.nan), 1.0)
    with pytest.raises(ValueError):
        QuadratureSpec(rel_tol=0.0)
    with pytest.raises(ValueError):
        QuadratureSpec(n_angles=8)
