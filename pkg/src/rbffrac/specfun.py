"""Real-argument special functions: Gamma, digamma, 1F1, 2F1 and the two
normalisation constants of the fractional Laplacian.

Everything here is plain numpy. ``hyp1f1`` and ``hyp2f1`` accept a scalar or an
array for ``z`` (parameters are scalars) and return a :class:`SpecFunResult`
whose fields have the shape of ``z``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

__all__ = [
    "SpecFunResult",
    "gamma",
    "rgamma",
    "digamma",
    "hyp1f1",
    "hyp2f1",
    "coeff_c",
    "coeff_C",
]

# Series stop when |term| < _SERIES_RTOL * |partial sum| or after _MAX_TERMS terms.
_SERIES_RTOL = 1e-17
_MAX_TERMS = 500
# Below this |x| the Kummer-transformed Maclaurin series is used for 1F1(a; b; -x).
_KUMMER_SWITCH = 40.0
# distance below which c - a - b counts as an integer in the 2F1 connection formula
_INT_TOL = 1e-9


@dataclass(frozen=True)
class SpecFunResult:
    """Function value together with a heuristic absolute error bound."""

    value: float | np.ndarray
    est_abs_error: float | np.ndarray


# --------------------------------------------------------------------------- #
# Gamma family
# --------------------------------------------------------------------------- #

_LANCZOS_G = 607.0 / 128.0
_LANCZOS_COEF = np.array([
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    0.33994649984811888699e-4,
    0.46523628927048575665e-4,
    -0.98374475304879564677e-4,
    0.15808870322491248884e-3,
    -0.21026444172410488319e-3,
    0.21743961811521264320e-3,
    -0.16431810653676389022e-3,
    0.84418223983852743293e-4,
    -0.26190838401581408670e-4,
    0.36899182659531622704e-5,
])
_SQRT_2PI = math.sqrt(2.0 * math.pi)


def _is_nonpos_int(x: float) -> bool:
    return x <= 0 and x == math.floor(x)


def _check_finite(*vals):
    for v in vals:
        if not np.all(np.isfinite(v)):
            raise DomainError("non-finite argument")


def _lanczos(x: float) -> float:
    """Gamma(x) for x >= 0.5 via the Lanczos approximation."""
    z = x - 1.0
    acc = _LANCZOS_COEF[0]
    for k in range(1, len(_LANCZOS_COEF)):
        acc += _LANCZOS_COEF[k] / (z + k)
    t = z + _LANCZOS_G + 0.5
    # split t**(z+0.5) so the intermediate does not overflow before exp(-t) kicks in
    half = t ** ((z + 0.5) / 2.0)
    return _SQRT_2PI * half * (half * math.exp(-t)) * acc


def _gamma_scalar(x: float) -> float:
    if _is_nonpos_int(x):
        raise DomainError(f"gamma has a pole at {x}")
    if x == math.floor(x) and 1 <= x <= 23:
        return float(math.factorial(int(x) - 1))
    if x < 0.5:
        s = math.sin(math.pi * x)
        if abs(x) > 171.0:
            # 1/Gamma(1-x) underflows; the true value is below the smallest subnormal
            return 0.0
        return math.pi / (s * _lanczos(1.0 - x))
    if x > 171.6:
        raise OverflowError(f"gamma({x}) overflows double precision")
    val = _lanczos(x)
    if not math.isfinite(val):
        raise OverflowError(f"gamma({x}) overflows double precision")
    return val


def gamma(x):
    """Gamma function for real ``x`` that is not a non-positive integer.

    Raises :class:`DomainError` at the poles and :class:`OverflowError` when the
    result exceeds double precision (``x`` above about 171.6).
    """
    _check_finite(x)
    if np.ndim(x) == 0:
        return _gamma_scalar(float(x))
    arr = np.asarray(x, dtype=float)
    return np.array([_gamma_scalar(v) for v in arr.ravel()]).reshape(arr.shape)


def rgamma(x: float) -> float:
    """Reciprocal Gamma function, equal to 0 at the poles."""
    x = float(x)
    _check_finite(x)
    if _is_nonpos_int(x):
        return 0.0
    if x > 171.6:
        return 0.0
    return 1.0 / _gamma_scalar(x)


def digamma(x: float) -> float:
    """Logarithmic derivative of Gamma for real ``x`` off the poles."""
    x = float(x)
    _check_finite(x)
    if _is_nonpos_int(x):
        raise DomainError(f"digamma has a pole at {x}")
    if x < 0.5:
        return digamma(1.0 - x) - math.pi / math.tan(math.pi * x)
    acc = 0.0
    while x < 10.0:
        acc -= 1.0 / x
        x += 1.0
    inv2 = 1.0 / (x * x)
    # Bernoulli-number asymptotic series
    tail = inv2 * (1.0 / 12 - inv2 * (1.0 / 120 - inv2 * (1.0 / 252 - inv2 * (
        1.0 / 240 - inv2 * (1.0 / 132 - inv2 * (691.0 / 32760 - inv2 / 12.0))))))
    return acc + math.log(x) - 0.5 / x - tail


# --------------------------------------------------------------------------- #
# 1F1
# --------------------------------------------------------------------------- #

def _series_1f1(a: float, b: float, x: np.ndarray):
    """Maclaurin series of 1F1(a; b; x) for an array x, summed with active masks."""
    total = np.ones_like(x)
    term = np.ones_like(x)
    err = np.zeros_like(x)
    active = np.arange(x.size)
    for k in range(1, _MAX_TERMS + 1):
        if active.size == 0:
            break
        term[active] *= (a + k - 1) / (b + k - 1) * x[active] / k
        total[active] += term[active]
        err[active] = np.abs(term[active])
        done = np.abs(term[active]) < _SERIES_RTOL * np.abs(total[active])
        # a terminating series (a a non-positive integer) ends with an exact zero
        done |= term[active] == 0.0
        active = active[~done]
    return total, err


def _asymptotic_sum(p: float, q: float, inv: np.ndarray):
    """Sum_s (p)_s (q)_s / s! * inv**s, truncated at its smallest term."""
    total = np.ones_like(inv)
    term = np.ones_like(inv)
    err = np.zeros_like(inv)
    prev = np.full_like(inv, np.inf)
    active = np.arange(inv.size)
    for s in range(1, _MAX_TERMS + 1):
        if active.size == 0:
            break
        new = term[active] * (p + s - 1) * (q + s - 1) / s * inv[active]
        # stop an index as soon as its terms start to grow
        keep = np.abs(new) < prev[active]
        idx = active[keep]
        term[idx] = new[keep]
        total[idx] += new[keep]
        err[idx] = np.abs(new[keep])
        prev[idx] = np.abs(new[keep])
        done = (np.abs(new[keep]) < _SERIES_RTOL * np.abs(total[idx])) | (new[keep] == 0.0)
        active = idx[~done]
    return total, err


def hyp1f1(a: float, b: float, z) -> SpecFunResult:
    """Confluent hypergeometric function 1F1(a; b; z) for real z <= 0.

    For |z| <= 40 the Kummer transform exp(z) 1F1(b-a; b; -z) is summed, which
    has no cancellation. Beyond that the large-argument expansion (algebraic
    plus exponentially small part) is truncated at its smallest term.
    """
    _check_finite(a, b, z)
    if b <= 0:
        raise DomainError("hyp1f1 requires b > 0")
    zarr = np.atleast_1d(np.asarray(z, dtype=float))
    if np.any(zarr > 0):
        raise DomainError("hyp1f1 is implemented for z <= 0 only")
    x = -zarr.ravel()
    val = np.empty_like(x)
    err = np.empty_like(x)

    small = x <= _KUMMER_SWITCH
    if np.any(small):
        xs = x[small]
        s, e = _series_1f1(b - a, b, xs)
        ex = np.exp(-xs)
        val[small] = ex * s
        err[small] = ex * e
    big = ~small
    if np.any(big):
        xb = x[big]
        inv = 1.0 / xb
        gb = gamma(b)
        alg, alg_err = _asymptotic_sum(a, a - b + 1.0, inv)
        alg_pref = gb * rgamma(b - a) * xb ** (-a)
        v = alg_pref * alg
        e = np.abs(alg_pref) * alg_err
        exp_coef = gb * rgamma(a) * math.cos(math.pi * (a - b))
        if exp_coef != 0.0:
            ex, ex_err = _asymptotic_sum(1.0 - a, b - a, -inv)
            pref = exp_coef * np.exp(-xb) * xb ** (a - b)
            v = v + pref * ex
            e = e + np.abs(pref) * ex_err
        val[big] = v
        err[big] = e

    err = err + 2.2e-16 * np.abs(val)
    shape = np.shape(z)
    if shape == ():
        return SpecFunResult(float(val[0]), float(err[0]))
    return SpecFunResult(val.reshape(shape), err.reshape(shape))


# --------------------------------------------------------------------------- #
# 2F1
# --------------------------------------------------------------------------- #

def _series_2f1(a, b, c, z):
    """Gauss series for an array z with |z| <= 1/2 (or terminating parameters)."""
    total = np.ones_like(z)
    term = np.ones_like(z)
    err = np.zeros_like(z)
    active = np.arange(z.size)
    for k in range(1, _MAX_TERMS + 1):
        if active.size == 0:
            break
        term[active] *= (a + k - 1) * (b + k - 1) / ((c + k - 1) * k) * z[active]
        total[active] += term[active]
        err[active] = np.abs(term[active])
        done = (np.abs(term[active]) < _SERIES_RTOL * np.abs(total[active])) | (term[active] == 0.0)
        active = active[~done]
    return total, err


def _terminating_2f1(a, b, c, z):
    orders = [-p for p in (a, b) if _is_nonpos_int(p)]
    n = int(round(min(orders)))
    total = np.ones_like(z)
    term = np.ones_like(z)
    for k in range(1, n + 1):
        term = term * ((a + k - 1) * (b + k - 1) / ((c + k - 1) * k)) * z
        total = total + term
    return total, np.zeros_like(z)


def _near_one_integer(a, b, m, w):
    """2F1(a, b; a+b+m; w) for integer m >= 0 and w in (1/2, 1)."""
    c = a + b + m
    y = 1.0 - w
    logy = np.log(y)
    gc = gamma(c)
    out = np.zeros_like(w)
    if m > 0:
        pref = gamma(m) * gc * rgamma(a + m) * rgamma(b + m)
        term = np.ones_like(w)
        acc = np.ones_like(w)
        for n in range(1, m):
            term = term * (a + n - 1) * (b + n - 1) / (n * (n - m)) * y
            acc = acc + term
        out += pref * acc
    pref2 = -((-1) ** m) * gc * rgamma(a) * rgamma(b)
    if pref2 == 0.0:
        return out, 2.2e-16 * np.abs(out)
    # running digammas psi(n+1), psi(n+m+1), psi(a+n+m), psi(b+n+m)
    p1 = digamma(1.0)
    p2 = digamma(m + 1.0)
    pa = digamma(a + m)
    pb = digamma(b + m)
    coef = 1.0 / math.factorial(m)
    acc = np.zeros_like(w)
    err = np.zeros_like(w)
    ypow = np.ones_like(w)
    for n in range(_MAX_TERMS):
        bracket = logy - p1 - p2 + pa + pb
        t = coef * ypow * bracket
        acc = acc + t
        err = np.abs(t)
        if np.all(np.abs(t) <= _SERIES_RTOL * np.abs(acc)) or coef == 0.0:
            break
        coef *= (a + m + n) * (b + m + n) / ((n + 1) * (n + m + 1))
        ypow = ypow * y
        p1 += 1.0 / (n + 1)
        p2 += 1.0 / (n + m + 1)
        pa += 1.0 / (a + n + m)
        pb += 1.0 / (b + n + m)
    body = pref2 * (y ** m) * acc
    return out + body, abs(pref2) * (y ** m) * err


def _f_unit(a, b, c, w):
    """2F1(a, b; c; w) for w in [0, 1), non-terminating parameters."""
    val = np.empty_like(w)
    err = np.empty_like(w)
    low = w <= 0.5
    if np.any(low):
        v, e = _series_2f1(a, b, c, w[low])
        val[low], err[low] = v, e
    high = ~low
    if np.any(high):
        wh = w[high]
        m = c - a - b
        mi = round(m)
        if abs(m - mi) < _INT_TOL:
            if mi >= 0:
                v, e = _near_one_integer(a, b, int(mi), wh)
            else:
                # Euler: (1-w)^m 2F1(c-a, c-b; c; w) has c' - a' - b' = -m > 0
                v, e = _near_one_integer(c - a, c - b, int(-mi), wh)
                scale = (1.0 - wh) ** mi
                v, e = v * scale, e * scale
        else:
            y = 1.0 - wh
            gc = gamma(c)
            p1 = gc * gamma(m) * rgamma(c - a) * rgamma(c - b)
            p2 = gc * gamma(-m) * rgamma(a) * rgamma(b)
            v = np.zeros_like(wh)
            e = np.zeros_like(wh)
            if p1 != 0.0:
                s1, e1 = _series_2f1(a, b, a + b - c + 1.0, y)
                v += p1 * s1
                e += abs(p1) * e1
            if p2 != 0.0:
                s2, e2 = _series_2f1(c - a, c - b, m + 1.0, y)
                ym = y ** m
                v += p2 * ym * s2
                e += abs(p2) * ym * e2
        val[high], err[high] = v, e
    return val, err


def hyp2f1(a: float, b: float, c: float, z) -> SpecFunResult:
    """Gauss hypergeometric function 2F1(a, b; c; z) for real z < 1.

    Terminating parameters are summed exactly. Otherwise negative z is mapped by
    the Pfaff transform into [0, 1), where the series is used up to 1/2 and the
    1 - z connection formula beyond (with the logarithmic variant when c - a - b
    is an integer).
    """
    _check_finite(a, b, c, z)
    if _is_nonpos_int(c):
        raise DomainError("hyp2f1 requires c not a non-positive integer")
    zarr = np.atleast_1d(np.asarray(z, dtype=float)).ravel()
    if np.any(zarr >= 1.0):
        raise DomainError("hyp2f1 is implemented for z < 1 only")

    if _is_nonpos_int(a) or _is_nonpos_int(b):
        val, err = _terminating_2f1(a, b, c, zarr)
    elif _is_nonpos_int(c - a) or _is_nonpos_int(c - b):
        # Euler transform turns it into a polynomial
        poly, err = _terminating_2f1(c - a, c - b, c, zarr)
        scale = (1.0 - zarr) ** (c - a - b)
        val, err = poly * scale, err
    else:
        val = np.empty_like(zarr)
        err = np.empty_like(zarr)
        pos = zarr >= 0
        if np.any(pos):
            v, e = _f_unit(a, b, c, zarr[pos])
            val[pos], err[pos] = v, e
        neg = ~pos
        if np.any(neg):
            zn = zarr[neg]
            w = zn / (zn - 1.0)
            scale = (1.0 - zn) ** (-a)
            v, e = _f_unit(a, c - b, c, w)
            val[neg], err[neg] = scale * v, scale * e
    err = np.abs(err) + 4.4e-16 * np.abs(val)
    shape = np.shape(z)
    if shape == ():
        return SpecFunResult(float(val[0]), float(err[0]))
    return SpecFunResult(val.reshape(shape), err.reshape(shape))


# --------------------------------------------------------------------------- #
# Normalisation constants
# --------------------------------------------------------------------------- #

def coeff_c(d: int, alpha: float) -> float:
    """2**alpha * Gamma((d+alpha)/2) / Gamma(d/2), the Gaussian-symbol prefactor."""
    if d < 1:
        raise ValueError("dimension must be >= 1")
    if not 0.0 <= alpha <= 2.0:
        raise DomainError("alpha must lie in [0, 2]")
    return 2.0 ** alpha * gamma((d + alpha) / 2.0) / gamma(d / 2.0)


def coeff_C(d: int, alpha: float) -> float:
    """Normalisation constant of the singular-integral fractional Laplacian.

    Defined only for 0 < alpha < 2, where Gamma(1 - alpha/2) is finite.
    """
    if d < 1:
        raise ValueError("dimension must be >= 1")
    if not 0.0 < alpha < 2.0:
        raise DomainError("coeff_C requires 0 < alpha < 2")
    return (2.0 ** (alpha - 1.0) * alpha * gamma((alpha + d) / 2.0)
            / (math.pi ** (d / 2.0) * gamma(1.0 - alpha / 2.0)))
