"""Complex special-function kernels: log-Gamma, Pochhammer symbols and the
Gauss hypergeometric function on the negative real axis.

The hypergeometric evaluator is the workhorse behind every Jacobi function in
the package, so it is compiled with numba and works elementwise on arrays.

For ``z < 0`` the Pfaff transformation

    F(a, b; c; z) = (1 - z)**(-a) F(a, c - b; c; w),    w = z / (z - 1)

moves the argument into ``[0, 1)``.  The remaining series is summed either
directly in ``w`` or, after the ``w -> 1 - w`` connection formula, in
``1 - w``.  The route is picked per point from an a-posteriori rounding-error
estimate (largest summand times machine epsilon), so large complex parameters
never get summed through catastrophic cancellation.  Accuracy is tuned for
the parameter family the library needs, ``a, b = (varrho +- i lambda) / 2`` with
real ``c``; when both ``a`` and ``b`` carry large imaginary parts of the same
sign every route cancels and only about 1e-9 relative accuracy remains.  When the connection
formula is degenerate (``c - a - b`` close to an integer) the value is taken as
the mean over a small circle in ``a``; ``F`` is entire in ``a`` so the mean value
property makes this exact up to the trapezoid error.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numba
import numpy as np

from .errors import ConvergenceError, PoleError

__all__ = [
    "SeriesConfig",
    "DEFAULT_SERIES",
    "log_gamma",
    "pochhammer",
    "gauss_2f1",
    "jacobi_table",
]


@dataclass(frozen=True)
class SeriesConfig:
    """Truncation controls for the hypergeometric series.

    Attributes
    ----------
    max_terms : int
        Hard cap on the number of summed terms per series.
    abs_tol : float
        Absolute floor below which a result counts as converged regardless of
        its relative accuracy.
    rel_tol : float
        Relative accuracy a series must reach before ``max_terms``.
    """

    max_terms: int = 10000
    abs_tol: float = 1e-300
    rel_tol: float = 1e-13

    def __post_init__(self):
        if self.max_terms < 1:
            raise ValueError("max_terms must be >= 1")
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("tolerances must be positive")


DEFAULT_SERIES = SeriesConfig()

_EPS = 2.220446049250313e-16
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)
# B_2k / (2k (2k - 1)) for k = 1..9
_STIRLING = np.array([
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
    43867.0 / 244188.0,
])

# degeneracy guard for the connection formula
_DEGEN_DIST = 0.01
_CIRCLE_RADIUS = 0.02
_CIRCLE_POINTS = 64
# below this many predicted terms the w-series is used even when degenerate
_W_ONLY_TERMS = 400.0
# accept the first route when its error is below this fraction of its scale
_ACCEPT = 1e-13

_OK, _NONCONV, _POLE = 0, 1, 2


# --------------------------------------------------------------------------
# compiled kernels
# --------------------------------------------------------------------------

@numba.njit(cache=True)
def _is_nonpos_int(z):
    return z.imag == 0.0 and z.real <= 0.0 and z.real == math.floor(z.real)


@numba.njit(cache=True)
def _lgamma(z):
    """Principal-branch log Gamma; returns inf at poles."""
    if _is_nonpos_int(z):
        return complex(np.inf, 0.0)
    if z.imag == 0.0 and z.real > 0.0:
        return complex(math.lgamma(z.real), 0.0)
    acc = 0j
    while z.real < 12.0:
        acc += cmath.log(z)
        z += 1.0
    inv = 1.0 / z
    inv2 = inv * inv
    corr = 0j
    p = inv
    for k in range(_STIRLING.shape[0]):
        corr += _STIRLING[k] * p
        p *= inv2
    return (z - 0.5) * cmath.log(z) - z + _HALF_LOG_2PI + corr - acc


@numba.njit(cache=True)
def _series(a, b, c, x, max_terms, rel_tol):
    """Sum 2F1(a, b; c; x) for 0 <= x < 1.

    Returns (sum, largest |term|, converged flag).
    """
    s = 1.0 + 0j
    term = 1.0 + 0j
    big = 1.0
    if x == 0.0:
        return s, big, True
    for n in range(max_terms):
        ratio = (a + n) * (b + n) / ((c + n) * (n + 1.0)) * x
        term *= ratio
        s += term
        at = abs(term)
        if at > big:
            big = at
        if at == 0.0:
            return s, big, True
        if abs(ratio) < 1.0 and at <= 0.25 * _EPS * abs(s):
            return s, big, True
    return s, big, abs(term) <= rel_tol * abs(s)


@numba.njit(cache=True)
def _route_w(A, B, C, w, logpref, max_terms, rel_tol):
    """Direct series in w.

    Returns (value, rounding-error estimate, natural scale, converged).
    """
    s, big, ok = _series(A, B, C, w, max_terms, rel_tol)
    pref = cmath.exp(logpref)
    val = pref * s
    err = 8.0 * _EPS * (big * abs(pref) + abs(val))
    return val, err, abs(val), ok


@numba.njit(cache=True)
def _connection_coefs(A, B, C):
    """Log Gamma-coefficients of the two branches of the 1 - w connection.

    Returns (log coef 1, branch 1 present, log coef 2, branch 2 present).
    A branch is absent when its reciprocal Gamma factor vanishes.
    """
    d = C - A - B
    lgC = _lgamma(C)
    lc1 = 0j
    lc2 = 0j
    has1 = not (_is_nonpos_int(C - A) or _is_nonpos_int(C - B))
    has2 = not (_is_nonpos_int(A) or _is_nonpos_int(B))
    if has1:
        lc1 = lgC + _lgamma(d) - _lgamma(C - A) - _lgamma(C - B)
    if has2:
        lc2 = lgC + _lgamma(-d) - _lgamma(A) - _lgamma(B)
    return lc1, has1, lc2, has2


@numba.njit(cache=True)
def _route_1mw(A, B, C, L, logpref, coefs, max_terms, rel_tol):
    """Connection formula around w = 1 with 1 - w = exp(-L).

    Assumes C - A - B is not an integer.  The natural scale is the sum of the
    two branch magnitudes: cancellation between branches is a property of the
    function itself, not a loss of accuracy.
    """
    lc1, has1, lc2, has2 = coefs
    one_minus_w = math.exp(-L)
    d = C - A - B
    val = 0j
    err = 0.0
    scale = 0.0
    ok = True
    if has1:
        s1, big1, ok1 = _series(A, B, 1.0 - d, one_minus_w, max_terms, rel_tol)
        coef = cmath.exp(logpref + lc1)
        val += coef * s1
        err += 8.0 * _EPS * big1 * abs(coef)
        scale += abs(coef * s1)
        ok = ok and ok1
    if has2:
        s2, big2, ok2 = _series(C - A, C - B, 1.0 + d, one_minus_w, max_terms, rel_tol)
        coef = cmath.exp(logpref + lc2 - d * L)
        val += coef * s2
        err += 8.0 * _EPS * big2 * abs(coef)
        scale += abs(coef * s2)
        ok = ok and ok2
    err += 8.0 * _EPS * scale
    return val, err, scale, ok


@numba.njit(cache=True)
def _predicted_terms(a, b, c, x):
    """Rough number of terms the series in x needs (x in [0, 1))."""
    if x <= 0.0:
        return 1.0
    lx = -math.log(x)
    # terms grow while |ab| x / n**2 > 1, then decay geometrically
    peak = math.sqrt(abs(a) * abs(b) * x)
    return peak + 40.0 / max(lx, 1e-300)


@numba.njit(cache=True)
def _hyp2f1_routes(a, b, c, z, max_terms, rel_tol, allow_w, allow_1mw, coefs, have_coefs):
    """2F1 for z < 0 via the cheaper allowed route, with a fallback.

    ``coefs`` are the connection coefficients of (a, c - b, c) when
    ``have_coefs`` is set; otherwise they are computed on demand.
    Returns (value, error estimate, converged).
    """
    L = math.log1p(-z)             # log(1 - z) > 0
    w = z / (z - 1.0)
    A = a
    B = c - b
    C = c
    logpref = -A * L
    n_w = _predicted_terms(A, B, C, w)
    n_1mw = _predicted_terms(A, B, C, math.exp(-L))
    use_w_first = allow_w and (n_w <= n_1mw or not allow_1mw)
    if use_w_first:
        v1, e1, s1, ok1 = _route_w(A, B, C, w, logpref, max_terms, rel_tol)
        other_ok = allow_1mw and n_1mw < max_terms
    else:
        if not have_coefs:
            coefs = _connection_coefs(A, B, C)
            have_coefs = True
        v1, e1, s1, ok1 = _route_1mw(A, B, C, L, logpref, coefs, max_terms, rel_tol)
        other_ok = allow_w and n_w < max_terms
    if (ok1 and e1 <= _ACCEPT * s1) or not other_ok:
        return v1, e1, ok1
    if use_w_first:
        if not have_coefs:
            coefs = _connection_coefs(A, B, C)
        v2, e2, s2, ok2 = _route_1mw(A, B, C, L, logpref, coefs, max_terms, rel_tol)
    else:
        v2, e2, s2, ok2 = _route_w(A, B, C, w, logpref, max_terms, rel_tol)
    if ok1 and (not ok2 or e1 <= e2):
        return v1, e1, ok1
    if ok2:
        return v2, e2, ok2
    if e1 <= e2:
        return v1, e1, False
    return v2, e2, False


@numba.njit(cache=True)
def _canonical(a, b):
    # a fixed order keeps F(a, b) and F(b, a) bit-identical
    if (b.real < a.real) or (b.real == a.real and b.imag < a.imag):
        return b, a
    return a, b


@numba.njit(cache=True)
def _is_degenerate(a, b):
    # after Pfaff the connection exponent is c - a - (c - b) = b - a
    d = b - a
    k = round(d.real)
    return abs(d - k) < _DEGEN_DIST



@numba.njit(cache=True)
def _hyp2f1_degenerate(a, b, c, z, max_terms, rel_tol):
    w = z / (z - 1.0)
    if _predicted_terms(a, c - b, c, w) <= _W_ONLY_TERMS:
        v, e, ok = _hyp2f1_routes(a, b, c, z, max_terms, rel_tol, True, False,
                                  (0j, False, 0j, False), False)
        return v, (_OK if ok else _NONCONV)
    # mean over a circle in a; every point is safely non-degenerate
    acc = 0j
    allok = True
    for j in range(_CIRCLE_POINTS):
        theta = 2.0 * math.pi * (j + 0.5) / _CIRCLE_POINTS
        aj = a + _CIRCLE_RADIUS * cmath.exp(1j * theta)
        vj, ej, okj = _hyp2f1_routes(aj, b, c, z, max_terms, rel_tol, False, True,
                                     (0j, False, 0j, False), False)
        acc += vj
        allok = allok and okj
    return acc / _CIRCLE_POINTS, (_OK if allok else _NONCONV)


@numba.njit(cache=True)
def _hyp2f1_scalar(a, b, c, z, max_terms, rel_tol):
    """Returns (value, status)."""
    if _is_nonpos_int(c):
        return complex(np.nan, np.nan), _POLE
    if z == 0.0:
        return 1.0 + 0j, _OK
    a, b = _canonical(a, b)
    if _is_degenerate(a, b):
        return _hyp2f1_degenerate(a, b, c, z, max_terms, rel_tol)
    v, e, ok = _hyp2f1_routes(a, b, c, z, max_terms, rel_tol, True, True,
                              (0j, False, 0j, False), False)
    return v, (_OK if ok else _NONCONV)


@numba.njit(cache=True)
def _jacobi_pairs(mu, tau, lam, t, max_terms, rel_tol, out, status):
    """phi_lam^(mu, tau)(t) for paired arrays.

    Runs of equal ``lam`` share their connection coefficients, so a
    lambda-major table costs a handful of log-Gamma calls per row.
    """
    varrho = mu + tau + 1.0
    c = complex(mu + 1.0, 0.0)
    prev = complex(np.nan, np.nan)
    a = 0j
    b = 0j
    degenerate = False
    coefs = (0j, False, 0j, False)
    for i in range(lam.shape[0]):
        if lam[i] != prev:
            prev = lam[i]
            a, b = _canonical((varrho + 1j * prev) / 2.0, (varrho - 1j * prev) / 2.0)
            degenerate = _is_degenerate(a, b)
            if not degenerate:
                coefs = _connection_coefs(a, c - b, c)
        ti = t[i]
        if ti == 0.0:
            out[i] = 1.0
            status[i] = _OK
            continue
        z = -math.sinh(ti) ** 2
        if degenerate:
            out[i], status[i] = _hyp2f1_degenerate(a, b, c, z, max_terms, rel_tol)
        else:
            v, e, ok = _hyp2f1_routes(a, b, c, z, max_terms, rel_tol, True, True, coefs, True)
            out[i] = v
            status[i] = _OK if ok else _NONCONV


@numba.njit(cache=True)
def _hyp2f1_array(a, b, c, z, max_terms, rel_tol, out, status):
    for i in range(a.shape[0]):
        out[i], status[i] = _hyp2f1_scalar(a[i], b[i], c[i], z[i], max_terms, rel_tol)


@numba.njit(cache=True)
def _lgamma_array(z, out):
    for i in range(z.shape[0]):
        out[i] = _lgamma(z[i])


# --------------------------------------------------------------------------
# public API
# --------------------------------------------------------------------------

def _scalar_or_array(arr, shape):
    if shape == ():
        return arr.reshape(())[()]
    return arr.reshape(shape)


def log_gamma(z):
    """Principal branch of ``log Gamma(z)`` for complex ``z`` (scalar or array).

    The branch is the analytic continuation from the positive real axis with
    the cut along the negative real axis, i.e. the branch for which
    ``log_gamma(z + 1) = log_gamma(z) + log(z)``.

    Raises
    ------
    PoleError
        If any ``z`` is a nonpositive integer.
    """
    zz = np.asarray(z, dtype=np.complex128)
    flat = np.ascontiguousarray(zz.ravel())
    bad = (flat.imag == 0) & (flat.real <= 0) & (flat.real == np.floor(flat.real))
    if np.any(bad):
        raise PoleError(f"log_gamma has a pole at {flat[bad][0].real:g}")
    out = np.empty_like(flat)
    _lgamma_array(flat, out)
    return _scalar_or_array(out, zz.shape)


def pochhammer(z, m):
    """Rising factorial ``(z)_m = Gamma(z + m) / Gamma(z)``.

    Nonnegative integer ``m`` is evaluated as the finite product
    ``z (z + 1) ... (z + m - 1)``, which stays valid at the Gamma poles.
    Other ``m`` go through the log-Gamma difference.
    """
    m = float(m)
    if m < 0:
        raise ValueError("pochhammer order must be nonnegative")
    zz = np.asarray(z, dtype=np.complex128)
    if m == math.floor(m):
        out = np.ones_like(zz)
        for k in range(int(m)):
            out = out * (zz + k)
        return out[()] if zz.shape == () else out
    try:
        return np.exp(log_gamma(zz + m) - log_gamma(zz))
    except PoleError as exc:
        raise PoleError(f"(z)_m with non-integer m={m} hits a Gamma pole") from exc


def gauss_2f1(a, b, c, z, config: SeriesConfig = DEFAULT_SERIES):
    """Gauss hypergeometric function ``2F1(a, b; c; z)`` for real ``z <= 0``.

    Parameters broadcast against each other; ``a``, ``b``, ``c`` may be complex.

    Raises
    ------
    PoleError
        If ``c`` is a nonpositive integer.
    ConvergenceError
        If no summation route reaches ``config.rel_tol`` within
        ``config.max_terms`` terms.
    """
    a_, b_, c_, z_ = np.broadcast_arrays(
        np.asarray(a, dtype=np.complex128),
        np.asarray(b, dtype=np.complex128),
        np.asarray(c, dtype=np.complex128),
        np.asarray(z, dtype=np.float64),
    )
    shape = a_.shape
    if np.any(z_ > 0):
        raise ValueError("gauss_2f1 only supports z <= 0")
    flat = [np.ascontiguousarray(x.ravel()) for x in (a_, b_, c_, z_)]
    out = np.empty(flat[0].shape, dtype=np.complex128)
    status = np.empty(flat[0].shape, dtype=np.int64)
    _hyp2f1_array(*flat, int(config.max_terms), float(config.rel_tol), out, status)
    if np.any(status == _POLE):
        raise PoleError("2F1 parameter c is a nonpositive integer")
    if np.any(status == _NONCONV):
        i = int(np.argmax(status == _NONCONV))
        raise ConvergenceError(
            f"2F1 series did not converge within {config.max_terms} terms "
            f"(a={flat[0][i]}, b={flat[1][i]}, c={flat[2][i]}, z={flat[3][i]})"
        )
    return _scalar_or_array(out, shape)


def jacobi_table(mu: float, tau: float, lam, t, config: SeriesConfig = DEFAULT_SERIES):
    """``2F1((varrho + i lam)/2, (varrho - i lam)/2; mu + 1; -sinh(t)**2)`` broadcast.

    Same values as :func:`gauss_2f1` on the Jacobi parameter family, but the
    connection coefficients are shared along runs of equal ``lam`` (put
    ``lam`` on the leading axis for tables).
    """
    lam_b, t_b = np.broadcast_arrays(np.asarray(lam, dtype=np.complex128),
                                     np.asarray(t, dtype=np.float64))
    shape = lam_b.shape
    lam_f = np.ascontiguousarray(lam_b.ravel())
    t_f = np.ascontiguousarray(t_b.ravel())
    if float(mu) + 1.0 <= 0 and float(mu) == math.floor(mu):
        raise PoleError("mu + 1 is a nonpositive integer")
    out = np.empty(lam_f.shape, dtype=np.complex128)
    status = np.empty(lam_f.shape, dtype=np.int64)
    _jacobi_pairs(float(mu), float(tau), lam_f, t_f, int(config.max_terms),
                  float(config.rel_tol), out, status)
    if np.any(status == _NONCONV):
        i = int(np.argmax(status == _NONCONV))
        raise ConvergenceError(
            f"Jacobi series did not converge (lambda={lam_f[i]}, t={t_f[i]})"
        )
    return _scalar_or_array(out, shape)
