"""Spherical functions, their K-type generalizations and spectral weights.

All evaluators broadcast over ``lam`` and ``t``.

Conventions
-----------
``phi_lambda^(mu, tau)(t) = 2F1((varrho + i lam)/2, (varrho - i lam)/2; mu + 1; -sinh(t)**2)``
with ``varrho = mu + tau + 1``.  It is even in ``lam``, equals 1 at ``t = 0`` and
solves ``L phi = -(lam**2 + varrho**2) phi`` for the radial operator with
parameters ``(mu, tau)``.

The Harish-Chandra function is

    c(lam) = 2**(varrho - i lam) Gamma(mu + 1) Gamma(i lam)
             / (Gamma((i lam + varrho)/2) Gamma((i lam + mu - tau + 1)/2))

so that ``exp(varrho t) phi_lam(t) ~ c(lam) exp(i lam t) + c(-lam) exp(-i lam t)``
for large ``t`` and real ``lam != 0``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List

import numpy as np
from scipy.integrate import solve_ivp

from .errors import PoleError, PreconditionError, StripError
from .geometry import JacobiParams, KType, RankOneSpace
from .special import DEFAULT_SERIES, SeriesConfig, jacobi_table, log_gamma, pochhammer

__all__ = [
    "T_LIMIT",
    "jacobi_phi",
    "phi_zero",
    "jacobi_phi_dlambda",
    "c_function",
    "plancherel_density",
    "KostantPolynomial",
    "kostant_q",
    "kostant_zero_set",
    "gen_spherical_radial",
    "gen_spherical_adjoint",
    "bray_lower_constant",
    "jacobi_phi_ode",
]

# sinh(t)**2 overflows a double past t ~ 355
T_LIMIT = 300.0
# Cauchy-contour derivative: number of nodes on the circle
_CAUCHY_NODES = 32
_MAX_DERIVATIVE = 4


def _strip_bound(params: JacobiParams) -> float:
    return 2.0 * params.varrho + 4.0


def _check_t(t: np.ndarray) -> None:
    if np.any(t < 0) or np.any(~np.isfinite(t)):
        raise PreconditionError("t must be finite and nonnegative")
    if np.any(t > T_LIMIT):
        raise PreconditionError(f"t above {T_LIMIT:g} is not supported")


def _phi_unchecked(mu: float, tau: float, lam, t, config: SeriesConfig):
    return jacobi_table(mu, tau, lam, t, config)


def jacobi_phi(params: JacobiParams, lam, t, config: SeriesConfig = DEFAULT_SERIES):
    """Jacobi function ``phi_lam^(mu, tau)(t)``.

    Parameters
    ----------
    params : JacobiParams
    lam : complex or array
        Spectral parameter; ``|Im lam| <= 2 varrho + 4``.
    t : float or array
        Radial coordinate in ``[0, 300]``.

    Returns
    -------
    complex or ndarray
        Broadcast over ``lam`` and ``t``.
    """
    lam_arr = np.asarray(lam, dtype=complex)
    t_arr = np.asarray(t, dtype=float)
    _check_t(t_arr)
    if np.any(np.abs(lam_arr.imag) > _strip_bound(params)):
        raise StripError(f"|Im lambda| must not exceed {_strip_bound(params):g}")
    return _phi_unchecked(params.mu, params.tau, lam_arr, t_arr, config)


def phi_zero(space: RankOneSpace, t):
    """Ground spherical function ``phi_0(t)`` of the space (real, in ``(0, 1]``)."""
    out = np.real(jacobi_phi(space.jacobi_params(), 0.0, t))
    return out[()] if np.ndim(out) == 0 else out


def jacobi_phi_dlambda(params: JacobiParams, lam, t, k: int,
                       config: SeriesConfig = DEFAULT_SERIES):
    """``k``-th derivative of ``phi_lam(t)`` in ``lam`` (``1 <= k <= 4``).

    Computed as a Cauchy integral over a circle around ``lam`` with the
    trapezoid rule; the radius shrinks like ``1 / (1 + t)`` so the values on
    the circle stay of the size of ``phi`` itself.
    """
    if int(k) != k or not (1 <= k <= _MAX_DERIVATIVE):
        raise PreconditionError(f"derivative order must be an integer in 1..{_MAX_DERIVATIVE}")
    k = int(k)
    lam_arr, t_arr = np.broadcast_arrays(np.asarray(lam, dtype=complex),
                                         np.asarray(t, dtype=float))
    _check_t(t_arr)
    if np.any(np.abs(lam_arr.imag) > _strip_bound(params)):
        raise StripError(f"|Im lambda| must not exceed {_strip_bound(params):g}")
    radius = np.minimum(1.0, (k + 1.0) / (1.0 + t_arr))
    theta = 2.0 * np.pi * (np.arange(_CAUCHY_NODES) + 0.5) / _CAUCHY_NODES
    unit = np.exp(1j * theta)
    pts = lam_arr[..., None] + radius[..., None] * unit
    vals = _phi_unchecked(params.mu, params.tau, pts, t_arr[..., None], config)
    coef = np.mean(vals * unit ** (-k), axis=-1)
    out = math.factorial(k) * coef / radius ** k
    return out[()] if out.ndim == 0 else out


def _log_gamma_or_pole(z):
    """log Gamma with ``-inf`` real part at poles (for reciprocal use)."""
    z = np.asarray(z, dtype=complex)
    pole = (z.imag == 0) & (z.real <= 0) & (z.real == np.floor(z.real))
    out = np.full(z.shape, -np.inf + 0j)
    if np.any(~pole):
        out[~pole] = log_gamma(z[~pole])
    return out, pole


def c_function(params: JacobiParams, lam):
    """Harish-Chandra c-function of the Jacobi pair ``(mu, tau)``.

    Raises
    ------
    PoleError
        At ``lam = 0`` and wherever ``Gamma(i lam)`` has a pole.
    """
    lam = np.asarray(lam, dtype=complex)
    il = 1j * lam
    pole = (il.imag == 0) & (il.real <= 0) & (il.real == np.floor(il.real))
    if np.any(pole):
        raise PoleError("c-function has a pole (i lambda is a nonpositive integer)")
    mu, tau, varrho = params.mu, params.tau, params.varrho
    lg_a, _ = _log_gamma_or_pole((il + varrho) / 2)
    lg_b, _ = _log_gamma_or_pole((il + mu - tau + 1) / 2)
    # a pole in the denominator makes c vanish: exp(-inf) = 0
    with np.errstate(invalid="ignore"):
        logc = ((varrho - il) * math.log(2.0) + log_gamma(mu + 1.0) + log_gamma(il)
                - lg_a - lg_b)
        out = np.where(np.isinf(lg_a.real) | np.isinf(lg_b.real), 0j, np.exp(logc))
    return out[()] if out.ndim == 0 else out


def plancherel_density(params: JacobiParams, lam):
    """``|c(lam)|**-2`` for real ``lam``, continuous through ``lam = 0``.

    Uses ``1/|Gamma(i lam)|**2 = lam**2 / |Gamma(1 + i lam)|**2`` and, for the
    Gamma factors that may sit at the origin, ``|Gamma(x)| = |Gamma(x+1)| / |x|``,
    so the limit at ``lam = 0`` is exact.
    """
    lam = np.abs(np.asarray(lam, dtype=float))
    mu, tau, varrho = params.mu, params.tau, params.varrho
    a = (varrho + 1j * lam) / 2
    b = (mu - tau + 1 + 1j * lam) / 2
    log_const = -2 * varrho * math.log(2.0) - 2 * math.lgamma(mu + 1.0)
    log_body = (2 * np.real(log_gamma(a + 1)) + 2 * np.real(log_gamma(b + 1))
                - 2 * np.real(log_gamma(1 + 1j * lam)))
    # lam**2 / (|a|**2 |b|**2), with the 0/0 cases resolved
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = lam ** 2 / (np.abs(a) ** 2 * np.abs(b) ** 2)
    for x_real in (varrho / 2, (mu - tau + 1) / 2):
        if x_real == 0:
            other = (mu - tau + 1) / 2 if x_real == varrho / 2 else varrho / 2
            limit = 4.0 / other ** 2
            ratio = np.where(lam == 0, limit, ratio)
    out = ratio * np.exp(log_const + log_body)
    return out[()] if out.ndim == 0 else out


# --------------------------------------------------------------------------
# Kostant polynomials and generalized spherical functions
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class KostantPolynomial:
    """The polynomial ``Q_delta(1 + i lam)`` of a K-type.

    ``degree`` is the degree in ``i lam``, which equals ``r``.
    """

    space: RankOneSpace
    ktype: KType

    def __post_init__(self):
        self.space.check_ktype(self.ktype)

    @property
    def degree(self) -> int:
        return self.ktype.r

    def _orders(self):
        r, s = self.ktype.r, self.ktype.s
        return (r + s) / 2, (r - s) / 2

    def __call__(self, lam):
        """``Q_delta(1 + i lam)``; use ``-lam`` for ``Q_delta(1 - i lam)``."""
        lam = np.asarray(lam, dtype=complex)
        alpha, beta = self.space.alpha, self.space.beta
        m1, m2 = self._orders()
        x = alpha + beta + 1 + 1j * lam
        if m1 == int(m1) and m2 == int(m2):
            out = pochhammer(x / 2, m1) * pochhammer((alpha - beta + 1 + 1j * lam) / 2, m2)
        elif beta == -0.5:
            # duplication: (x/2)_{r/2} ((x+1)/2)_{r/2} = 2**-r (x)_r
            out = pochhammer(x, self.ktype.r) * 2.0 ** (-self.ktype.r)
        else:
            out = pochhammer(x / 2, m1) * pochhammer((alpha - beta + 1 + 1j * lam) / 2, m2)
        return out[()] if np.ndim(out) == 0 else out

    def zeros(self) -> List[complex]:
        """The ``r`` roots in ``lam``, all on the imaginary axis."""
        alpha, beta = self.space.alpha, self.space.beta
        m1, m2 = self._orders()
        if m1 == int(m1) and m2 == int(m2):
            # (x/2 + j) = 0  <=>  lam = i (x0 + 2 j)
            roots = [1j * (alpha + beta + 1 + 2 * j) for j in range(int(m1))]
            roots += [1j * (alpha - beta + 1 + 2 * j) for j in range(int(m2))]
        else:
            roots = [1j * (alpha + beta + 1 + k) for k in range(self.ktype.r)]
        return sorted(roots, key=lambda z: z.imag)


def kostant_q(space: RankOneSpace, ktype: KType, lam):
    """``Q_delta(1 + i lam)`` for the K-type ``ktype`` of ``space``."""
    return KostantPolynomial(space, ktype)(lam)


def kostant_zero_set(space: RankOneSpace, ktype: KType) -> List[complex]:
    """Roots in ``lam`` of ``Q_delta(1 + i lam)``."""
    return KostantPolynomial(space, ktype).zeros()


def _gen_factor(space: RankOneSpace, ktype: KType, t):
    """``(alpha+1)_r**-1 sinh^r cosh^s`` times the reflection factor, and params."""
    params = space.jacobi_params(ktype)
    r, s = ktype.r, ktype.s
    t = np.asarray(t, dtype=float)
    tau_raw = space.beta + s
    cosh_power = s if params.tau == tau_raw else s - 2 * tau_raw
    poch = float(np.real(pochhammer(space.alpha + 1, r)))
    fac = np.sinh(t) ** r * np.cosh(t) ** cosh_power / poch
    return params, fac


def gen_spherical_radial(space: RankOneSpace, ktype: KType, lam, t,
                         config: SeriesConfig = DEFAULT_SERIES):
    """Radial generalized spherical function ``phi_{lam, delta}(t)``.

    ``Q(1 + i lam) (alpha + 1)_r**-1 sinh^r t cosh^s t phi_lam^(alpha + r, beta + s)(t)``.
    For ``beta + s < -1/2`` the Jacobi factor is rewritten with the reflected
    parameter ``-(beta + s)`` and an extra ``cosh`` power, which is exact.
    """
    params, fac = _gen_factor(space, ktype, t)
    q = kostant_q(space, ktype, lam)
    return q * fac * jacobi_phi(params, lam, t, config)


def gen_spherical_adjoint(space: RankOneSpace, ktype: KType, lam, t,
                          config: SeriesConfig = DEFAULT_SERIES):
    """Kernel of the delta-spherical transform, ``conj(phi_{conj(lam), delta}(t))``.

    Equal to ``Q(1 - i lam) (alpha + 1)_r**-1 sinh^r cosh^s phi_lam^(alpha+r, beta+s)``,
    holomorphic in ``lam``.  For ``r = 0`` it coincides with
    :func:`gen_spherical_radial`.
    """
    params, fac = _gen_factor(space, ktype, t)
    q = kostant_q(space, ktype, -np.asarray(lam, dtype=complex))
    return q * fac * jacobi_phi(params, lam, t, config)


def bray_lower_constant(Lambda: float, mu: float, tau: float) -> float:
    """Lower bound ``exp(-(2 + mu + tau)/Lambda) cos(1/Lambda)``.

    Bounds ``|phi_lam^(mu, tau)(1/|lam|**2)|`` from below for ``|lam| > Lambda``.
    """
    if not Lambda > 2.0 / math.pi:
        raise PreconditionError("Lambda must exceed 2/pi")
    if mu < -0.5 or tau < -0.5:
        raise PreconditionError("need mu, tau >= -1/2")
    return math.exp(-(2.0 + mu + tau) / Lambda) * math.cos(1.0 / Lambda)


def jacobi_phi_ode(params: JacobiParams, lam: complex, t, t_start: float = 0.05,
                   rtol: float = 1e-12, atol: float = 1e-14):
    """Independent evaluation of ``phi_lam(t)`` by integrating the ODE.

    Starts from the power series at ``t_start`` (summed directly, no
    transformation) and integrates
    ``phi'' + ((2 mu + 1) coth t + (2 tau + 1) tanh t) phi' + (lam**2 + varrho**2) phi = 0``
    with an 8th-order Runge-Kutta method.  Intended as a cross-check, not for
    production use.  ``t`` must be increasing and ``>= t_start``.
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(np.diff(t) <= 0) or t[0] < t_start:
        raise PreconditionError("ODE output times must increase from t_start")
    mu, tau, varrho = params.mu, params.tau, params.varrho
    lam = complex(lam)
    a, b, c = (varrho + 1j * lam) / 2, (varrho - 1j * lam) / 2, mu + 1.0
    z0 = -math.sinh(t_start) ** 2
    val, der, term_v, term_d = 1 + 0j, 0j, 1 + 0j, a * b / c + 0j
    der = term_d
    for n in range(1, 200):
        term_v *= (a + n - 1) * (b + n - 1) / ((c + n - 1) * n) * z0
        term_d *= (a + n) * (b + n) / ((c + n) * n) * z0
        val += term_v
        der += term_d
        if abs(term_v) < 1e-18 and abs(term_d) < 1e-18:
            break
    dphi = der * (-2.0 * math.sinh(t_start) * math.cosh(t_start))
    eig = lam * lam + varrho * varrho
    # integrate psi = exp(varrho t) phi, which stays of order one
    grow = math.exp(varrho * t_start)
    psi0, dpsi0 = grow * val, grow * (dphi + varrho * val)

    def rhs(s, y):
        coef = (2 * mu + 1) / math.tanh(s) + (2 * tau + 1) * math.tanh(s)
        psi, dpsi = y
        return [dpsi, (2 * varrho - coef) * dpsi + (varrho * coef - varrho ** 2 - eig) * psi]

    sol = solve_ivp(rhs, (t_start, t[-1]), [psi0, dpsi0], method="DOP853",
                    t_eval=t, rtol=rtol, atol=atol)
    if not sol.success:
        raise PreconditionError(f"ODE integration failed: {sol.message}")
    return sol.y[0] * np.exp(-varrho * t)
