import math

import mpmath as mp
import numpy as np
import pytest

from rankone.errors import KTypeError, PoleError, PreconditionError, StripError
from rankone.geometry import JacobiParams, KType, RankOneSpace, SpectralStrip
from rankone.spherical import (
    KostantPolynomial,
    bray_lower_constant,
    c_function,
    gen_spherical_adjoint,
    gen_spherical_radial,
    jacobi_phi,
    jacobi_phi_dlambda,
    jacobi_phi_ode,
    kostant_q,
    kostant_zero_set,
    phi_zero,
    plancherel_density,
)

from conftest import COS_PARAMS, SIN_PARAMS

PARAMS = [JacobiParams(0.5, -0.5), JacobiParams(1.0, 0.0), JacobiParams(1.5, 0.5),
          JacobiParams(3.0, 2.0), JacobiParams(0.25, -0.5)]


def test_phi_examples():
    assert jacobi_phi(SIN_PARAMS, 1.7, 0.0) == 1
    assert abs(jacobi_phi(COS_PARAMS, 3.0, 0.7) - math.cos(2.1)) < 1e-14
    ref = math.sin(2) / (2 * math.sinh(1))
    assert abs(jacobi_phi(SIN_PARAMS, 2.0, 1.0) - ref) < 1e-13


@pytest.mark.parametrize("params", PARAMS)
def test_phi_matches_mpmath(params):
    rng = np.random.default_rng(3)
    for _ in range(10):
        lam = rng.uniform(0, 30) + 1j * rng.uniform(-params.varrho, params.varrho)
        t = rng.uniform(0, 15)
        rho = params.varrho
        ref = complex(mp.hyp2f1((rho + 1j * lam) / 2, (rho - 1j * lam) / 2,
                                params.mu + 1, -mp.sinh(t) ** 2))
        env = float(mp.hyp2f1(rho / 2, rho / 2, params.mu + 1, -mp.sinh(t) ** 2))
        env *= math.exp(abs(lam.imag) * t)
        assert abs(jacobi_phi(params, lam, t) - ref) <= 1e-11 * max(abs(ref), 1e-3 * env)


def test_phi_evenness_in_strip():
    rng = np.random.default_rng(1)
    for _ in range(100):
        params = PARAMS[rng.integers(len(PARAMS))]
        lam = rng.uniform(-20, 20) + 1j * rng.uniform(-1, 1) * params.varrho
        t = rng.uniform(0, 10)
        assert abs(jacobi_phi(params, lam, t) - jacobi_phi(params, -lam, t)) < 1e-12


def test_phi_normalization():
    rng = np.random.default_rng(2)
    for _ in range(100):
        params = PARAMS[rng.integers(len(PARAMS))]
        lam = rng.uniform(-50, 50) + 1j * rng.uniform(-1, 1) * params.varrho
        assert abs(jacobi_phi(params, lam, 0.0) - 1) < 1e-12


def test_phi_preconditions():
    with pytest.raises(PreconditionError):
        jacobi_phi(SIN_PARAMS, 1.0, -0.1)
    with pytest.raises(PreconditionError):
        jacobi_phi(SIN_PARAMS, 1.0, 400.0)
    with pytest.raises(StripError):
        jacobi_phi(SIN_PARAMS, 1 + 10j, 1.0)


def test_phi_matches_ode_oracle():
    t = np.linspace(0.05, 15, 40)
    for params in PARAMS[:4]:
        for lam in (0.0, 3.0, 0.5j):
            ode = jacobi_phi_ode(params, lam, t)
            env = np.abs(jacobi_phi(params, 1j * abs(np.imag(lam)), t))
            assert np.max(np.abs(ode - jacobi_phi(params, lam, t)) / env) < 1e-9


def test_phi_zero(h3):
    assert phi_zero(h3, 0.0) == 1
    assert phi_zero(h3, 2.0) == pytest.approx(2 / math.sinh(2), rel=1e-13)
    t = np.linspace(0, 30, 301)
    for sp in (h3, RankOneSpace.complex_hyperbolic(2), RankOneSpace.real_hyperbolic(5)):
        v = phi_zero(sp, t)
        assert np.all(v > 0) and np.all(v <= 1 + 1e-15)
        assert np.all(v >= np.exp(-sp.rho * t) * (1 - 1e-12))


def test_imaginary_axis_bound():
    grid = np.linspace(0.15, 3.0, 20)
    for params in (SIN_PARAMS, JacobiParams(1.0, 0.0)):
        lam, t = np.meshgrid(grid, grid, indexing="ij")
        val = jacobi_phi(params, -1j * lam, t)
        assert np.max(np.abs(val.imag)) < 1e-12 * np.max(np.abs(val))
        phi0 = jacobi_phi(params, 0.0, t).real
        assert np.all(val.real > 0)
        assert np.all(val.real <= np.exp(lam * t) * phi0 * (1 + 1e-12))


def test_derivative_examples():
    assert abs(jacobi_phi_dlambda(SIN_PARAMS, 0.0, 2.3, 1)) < 1e-12
    assert abs(jacobi_phi_dlambda(COS_PARAMS, 3.0, 0.7, 1) + 0.7 * math.sin(2.1)) < 1e-12
    assert abs(jacobi_phi_dlambda(COS_PARAMS, 3.0, 0.7, 2) + 0.49 * math.cos(2.1)) < 1e-12
    for t in (0.3, 4.0, 12.0):
        assert abs(jacobi_phi_dlambda(COS_PARAMS, 2.0, t, 3) - t ** 3 * math.sin(2 * t)) < 1e-10 * t ** 3
        assert abs(jacobi_phi_dlambda(COS_PARAMS, 2.0, t, 4) - t ** 4 * math.cos(2 * t)) < 1e-10 * t ** 4
    with pytest.raises(PreconditionError):
        jacobi_phi_dlambda(COS_PARAMS, 1.0, 1.0, 5)


def test_derivative_against_mpmath():
    params = JacobiParams(1.0, 0.0)

    def phi(lam, t):
        return mp.hyp2f1((2 + 1j * lam) / 2, (2 - 1j * lam) / 2, 2, -mp.sinh(t) ** 2)

    for lam, t in ((1.3, 0.8), (4.0, 3.0), (0.5 + 0.5j, 6.0)):
        for k in (1, 2, 3):
            ref = complex(mp.diff(lambda x: phi(x, t), lam, k))
            got = jacobi_phi_dlambda(params, lam, t, k)
            assert abs(got - ref) < 1e-9 * max(1.0, abs(ref))


def test_c_function_examples():
    c = c_function(COS_PARAMS, np.array([1.0, 2.0, 7.5]))
    assert np.allclose(c, 0.5, rtol=0, atol=1e-14)
    dens = abs(c_function(SIN_PARAMS, 2.0)) ** -2 / abs(c_function(SIN_PARAMS, 1.0)) ** -2
    assert dens == pytest.approx(4.0, rel=1e-8)
    with pytest.raises(PoleError):
        c_function(SIN_PARAMS, 0.0)


@pytest.mark.parametrize("params", PARAMS[:4])
@pytest.mark.parametrize("lam", [1.0, 2.0, 5.0, 10.0])
def test_c_function_asymptotic_fit(params, lam):
    # ODE values are independent of the hypergeometric code path
    t = np.linspace(12, 18, 241)
    y = np.exp(params.varrho * t) * jacobi_phi_ode(params, lam, t, t_start=0.05)
    basis = np.stack([np.exp(1j * lam * t), np.exp(-1j * lam * t)], axis=1)
    coef = np.linalg.lstsq(basis, y, rcond=None)[0]
    assert abs(coef[0] / c_function(params, lam) - 1) < 1e-3
    assert abs(coef[1] / c_function(params, -lam) - 1) < 1e-3


def test_c_function_polynomial_bound():
    lam = np.linspace(0.1, 100, 2000)
    for params in PARAMS:
        dens = plancherel_density(params, lam)
        slope = np.polyfit(np.log(lam[-500:]), np.log(dens[-500:]), 1)[0]
        # |c|^-2 grows like |lam|^(2 mu + 1)
        assert slope == pytest.approx(2 * params.mu + 1, abs=0.05)
        const = np.max(dens / (1 + lam) ** (2 * params.mu + 1))
        assert np.all(dens <= const * (1 + lam) ** (2 * params.mu + 1))


def test_plancherel_density_limits():
    assert plancherel_density(SIN_PARAMS, 0.0) == 0
    assert plancherel_density(SIN_PARAMS, 1e-4) == pytest.approx(1e-8, rel=1e-8)
    assert np.allclose(plancherel_density(COS_PARAMS, [0.0, 1e-9, 3.0]), 4.0, atol=1e-13)
    lam = np.array([0.3, 2.0, 17.0])
    for params in PARAMS:
        assert np.allclose(plancherel_density(params, -lam), plancherel_density(params, lam))
        assert np.allclose(plancherel_density(params, lam),
                           np.abs(c_function(params, lam)) ** -2, rtol=1e-12)


def test_kostant_examples(h3, ch2):
    assert kostant_q(h3, KType(0, 0), 1.3 + 2j) == 1
    # direct Pochhammer arithmetic: (1/2 (1 + i0))_1 (1/2 (2 + i0))_1
    assert kostant_q(h3, KType(2, 0), 0.0) == pytest.approx(0.5)
    assert kostant_zero_set(h3, KType(0, 0)) == []
    assert np.allclose(kostant_zero_set(h3, KType(2, 0)), [1j, 2j])
    assert KostantPolynomial(h3, KType(3, 0)).degree == 3
    with pytest.raises(KTypeError):
        kostant_q(ch2, KType(2, 1), 0.0)


def _random_ktype(space, rng):
    while True:
        r = int(rng.integers(0, 7))
        s = int(rng.integers(-r, r + 1)) if space.m_2gamma >= 1 else 0
        if space.admits(KType(r, s)):
            return KType(r, s)


@pytest.mark.parametrize("space", [RankOneSpace.real_hyperbolic(3), RankOneSpace.real_hyperbolic(4),
                                   RankOneSpace.complex_hyperbolic(2), RankOneSpace.complex_hyperbolic(4)])
def test_kostant_zeros_imaginary_and_outside_strip(space):
    rng = np.random.default_rng(9)
    strip = SpectralStrip(1.0)
    for _ in range(20):
        kt = _random_ktype(space, rng)
        poly = KostantPolynomial(space, kt)
        zeros = poly.zeros()
        assert len(zeros) == poly.degree
        for z in zeros:
            assert z.real == 0
            assert abs(poly(z)) < 1e-9 * max(1.0, abs(poly(0.0)))
            assert abs(z.imag) >= strip.half_width(space) * 0.5
        # no zero strictly inside the unit-normalized strip
        assert all(abs(z.imag) >= strip.epsilon for z in zeros)
        # degree check through growth
        big = abs(poly(1e4)) / abs(poly(2e4))
        assert big == pytest.approx(2.0 ** -poly.degree, rel=1e-3)


def test_gen_spherical_trivial_type(h3):
    lam, t = 2.5 + 0.3j, np.linspace(0, 4, 9)
    assert np.allclose(gen_spherical_radial(h3, KType(0, 0), lam, t),
                       jacobi_phi(h3.jacobi_params(), lam, t), rtol=0, atol=0)


def test_gen_spherical_vanishes_at_origin(h3, ch2):
    assert gen_spherical_radial(h3, KType(2, 0), 1.0, 0.0) == 0
    assert gen_spherical_radial(ch2, KType(1, -1), 1.0, 0.0) == 0


@pytest.mark.parametrize("delta", [KType(2, 0), KType(2, 2), KType(2, -2), KType(3, -1)])
def test_kostant_symmetry_identity(ch2, delta):
    rng = np.random.default_rng(4)
    lam = rng.uniform(-10, 10, 50) + 1j * rng.uniform(-1, 1, 50)
    t = rng.uniform(0, 5, 50)
    lhs = kostant_q(ch2, delta, -lam) * gen_spherical_radial(ch2, delta, lam, t)
    rhs = kostant_q(ch2, delta, lam) * gen_spherical_radial(ch2, delta, -lam, t)
    scale = np.abs(kostant_q(ch2, delta, lam) * kostant_q(ch2, delta, -lam))
    assert np.max(np.abs(lhs - rhs) / scale) < 1e-10


def test_negative_s_rewrite_is_exact(ch2):
    # evaluate the unreflected Jacobi function directly and compare
    delta = KType(2, -2)
    lam, t = 1.7, np.array([0.3, 1.0, 2.5])
    mu, tau = ch2.alpha + 2, ch2.beta - 2
    rho = mu + tau + 1
    direct = np.array([complex(mp.hyp2f1((rho + 1j * lam) / 2, (rho - 1j * lam) / 2, mu + 1,
                                         -mp.sinh(x) ** 2)) for x in t])
    q = kostant_q(ch2, delta, lam)
    expected = q / 6.0 * np.sinh(t) ** 2 * np.cosh(t) ** -2 * direct
    assert np.allclose(gen_spherical_radial(ch2, delta, lam, t), expected, rtol=1e-11)


def test_adjoint_is_conjugate_kernel(ch2):
    delta = KType(2, 0)
    lam = np.array([0.7 + 0.4j, 3.0 - 0.2j, 2.0])
    t = 1.3
    lhs = gen_spherical_adjoint(ch2, delta, lam, t)
    rhs = np.conj(gen_spherical_radial(ch2, delta, np.conj(lam), t))
    assert np.allclose(lhs, rhs, rtol=1e-13)
    # for real lam the adjoint kernel differs from phi_{lam, delta} when r > 0
    assert not np.isclose(gen_spherical_adjoint(ch2, delta, 2.0, t),
                          gen_spherical_radial(ch2, delta, 2.0, t))


def test_bray_constant():
    assert bray_lower_constant(1.0, 0.0, 0.0) == pytest.approx(math.exp(-2) * math.cos(1), rel=1e-15)
    assert bray_lower_constant(1e8, 0.5, 0.5) == pytest.approx(1.0, abs=1e-7)
    with pytest.raises(PreconditionError):
        bray_lower_constant(0.6, 0.0, 0.0)


@pytest.mark.parametrize("mu,tau", [(0.0, 0.0), (0.5, -0.5), (1.5, 0.5)])
def test_bray_lower_estimate(mu, tau):
    Lam = 2.0
    lam = np.linspace(Lam, 10 * Lam, 2000)
    val = np.abs(jacobi_phi(JacobiParams(mu, tau), lam, 1.0 / lam ** 2))
    assert np.min(val) >= bray_lower_constant(Lam, mu, tau)
