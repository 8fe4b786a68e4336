"""Machine checks for the estimates and identities the library relies on.

Each check returns an :class:`EstimateReport`.  Claims of the form
"``sup < inf``" are tested by domain doubling: the supremum over the full
sampled domain is compared with the supremum over its first half (in every
sampled variable) and the claim passes when they agree to ``stability_tol``
(1% by default).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .errors import GridError, PreconditionError, RankOneError
from .geometry import (
    JacobiParams,
    KType,
    RadialFunction,
    RadialGrid,
    RankOneSpace,
    SpectralStrip,
    density_delta,
    radial_laplacian,
)
from .spherical import (
    bray_lower_constant,
    gen_spherical_radial,
    jacobi_phi,
    jacobi_phi_dlambda,
    jacobi_phi_ode,
    kostant_q,
    kostant_zero_set,
    phi_zero,
    plancherel_density,
)
from .transforms import (
    KAPPA,
    DEFAULT_QUADRATURE,
    ProjectionField,
    QuadratureConfig,
    delta_spherical_transform,
    inverse_spherical_transform,
    projection_field,
    reconstruct_h,
    spherical_transform,
    transform_at,
)

__all__ = [
    "EstimateReport",
    "VerifyConfig",
    "schwartz_seminorm",
    "schwartz_report",
    "projection_decay_check",
    "kostant_zero_vanishing_check",
    "CHECKS",
    "check_all",
]

PhiEvaluator = Callable[[JacobiParams, object, object], np.ndarray]


@dataclass(frozen=True)
class EstimateReport:
    """Outcome of one check.

    Attributes
    ----------
    name : str
    sup_value : float
        The measured quantity (a supremum, a residual or an error).
    fitted_constants : tuple of (str, float)
    grid : str
        Human-readable description of the sampling.
    passed : bool
    note : str
    """

    name: str
    sup_value: float
    fitted_constants: Tuple[Tuple[str, float], ...] = ()
    grid: str = ""
    passed: bool = False
    note: str = ""

    def __post_init__(self):
        # a pass always carries a finite measurement
        if self.passed and not math.isfinite(self.sup_value):
            object.__setattr__(self, "passed", False)
            object.__setattr__(self, "note", (self.note + "; non-finite value").lstrip("; "))


@dataclass(frozen=True)
class VerifyConfig:
    """Tolerances and sampling for :func:`check_all`."""

    seed: int = 20240611
    identity_tol: float = 1e-10
    quadrature_tol: float = 1e-6
    ode_tol: float = 1e-5
    stability_tol: float = 0.01
    envelope_tol: float = 0.05
    p: float = 1.5
    quadrature: QuadratureConfig = DEFAULT_QUADRATURE


DEFAULT_VERIFY = VerifyConfig()


def _describe(**axes) -> str:
    parts = []
    for name, arr in axes.items():
        arr = np.asarray(arr)
        if arr.size:
            lo, hi = np.min(np.real(arr)), np.max(np.real(arr))
            parts.append(f"{name}[{lo:g},{hi:g}]x{arr.size}")
    return " ".join(parts)


def _relative_change(full: float, half: float) -> float:
    if full == half:
        return 0.0
    return abs(full - half) / max(abs(full), 1e-300)


# --------------------------------------------------------------------------
# seminorms
# --------------------------------------------------------------------------

def _derivative(values: np.ndarray, nodes: np.ndarray, m: int) -> np.ndarray:
    out = np.asarray(values)
    for _ in range(m):
        out = np.gradient(out, nodes, axis=0, edge_order=2)
    return out


def _seminorm_profile(f: RadialFunction, space: RankOneSpace, p: float, m: int, n: int):
    if not (0 < p <= 2):
        raise PreconditionError("p must lie in (0, 2]")
    if m < 0 or n < 0 or int(m) != m or int(n) != n:
        raise PreconditionError("orders m, n must be nonnegative integers")
    nodes = f.grid.nodes
    if f.grid.n < 2 * m + 3:
        raise GridError(f"grid too coarse for derivative order {m}")
    deriv = _derivative(f.values, nodes, int(m))
    # phi_0 ** (-2/p) in log space; phi_0 underflows far out
    log_phi0 = np.log(phi_zero(space, nodes))
    return nodes, np.abs(deriv) * (1 + nodes) ** n * np.exp(-(2.0 / p) * log_phi0)


def schwartz_seminorm(f: RadialFunction, space: RankOneSpace, p: float, m: int, n: int) -> float:
    """``sup_t |d^m f / dt^m| (1 + t)**n phi_0(t)**(-2/p)`` over ``f``'s grid.

    Derivatives are central differences (second-order one-sided at the ends).

    Raises
    ------
    GridError
        If the grid has fewer than ``2 m + 3`` nodes.
    """
    _, profile = _seminorm_profile(f, space, p, m, n)
    return float(np.max(profile))


def schwartz_report(f: RadialFunction, space: RankOneSpace, p: float, m: int, n: int,
                    stability_tol: float = 0.01) -> EstimateReport:
    """Seminorm with a finiteness verdict from domain doubling."""
    nodes, profile = _seminorm_profile(f, space, p, m, n)
    full = float(np.max(profile))
    half = float(np.max(profile[nodes <= 0.5 * nodes[-1]]))
    change = _relative_change(full, half)
    return EstimateReport(
        name=f"schwartz_seminorm_p{p:g}_m{m}_n{n}",
        sup_value=full,
        fitted_constants=(("half_domain_sup", half), ("relative_change", change)),
        grid=_describe(t=nodes),
        passed=change < stability_tol,
        note="" if change < stability_tol else "seminorm grows with t_max: not Schwartz-class",
    )


def projection_decay_check(field: ProjectionField, space: RankOneSpace, p: float, m: int, n: int,
                           s: int, r_p: float, stability_tol: float = 0.01) -> EstimateReport:
    """Weighted supremum of a projection field and its stability.

    Measures ``sup |d^m field / d lam^m| (1 + t)**n (1 + |lam|)**s phi_0(t)**(-r_p)``
    over the real nonnegative nodes of ``field``; ``lam``-derivatives are
    finite differences along the node set.

    Raises
    ------
    PreconditionError
        Unless ``r_p < (2p - 2) / p``.
    """
    if not (0 < p <= 2):
        raise PreconditionError("p must lie in (0, 2]")
    if not r_p < (2 * p - 2) / p:
        raise PreconditionError(f"need r_p < (2p-2)/p = {(2 * p - 2) / p:g}")
    mask = field.real_nodes_mask
    lam = field.lambda_nodes[mask].real
    order = np.argsort(lam)
    lam = lam[order]
    table = field.table[mask][order]
    t = field.t_grid.nodes
    name = f"projection_decay_p{p:g}_m{m}_n{n}_s{s}"
    if lam.size < 2 * m + 3:
        raise GridError(f"need at least {2 * m + 3} real lambda nodes for order {m}")
    if not np.any(table):
        return EstimateReport(name, 0.0, (), _describe(lam=lam, t=t), True, "zero field")
    deriv = _derivative(table, lam, m) if m else table
    log_phi0 = np.log(phi_zero(space, t))
    weight = ((1 + np.abs(lam))[:, None] ** s * (1 + t)[None, :] ** n
              * np.exp(-r_p * log_phi0)[None, :])
    profile = np.abs(deriv) * weight
    full = float(np.max(profile))
    half = float(np.max(profile[np.ix_(lam <= 0.5 * lam[-1], t <= 0.5 * t[-1])]))
    change = _relative_change(full, half)
    return EstimateReport(
        name=name,
        sup_value=full,
        fitted_constants=(("half_domain_sup", half), ("relative_change", change), ("r_p", r_p)),
        grid=_describe(lam=lam, t=t),
        passed=change < stability_tol,
    )


def kostant_zero_vanishing_check(field: ProjectionField, space: RankOneSpace, ktype: KType,
                                 tol: float = 1e-8) -> EstimateReport:
    """Rows of ``field`` at Kostant zeros must vanish.

    The zeros of ``Q(1 + i lam) Q(1 - i lam)`` that lie in the field's strip
    and appear among its nodes are checked; ``max_t |field(lam0, t)|`` is
    measured relative to the largest entry of the table.  Zeros not sampled
    are listed in the note.
    """
    space.check_ktype(ktype)
    name = f"kostant_zero_vanishing_r{ktype.r}_s{ktype.s}"
    zeros = kostant_zero_set(space, ktype)
    if not zeros:
        return EstimateReport(name, 0.0, (), "", True, "no Kostant zeros (vacuous)")
    candidates = sorted(set(zeros) | {-z for z in zeros}, key=lambda z: (z.imag, z.real))
    scale = float(np.max(np.abs(field.table))) if field.table.size else 0.0
    worst, checked, skipped = 0.0, [], []
    for z in candidates:
        hits = np.nonzero(np.abs(field.lambda_nodes - z) < 1e-12 * max(1.0, abs(z)))[0]
        if hits.size == 0 or not field.strip.contains(z, space):
            skipped.append(z)
            continue
        level = float(np.max(np.abs(field.table[hits[0]]))) / scale if scale > 0 else 0.0
        worst = max(worst, level)
        checked.append(z)
    note = ""
    if skipped:
        note = "skipped (not sampled or outside strip): " + ", ".join(f"{z:g}" for z in skipped)
    return EstimateReport(
        name=name,
        sup_value=worst,
        fitted_constants=tuple((f"zero_{k}", float(z.imag)) for k, z in enumerate(checked)),
        grid=_describe(lam=field.lambda_nodes, t=field.t_grid.nodes),
        passed=worst < tol,
        note=note,
    )


# --------------------------------------------------------------------------
# the suite
# --------------------------------------------------------------------------

def _default_phi(params: JacobiParams, lam, t):
    return jacobi_phi(params, lam, t)


def _report(name, value, passed, grid="", note="", **constants) -> EstimateReport:
    return EstimateReport(name, float(value), tuple((k, float(v)) for k, v in constants.items()),
                          grid, bool(passed), note)


def _check_normalization(space, cfg, phi, rng):
    params = space.jacobi_params()
    half = SpectralStrip(cfg.p).half_width(space)
    lam = rng.uniform(0, 20, 100) + 1j * rng.uniform(-half, half, 100)
    err = float(np.max(np.abs(np.asarray(phi(params, lam, np.zeros(100))) - 1)))
    return _report("phi_normalization", err, err < 1e-12, _describe(lam=lam))


def _check_ode(space, cfg, phi, rng):
    params = space.jacobi_params()
    t = np.linspace(0.5, 6.0, 12)
    worst = 0.0
    for lam in (0.0, 1.3, 4.0):
        ref = jacobi_phi_ode(params, lam, t)
        val = np.asarray(phi(params, lam, t))
        worst = max(worst, float(np.max(np.abs(val - ref) / np.maximum(np.abs(ref), 1e-300 + np.exp(-params.varrho * t)))))
    return _report("phi_vs_ode", worst, worst < 1e-8, _describe(t=t))


def _check_eigen(space, cfg, phi, rng):
    params = space.jacobi_params()
    grid = RadialGrid.with_step(5.0, 1e-3)
    worst = 0.0
    for lam in (0.0, 1.0, 5.0):
        vals = np.asarray(phi(params, lam, grid.nodes))
        f = RadialFunction(grid, vals)
        lap = radial_laplacian(f, space)
        keep = lap.grid.nodes >= 0.1
        inner = vals[2:-2][(grid.nodes[2:-2] > 0)][keep]
        resid = np.abs(lap.values[keep] + (lam ** 2 + space.rho ** 2) * inner)
        worst = max(worst, float(np.max(resid) / max(lam ** 2 + space.rho ** 2, 1.0)))
    return _report("eigen_equation", worst, worst < cfg.ode_tol, _describe(t=grid.nodes))


def _check_phi0_sandwich(space, cfg, phi, rng):
    params = space.jacobi_params()
    t = np.linspace(0.0, 30.0, 601)
    phi0 = np.real(np.asarray(phi(params, 0.0, t)))
    lower_ok = bool(np.all(phi0 >= np.exp(-space.rho * t) * (1 - 1e-12)))
    ratio = phi0 * np.exp(space.rho * t)
    # smallest exponent a <= 3 (step 0.05) whose constant c(a) is at most 10
    exponents = np.arange(0.0, 3.0 + 1e-9, 0.05)
    consts = np.array([np.max(ratio / (1 + t) ** e) for e in exponents])
    ok = np.nonzero(consts <= 10.0)[0]
    k = int(ok[0]) if ok.size else exponents.size - 1
    a, c = round(float(exponents[k]), 10), float(consts[k])
    passed = lower_ok and c <= 10 and a <= 3
    return _report("phi0_sandwich", float(np.max(ratio)), passed, _describe(t=t),
                   "" if lower_ok else "lower bound violated", c=c, a=a)


def _check_imaginary_axis(space, cfg, phi, rng):
    params = space.jacobi_params()
    lam = np.linspace(0.15, 3.0, 20)
    t = np.linspace(0.15, 3.0, 20)
    vals = np.asarray(phi(params, -1j * lam[:, None], t[None, :]))
    phi0 = np.real(np.asarray(phi(params, 0.0, t)))
    bound = np.exp(lam[:, None] * t[None, :]) * phi0[None, :]
    positive = bool(np.all(vals.real > 0)) and bool(np.all(np.abs(vals.imag) <= 1e-12 * np.abs(vals.real)))
    excess = float(np.max(vals.real / bound))
    return _report("imaginary_axis_bound", excess, positive and excess <= 1 + 1e-12,
                   _describe(lam=lam, t=t))


def _check_bray(space, cfg, phi, rng):
    Lambda = 2.0
    worst = math.inf
    for params in (JacobiParams(0.0, 0.0), JacobiParams(0.5, -0.5), JacobiParams(1.5, 0.5),
                   space.jacobi_params()):
        lam = np.linspace(Lambda, 10 * Lambda, 400)
        vals = np.abs(np.asarray(phi(params, lam, 1.0 / lam ** 2)))
        floor = bray_lower_constant(Lambda, params.mu, params.tau)
        worst = min(worst, float(np.min(vals) - floor))
    return _report("bray_lower_bound", worst, worst >= 0, "lam[2,20]x400", Lambda=Lambda)


def _check_strip_growth(space, cfg, phi, rng):
    params = space.jacobi_params()
    half = SpectralStrip(cfg.p).half_width(space)
    t = np.linspace(0.0, 10.0, 101)
    re = np.linspace(0.0, 20.0, 81)
    worst = 0.0
    for im in (0.0, half):
        num = np.abs(np.asarray(phi(params, re[:, None] + 1j * im, t[None, :])))
        den = np.real(np.asarray(phi(params, 1j * im, t)))
        worst = max(worst, float(np.max(num / den[None, :])))
    return _report("strip_polynomial_growth", worst, worst <= 1 + 1e-10,
                   _describe(re_lam=re, t=t), "real slice and strip boundary", c=worst)


def _check_derivative_envelope(space, cfg, phi, rng):
    params = space.jacobi_params()
    t = np.linspace(0.0, 80.0, 321)
    lam = np.linspace(0.0, 10.0, 81)
    phi0 = phi_zero(space, t)
    consts, changes = {}, []
    for k in (1, 2):
        d = np.abs(jacobi_phi_dlambda(params, lam[:, None], t[None, :], k))
        ratio = d / ((1 + t)[None, :] ** k * phi0[None, :])
        full = float(np.max(ratio))
        half = float(np.max(ratio[np.ix_(lam <= 5.0, t <= 40.0)]))
        consts[f"C{k}"] = full
        changes.append(_relative_change(full, half))
    worst = max(changes)
    # the sup is approached like t / (1 + t), hence the looser threshold
    return _report("derivative_envelope", worst, worst < cfg.envelope_tol,
                   _describe(lam=lam, t=t), **consts)


def _check_c_function(space, cfg, phi, rng):
    params = space.jacobi_params()
    # the ratio settles like 1 / lam, so sample far out
    lam = np.linspace(0.0, 2000.0, 4001)
    dens = plancherel_density(params, lam)
    ratio = dens / (1 + lam) ** (2 * params.mu + 1)
    full = float(np.max(ratio))
    half = float(np.max(ratio[lam <= 1000.0]))
    change = _relative_change(full, half)
    return _report("c_function_estimate", change, change < cfg.stability_tol,
                   _describe(lam=lam), C=full)


def _check_kostant_symmetry(space, cfg, phi, rng):
    k = KType(2, 0)
    lam = rng.uniform(-10, 10, 50)
    t = rng.uniform(0.0, 5.0, 50)
    lhs = kostant_q(space, k, -lam) * gen_spherical_radial(space, k, lam, t)
    rhs = kostant_q(space, k, lam) * gen_spherical_radial(space, k, -lam, t)
    err = float(np.max(np.abs(lhs - rhs) / np.maximum(np.abs(lhs), 1.0)))
    return _report("kostant_symmetry", err, err < cfg.identity_tol, _describe(lam=lam, t=t))


def _gaussian(grid):
    return RadialFunction.from_callable(lambda s: np.exp(-np.asarray(s) ** 2), grid)


def _l2(values, space, grid):
    return math.sqrt(float(np.trapezoid(np.abs(values) ** 2 * density_delta(space, grid.nodes), grid.nodes)))


def _check_round_trip(space, cfg, phi, rng):
    grid = RadialGrid.uniform(8.0, 401)
    f = _gaussian(grid)
    q = cfg.quadrature
    ft = spherical_transform(f, space, config=q)
    back = inverse_spherical_transform(ft, space, grid, q)
    err = _l2(back.values - f.values, space, grid) / _l2(f.values, space, grid)
    x, w = np.polynomial.legendre.leggauss(64)
    lhs = 0.0
    for a in range(int(q.t_max)):
        s = a + 0.5 * (x + 1)
        lhs += 0.5 * float(np.sum(w * np.exp(-2 * s ** 2) * density_delta(space, s)))
    rhs = KAPPA * float(np.sum(ft.weights * np.abs(ft.values) ** 2
                               * plancherel_density(space.jacobi_params(), ft.nodes)))
    plan = abs(rhs - lhs) / lhs
    worst = max(err, plan)
    return _report("transform_round_trip", worst, worst < cfg.quadrature_tol,
                   _describe(t=grid.nodes, lam=ft.nodes), round_trip=err, plancherel=plan)


def _check_delta_symmetry(space, cfg, phi, rng):
    k = KType(2, 0)
    g = _gaussian(RadialGrid.uniform(8.0, 81))
    lam = rng.uniform(0.05, 8.0, 50)
    plus = transform_at(g, space, lam, k, cfg.quadrature)
    minus = transform_at(g, space, -lam, k, cfg.quadrature)
    lhs = plus / kostant_q(space, k, -lam)
    rhs = minus / kostant_q(space, k, lam)
    err = float(np.max(np.abs(lhs - rhs)) / np.max(np.abs(lhs)))
    return _report("delta_symmetry", err, err < cfg.identity_tol, _describe(lam=lam))


def _decay_field(space, cfg):
    grid = RadialGrid.uniform(100.0, 1001)
    f = _gaussian(grid)
    lam = np.linspace(0.0, 12.0, 97)
    return projection_field(f, space, SpectralStrip(2.0), lam, validate=False,
                            config=cfg.quadrature)


def _check_projection_decay(space, cfg, phi, rng):
    field = _decay_field(space, cfg)
    reports = []
    for p in (1.0, 2.0):
        r_p = (2 * p - 2) / p - 0.1
        for m in (0, 1):
            for n in (0, 1):
                for s in (0, 1):
                    reports.append(projection_decay_check(field, space, p, m, n, s, r_p,
                                                          cfg.stability_tol))
    worst = max(float(dict(r.fitted_constants)["relative_change"]) for r in reports)
    failed = [r.name for r in reports if not r.passed]
    return _report("projection_decay", worst, not failed, reports[0].grid,
                   "failed: " + ", ".join(failed) if failed else "16 cases")


def _check_kostant_zeros(space, cfg, phi, rng):
    k = KType(2, 0)
    grid = RadialGrid.uniform(4.0, 401)
    strip = SpectralStrip(1.0)
    half = strip.half_width(space)
    zeros = [z for z in kostant_zero_set(space, k) if abs(z.imag) <= half]
    lam = np.concatenate([np.linspace(0.0, 3.0, 7), [-z for z in zeros], zeros]).astype(complex)
    h = np.exp(-lam ** 2) * kostant_q(space, k, -lam)
    table = gen_spherical_radial(space, k, lam[:, None], grid.nodes[None, :]) * h[:, None]
    field = ProjectionField(lam, grid, table, strip, ktype=k)
    rep = kostant_zero_vanishing_check(field, space, k, 1e-8)
    return EstimateReport("kostant_zero_vanishing", rep.sup_value, rep.fitted_constants,
                          rep.grid, rep.passed, rep.note)


def _check_reconstruction(space, cfg, phi, rng):
    k = KType(2, 0)
    grid = RadialGrid.uniform(4.0, 401)
    lam = np.linspace(0.0, 20.0, 81)
    h = np.exp(-0.05 * lam ** 2) * kostant_q(space, k, -lam)
    table = gen_spherical_radial(space, k, lam[:, None], grid.nodes[None, :]) * h[:, None]
    field = ProjectionField(lam, grid, table, SpectralStrip(2.0), ktype=k)
    rec = reconstruct_h(field, space, k)
    err = float(np.max(np.abs(rec.values - h) / np.abs(h)))
    return _report("reconstruction_round_trip", err, err < 1e-8, _describe(lam=lam, t=grid.nodes))


CHECKS: Dict[str, Callable] = {
    "bray_lower_bound": _check_bray,
    "c_function_estimate": _check_c_function,
    "delta_symmetry": _check_delta_symmetry,
    "derivative_envelope": _check_derivative_envelope,
    "eigen_equation": _check_eigen,
    "imaginary_axis_bound": _check_imaginary_axis,
    "kostant_symmetry": _check_kostant_symmetry,
    "kostant_zero_vanishing": _check_kostant_zeros,
    "phi0_sandwich": _check_phi0_sandwich,
    "phi_normalization": _check_normalization,
    "phi_vs_ode": _check_ode,
    "projection_decay": _check_projection_decay,
    "reconstruction_round_trip": _check_reconstruction,
    "strip_polynomial_growth": _check_strip_growth,
    "transform_round_trip": _check_round_trip,
}


def check_all(space: Optional[RankOneSpace] = None, config: VerifyConfig = DEFAULT_VERIFY,
              checks: Optional[Iterable[str]] = None,
              phi: Optional[PhiEvaluator] = None) -> List[EstimateReport]:
    """Run the named checks (all by default) and return reports sorted by name.

    Parameters
    ----------
    space : RankOneSpace, optional
        Defaults to the pair ``(1/2, -1/2)``.
    checks : iterable of str, optional
        Subset of :data:`CHECKS`; an empty iterable gives an empty list.
    phi : callable, optional
        Replacement for :func:`rankone.spherical.jacobi_phi` in the checks
        that test the spherical function itself (used for negative controls).

    Notes
    -----
    A check that raises a library error is reported as failed with the error
    text as note.  Random samples come from a generator seeded with
    ``config.seed`` separately for each check, so results do not depend on
    which subset runs.
    """
    space = RankOneSpace.from_jacobi(0.5, -0.5) if space is None else space
    names = sorted(CHECKS) if checks is None else sorted(checks)
    unknown = [n for n in names if n not in CHECKS]
    if unknown:
        raise PreconditionError(f"unknown checks: {', '.join(unknown)}")
    phi = _default_phi if phi is None else phi
    reports = []
    for name in names:
        rng = np.random.default_rng(config.seed)
        try:
            rep = CHECKS[name](space, config, phi, rng)
        except RankOneError as exc:
            rep = EstimateReport(name, math.nan, (), "", False, f"{type(exc).__name__}: {exc}")
        reports.append(rep)
    return reports
