"""Spherical and delta-spherical transforms, spectral projections and the
reconstruction / synthesis procedures built on them.

Normalization
-------------
Forward:  ``F(lam) = int_0^inf f(t) phi_lam(t) Delta(t) dt``
Inverse:  ``f(t) = KAPPA int_0^inf F(lam) phi_lam(t) |c(lam)|**-2 dlam``

with ``KAPPA = 1 / (2 pi)``.  For a K-type ``delta`` the forward kernel is the
adjoint ``conj(phi_{conj(lam), delta})`` and the inverse kernel is
``phi_{lam, delta}``, with the same density and constant.

All integrals use composite Gauss-Legendre rules (default: 32 nodes on panels
of width 1).  Quadrature nodes whose contribution is provably below
``skip_tol`` of the total are dropped, using ``|phi_lam(t)| <= exp(|Im lam| t) phi_0(t)``.
"""
from __future__ import annotations

import math
from collections import OrderedDict
from dataclasses import dataclass, field, replace
from functools import lru_cache
from types import SimpleNamespace
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import (
    DegenerateColumnError,
    GridError,
    HypothesisError,
    PreconditionError,
    SupportError,
    TailTruncationError,
)
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
    T_LIMIT,
    _gen_factor,
    bray_lower_constant,
    jacobi_phi,
    kostant_q,
    kostant_zero_set,
    plancherel_density,
)

__all__ = [
    "KAPPA",
    "QuadratureConfig",
    "DEFAULT_QUADRATURE",
    "RadialFunction",
    "SpectralFunction",
    "ProjectionField",
    "panel_rule",
    "spectral_nodes",
    "transform_at",
    "spherical_transform",
    "inverse_spherical_transform",
    "delta_spherical_transform",
    "inverse_delta_spherical_transform",
    "spectral_projection",
    "projection_field",
    "validate_field",
    "reconstruct_h",
    "synthesize_f",
    "band_limited_synthesis",
    "support_leakage",
    "spectral_growth_surrogate",
]

KAPPA = 1.0 / (2.0 * math.pi)


@dataclass(frozen=True)
class QuadratureConfig:
    """Quadrature and truncation settings shared by the transforms.

    Attributes
    ----------
    t_max, lambda_max : float
        Truncation of the radial and spectral half-lines.
    panel_width : float
        Width of each Gauss-Legendre panel (both variables).
    order : int
        Nodes per panel.
    tail_tol : float
        Largest admissible integrand size at the truncation point, relative
        to the integrand's peak.
    skip_tol : float
        Nodes whose bounded contribution is below this fraction of the total
        are skipped.
    """

    t_max: float = 20.0
    lambda_max: float = 30.0
    panel_width: float = 1.0
    order: int = 32
    tail_tol: float = 1e-9
    skip_tol: float = 1e-20

    def __post_init__(self):
        if not (0 < self.t_max <= T_LIMIT):
            raise GridError(f"t_max must lie in (0, {T_LIMIT:g}]")
        if not self.lambda_max > 0:
            raise GridError("lambda_max must be positive")
        if not self.panel_width > 0 or self.order < 1:
            raise GridError("invalid panel layout")
        if not (self.tail_tol > 0 and self.skip_tol >= 0):
            raise PreconditionError("tolerances must be positive")

    def refined(self) -> "QuadratureConfig":
        """Same truncation, half the panel width."""
        return replace(self, panel_width=self.panel_width / 2)


DEFAULT_QUADRATURE = QuadratureConfig()


@lru_cache(maxsize=64)
def _panel_rule_cached(a: float, b: float, width: float, order: int):
    n_panels = max(1, int(math.ceil((b - a) / width - 1e-9)))
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(a, b, n_panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def panel_rule(a: float, b: float, width: float = 1.0, order: int = 32):
    """Composite Gauss-Legendre nodes and weights on ``[a, b]``.

    The interval is cut into ``ceil((b - a) / width)`` equal panels.
    """
    if not b > a:
        raise GridError("panel_rule needs b > a")
    return _panel_rule_cached(float(a), float(b), float(width), int(order))


def spectral_nodes(lambda_max: float, config: QuadratureConfig = DEFAULT_QUADRATURE):
    """Default spectral quadrature nodes and weights on ``[0, lambda_max]``."""
    return panel_rule(0.0, lambda_max, config.panel_width, config.order)


# --------------------------------------------------------------------------
# kernel tables
# --------------------------------------------------------------------------

_TABLE_CACHE: "OrderedDict[tuple, np.ndarray]" = OrderedDict()
_TABLE_CACHE_BYTES = 400 * 2 ** 20


def _phi_table(params: JacobiParams, lam: np.ndarray, t: np.ndarray) -> np.ndarray:
    """``phi_lam(t)`` on the outer grid ``lam x t`` (memoized)."""
    lam = np.ascontiguousarray(lam, dtype=complex)
    t = np.ascontiguousarray(t, dtype=float)
    key = (params.mu, params.tau, lam.tobytes(), t.tobytes())
    hit = _TABLE_CACHE.get(key)
    if hit is not None:
        _TABLE_CACHE.move_to_end(key)
        return hit
    table = jacobi_phi(params, lam[:, None], t[None, :])
    table = np.asarray(table).reshape(lam.size, t.size)
    table.setflags(write=False)
    if table.nbytes <= _TABLE_CACHE_BYTES // 2:
        _TABLE_CACHE[key] = table
        while sum(v.nbytes for v in _TABLE_CACHE.values()) > _TABLE_CACHE_BYTES:
            _TABLE_CACHE.popitem(last=False)
    return table


def clear_cache() -> None:
    """Drop memoized kernel tables."""
    _TABLE_CACHE.clear()


# --------------------------------------------------------------------------
# spectral-side container
# --------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SpectralFunction:
    """Complex samples of a function of the spectral parameter.

    Nodes are real and normally lie in ``[0, lambda_max]``; values at
    ``-lam`` follow from ``reflection`` (``F(-lam) = reflection(lam) F(lam)``,
    the identity for spherical transforms).  Nodes may also cover negative
    values, in which case they are used as given.

    Attributes
    ----------
    nodes : ndarray
        Strictly increasing real nodes.
    values : ndarray
        Complex samples.
    lambda_max : float
        Right end of the represented interval.
    weights : ndarray, optional
        Quadrature weights attached to ``nodes`` (as produced by the
        transforms); when present integrals use them directly.
    closed_form : callable, optional
        Exact evaluator for arbitrary (possibly complex) ``lam``.
    reflection : callable, optional
        Factor relating ``F(-lam)`` to ``F(lam)``.
    """

    nodes: np.ndarray
    values: np.ndarray
    lambda_max: Optional[float] = None
    weights: Optional[np.ndarray] = None
    closed_form: Optional[Callable[[np.ndarray], np.ndarray]] = None
    reflection: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        vals = np.asarray(self.values, dtype=complex)
        if nodes.ndim != 1 or nodes.shape != vals.shape:
            raise GridError("spectral nodes and values must be 1-D of equal length")
        if nodes.size and np.any(np.diff(nodes) <= 0):
            raise GridError("spectral nodes must be strictly increasing")
        if not np.all(np.isfinite(vals)):
            raise PreconditionError("spectral values must be finite")
        lmax = float(self.lambda_max) if self.lambda_max is not None else (
            float(np.max(np.abs(nodes))) if nodes.size else 0.0)
        if nodes.size and np.max(np.abs(nodes)) > lmax * (1 + 1e-12):
            raise GridError("nodes exceed lambda_max")
        if self.weights is not None:
            w = np.asarray(self.weights, dtype=float)
            if w.shape != nodes.shape:
                raise GridError("weights must match nodes")
            object.__setattr__(self, "weights", w)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "lambda_max", lmax)

    @classmethod
    def from_callable(cls, fn: Callable[[np.ndarray], np.ndarray], lambda_max: float,
                      config: QuadratureConfig = DEFAULT_QUADRATURE) -> "SpectralFunction":
        """Sample ``fn`` on the default quadrature nodes of ``[0, lambda_max]``."""
        nodes, weights = spectral_nodes(lambda_max, config)
        return cls(nodes, np.asarray(fn(nodes), dtype=complex), lambda_max, weights, fn)

    @property
    def has_negative_nodes(self) -> bool:
        return bool(self.nodes.size and self.nodes[0] < 0)

    def _spline(self):
        return CubicSpline(self.nodes, self.values)

    def __call__(self, lam) -> np.ndarray:
        lam = np.asarray(lam)
        if self.closed_form is not None:
            return np.asarray(self.closed_form(lam), dtype=complex)
        if np.iscomplexobj(lam) and np.any(np.imag(lam) != 0):
            raise PreconditionError("sampled spectral data cannot be evaluated off the real axis")
        lam = np.real(lam).astype(float)
        out = np.zeros(lam.shape, dtype=complex)
        spl = self._spline()
        lo, hi = self.nodes[0], self.nodes[-1]
        if self.has_negative_nodes:
            inside = (lam >= lo) & (lam <= hi)
            out[inside] = spl(lam[inside])
            return out
        mag = np.abs(lam)
        inside = (mag >= lo) & (mag <= hi)
        # below the first node, extend by the spline (even data is flat there)
        inside |= mag < lo
        vals = spl(mag[inside])
        neg = lam[inside] < 0
        if self.reflection is not None and np.any(neg):
            vals[neg] = vals[neg] * self.reflection(mag[inside][neg])
        out[inside] = vals
        return out


# --------------------------------------------------------------------------
# forward transforms
# --------------------------------------------------------------------------

def _radial_nodes(f: RadialFunction, config: QuadratureConfig):
    """Quadrature nodes for ``f``: up to ``t_max`` for closed forms, else
    up to the last sample."""
    t_end = config.t_max if f.closed_form is not None else min(config.t_max, f.grid.t_max)
    nodes, weights = panel_rule(0.0, t_end, config.panel_width, config.order)
    return nodes, weights, t_end


def _forward_core(f: RadialFunction, space: RankOneSpace, lam: np.ndarray,
                  ktype: Optional[KType], config: QuadratureConfig) -> np.ndarray:
    lam = np.atleast_1d(np.asarray(lam, dtype=complex))
    nodes, weights, t_end = _radial_nodes(f, config)
    fv = np.asarray(f(nodes))
    if ktype is None or ktype.is_trivial:
        params = space.jacobi_params()
        fac = np.ones_like(nodes)
    else:
        params, fac = _gen_factor(space, ktype, nodes)
    base = fv * density_delta(space, nodes) * weights * fac
    # rigorous bound on each node's contribution
    grow = np.max(np.abs(lam.imag)) if lam.size else 0.0
    phi0 = np.real(jacobi_phi(params, 0.0, nodes))
    bound = np.abs(base) * phi0 * np.exp(grow * nodes)
    total = float(np.sum(bound))
    out = np.zeros(lam.shape, dtype=complex)
    if total == 0.0:
        return out
    # integrand bound at the truncation point relative to its peak
    end = np.array([t_end])
    f_end = abs(np.asarray(f(end))[0])
    fac_end = 1.0 if ktype is None or ktype.is_trivial else float(_gen_factor(space, ktype, end)[1][0])
    phi0_end = float(np.real(jacobi_phi(params, 0.0, t_end)))
    tail = (f_end * density_delta(space, t_end) * fac_end * phi0_end * math.exp(grow * t_end)
            / max(float(np.max(bound / weights)), 1e-300))
    if tail > config.tail_tol:
        raise TailTruncationError(
            f"integrand at t_max={t_end:g} is {tail:.2e} of its peak (tolerance {config.tail_tol:g})"
        )
    keep = bound >= config.skip_tol * total
    idx = np.nonzero(keep)[0]
    # keep a contiguous prefix so tables are shared between similar calls
    last = int(idx[-1]) + 1
    table = _phi_table(params, lam, nodes[:last])
    out = table @ base[:last]
    if ktype is not None and not ktype.is_trivial:
        out = out * kostant_q(space, ktype, -lam)
    elif not np.iscomplexobj(fv) and not np.any(lam.imag):
        # real kernel and data: drop rounding noise in the imaginary part
        out = out.real + 0j
    return out


def transform_at(f: RadialFunction, space: RankOneSpace, lam, ktype: Optional[KType] = None,
                 config: QuadratureConfig = DEFAULT_QUADRATURE) -> np.ndarray:
    """Spherical (or delta-spherical) transform of ``f`` at arbitrary complex ``lam``."""
    lam_arr = np.asarray(lam, dtype=complex)
    out = _forward_core(f, space, lam_arr.ravel(), ktype, config).reshape(lam_arr.shape)
    return out[()] if out.ndim == 0 else out


def _default_lambdas(lambdas, config: QuadratureConfig):
    if lambdas is None:
        nodes, weights = spectral_nodes(config.lambda_max, config)
        return nodes, weights, config.lambda_max
    if isinstance(lambdas, SpectralFunction):
        return lambdas.nodes, lambdas.weights, lambdas.lambda_max
    nodes = np.asarray(lambdas)
    if np.iscomplexobj(nodes):
        if np.any(nodes.imag != 0):
            raise GridError("transform nodes must be real; use transform_at for complex lam")
        nodes = nodes.real
    nodes = nodes.astype(float)
    if nodes.ndim != 1:
        raise GridError("lambda nodes must be one-dimensional")
    return nodes, None, float(np.max(np.abs(nodes))) if nodes.size else 0.0


def spherical_transform(f: RadialFunction, space: RankOneSpace, lambdas=None,
                        config: QuadratureConfig = DEFAULT_QUADRATURE) -> SpectralFunction:
    """``F(lam) = int f(t) phi_lam(t) Delta(t) dt`` on real nodes.

    Parameters
    ----------
    f : RadialFunction
        Evaluated through its closed form when available, otherwise through a
        cubic spline of its samples (and truncated at the last sample).
    lambdas : array, SpectralFunction or None
        Output nodes; ``None`` gives the default quadrature nodes on
        ``[0, config.lambda_max]``, which makes the result directly usable by
        :func:`inverse_spherical_transform`.

    Raises
    ------
    TailTruncationError
        If ``f`` is not negligible at the truncation point.
    """
    nodes, weights, lmax = _default_lambdas(lambdas, config)
    vals = _forward_core(f, space, nodes, None, config)
    return SpectralFunction(nodes, vals, lmax, weights)


def delta_spherical_transform(g: RadialFunction, space: RankOneSpace, ktype: KType, lambdas=None,
                              config: QuadratureConfig = DEFAULT_QUADRATURE) -> SpectralFunction:
    """Scalar delta-spherical transform of a radial profile.

    The kernel is ``conj(phi_{conj(lam), delta}(t))``, so the output obeys
    ``F(-lam) = Q(1 + i lam) / Q(1 - i lam) F(lam)``; this is recorded as the
    result's ``reflection``.
    """
    space.check_ktype(ktype)
    nodes, weights, lmax = _default_lambdas(lambdas, config)
    vals = _forward_core(g, space, nodes, ktype, config)

    def reflection(lam):
        return kostant_q(space, ktype, lam) / kostant_q(space, ktype, -np.asarray(lam))

    return SpectralFunction(nodes, vals, lmax, weights,
                            reflection=None if ktype.is_trivial else reflection)


# --------------------------------------------------------------------------
# inverse transforms
# --------------------------------------------------------------------------

def _spectral_quadrature(ft: SpectralFunction, config: QuadratureConfig):
    """Nodes, weights and values on ``[0, lambda_max]`` for a spectral integral."""
    if ft.weights is not None and not ft.has_negative_nodes:
        return ft.nodes, ft.weights, ft.values
    lmax = ft.lambda_max
    if lmax <= 0:
        return np.zeros(0), np.zeros(0), np.zeros(0, dtype=complex)
    nodes, weights = spectral_nodes(lmax, config)
    return nodes, weights, ft(nodes)


def _inverse_core(ft: SpectralFunction, space: RankOneSpace, t: np.ndarray,
                  ktype: Optional[KType], config: QuadratureConfig) -> np.ndarray:
    lam, w, vals = _spectral_quadrature(ft, config)
    t = np.atleast_1d(np.asarray(t, dtype=float))
    out = np.zeros(t.shape, dtype=complex)
    if lam.size == 0:
        return out
    dens = plancherel_density(space.jacobi_params(), lam)
    base = vals * dens * w
    if ktype is not None and not ktype.is_trivial:
        base = base * kostant_q(space, ktype, lam)
        params, fac = _gen_factor(space, ktype, t)
        qmax = np.abs(kostant_q(space, ktype, lam))
    else:
        params, fac = space.jacobi_params(), np.ones_like(t)
        qmax = np.ones_like(lam)
    bound = np.abs(base) / np.where(qmax > 0, qmax, 1.0) * np.maximum(qmax, 1.0)
    total = float(np.sum(bound))
    if total == 0.0:
        return out
    edge = abs(vals[-1]) * dens[-1] * np.maximum(qmax[-1], 1.0)
    peak = float(np.max(bound / w))
    if edge > config.tail_tol * peak and lam[-1] >= ft.lambda_max * (1 - 1e-9) - config.panel_width:
        raise TailTruncationError(
            f"spectral integrand at lambda_max={ft.lambda_max:g} is {edge / peak:.2e} of its peak"
        )
    keep = bound >= config.skip_tol * total
    last = int(np.nonzero(keep)[0][-1]) + 1
    table = _phi_table(params, lam[:last], t)
    out = KAPPA * (base[:last] @ table) * fac
    if (ktype is None or ktype.is_trivial) and not np.any(vals.imag):
        out = out.real + 0j
    return out


def inverse_spherical_transform(ft: SpectralFunction, space: RankOneSpace, tgrid: RadialGrid,
                                config: QuadratureConfig = DEFAULT_QUADRATURE) -> RadialFunction:
    """``f(t) = KAPPA int_0^lambda_max F(lam) phi_lam(t) |c(lam)|**-2 dlam``.

    The returned function carries a closed form that re-evaluates the
    spectral integral, so it can be sampled anywhere without interpolation.

    Raises
    ------
    TailTruncationError
        If ``|F| |c|**-2`` is not negligible at ``lambda_max``.
    """
    values = _inverse_core(ft, space, tgrid.nodes, None, config)
    return RadialFunction(tgrid, values,
                          closed_form=lambda s: _inverse_core(ft, space, s, None, config))


def inverse_delta_spherical_transform(ft: SpectralFunction, space: RankOneSpace, ktype: KType,
                                      tgrid: RadialGrid,
                                      config: QuadratureConfig = DEFAULT_QUADRATURE) -> RadialFunction:
    """``g(t) = KAPPA int_0^lambda_max F(lam) phi_{lam, delta}(t) |c(lam)|**-2 dlam``."""
    space.check_ktype(ktype)
    values = _inverse_core(ft, space, tgrid.nodes, ktype, config)
    return RadialFunction(tgrid, values,
                          closed_form=lambda s: _inverse_core(ft, space, s, ktype, config))


# --------------------------------------------------------------------------
# spectral projection
# --------------------------------------------------------------------------

def _canonical_sign(lam: np.ndarray) -> np.ndarray:
    """Representative of ``{lam, -lam}`` with ``Re >= 0`` (``Im >= 0`` on the axis)."""
    lam = np.asarray(lam, dtype=complex)
    flip = (lam.real < 0) | ((lam.real == 0) & (lam.imag < 0))
    return np.where(flip, -lam, lam)


def _projection_values(f: RadialFunction, space: RankOneSpace, lam: np.ndarray, t: np.ndarray,
                       ktype: Optional[KType], config: QuadratureConfig) -> np.ndarray:
    lam = _canonical_sign(lam)
    coef = _forward_core(f, space, lam, ktype, config)
    if ktype is None or ktype.is_trivial:
        return coef[:, None] * _phi_table(space.jacobi_params(), lam, t)
    params, fac = _gen_factor(space, ktype, t)
    q = kostant_q(space, ktype, lam)
    return (coef * q)[:, None] * (_phi_table(params, lam, t) * fac[None, :])


def spectral_projection(f: RadialFunction, space: RankOneSpace, lam: complex,
                        strip: SpectralStrip, ktype: Optional[KType] = None,
                        config: QuadratureConfig = DEFAULT_QUADRATURE) -> RadialFunction:
    """``P_lam f = F(lam) phi_lam`` sampled on ``f``'s grid.

    With ``ktype`` the delta-projection ``F_delta(lam) phi_{lam, delta}`` is
    returned instead.

    Raises
    ------
    StripError
        If ``lam`` is outside ``strip``.
    """
    strip.require(lam, space)
    lam = complex(lam)
    coef = transform_at(f, space, lam, ktype, config)
    if ktype is None or ktype.is_trivial:
        params = space.jacobi_params()

        def evaluate(s):
            return coef * jacobi_phi(params, lam, s)
    else:
        def evaluate(s):
            from .spherical import gen_spherical_radial
            return coef * gen_spherical_radial(space, ktype, lam, s)

    return RadialFunction(f.grid, evaluate(f.grid.nodes), closed_form=evaluate)


@dataclass(frozen=True, eq=False)
class ProjectionField:
    """Table ``(lam, t) -> P_lam f(t)`` for a family of spectral parameters.

    Attributes
    ----------
    lambda_nodes : ndarray
        Spectral parameters (complex allowed), one row each.
    t_grid : RadialGrid
    table : ndarray
        Complex array of shape ``(len(lambda_nodes), t_grid.n)``.
    strip : SpectralStrip
    lambda_weights : ndarray, optional
        Quadrature weights when the real nonnegative nodes form a rule on
        ``[0, lambda_max]``.
    ktype : KType, optional
        K-type of the field (``None`` for spherical fields).
    source : RadialFunction, optional
        Function the field was computed from, used to refine grids.
    """

    lambda_nodes: np.ndarray
    t_grid: RadialGrid
    table: np.ndarray
    strip: SpectralStrip
    lambda_weights: Optional[np.ndarray] = None
    ktype: Optional[KType] = None
    source: Optional[RadialFunction] = None
    lambda_max: Optional[float] = None

    def __post_init__(self):
        lam = np.atleast_1d(np.asarray(self.lambda_nodes, dtype=complex))
        table = np.asarray(self.table, dtype=complex)
        if table.shape != (lam.size, self.t_grid.n):
            raise GridError("field table must have shape (n_lambda, n_t)")
        if not np.all(np.isfinite(table)):
            raise PreconditionError("field values must be finite")
        if self.lambda_weights is not None:
            w = np.asarray(self.lambda_weights, dtype=float)
            if w.shape != lam.shape:
                raise GridError("lambda weights must match lambda nodes")
            object.__setattr__(self, "lambda_weights", w)
        object.__setattr__(self, "lambda_nodes", lam)
        object.__setattr__(self, "table", table)

    def column(self, lam: complex) -> np.ndarray:
        """Row of the table at the node equal to ``lam``."""
        hits = np.nonzero(self.lambda_nodes == complex(lam))[0]
        if hits.size == 0:
            raise KeyError(f"lambda {lam} is not a node of the field")
        return self.table[hits[0]]

    @property
    def real_nodes_mask(self) -> np.ndarray:
        return (self.lambda_nodes.imag == 0) & (self.lambda_nodes.real >= 0)


def projection_field(f: RadialFunction, space: RankOneSpace, strip: SpectralStrip,
                     lambda_nodes=None, tgrid: Optional[RadialGrid] = None,
                     ktype: Optional[KType] = None, validate: bool = True,
                     config: QuadratureConfig = DEFAULT_QUADRATURE) -> ProjectionField:
    """Spectral projections of ``f`` for every node in ``lambda_nodes``.

    ``lambda_nodes=None`` uses the default spectral quadrature rule, which
    makes the field directly usable by :func:`synthesize_f`.  Rows for ``lam``
    and ``-lam`` are computed from the same representative, so the table is
    exactly even.
    """
    weights = None
    lmax = None
    if lambda_nodes is None:
        lambda_nodes, weights = spectral_nodes(config.lambda_max, config)
        lmax = config.lambda_max
    lam = np.atleast_1d(np.asarray(lambda_nodes, dtype=complex))
    strip.require(lam, space)
    tgrid = f.grid if tgrid is None else tgrid
    if ktype is not None:
        space.check_ktype(ktype)
    table = _projection_values(f, space, lam, tgrid.nodes, ktype, config)
    out = ProjectionField(lam, tgrid, table, strip, weights, ktype, f, lmax)
    if validate:
        validate_field(out, space, ktype, check_kostant=False)
    return out


# --------------------------------------------------------------------------
# hypothesis validators for external fields
# --------------------------------------------------------------------------

def _eigen_residuals(field: ProjectionField, space: RankOneSpace, ktype: Optional[KType],
                     t_min: float = 0.1, max_step_lambda: float = 0.05):
    """Relative residual of the eigen-equation per checkable column.

    Each column is divided by the known ``sinh^r cosh^s`` prefactor and the
    rest is tested against the Jacobi operator with the shifted parameters.
    Columns whose oscillation the grid cannot resolve are skipped.
    """
    grid = field.t_grid
    if grid.n < 5 or not grid.is_uniform:
        return {}
    h = grid.step
    if ktype is None or ktype.is_trivial:
        params, fac = space.jacobi_params(), np.ones(grid.n)
    else:
        params, fac = _gen_factor(space, ktype, grid.nodes)
    # radial_laplacian only reads alpha and beta
    jac_space = SimpleNamespace(alpha=params.mu, beta=params.tau)
    out = {}
    interior = grid.nodes[2:-2]
    safe = fac > 0
    # stencils must not touch nodes where the prefactor vanishes
    stencil_ok = safe[:-4] & safe[1:-3] & safe[2:-2] & safe[3:-1] & safe[4:]
    mask = (interior >= t_min) & stencil_ok
    if not np.any(mask):
        return out
    # rows this small hold subnormal entries and carry no usable precision
    floor = np.finfo(float).tiny / np.finfo(float).eps ** 2
    for i, lam in enumerate(field.lambda_nodes):
        if abs(lam) * h > max_step_lambda:
            continue
        if 0 < np.max(np.abs(field.table[i])) < floor:
            continue
        u = np.zeros(grid.n, dtype=complex)
        u[safe] = field.table[i, safe] / fac[safe]
        scale = np.max(np.abs(u[2:-2][mask]))
        if scale == 0:
            out[i] = 0.0
            continue
        lap = radial_laplacian(RadialFunction(grid, u), jac_space).values
        resid = lap + (lam ** 2 + params.varrho ** 2) * u[2:-2]
        denom = max(abs(lam ** 2 + params.varrho ** 2), 1.0) * scale
        out[i] = float(np.max(np.abs(resid[mask])) / denom)
    return out


def validate_field(field: ProjectionField, space: RankOneSpace, ktype: Optional[KType] = None,
                   even_tol: float = 1e-8, eigen_tol: float = 1e-5, zero_tol: float = 1e-8,
                   check_kostant: bool = True) -> None:
    """Check the structural hypotheses reconstruction relies on.

    1. evenness: rows at ``lam`` and ``-lam`` agree;
    2. each resolvable row solves the radial eigen-equation (tolerance
       ``max(eigen_tol, 100 h**4)`` for grid step ``h``);
    3. rows at zeros of ``Q(1 - i lam)`` present among the nodes vanish.

    Raises
    ------
    HypothesisError
        Naming the first violated hypothesis.
    """
    lam = field.lambda_nodes
    scale = float(np.max(np.abs(field.table))) if field.table.size else 0.0
    if scale == 0:
        return
    index = {complex(x): i for i, x in enumerate(lam)}
    for i, x in enumerate(lam):
        j = index.get(complex(-x))
        if j is not None and j > i:
            gap = np.max(np.abs(field.table[i] - field.table[j]))
            if gap > even_tol * scale:
                raise HypothesisError(f"field is not even in lambda (gap {gap:.2e} at lambda={x})")
    grid = field.t_grid
    if grid.n >= 5 and grid.is_uniform:
        # allow for the O(h**4) error of the five-point stencil on coarse grids
        eigen_tol = max(eigen_tol, 100.0 * grid.step ** 4)
    for i, r in _eigen_residuals(field, space, ktype).items():
        if r > eigen_tol:
            raise HypothesisError(
                f"row lambda={lam[i]} is not an eigenfunction (relative residual {r:.2e})"
            )
    if check_kostant and ktype is not None and not ktype.is_trivial:
        for z in kostant_zero_set(space, ktype):
            zero = -z  # zeros of Q(1 - i lam)
            i = index.get(complex(zero))
            if i is None:
                continue
            if np.max(np.abs(field.table[i])) > zero_tol * scale:
                raise HypothesisError(f"field does not vanish at the Kostant zero {zero}")


# --------------------------------------------------------------------------
# reconstruction and synthesis
# --------------------------------------------------------------------------

def _evaluation_point(lam_abs: float, t_ref: float, Lambda: float) -> float:
    return t_ref if lam_abs <= Lambda else 1.0 / lam_abs ** 2


def reconstruct_h(field: ProjectionField, space: RankOneSpace, ktype: Optional[KType] = None,
                  d_scale: float = 1.0, t_ref: float = 0.5, Lambda: float = 2.0,
                  validate: bool = True) -> SpectralFunction:
    """Recover ``h`` from a field of the form ``sqrt(d) phi_{lam, delta}(t) h(lam)``.

    Each row is divided by the generalized spherical function at one grid node
    ``t0``: ``t0 = t_ref`` for ``|lam| <= Lambda`` and ``1 / |lam|**2`` beyond,
    snapped to the nearest node.  The Jacobi factor at ``t0`` is required to
    exceed half the Bray lower constant; otherwise nodes are scanned outward.
    The quotient is formed in log space.

    Returns
    -------
    SpectralFunction
        Values at every real node of the field (negative nodes included).

    Raises
    ------
    HypothesisError
        If validation is on and the field fails a structural hypothesis.
    DegenerateColumnError
        If no admissible ``t0`` exists for some row.
    """
    if ktype is None:
        ktype = field.ktype if field.ktype is not None else KType(0, 0)
    space.check_ktype(ktype)
    if not d_scale > 0:
        raise PreconditionError("d_scale must be positive")
    if validate:
        validate_field(field, space, ktype)
    real = field.lambda_nodes.imag == 0
    lam_all = field.lambda_nodes[real].real
    rows = field.table[real]
    order = np.argsort(lam_all)
    lam_all, rows = lam_all[order], rows[order]
    nodes = field.t_grid.nodes
    admissible = nodes > 0 if ktype.r > 0 else np.ones(nodes.size, dtype=bool)
    cand = np.nonzero(admissible)[0]
    if cand.size == 0:
        raise DegenerateColumnError("grid has no admissible evaluation node")
    params = space.jacobi_params(ktype)
    floor = 0.5 * bray_lower_constant(Lambda, params.mu, params.tau)
    h = np.zeros(lam_all.size, dtype=complex)
    for k, (lam, row) in enumerate(zip(lam_all, rows)):
        target = _evaluation_point(abs(lam), t_ref, Lambda)
        ranked = cand[np.argsort(np.abs(nodes[cand] - target), kind="stable")]
        chosen = None
        for j in ranked[:64]:
            jac = complex(jacobi_phi(params, lam, nodes[j]))
            if abs(jac) >= floor:
                chosen = (j, jac)
                break
        if chosen is None:
            raise DegenerateColumnError(f"no admissible t0 for lambda={lam}")
        j, jac = chosen
        if row[j] == 0:
            continue
        _, fac = _gen_factor(space, ktype, np.array([nodes[j]]))
        q = kostant_q(space, ktype, lam)
        if q == 0:
            raise DegenerateColumnError(f"Kostant polynomial vanishes at lambda={lam}")
        log_h = (np.log(complex(row[j])) - np.log(jac) - np.log(complex(q))
                 - math.log(float(fac[0])) - 0.5 * math.log(d_scale))
        h[k] = np.exp(log_h)
    lmax = field.lambda_max if field.lambda_max is not None else float(np.max(np.abs(lam_all)))
    weights = None
    if field.lambda_weights is not None and np.all(real) and np.all(lam_all >= 0):
        weights = field.lambda_weights[order]
    return SpectralFunction(lam_all, h, lmax, weights)


def synthesize_f(field: ProjectionField, space: RankOneSpace,
                 config: QuadratureConfig = DEFAULT_QUADRATURE) -> RadialFunction:
    """``f(t) = KAPPA int_0^lambda_max f_lam(t) |c(lam)|**-2 dlam`` from a field.

    Uses the field's quadrature weights when present; otherwise each
    ``t``-row is integrated through a cubic spline in ``lam`` over the real
    nonnegative nodes.

    Raises
    ------
    TailTruncationError
        If the last spectral row is not negligible.
    """
    mask = field.real_nodes_mask
    lam = field.lambda_nodes[mask].real
    rows = field.table[mask]
    order = np.argsort(lam)
    lam, rows = lam[order], rows[order]
    grid = field.t_grid
    if lam.size == 0:
        return RadialFunction(grid, np.zeros(grid.n, dtype=complex))
    dens = plancherel_density(space.jacobi_params(), lam)
    weighted = rows * dens[:, None]
    peak = float(np.max(np.abs(weighted)))
    if peak == 0:
        return RadialFunction(grid, np.zeros(grid.n, dtype=complex))
    edge = float(np.max(np.abs(weighted[-1])))
    if edge > config.tail_tol * peak:
        raise TailTruncationError(f"field row at lambda={lam[-1]:g} is {edge / peak:.2e} of its peak")
    if field.lambda_weights is not None:
        w = field.lambda_weights[mask][order]
        values = KAPPA * (w @ weighted)
    else:
        if lam.size < 4:
            raise GridError("spline synthesis needs at least 4 spectral rows")
        spl = CubicSpline(lam, weighted, axis=0)
        values = KAPPA * spl.integrate(0.0, lam[-1]) if lam[0] == 0 else KAPPA * (
            spl.integrate(lam[0], lam[-1]) + lam[0] * weighted[0])
    return RadialFunction(grid, values)


# --------------------------------------------------------------------------
# band-limited data
# --------------------------------------------------------------------------

def band_limited_synthesis(h: SpectralFunction, space: RankOneSpace, tgrid: RadialGrid,
                           R: Optional[float] = None, support_tol: float = 1e-14,
                           config: QuadratureConfig = DEFAULT_QUADRATURE) -> RadialFunction:
    """Synthesize ``f`` from spectral data supported in ``[0, R]``.

    ``f(t) = KAPPA int_0^R h(lam) phi_lam(t) |c(lam)|**-2 dlam``.  The result
    carries a closed form, so transforms of it do not interpolate.

    Raises
    ------
    SupportError
        If stored samples of ``h`` beyond ``R`` are not negligible.
    """
    R = h.lambda_max if R is None else float(R)
    if not R > 0:
        raise PreconditionError("band limit R must be positive")
    beyond = np.abs(h.nodes) > R
    if np.any(beyond):
        scale = max(float(np.max(np.abs(h.values))), 1e-300)
        if np.max(np.abs(h.values[beyond])) > support_tol * scale:
            raise SupportError(f"spectral data is not supported in [0, {R:g}]")
    nodes, weights = spectral_nodes(R, config)
    vals = h(nodes)
    if h.closed_form is not None:
        outside = np.abs(h.closed_form(np.linspace(R, 1.5 * R, 65)[1:]))
        if np.max(outside) > support_tol * max(float(np.max(np.abs(vals))), 1e-300):
            raise SupportError(f"spectral data is not supported in [0, {R:g}]")
    bandlimited = SpectralFunction(nodes, vals, R, weights)
    inner = replace(config, tail_tol=math.inf)
    values = _inverse_core(bandlimited, space, tgrid.nodes, None, inner)
    return RadialFunction(tgrid, values,
                          closed_form=lambda s: _inverse_core(bandlimited, space, s, None, inner))


def support_leakage(f: RadialFunction, space: RankOneSpace, R: float, margin: float,
                    reference: float, config: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """``max |F(lam)|`` over ``lam in [R + margin, lambda_max]`` divided by ``reference``.

    The transform of a band-limited ``f`` vanishes there, so the measured
    level includes the radial truncation error; the tail check is skipped.
    """
    if R + margin >= config.lambda_max:
        raise PreconditionError("R + margin must be below lambda_max")
    lam, _ = panel_rule(R + margin, config.lambda_max, config.panel_width, config.order)
    ft = _forward_core(f, space, lam, None, replace(config, tail_tol=math.inf))
    return float(np.max(np.abs(ft)) / reference)


def spectral_growth_surrogate(h: SpectralFunction, space: RankOneSpace, Y: float,
                              config: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """``G(Y) = int_0^R |h|**2 (exp(2 lam Y) + exp(-2 lam Y)) |c|**-2 dlam``.

    ``R`` is ``h.lambda_max``.  Satisfies ``G(Y) <= exp(2 R Y) G(0)``.
    """
    if Y < 0:
        raise PreconditionError("Y must be nonnegative")
    lam, w, vals = _spectral_quadrature(h, config)
    dens = plancherel_density(space.jacobi_params(), lam)
    psi = np.exp(2 * lam * Y) + np.exp(-2 * lam * Y)
    return float(np.sum(w * np.abs(vals) ** 2 * psi * dens))
