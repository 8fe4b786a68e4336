"""Rank-one symmetric spaces in the radial picture.

A space is described by its two root multiplicities, or equivalently by the
Jacobi pair ``(alpha, beta)``.  Radial functions live on the half-line
``t >= 0`` with the volume density

    Delta(t) = (2 sinh t)**(2 alpha + 1) * (2 cosh t)**(2 beta + 1)

and the radial Laplace-Beltrami operator

    L f = f'' + ((2 alpha + 1) coth t + (2 beta + 1) tanh t) f'.

Throughout, ``rho = alpha + beta + 1`` is the half-sum of positive roots, so
``L phi_lambda = -(lambda**2 + rho**2) phi_lambda``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Optional

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import GridError, KTypeError, PreconditionError, StripError

__all__ = [
    "RankOneSpace",
    "KType",
    "JacobiParams",
    "RadialGrid",
    "RadialFunction",
    "SpectralStrip",
    "MODEL_SPACES",
    "density_delta",
    "radial_laplacian",
]


@dataclass(frozen=True)
class JacobiParams:
    """Shifted Jacobi parameters ``(mu, tau)`` with ``varrho = mu + tau + 1``."""

    mu: float
    tau: float

    def __post_init__(self):
        if not (np.isfinite(self.mu) and np.isfinite(self.tau)):
            raise PreconditionError("Jacobi parameters must be finite")
        if self.mu < -0.5 or self.tau < -0.5:
            raise PreconditionError(
                f"Jacobi parameters need mu, tau >= -1/2 (got {self.mu}, {self.tau})"
            )

    @property
    def varrho(self) -> float:
        return self.mu + self.tau + 1.0


@dataclass(frozen=True)
class KType:
    """A K-type ``(r, s)`` with a one-dimensional M-fixed space."""

    r: int = 0
    s: int = 0

    def __post_init__(self):
        if int(self.r) != self.r or int(self.s) != self.s:
            raise KTypeError("K-type labels must be integers")
        if self.r < 0:
            raise KTypeError("K-type label r must be nonnegative")
        object.__setattr__(self, "r", int(self.r))
        object.__setattr__(self, "s", int(self.s))

    @property
    def is_trivial(self) -> bool:
        return self.r == 0 and self.s == 0


@dataclass(frozen=True)
class RankOneSpace:
    """Root data of a rank-one Riemannian symmetric space of noncompact type.

    Use :meth:`from_multiplicities` or :meth:`from_jacobi` rather than the raw
    constructor.

    Attributes
    ----------
    m_gamma, m_2gamma : float
        Multiplicities of the roots ``gamma`` and ``2 gamma``.
    alpha, beta : float
        Jacobi parameters, ``alpha = (m_gamma + m_2gamma - 1) / 2`` and
        ``beta = (m_2gamma - 1) / 2``.
    """

    m_gamma: float
    m_2gamma: float
    alpha: float = field(init=False)
    beta: float = field(init=False)

    def __post_init__(self):
        if self.m_gamma < 0 or self.m_2gamma < 0:
            raise PreconditionError("root multiplicities must be nonnegative")
        alpha = 0.5 * (self.m_gamma + self.m_2gamma - 1.0)
        beta = 0.5 * (self.m_2gamma - 1.0)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)
        # rho == 0 only for the flat line (m_gamma = m_2gamma = 0)
        if self.rho < 0 or (self.rho == 0 and self.m_gamma != 0):
            raise PreconditionError("rho = alpha + beta + 1 must be positive")

    @classmethod
    def from_multiplicities(cls, m_gamma: int, m_2gamma: int = 0) -> "RankOneSpace":
        """Space with integer root multiplicities, ``m_gamma >= 1``."""
        if int(m_gamma) != m_gamma or int(m_2gamma) != m_2gamma:
            raise PreconditionError("root multiplicities must be integers")
        if m_gamma < 1:
            raise PreconditionError("m_gamma must be a positive integer")
        return cls(float(m_gamma), float(m_2gamma))

    @classmethod
    def from_jacobi(cls, alpha: float, beta: float) -> "RankOneSpace":
        """Space from a Jacobi pair with ``alpha >= beta >= -1/2``.

        The pair ``(-1/2, -1/2)`` is accepted and gives the Euclidean line
        (cosine transform), which is a handy exact reference.
        """
        if beta < -0.5 or alpha < beta:
            raise PreconditionError("need alpha >= beta >= -1/2")
        return cls(2.0 * (alpha - beta), 2.0 * beta + 1.0)

    @classmethod
    def real_hyperbolic(cls, n: int) -> "RankOneSpace":
        """Real hyperbolic space of dimension ``n >= 2``."""
        return cls.from_multiplicities(n - 1, 0)

    @classmethod
    def complex_hyperbolic(cls, n: int) -> "RankOneSpace":
        """Complex hyperbolic space ``SU(n, 1) / S(U(n) x U(1))``."""
        return cls.from_multiplicities(2 * (n - 1), 1)

    @property
    def rho(self) -> float:
        return self.alpha + self.beta + 1.0

    def jacobi_params(self, ktype: Optional[KType] = None) -> JacobiParams:
        """Shifted parameters ``(alpha + r, beta + s)``.

        When ``beta + s < -1/2`` the reflected value ``-(beta + s)`` is returned
        instead; the two Jacobi functions differ only by a power of
        ``cosh t`` (see :func:`rankone.spherical.gen_spherical_radial`).
        """
        if ktype is None:
            return JacobiParams(self.alpha, self.beta)
        self.check_ktype(ktype)
        tau = self.beta + ktype.s
        if tau < -0.5:
            tau = -tau
        return JacobiParams(self.alpha + ktype.r, tau)

    def admits(self, ktype: KType) -> bool:
        """Whether ``ktype`` is an admissible label for this space."""
        r, s = ktype.r, ktype.s
        if self.m_2gamma >= 1:
            return (r + s) >= 0 and (r - s) >= 0 and (r + s) % 2 == 0
        return s == 0

    def check_ktype(self, ktype: KType) -> None:
        if not self.admits(ktype):
            raise KTypeError(f"K-type (r={ktype.r}, s={ktype.s}) is not admitted by {self}")

    def __str__(self) -> str:
        return f"RankOneSpace(alpha={self.alpha:g}, beta={self.beta:g}, rho={self.rho:g})"


# the default model spaces used across tests and the CLI
MODEL_SPACES = {
    "H2": RankOneSpace.real_hyperbolic(2),
    "H3": RankOneSpace.real_hyperbolic(3),
    "CH2": RankOneSpace.complex_hyperbolic(2),
    "CH3": RankOneSpace.complex_hyperbolic(3),
}


@dataclass(frozen=True)
class SpectralStrip:
    """The tube ``|Im lambda| <= epsilon * rho`` attached to an exponent ``p``."""

    p: float

    def __post_init__(self):
        if not (0 < self.p <= 2):
            raise PreconditionError("strip exponent p must lie in (0, 2]")

    @property
    def epsilon(self) -> float:
        return 2.0 / self.p - 1.0

    def half_width(self, space: RankOneSpace) -> float:
        return self.epsilon * space.rho

    def contains(self, lam, space: RankOneSpace) -> bool:
        """True when every ``lam`` lies in the closed strip."""
        im = np.abs(np.imag(np.asarray(lam, dtype=complex)))
        return bool(np.all(im <= self.half_width(space) * (1 + 1e-14)))

    def require(self, lam, space: RankOneSpace) -> None:
        if not self.contains(lam, space):
            raise StripError(
                f"spectral parameter outside |Im lambda| <= {self.half_width(space):g}"
            )


@dataclass(frozen=True, eq=False)
class RadialGrid:
    """Strictly increasing nodes on ``[0, t_max]``."""

    nodes: np.ndarray

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        if nodes.ndim != 1 or nodes.size < 1:
            raise GridError("grid needs at least one node")
        if not np.all(np.isfinite(nodes)) or nodes[0] < 0:
            raise GridError("grid nodes must be finite and nonnegative")
        if np.any(np.diff(nodes) <= 0):
            raise GridError("grid nodes must be strictly increasing")
        nodes.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)

    @classmethod
    def uniform(cls, t_max: float, n: int) -> "RadialGrid":
        """``n`` equally spaced nodes from 0 to ``t_max`` inclusive."""
        if not (t_max > 0) or not np.isfinite(t_max):
            raise GridError("t_max must be positive")
        if n < 2:
            raise GridError("a uniform grid needs n >= 2 nodes")
        return cls(np.linspace(0.0, float(t_max), int(n)))

    @classmethod
    def with_step(cls, t_max: float, step: float) -> "RadialGrid":
        if not (step > 0):
            raise GridError("step must be positive")
        return cls.uniform(t_max, int(round(t_max / step)) + 1)

    @property
    def t_max(self) -> float:
        return float(self.nodes[-1])

    @property
    def n(self) -> int:
        return int(self.nodes.size)

    @property
    def is_uniform(self) -> bool:
        if self.n < 2:
            return False
        d = np.diff(self.nodes)
        return bool(np.allclose(d, d[0], rtol=1e-9, atol=0))

    @property
    def step(self) -> float:
        if not self.is_uniform:
            raise GridError("grid is not uniform")
        return float((self.nodes[-1] - self.nodes[0]) / (self.n - 1))

    def refined(self) -> "RadialGrid":
        """Uniform grid with half the step, or midpoints inserted otherwise."""
        mids = 0.5 * (self.nodes[1:] + self.nodes[:-1])
        out = np.empty(2 * self.n - 1)
        out[0::2] = self.nodes
        out[1::2] = mids
        return RadialGrid(out)

    def __eq__(self, other):
        return isinstance(other, RadialGrid) and np.array_equal(self.nodes, other.nodes)

    def __hash__(self):
        return hash(self.nodes.tobytes())

    def __repr__(self):
        return f"RadialGrid(n={self.n}, t_max={self.t_max:g})"


@dataclass(frozen=True, eq=False)
class RadialFunction:
    """Samples of a function of ``t`` on a :class:`RadialGrid`.

    When ``closed_form`` is given it is used wherever the function has to be
    evaluated off the grid (quadrature nodes, refined grids).  Otherwise a
    cubic spline through the samples is used.
    """

    grid: RadialGrid
    values: np.ndarray
    closed_form: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def __post_init__(self):
        vals = np.asarray(self.values)
        if not np.iscomplexobj(vals):
            vals = vals.astype(float)
        if vals.shape != (self.grid.n,):
            raise GridError("values do not match the grid")
        if not np.all(np.isfinite(vals)):
            raise PreconditionError("radial samples must be finite")
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_callable(cls, fn: Callable[[np.ndarray], np.ndarray], grid: RadialGrid) -> "RadialFunction":
        return cls(grid, np.asarray(fn(grid.nodes)), closed_form=fn)

    @cached_property
    def _spline(self):
        if self.grid.n < 2:
            raise GridError("cannot interpolate a single sample")
        return CubicSpline(self.grid.nodes, self.values, bc_type="not-a-knot")

    def __call__(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if self.closed_form is not None:
            return np.asarray(self.closed_form(t))
        inside = (t >= self.grid.nodes[0]) & (t <= self.grid.t_max)
        out = np.zeros(t.shape, dtype=self.values.dtype)
        out[inside] = self._spline(t[inside])
        return out

    def resample(self, grid: RadialGrid) -> "RadialFunction":
        return RadialFunction(grid, self(grid.nodes), self.closed_form)


def density_delta(space: RankOneSpace, t):
    """Radial volume density ``(2 sinh t)**(2a+1) (2 cosh t)**(2b+1)``.

    Works elementwise on arrays; ``t`` must be nonnegative.
    """
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise PreconditionError("density_delta needs t >= 0")
    with np.errstate(over="ignore"):
        out = (np.power(2.0 * np.sinh(t), 2.0 * space.alpha + 1.0)
               * np.power(2.0 * np.cosh(t), 2.0 * space.beta + 1.0))
    return out[()] if out.ndim == 0 else out


def _laplacian_coefficient(alpha: float, beta: float, t: np.ndarray) -> np.ndarray:
    return (2 * alpha + 1) / np.tanh(t) + (2 * beta + 1) * np.tanh(t)


def radial_laplacian(f: RadialFunction, space: RankOneSpace) -> RadialFunction:
    """Apply the radial Laplace-Beltrami operator with 5-point differences.

    Only interior nodes ``nodes[2:-2]`` are returned; nodes at ``t = 0`` are
    excluded since the operator is singular there.

    Raises
    ------
    GridError
        If the grid is not uniform or has fewer than 5 nodes.
    """
    grid = f.grid
    if grid.n < 5:
        raise GridError("radial_laplacian needs at least 5 grid nodes")
    if not grid.is_uniform:
        raise GridError("radial_laplacian needs a uniform grid")
    h = grid.step
    v = f.values
    d1 = (v[:-4] - 8 * v[1:-3] + 8 * v[3:-1] - v[4:]) / (12 * h)
    d2 = (-v[:-4] + 16 * v[1:-3] - 30 * v[2:-2] + 16 * v[3:-1] - v[4:]) / (12 * h * h)
    t = grid.nodes[2:-2]
    keep = t > 0
    out = d2[keep] + _laplacian_coefficient(space.alpha, space.beta, t[keep]) * d1[keep]
    return RadialFunction(RadialGrid(t[keep]), out)
