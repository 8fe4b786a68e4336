"""Run configuration: flat ``section.key = value`` files, environment and flags.

Precedence, lowest first: built-in defaults, the config file, environment
variables ``RANKONE_<SECTION>_<KEY>`` (e.g. ``RANKONE_GRID_T_MAX``), command
line flags.  Lines starting with ``#`` and blank lines are ignored.

Space syntax (``space.name``): ``h<n>`` real hyperbolic, ``ch<n>`` complex
hyperbolic, ``jacobi:<alpha>,<beta>`` or ``mult:<m_gamma>,<m_2gamma>``.
"""
from __future__ import annotations

import os
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, Mapping, Optional, Tuple

from .errors import GridError, PreconditionError
from .geometry import KType, RadialGrid, RankOneSpace, SpectralStrip
from .transforms import QuadratureConfig
from .verify import VerifyConfig

__all__ = ["SCHEMA", "Config", "parse_space", "load_config", "ENV_PREFIX"]

ENV_PREFIX = "RANKONE_"

# key -> (parser, default, description)
SCHEMA: Dict[str, Tuple[Callable[[str], Any], str, str]] = {
    "space.name": (str, "h3", "symmetric space (h<n>, ch<n>, jacobi:a,b, mult:m1,m2)"),
    "strip.p": (float, "1.5", "exponent p in (0, 2]; strip |Im lam| <= (2/p - 1) rho"),
    "grid.t_max": (float, "20", "radial truncation and output range"),
    "grid.t_step": (float, "0.05", "spacing of radial output grids"),
    "grid.lambda_max": (float, "30", "spectral truncation"),
    "quadrature.panel_width": (float, "1.0", "Gauss-Legendre panel width"),
    "quadrature.order": (int, "32", "nodes per panel"),
    "quadrature.tail_tol": (float, "1e-9", "truncation tolerance relative to the integrand peak"),
    "tol.identity": (float, "1e-10", "threshold for exact identities"),
    "tol.quadrature": (float, "1e-6", "threshold for quadrature round trips"),
    "tol.stability": (float, "0.01", "domain-doubling stability threshold"),
    "ktype.r": (int, "0", "K-type label r"),
    "ktype.s": (int, "0", "K-type label s"),
    "verify.seed": (int, "20240611", "seed for randomized checks"),
    "output.dir": (str, ".", "directory for output files"),
}

_LINE = re.compile(r"^\s*([A-Za-z_][\w]*\.[A-Za-z_][\w]*)\s*=\s*(.*?)\s*$")


def env_name(key: str) -> str:
    return ENV_PREFIX + key.replace(".", "_").upper()


def parse_space(text: str) -> RankOneSpace:
    """Build a space from ``h<n>``, ``ch<n>``, ``jacobi:a,b`` or ``mult:m1,m2``."""
    s = text.strip().lower()
    try:
        if s.startswith("jacobi:"):
            a, b = (float(x) for x in s[7:].split(","))
            return RankOneSpace.from_jacobi(a, b)
        if s.startswith("mult:"):
            m1, m2 = (float(x) for x in s[5:].split(","))
            return RankOneSpace.from_multiplicities(m1, m2)
        if s.startswith("ch"):
            return RankOneSpace.complex_hyperbolic(int(s[2:]))
        if s.startswith("h"):
            return RankOneSpace.real_hyperbolic(int(s[1:]))
    except ValueError:
        pass
    raise PreconditionError(f"unrecognized space {text!r}")


def read_config_file(path: os.PathLike) -> Dict[str, str]:
    """Parse a config file into raw strings.

    Raises
    ------
    PreconditionError
        On malformed lines or unknown keys.
    """
    out: Dict[str, str] = {}
    for no, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _LINE.match(line)
        if not m:
            raise PreconditionError(f"{path}:{no}: expected 'section.key = value'")
        key, value = m.group(1).lower(), m.group(2)
        if key not in SCHEMA:
            raise PreconditionError(f"{path}:{no}: unknown key {key!r}")
        out[key] = value
    return out


@dataclass(frozen=True)
class Config:
    """Typed, validated settings.  Build with :func:`load_config`."""

    values: Mapping[str, Any] = field(default_factory=dict)

    def __getitem__(self, key: str) -> Any:
        return self.values[key]

    @property
    def space(self) -> RankOneSpace:
        return parse_space(self["space.name"])

    @property
    def strip(self) -> SpectralStrip:
        return SpectralStrip(self["strip.p"])

    @property
    def quadrature(self) -> QuadratureConfig:
        return QuadratureConfig(t_max=self["grid.t_max"], lambda_max=self["grid.lambda_max"],
                                panel_width=self["quadrature.panel_width"],
                                order=self["quadrature.order"],
                                tail_tol=self["quadrature.tail_tol"])

    @property
    def tgrid(self) -> RadialGrid:
        return RadialGrid.with_step(self["grid.t_max"], self["grid.t_step"])

    @property
    def ktype(self) -> KType:
        return KType(self["ktype.r"], self["ktype.s"])

    @property
    def verify(self) -> VerifyConfig:
        return VerifyConfig(seed=self["verify.seed"], identity_tol=self["tol.identity"],
                            quadrature_tol=self["tol.quadrature"],
                            stability_tol=self["tol.stability"], p=self["strip.p"],
                            quadrature=self.quadrature)

    @property
    def output_dir(self) -> Path:
        return Path(self["output.dir"])

    def validate(self) -> None:
        """Construct every derived object so bad settings fail early."""
        if not self["grid.t_step"] > 0 or not self["grid.t_step"] <= self["grid.t_max"]:
            raise GridError("grid.t_step must lie in (0, t_max]")
        _ = (self.space, self.strip, self.quadrature, self.tgrid)
        self.space.check_ktype(self.ktype)


def load_config(path: Optional[os.PathLike] = None, overrides: Optional[Mapping[str, Any]] = None,
                environ: Optional[Mapping[str, str]] = None) -> Config:
    """Merge defaults, file, environment and ``overrides`` (highest) and validate.

    ``overrides`` entries that are ``None`` are ignored, so argparse results
    can be passed through directly.
    """
    raw = {k: default for k, (_, default, _) in SCHEMA.items()}
    if path is not None:
        raw.update(read_config_file(path))
    environ = os.environ if environ is None else environ
    for key in SCHEMA:
        name = env_name(key)
        if name in environ:
            raw[key] = environ[name]
    for key, value in (overrides or {}).items():
        if key not in SCHEMA:
            raise PreconditionError(f"unknown setting {key!r}")
        if value is not None:
            raw[key] = str(value)
    typed = {}
    for key, text in raw.items():
        parser = SCHEMA[key][0]
        try:
            typed[key] = parser(text)
        except ValueError:
            raise PreconditionError(f"invalid value for {key}: {text!r}") from None
    cfg = Config(typed)
    cfg.validate()
    return cfg
