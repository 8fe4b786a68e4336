"""Command line front end (``rankone``).

Exit status: 0 success, 1 a check failed, 2 usage error (bad flags, bad
grid), 3 precondition violated by the data or parameters.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from . import io
from .config import SCHEMA, Config, load_config
from .errors import GridError, RankOneError
from .geometry import RadialFunction, RadialGrid
from .spherical import gen_spherical_radial, jacobi_phi
from .transforms import (
    SpectralFunction,
    band_limited_synthesis,
    delta_spherical_transform,
    inverse_spherical_transform,
    projection_field,
    reconstruct_h,
    spectral_growth_surrogate,
    spherical_transform,
    support_leakage,
    synthesize_f,
)
from .transforms import QuadratureConfig
from .verify import check_all

EXIT_OK, EXIT_CHECK, EXIT_USAGE, EXIT_PRECONDITION = 0, 1, 2, 3

# flag -> config key
_FLAG_KEYS = {
    "space": "space.name",
    "p": "strip.p",
    "t_max": "grid.t_max",
    "t_step": "grid.t_step",
    "lambda_max": "grid.lambda_max",
    "tol": "quadrature.tail_tol",
    "out": "output.dir",
    "r": "ktype.r",
    "s": "ktype.s",
}


class UsageError(Exception):
    pass


# --------------------------------------------------------------------------
# input helpers
# --------------------------------------------------------------------------

def _split_profile(text: str):
    name, _, arg = text.partition(":")
    try:
        return name.lower(), (float(arg) if arg else None)
    except ValueError:
        raise UsageError(f"bad profile parameter in {text!r}") from None


def _radial_input(args, cfg: Config) -> RadialFunction:
    if args.input:
        return io.read_radial(args.input)
    name, arg = _split_profile(args.profile)
    if name == "gaussian":
        scale = 1.0 if arg is None else arg
        return RadialFunction.from_callable(lambda t: np.exp(-scale * np.asarray(t) ** 2), cfg.tgrid)
    raise UsageError(f"unknown radial profile {args.profile!r} (try gaussian[:scale])")


def _bump(R: float, a: float):
    def fn(lam):
        x = np.asarray(lam, dtype=float) / R
        out = np.zeros(x.shape)
        inside = np.abs(x) < 1
        out[inside] = np.exp(-a / (1 - x[inside] ** 2))
        return out
    return fn


def _spectral_input(args, cfg: Config, lambda_max: float) -> SpectralFunction:
    if args.input:
        return io.read_spectral(args.input, lambda_max=None)
    name, arg = _split_profile(args.profile)
    q = cfg.quadrature
    if name == "gaussian":
        scale = 1.0 if arg is None else arg
        return SpectralFunction.from_callable(lambda x: np.exp(-scale * np.asarray(x) ** 2), lambda_max, q)
    if name == "bump":
        return SpectralFunction.from_callable(_bump(lambda_max, 4.0 if arg is None else arg), lambda_max, q)
    if name == "flat":
        return SpectralFunction.from_callable(lambda x: np.ones_like(np.asarray(x, float)), lambda_max, q)
    raise UsageError(f"unknown spectral profile {args.profile!r} (try gaussian, bump[:a], flat)")


def _parse_complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError:
        raise UsageError(f"cannot parse {text!r} as a number") from None


def _lambda_nodes(args):
    if not args.lambdas:
        return None
    nodes = np.array([_parse_complex(x) for x in args.lambdas.split(",")])
    return nodes.real if not np.any(nodes.imag) else nodes


def _written(path: Path) -> None:
    print(f"wrote {path}")


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------

def cmd_eval_phi(args, cfg: Config) -> int:
    lam = _parse_complex(args.lam)
    grid, space, k = cfg.tgrid, cfg.space, cfg.ktype
    if k.is_trivial:
        vals = jacobi_phi(space.jacobi_params(), lam, grid.nodes)
        if complex(lam).imag == 0:
            vals = np.real(vals)
    else:
        vals = gen_spherical_radial(space, k, lam, grid.nodes)
    _written(io.write_radial(cfg.output_dir / "phi.csv", RadialFunction(grid, np.asarray(vals))))
    return EXIT_OK


def cmd_transform(args, cfg: Config) -> int:
    ft = spherical_transform(_radial_input(args, cfg), cfg.space, _lambda_nodes(args), cfg.quadrature)
    _written(io.write_spectral(cfg.output_dir / "transform.csv", ft))
    return EXIT_OK


def cmd_delta_transform(args, cfg: Config) -> int:
    ft = delta_spherical_transform(_radial_input(args, cfg), cfg.space, cfg.ktype,
                                   _lambda_nodes(args), cfg.quadrature)
    _written(io.write_spectral(cfg.output_dir / "delta_transform.csv", ft))
    return EXIT_OK


def cmd_inverse(args, cfg: Config) -> int:
    ft = _spectral_input(args, cfg, cfg["grid.lambda_max"])
    f = inverse_spherical_transform(ft, cfg.space, cfg.tgrid, cfg.quadrature)
    _written(io.write_radial(cfg.output_dir / "inverse.csv", f))
    return EXIT_OK


def cmd_project(args, cfg: Config) -> int:
    k = cfg.ktype
    field = projection_field(_radial_input(args, cfg), cfg.space, cfg.strip, _lambda_nodes(args),
                             cfg.tgrid, None if k.is_trivial else k, config=cfg.quadrature)
    _written(io.write_field(cfg.output_dir / "field.csv", field))
    return EXIT_OK


def _read_field(args, cfg: Config):
    if not args.input:
        raise UsageError("--input FIELD.csv is required")
    k = cfg.ktype
    return io.read_field(args.input, cfg.strip, None if k.is_trivial else k)


def cmd_reconstruct(args, cfg: Config) -> int:
    field = _read_field(args, cfg)
    h = reconstruct_h(field, cfg.space, cfg.ktype, d_scale=args.d_scale)
    _written(io.write_spectral(cfg.output_dir / "h.csv", h))
    return EXIT_OK


def cmd_synthesize(args, cfg: Config) -> int:
    f = synthesize_f(_read_field(args, cfg), cfg.space, cfg.quadrature)
    _written(io.write_radial(cfg.output_dir / "synthesized.csv", f))
    return EXIT_OK


def cmd_bandlimit(args, cfg: Config) -> int:
    R = args.R
    space = cfg.space
    h = _spectral_input(args, cfg, R)
    f = band_limited_synthesis(h, space, cfg.tgrid, R, config=cfg.quadrature)
    _written(io.write_radial(cfg.output_dir / "bandlimit.csv", f))
    check_q = QuadratureConfig(t_max=args.check_t_max, lambda_max=max(cfg["grid.lambda_max"], 2 * R + 1),
                               panel_width=cfg["quadrature.panel_width"], order=cfg["quadrature.order"])
    ref = float(np.max(np.abs(h.values))) or 1.0
    leak = support_leakage(f, space, R, args.margin, ref, check_q)
    ys = np.linspace(0.0, args.y_max, 21)
    g = np.array([spectral_growth_surrogate(h, space, y, cfg.quadrature) for y in ys])
    bound = np.exp(2 * R * ys) * g[0]
    _written(io.write_table(cfg.output_dir / "growth.csv", ["Y", "G", "bound"], [ys, g, bound]))
    growth_ok = bool(np.all(g <= bound * (1 + 1e-12)))
    leak_ok = leak < cfg["tol.quadrature"]
    print(f"support leakage beyond {R + args.margin:g}: {leak:.3e} ({'ok' if leak_ok else 'FAIL'})")
    print(f"growth bound G(Y) <= exp(2RY) G(0): {'ok' if growth_ok else 'FAIL'}")
    return EXIT_OK if leak_ok and growth_ok else EXIT_CHECK


def cmd_verify(args, cfg: Config) -> int:
    reports = check_all(cfg.space, cfg.verify, args.checks.split(",") if args.checks else None)
    cols = [
        np.array([r.name for r in reports], dtype=object),
        np.array(["PASS" if r.passed else "FAIL" for r in reports], dtype=object),
        np.array([r.sup_value for r in reports], dtype=float),
        np.array([";".join(f"{k}={v:.6g}" for k, v in r.fitted_constants) for r in reports], dtype=object),
        np.array([r.grid for r in reports], dtype=object),
        np.array([r.note for r in reports], dtype=object),
    ]
    path = io.write_table(cfg.output_dir / "report.csv",
                          ["name", "status", "value", "constants", "grid", "note"], cols)
    for r in reports:
        print(f"{'PASS' if r.passed else 'FAIL'}  {r.name:28s} {r.sup_value:.3e}  {r.note}")
    _written(path)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_CHECK


COMMANDS: Dict[str, Callable] = {
    "eval-phi": cmd_eval_phi,
    "transform": cmd_transform,
    "inverse": cmd_inverse,
    "delta-transform": cmd_delta_transform,
    "project": cmd_project,
    "reconstruct": cmd_reconstruct,
    "synthesize": cmd_synthesize,
    "bandlimit": cmd_bandlimit,
    "verify": cmd_verify,
}


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------

def _common_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("configuration")
    g.add_argument("--config", help="flat 'section.key = value' file")
    g.add_argument("--space", help=SCHEMA["space.name"][2])
    g.add_argument("--p", type=float, help=SCHEMA["strip.p"][2])
    g.add_argument("--t-max", type=float, help=SCHEMA["grid.t_max"][2])
    g.add_argument("--t-step", type=float, help=SCHEMA["grid.t_step"][2])
    g.add_argument("--lambda-max", type=float, help=SCHEMA["grid.lambda_max"][2])
    g.add_argument("--tol", type=float, help=SCHEMA["quadrature.tail_tol"][2])
    g.add_argument("--out", help=SCHEMA["output.dir"][2])
    g.add_argument("--r", type=int, help=SCHEMA["ktype.r"][2])
    g.add_argument("--s", type=int, help=SCHEMA["ktype.s"][2])
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(prog="rankone", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, help_text):
        return sub.add_parser(name, parents=[common], help=help_text, description=help_text)

    p = add("eval-phi", "sample phi_lam (or phi_{lam,delta} with --r/--s) to phi.csv")
    p.add_argument("--lambda", dest="lam", default="1", help="spectral parameter, e.g. 2 or 1+0.5i")

    for name, text in (("transform", "spherical transform to transform.csv"),
                       ("delta-transform", "delta-spherical transform to delta_transform.csv"),
                       ("project", "projection field to field.csv")):
        p = add(name, text)
        p.add_argument("--input", help="radial CSV (t,re,im)")
        p.add_argument("--profile", default="gaussian", help="built-in profile: gaussian[:scale]")
        p.add_argument("--lambdas", help="comma-separated spectral nodes (default: quadrature nodes)")

    p = add("inverse", "inverse spherical transform to inverse.csv")
    p.add_argument("--input", help="spectral CSV (lambda,re,im[,weight])")
    p.add_argument("--profile", default="gaussian", help="built-in profile: gaussian[:scale], bump[:a], flat")

    p = add("reconstruct", "recover h from a field CSV to h.csv")
    p.add_argument("--input", help="field CSV (lambda,t,re,im)")
    p.add_argument("--d-scale", type=float, default=1.0, help="representation dimension factor")

    p = add("synthesize", "synthesize f from a field CSV to synthesized.csv")
    p.add_argument("--input", help="field CSV (lambda,t,re,im)")

    p = add("bandlimit", "band-limited synthesis, support check and growth surrogate")
    p.add_argument("--input", help="spectral CSV supported in [0, R]")
    p.add_argument("--profile", default="bump", help="built-in profile on [0, R]: bump[:a], flat, gaussian")
    p.add_argument("--R", type=float, default=2.0, help="band limit")
    p.add_argument("--margin", type=float, default=0.2, help="support check starts at R + margin")
    p.add_argument("--check-t-max", type=float, default=60.0, help="radial truncation for the support check")
    p.add_argument("--y-max", type=float, default=5.0, help="largest Y for the growth surrogate")

    p = add("verify", "run the check suite and write report.csv")
    p.add_argument("--checks", help="comma-separated subset of checks")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    overrides = {key: getattr(args, flag) for flag, key in _FLAG_KEYS.items()}
    try:
        cfg = load_config(args.config, overrides)
        return COMMANDS[args.command](args, cfg)
    except (UsageError, GridError, FileNotFoundError) as exc:
        print(f"rankone: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except RankOneError as exc:
        print(f"rankone: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
