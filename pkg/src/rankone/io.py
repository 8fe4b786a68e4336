"""CSV exchange for radial, spectral and projection-field data.

Schemas (header row first, one sample per row):

* radial function: ``t,re,im``
* spectral function: ``lambda,re,im`` plus an optional ``weight`` column
  holding quadrature weights
* projection field: long format ``lambda,t,re,im``, with optional
  ``lambda_im`` (complex spectral nodes) and ``weight`` columns

Numbers are written with 17 significant digits, so a write/read cycle is
bit-exact.  Files are written to a temporary sibling and renamed into place.
"""
from __future__ import annotations

import csv
import os
import tempfile
from pathlib import Path
from typing import Dict, Iterable, Optional, Sequence, Union

import numpy as np

from .errors import GridError, PreconditionError
from .geometry import KType, RadialFunction, RadialGrid, SpectralStrip
from .transforms import ProjectionField, SpectralFunction

__all__ = [
    "write_table",
    "read_table",
    "write_radial",
    "read_radial",
    "write_spectral",
    "read_spectral",
    "write_field",
    "read_field",
]

PathLike = Union[str, os.PathLike]


def _fmt(x) -> str:
    return format(float(x), ".17g")


def write_table(path: PathLike, header: Sequence[str], columns: Sequence[np.ndarray]) -> Path:
    """Write equal-length columns as CSV, atomically.

    Numeric entries use 17 significant digits; string columns are written
    as given.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    cols = [np.asarray(c) for c in columns]
    if len({c.shape[0] for c in cols}) > 1:
        raise GridError("columns must have equal length")
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            formatters = [(lambda v: str(v)) if c.dtype.kind in "UOSb" else _fmt for c in cols]
            for row in zip(*cols):
                writer.writerow([f(v) for f, v in zip(formatters, row)])
        umask = os.umask(0)
        os.umask(umask)
        os.chmod(tmp, 0o666 & ~umask)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def read_table(path: PathLike, required: Iterable[str]) -> Dict[str, np.ndarray]:
    """Read a numeric CSV into a dict of float columns keyed by header name.

    Raises
    ------
    PreconditionError
        If the file is missing a required column or holds non-numeric data.
    """
    path = Path(path)
    with open(path, newline="") as fh:
        first = fh.readline()
        if not first.strip():
            raise PreconditionError(f"{path}: empty file")
        header = [h.strip() for h in next(csv.reader([first]))]
        missing = [c for c in required if c not in header]
        if missing:
            raise PreconditionError(f"{path}: missing column(s) {', '.join(missing)}")
        try:
            data = np.loadtxt(fh, delimiter=",", dtype=float, ndmin=2)
        except ValueError as exc:
            raise PreconditionError(f"{path}: {exc}") from None
    if data.size == 0:
        data = np.zeros((0, len(header)))
    if data.shape[1] != len(header):
        raise PreconditionError(f"{path}: rows do not match the header")
    return {name: data[:, i] for i, name in enumerate(header)}


def _complex(cols: Dict[str, np.ndarray]) -> np.ndarray:
    return cols["re"] + 1j * cols["im"]


def write_radial(path: PathLike, f: RadialFunction) -> Path:
    vals = np.asarray(f.values, dtype=complex)
    return write_table(path, ["t", "re", "im"], [f.grid.nodes, vals.real, vals.imag])


def read_radial(path: PathLike) -> RadialFunction:
    """Read a ``t,re,im`` file; purely real data comes back as floats."""
    cols = read_table(path, ["t", "re", "im"])
    vals = _complex(cols)
    if not np.any(vals.imag):
        vals = vals.real
    return RadialFunction(RadialGrid(cols["t"]), vals)


def write_spectral(path: PathLike, ft: SpectralFunction) -> Path:
    header = ["lambda", "re", "im"]
    cols = [ft.nodes, ft.values.real, ft.values.imag]
    if ft.weights is not None:
        header.append("weight")
        cols.append(ft.weights)
    return write_table(path, header, cols)


def read_spectral(path: PathLike, lambda_max: Optional[float] = None) -> SpectralFunction:
    cols = read_table(path, ["lambda", "re", "im"])
    return SpectralFunction(cols["lambda"], _complex(cols), lambda_max, cols.get("weight"))


def write_field(path: PathLike, field: ProjectionField) -> Path:
    """Long-format dump, ``lambda`` varying slowest."""
    n_lam, n_t = field.table.shape
    lam = np.repeat(field.lambda_nodes, n_t)
    t = np.tile(field.t_grid.nodes, n_lam)
    vals = field.table.ravel()
    header, cols = ["lambda"], [lam.real]
    if np.any(field.lambda_nodes.imag):
        header.append("lambda_im")
        cols.append(lam.imag)
    header += ["t", "re", "im"]
    cols += [t, vals.real, vals.imag]
    if field.lambda_weights is not None:
        header.append("weight")
        cols.append(np.repeat(field.lambda_weights, n_t))
    return write_table(path, header, cols)


def read_field(path: PathLike, strip: SpectralStrip, ktype: Optional[KType] = None,
               lambda_max: Optional[float] = None) -> ProjectionField:
    """Read a long-format field; rows may come in any order but must form a full grid.

    Raises
    ------
    GridError
        If the ``(lambda, t)`` pairs do not form a complete rectangular grid.
    """
    cols = read_table(path, ["lambda", "t", "re", "im"])
    lam = cols["lambda"] + 1j * cols.get("lambda_im", np.zeros_like(cols["lambda"]))
    t = cols["t"]
    lam_nodes, first, lam_idx = np.unique(lam, return_index=True, return_inverse=True)
    # keep the file's order of first appearance for lambda
    order = np.argsort(first, kind="stable")
    lam_nodes = lam_nodes[order]
    rank = np.empty_like(order)
    rank[order] = np.arange(order.size)
    lam_idx = rank[lam_idx]
    t_nodes, t_idx = np.unique(t, return_inverse=True)
    if lam_nodes.size * t_nodes.size != t.size:
        raise GridError("field rows do not form a complete (lambda, t) grid")
    table = np.full((lam_nodes.size, t_nodes.size), np.nan + 0j)
    table[lam_idx, t_idx] = _complex(cols)
    if np.any(np.isnan(table.real)):
        raise GridError("field has duplicate or missing (lambda, t) pairs")
    weights = None
    if "weight" in cols:
        weights = np.zeros(lam_nodes.size)
        weights[lam_idx] = cols["weight"]
    return ProjectionField(lam_nodes, RadialGrid(t_nodes), table, strip, weights, ktype,
                           None, lambda_max)
