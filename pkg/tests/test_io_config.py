import os

import numpy as np
import pytest

from rankone.config import load_config, parse_space, read_config_file
from rankone.errors import GridError, KTypeError, PreconditionError
from rankone.geometry import KType, RadialFunction, RadialGrid, RankOneSpace, SpectralStrip
from rankone.io import read_field, read_radial, read_spectral, write_field, write_radial, write_spectral
from rankone.transforms import ProjectionField, SpectralFunction


def test_radial_round_trip_bit_exact(tmp_path, rng):
    grid = RadialGrid(np.sort(rng.uniform(0, 10, 50)))
    vals = rng.normal(size=50) + 1j * rng.normal(size=50) * 1e-300
    f = RadialFunction(grid, vals)
    back = read_radial(write_radial(tmp_path / "f.csv", f))
    assert np.array_equal(back.grid.nodes, grid.nodes)
    assert np.array_equal(back.values, vals)


def test_real_radial_reads_back_real(tmp_path):
    f = RadialFunction(RadialGrid.uniform(1, 5), np.array([1.0, 0.5, np.pi, 1e-17, -2.0]))
    back = read_radial(write_radial(tmp_path / "f.csv", f))
    assert not np.iscomplexobj(back.values)
    assert np.array_equal(back.values, f.values)


def test_spectral_round_trip_with_weights(tmp_path, rng):
    nodes = np.sort(rng.uniform(0, 5, 20))
    sf = SpectralFunction(nodes, rng.normal(size=20) + 1j * rng.normal(size=20), 5.0, rng.uniform(size=20))
    back = read_spectral(write_spectral(tmp_path / "s.csv", sf))
    assert np.array_equal(back.nodes, sf.nodes)
    assert np.array_equal(back.values, sf.values)
    assert np.array_equal(back.weights, sf.weights)
    plain = SpectralFunction(nodes, sf.values)
    assert read_spectral(write_spectral(tmp_path / "p.csv", plain)).weights is None


def test_field_round_trip_complex_nodes(tmp_path, rng):
    lam = np.array([0.0, 1.5, -1j, 2.0 + 0.5j])
    grid = RadialGrid.uniform(2.0, 7)
    table = rng.normal(size=(4, 7)) + 1j * rng.normal(size=(4, 7))
    field = ProjectionField(lam, grid, table, SpectralStrip(1.0), np.array([0.1, 0.2, 0.3, 0.4]))
    path = write_field(tmp_path / "field.csv", field)
    back = read_field(path, SpectralStrip(1.0))
    assert np.array_equal(back.lambda_nodes, lam)
    assert np.array_equal(back.table, table)
    assert np.array_equal(back.lambda_weights, field.lambda_weights)
    assert "lambda_im" in path.read_text().splitlines()[0]


def test_field_rows_any_order(tmp_path):
    grid = RadialGrid.uniform(1.0, 3)
    table = np.arange(6, dtype=float).reshape(2, 3)
    field = ProjectionField(np.array([2.0, 1.0]), grid, table, SpectralStrip(2.0))
    path = write_field(tmp_path / "f.csv", field)
    lines = path.read_text().splitlines()
    path.write_text("\n".join([lines[0]] + lines[1:][::-1]) + "\n")
    back = read_field(path, SpectralStrip(2.0))
    row = {complex(x): i for i, x in enumerate(back.lambda_nodes)}
    assert np.array_equal(back.table[row[2.0]], table[0])
    assert np.array_equal(back.table[row[1.0]], table[1])


def test_field_incomplete_grid(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("lambda,t,re,im\n0,0,1,0\n0,1,1,0\n1,0,1,0\n")
    with pytest.raises(GridError):
        read_field(path, SpectralStrip(2.0))


def test_missing_column(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("t,re\n0,1\n")
    with pytest.raises(PreconditionError):
        read_radial(path)


def test_atomic_write_leaves_no_temporaries(tmp_path):
    f = RadialFunction(RadialGrid.uniform(1, 3), np.ones(3))
    write_radial(tmp_path / "f.csv", f)
    write_radial(tmp_path / "f.csv", f)
    assert sorted(os.listdir(tmp_path)) == ["f.csv"]


# --------------------------------------------------------------------------
# configuration
# --------------------------------------------------------------------------

def test_parse_space():
    assert parse_space("h3") == RankOneSpace.real_hyperbolic(3)
    assert parse_space("CH2") == RankOneSpace.complex_hyperbolic(2)
    assert parse_space("jacobi:0.5,-0.5") == RankOneSpace.from_jacobi(0.5, -0.5)
    assert parse_space("mult:2,1") == RankOneSpace.complex_hyperbolic(2)
    with pytest.raises(PreconditionError):
        parse_space("sphere")


def test_defaults():
    cfg = load_config(environ={})
    assert cfg.space == RankOneSpace.real_hyperbolic(3)
    assert cfg.quadrature.t_max == 20 and cfg.quadrature.lambda_max == 30
    assert cfg.ktype == KType(0, 0)


def test_precedence(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("# comment\ngrid.t_max = 12\ngrid.lambda_max = 9  # trailing\nspace.name = ch2\n")
    env = {"RANKONE_GRID_T_MAX": "8", "RANKONE_STRIP_P": "1.2"}
    cfg = load_config(path, {"grid.t_max": None}, environ=env)
    assert cfg["grid.t_max"] == 8.0
    assert cfg["grid.lambda_max"] == 9.0
    assert cfg["strip.p"] == 1.2
    assert cfg.space == RankOneSpace.complex_hyperbolic(2)
    cfg = load_config(path, {"grid.t_max": 5.0}, environ=env)
    assert cfg["grid.t_max"] == 5.0


def test_config_errors(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("grid.t_max 3\n")
    with pytest.raises(PreconditionError):
        read_config_file(bad)
    bad.write_text("grid.unknown = 3\n")
    with pytest.raises(PreconditionError):
        read_config_file(bad)
    with pytest.raises(PreconditionError):
        load_config(overrides={"grid.t_max": "abc"}, environ={})
    with pytest.raises(GridError):
        load_config(overrides={"grid.t_max": 0}, environ={})
    with pytest.raises(KTypeError):
        load_config(overrides={"ktype.r": 2, "ktype.s": 1}, environ={})
    with pytest.raises(PreconditionError):
        load_config(overrides={"strip.p": 3}, environ={})
