"""Config text format round-trip and file serialization."""

import os

import numpy as np
import pytest

from meiodrive.config import (ConfigError, ExperimentConfig, emit_config,
                              parse_config)
from meiodrive.engine import ObservableSeries
from meiodrive.io import (OutputError, encode_pgm, format_series,
                          genotype_gray, write_series, write_snapshot,
                          write_spacetime)


def test_minimal_config_gets_defaults():
    cfg = parse_config("phi_aa = 2.0\n")
    assert cfg.phi_aa == 2.0
    assert cfg.sample_interval == 1.0
    assert cfg.replicates == 1


def test_comments_and_blank_lines():
    cfg = parse_config("""
# full-line comment
phi_ab = 3.5  # trailing comment

t_end = 7
""")
    assert cfg.phi_ab == 3.5 and cfg.t_end == 7.0


def test_unknown_key_is_an_error_with_line_number():
    with pytest.raises(ConfigError, match="line 2"):
        parse_config("phi_aa = 1\nphi_aA = 2\n")


def test_negative_rate_names_the_key():
    with pytest.raises(ConfigError, match="phi_aa"):
        parse_config("phi_aa = -1\n")


def test_malformed_number_reports_line():
    with pytest.raises(ConfigError, match="line 1"):
        parse_config("t_end = fast\n")
    with pytest.raises(ConfigError, match="line 1"):
        parse_config("just words\n")


def test_sides_dimension_mismatch():
    with pytest.raises(ConfigError, match="sides"):
        parse_config("d = 2\nsides = 10\n")


def test_d2_snapshot_config_accepted():
    cfg = parse_config("""
command = simulate
d = 2
sides = 400,400
boundary = torus
phi_aa = 4
phi_ab = 5
phi_ba = 5
phi_bb = 4
init = bernoulli_genes
init_p = 0.5
t_end = 50
""")
    assert cfg.sides == (400, 400)
    assert cfg.lattice().n_sites == 160000


def test_round_trip_is_identity():
    cfg = parse_config("""
phi_aa = 0.1
phi_bb = 12.75
d = 2
sides = 8,12
init = cube_aa
init_halfwidth = 2
t_end = 3.25
seed = 987654321
snapshots = true
step = 0.0005
""")
    again = parse_config(emit_config(cfg))
    assert again == cfg
    # defaults round-trip too
    base = ExperimentConfig()
    assert parse_config(emit_config(base)) == base


def test_pgm_known_bytes(tmp_path):
    # 2x2 grid {AA, AB; BB, AA} -> payload 255, 128, 0, 255
    geno = np.array([[0, 1], [2, 0]], dtype=np.int8)
    path = tmp_path / "snap.pgm"
    write_snapshot(geno, str(path))
    data = path.read_bytes()
    assert data == b"P5\n2 2\n255\n" + bytes([255, 128, 0, 255])


def test_spacetime_raster(tmp_path):
    rows = [np.array([0, 1, 2], dtype=np.int8),
            np.array([1, 1, 1], dtype=np.int8)]
    path = tmp_path / "st.pgm"
    write_spacetime(rows, str(path))
    data = path.read_bytes()
    assert data.startswith(b"P5\n3 2\n255\n")
    assert data[-6:] == bytes([255, 128, 0, 128, 128, 128])


def test_gray_encoding_validates():
    with pytest.raises(ValueError):
        genotype_gray(np.array([0, 3]))
    with pytest.raises(ValueError):
        encode_pgm(np.zeros((2, 2, 2)))


def test_series_csv_format(tmp_path):
    s = ObservableSeries(["u_aa", "u_ab"])
    s.append(0.0, [1.0 / 3.0, 0.5])
    s.append(1.5, [0.123456789012345, 1e-9])
    path = tmp_path / "series.csv"
    write_series(s, str(path))
    lines = path.read_text().splitlines()
    assert lines[0] == "time,u_aa,u_ab"
    assert lines[1].split(",")[1] == "0.333333333333"  # 12 significant digits
    assert lines[2].split(",")[0] == "1.5"


def test_empty_series_is_header_only():
    s = ObservableSeries(["u_aa"])
    assert format_series(s) == "time,u_aa\n"


def test_write_is_atomic_on_failure(tmp_path):
    target = tmp_path / "sub" / "missing" / "out.csv"
    s = ObservableSeries(["x"])
    with pytest.raises(OutputError):
        write_series(s, str(target))
    assert not target.exists()
    # no stray temporaries in the (existing) parent
    assert list(tmp_path.iterdir()) == []


def test_snapshot_rewrite_is_byte_stable(tmp_path):
    geno = np.arange(9, dtype=np.int8).reshape(3, 3) % 3
    p1 = tmp_path / "a.pgm"
    p2 = tmp_path / "b.pgm"
    write_snapshot(geno, str(p1))
    write_snapshot(geno, str(p2))
    assert p1.read_bytes() == p2.read_bytes()
