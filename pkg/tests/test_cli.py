from __future__ import annotations

import csv
import json
import math

import numpy as np
import pytest

from latgreen.cli import build_parser, main, parse_point
from latgreen.sphere_backend import INFINITY

from conftest import random_jacobian_data


def run(argv):
    return main(argv)


def test_parse_point_forms():
    assert parse_point("2+2i") == 2 + 2j
    assert parse_point("3") == 3 + 0j
    assert parse_point("-1.5i") == -1.5j
    assert parse_point("2,0.5") == 2 + 0.5j
    assert parse_point("inf") is INFINITY


# --- green-table ----------------------------------------------------------------

def test_green_table_row_count(tmp_path):
    out = tmp_path / "table.csv"
    code = run(
        ["green-table", "--lambda", "2+2i", "--window", "4", "--target", "0,0",
         "--nodes", "128", "--out", str(out)]
    )
    assert code == 0
    rows = out.read_text().splitlines()
    assert rows[0] == "mu,nu,mu_t,nu_t,re,im"
    assert len(rows) - 1 == (2 * 4 + 1) ** 2


def test_green_table_degenerate_lambda(tmp_path, capsys):
    code = run(["green-table", "--lambda", "i", "--out", str(tmp_path / "x.csv")])
    assert code == 2
    assert "degenerate contour" in capsys.readouterr().err


def test_green_table_g0_figure_value(tmp_path):
    out = tmp_path / "g0.csv"
    code = run(["green-table", "--g0", "--target", "0,0", "--window", "5",
                "--nodes", "256", "--out", str(out)])
    assert code == 0
    with open(out) as fh:
        got = {
            (int(r["mu"]), int(r["nu"])): complex(float(r["re"]), float(r["im"]))
            for r in csv.DictReader(fh)
        }
    # lattice point (m, n) = (2, -2) is (mu, nu) = (0, -2)
    assert got[(0, -2)] == pytest.approx(2.0, abs=1e-10)
    # lattice point (m, n) = (1, -1) is (mu, nu) = (0, -1)
    assert got[(0, -1)] == pytest.approx(0.5, abs=1e-10)


def test_green_table_requires_lambda_without_g0(tmp_path, capsys):
    code = run(["green-table", "--out", str(tmp_path / "x.csv")])
    assert code == 2


def test_green_table_rejects_theta_backend(tmp_path, rng):
    from latgreen import save_jacobian_data

    data_path = tmp_path / "data.json"
    save_jacobian_data(random_jacobian_data(rng, 1), data_path)
    code = run(["green-table", "--backend", str(data_path), "--g0",
                "--out", str(tmp_path / "x.csv")])
    assert code == 2


def test_green_table_json_format(tmp_path):
    out = tmp_path / "table.json"
    code = run(["green-table", "--lambda", "1+0.5i", "--window", "2",
                "--nodes", "128", "--format", "json", "--out", str(out)])
    assert code == 0
    payload = json.loads(out.read_text())
    assert payload["metadata"]["kind"] == "green"
    assert len(payload["values"]) == 25


def test_green_table_lambda_inf_uses_fallback_contour(tmp_path):
    out = tmp_path / "inf.json"
    code = run(["green-table", "--lambda", "inf", "--window", "1",
                "--nodes", "64", "--format", "json", "--out", str(out)])
    assert code == 0
    payload = json.loads(out.read_text())
    assert payload["metadata"]["lambda"] == "inf"


def test_green_table_deterministic_output(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["green-table", "--lambda", "2+2i", "--window", "2", "--nodes", "128"]
    assert run(args + ["--out", str(a)]) == 0
    assert run(args + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_green_table_io_failure(tmp_path):
    code = run(["green-table", "--g0", "--window", "1", "--nodes", "64",
                "--out", str(tmp_path / "no_such_dir" / "x.csv")])
    assert code == 3


def test_nodes_lower_bound_rejected(tmp_path):
    code = run(["green-table", "--g0", "--nodes", "8", "--out", str(tmp_path / "x.csv")])
    assert code == 2


def test_tol_gate_warns_on_large_estimate(tmp_path, capsys):
    code = run(["green-table", "--lambda", "2+2i", "--window", "2", "--nodes", "64",
                "--tol", "1e-30", "--out", str(tmp_path / "t.csv")])
    assert code == 0
    assert "exceeds --tol" in capsys.readouterr().err


def test_map_grid_lower_bound(tmp_path):
    code = run(["quasimomentum-map", "--grid", "1", "--out", str(tmp_path / "m.csv")])
    assert code == 2


def test_green_nodes_env_override(monkeypatch):
    monkeypatch.setenv("GREEN_NODES", "777")
    parser = build_parser()
    args = parser.parse_args(["green-table", "--g0"])
    assert args.nodes == 777
    args = parser.parse_args(["green-table", "--g0", "--nodes", "128"])
    assert args.nodes == 128


# --- verify -----------------------------------------------------------------------

def test_verify_sphere_passes(capsys):
    code = run(["verify", "--nodes", "160"])
    out = capsys.readouterr().out
    assert code == 0
    assert "all checks passed" in out
    assert "FAIL" not in out


def test_verify_flipped_orientation_fails(capsys):
    code = run(["verify", "--nodes", "160", "--flip-orientation"])
    out = capsys.readouterr().out
    assert code == 1
    assert "orientation" in out
    assert "FAIL" in out


def test_verify_theta_backend(tmp_path, rng, capsys):
    from latgreen import save_jacobian_data

    path = tmp_path / "data.json"
    save_jacobian_data(random_jacobian_data(rng, 2), path)
    code = run(["verify", "--backend", str(path)])
    out = capsys.readouterr().out
    assert code == 0
    assert "monodromy" in out


def test_verify_rejects_asymmetric_matrix(tmp_path, capsys):
    path = tmp_path / "bad.json"
    payload = {
        "g": 2,
        "B": [[[0.0, 1.0], [0.5, 0.0]], [[0.0, 0.0], [0.0, 1.0]]],
        "K": [[0.0, 0.0], [0.0, 0.0]],
        "Delta_P": [[0.0, 0.0], [0.0, 0.0]],
        "Delta_Q": [[0.0, 0.0], [0.0, 0.0]],
        "A_gamma": [[[0.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]]],
    }
    path.write_text(json.dumps(payload))
    code = run(["verify", "--backend", str(path)])
    assert code == 2


# --- quasimomentum-map ---------------------------------------------------------------

def test_map_grid_values_and_singular_cells(tmp_path):
    out = tmp_path / "map.csv"
    code = run(["quasimomentum-map", "--xmin", "-2", "--xmax", "2",
                "--ymin", "-2", "--ymax", "2", "--grid", "5", "--out", str(out)])
    assert code == 0
    with open(out) as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 25
    cells = {(float(r["x"]), float(r["y"])): r for r in rows}
    origin = cells[(0.0, 0.0)]
    assert float(origin["im_p_n"]) == 0.0
    assert origin["singular"] == "0"
    assert cells[(0.0, 1.0)]["singular"] == "1"
    assert cells[(0.0, -1.0)]["singular"] == "1"
    assert cells[(1.0, 0.0)]["singular"] == "1"
    assert math.isinf(float(cells[(0.0, 1.0)]["im_p_n"]))


def test_map_real_lambda_polyline_is_real_axis(tmp_path):
    grid_out = tmp_path / "map.csv"
    contours_out = tmp_path / "contours.csv"
    code = run(["quasimomentum-map", "--grid", "3", "--lambda", "3",
                "--nodes", "64", "--out", str(grid_out),
                "--contours-out", str(contours_out)])
    assert code == 0
    with open(contours_out) as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 64
    worst = max(abs(float(r["z_im"])) for r in rows)
    assert worst < 1e-9


def test_map_circle_lambda_polyline_level(tmp_path):
    from latgreen import im_p_n

    contours_out = tmp_path / "contours.csv"
    code = run(["quasimomentum-map", "--grid", "3", "--lambda", "2i",
                "--nodes", "32", "--out", str(tmp_path / "m.csv"),
                "--contours-out", str(contours_out)])
    assert code == 0
    with open(contours_out) as fh:
        rows = list(csv.DictReader(fh))
    level = im_p_n(2j)
    for r in rows:
        z = complex(float(r["z_re"]), float(r["z_im"]))
        assert im_p_n(z) == pytest.approx(level, abs=1e-12)
