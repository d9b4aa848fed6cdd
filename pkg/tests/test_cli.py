import io
import json
import math
import re
from pathlib import Path

import pytest

from conftest import DOUBLED_TEXT
from cuspforge.cli import main
from cuspforge.diagram import load_diagram

GOLDEN = Path(__file__).parent / "golden"
RESIDUALS = re.compile(r"^residuals: .*$", re.M)


def run(argv):
    out, err = io.StringIO(), io.StringIO()
    status = main(argv, out, err)
    return status, out.getvalue(), err.getvalue()


def error_records(err):
    return [json.loads(line) for line in err.splitlines()]


# --- goldens ------------------------------------------------------------------------

GOLDEN_CASES = [
    (["gen", "two-bridge", "--n", "3", "--c", "24"], "gen_two_bridge_n3.json"),
    (["bounds", "--n", "85", "--c", "145"], "bounds_n85_c145.txt"),
    (["bounds", "--n", "3", "--c", "24", "--two-bridge"], "bounds_two_bridge_n3.txt"),
    (["hk", "constants"], "hk_constants.txt"),
    (["hk", "table", "--fn", "I,fbar,C", "--from", "0.6", "--to", "1.2", "--step", "0.1"], "hk_table.csv"),
]


@pytest.mark.parametrize("argv,name", GOLDEN_CASES, ids=[c[1] for c in GOLDEN_CASES])
def test_golden_output(argv, name):
    status, out, _ = run(argv)
    assert status == 0
    assert out == (GOLDEN / name).read_text()
    assert run(argv)[1] == out


def test_golden_pack_text():
    argv = ["pack", "two-bridge", "--n", "4", "--c", "24"]
    status, out, _ = run(argv)
    assert status == 0
    assert run(argv)[1] == out
    # residual magnitudes sit at round-off and differ between kernel backends
    golden = (GOLDEN / "pack_two_bridge_n4.txt").read_text()
    assert RESIDUALS.sub("residuals: *", out) == RESIDUALS.sub("residuals: *", golden)
    m = re.search(r"angle (\S+), tangency (\S+), overlap (\S+)", out)
    assert all(float(x) <= 1e-12 for x in m.groups())


def test_golden_simplex(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    status, out, _ = run(["simplex", "random", "--n", "3", "--count", "2", "--seed", "7", "-o", "simplex_random_n3.json"])
    assert status == 0 and out == ""
    assert Path("simplex_random_n3.json").read_text() == (GOLDEN / "simplex_random_n3.json").read_text()
    status, out, _ = run(["simplex", "search", "simplex_random_n3.json"])
    assert status == 0
    assert out == (GOLDEN / "simplex_search_n3.txt").read_text()


def test_golden_svg(tmp_path):
    svg = tmp_path / "out.svg"
    assert run(["pack", "two-bridge", "--n", "3", "--c", "24", "--svg", str(svg)])[0] == 0
    assert svg.read_text() == (GOLDEN / "pack_two_bridge_n3.svg").read_text()


# --- documented examples -------------------------------------------------------------------


def test_bounds_dehn_true():
    status, out, _ = run(["bounds", "--n", "85", "--c", "145"])
    assert status == 0
    assert "all non-trivial Dehn fillings hyperbolic: true" in out


def test_bounds_dehn_false_below_threshold():
    status, out, _ = run(["bounds", "--n", "84", "--c", "145"])
    assert status == 0
    assert "all non-trivial Dehn fillings hyperbolic: false" in out


def test_bounds_inapplicable_exits_one():
    status, out, _ = run(["bounds", "--n", "5", "--c", "115"])
    assert status == 1
    assert "applicable: false" in out and "116" in out


def test_bounds_two_bridge_hypothesis_error():
    status, out, err = run(["bounds", "--n", "3", "--c", "23", "--two-bridge"])
    assert status == 1 and out == ""
    (rec,) = error_records(err)
    assert rec["error"] == "hypothesis" and rec["exit"] == 1


def test_hk_constants_values():
    status, out, _ = run(["hk", "constants", "--json"])
    doc = json.loads(out)
    assert doc["schema"] == "cusp-forge-hk-constants/1"
    assert doc["I_at_056"] == pytest.approx(113.044, abs=0.05)
    assert doc["R_star"] == pytest.approx(0.6624, abs=5e-4)
    assert doc["c_threshold_at_R_star"] == 116
    assert doc["fbar_at_1"] == pytest.approx(0.18456, abs=2e-4)
    assert doc["c_threshold_at_1"] == 145
    assert doc["dehn_n_threshold"] == 85


def test_pack_two_bridge_n5_with_svg(tmp_path):
    svg = tmp_path / "out.svg"
    status, out, _ = run(["pack", "two-bridge", "--n", "5", "--c", "24", "--svg", str(svg), "--json"])
    assert status == 0
    doc = json.loads(out)
    assert doc["schema"] == "cusp-forge-report/1"
    assert abs(doc["normalized_height"] - math.sqrt(8)) <= 1e-7
    text = svg.read_text()
    assert text.startswith("<svg") and text.rstrip().endswith("</svg>")
    assert text.count("<circle") >= 7


def test_pack_rect_svg(tmp_path):
    folder = tmp_path / "rects"
    assert run(["pack", "two-bridge", "--n", "3", "--c", "24", "--rect-svg", str(folder)])[0] == 0
    files = sorted(folder.glob("rect_*.svg"))
    assert len(files) == 9  # one per nerve edge
    assert all("|" not in f.name for f in files)


# --- schemas and exit codes -----------------------------------------------------------------


@pytest.mark.parametrize(
    "argv,schema",
    [
        (["gen", "two-bridge", "--n", "2", "--c", "24"], "gen"),
        (["bounds", "--n", "3", "--c", "200"], "bounds"),
        (["bounds", "--n", "3", "--c", "24", "--two-bridge"], "bounds"),
        (["hk", "table", "--fn", "g", "--from", "1", "--to", "1.2", "--step", "0.1"], "hk-table"),
        (["pack", "two-bridge", "--n", "2", "--c", "24"], "report"),
    ],
)
def test_json_schemas(argv, schema):
    status, out, _ = run(argv + ["--json"])
    assert status == 0
    assert json.loads(out)["schema"] == f"cusp-forge-{schema}/1"


def test_validate_ok_and_invalid(tmp_path):
    good = tmp_path / "good.json"
    run(["gen", "two-bridge", "--n", "3", "--c", "24", "-o", str(good)])
    status, out, _ = run(["validate", str(good)])
    assert status == 0 and out.startswith("status: ok\n")
    assert "below 116" in out
    bad = tmp_path / "bad.json"
    bad.write_text(DOUBLED_TEXT)
    status, out, _ = run(["validate", str(bad), "--json"])
    assert status == 1
    doc = json.loads(out)
    assert doc["schema"] == "cusp-forge-validation/1"
    assert doc["status"] == "rejected" and doc["violations"]


def test_pack_rejected_diagram(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(DOUBLED_TEXT)
    status, out, err = run(["pack", str(bad)])
    assert status == 1 and out == ""
    assert error_records(err)[0]["exit"] == 1


def test_gen_output_file_round_trip(tmp_path):
    path = tmp_path / "d.json"
    status, out, _ = run(["gen", "two-bridge", "--n", "4", "--c", "24", "30", "24", "31", "-o", str(path)])
    assert status == 0 and out == ""
    d = load_diagram(path.read_text())
    assert sorted(e.crossings for e in d.edges if e.kind == "twist") == [24, 24, 30, 31]


def test_missing_file():
    status, _, err = run(["validate", "/nonexistent/diagram.json"])
    assert status == 1
    assert error_records(err)[0]["error"] == "io"


def test_tolerance_flag_range():
    status, _, err = run(["pack", "two-bridge", "--n", "2", "--c", "24", "--tol", "1e-3"])
    assert status == 1
    assert error_records(err)[0]["error"] == "config"


def test_tolerance_env(monkeypatch):
    monkeypatch.setenv("CUSPFORGE_TOL", "1e-8")
    status, out, _ = run(["pack", "two-bridge", "--n", "2", "--c", "24"])
    assert status == 0 and "(tol 1e-08)" in out
    monkeypatch.setenv("CUSPFORGE_TOL", "1e-20")
    assert run(["pack", "two-bridge", "--n", "2", "--c", "24"])[0] == 1
    monkeypatch.setenv("CUSPFORGE_TOL", "tight")
    status, _, err = run(["pack", "two-bridge", "--n", "2", "--c", "24"])
    assert status == 1 and "CUSPFORGE_TOL" in error_records(err)[0]["message"]


def test_pack_two_bridge_needs_parameters():
    status, _, err = run(["pack", "two-bridge"])
    assert status == 1 and error_records(err)[0]["error"] == "usage"


def test_hk_table_unknown_function():
    status, _, err = run(["hk", "table", "--fn", "zeta"])
    assert status == 1 and "zeta" in error_records(err)[0]["message"]


def test_hk_table_outside_hypothesis():
    status, _, err = run(["hk", "table", "--fn", "I", "--from", "0.4", "--to", "0.5", "--step", "0.1"])
    assert status == 1 and error_records(err)[0]["error"] == "hypothesis"


def test_hk_table_csv_shape():
    status, out, _ = run(["hk", "table", "--fn", "I,g", "--from", "0.6", "--to", "0.8", "--step", "0.1"])
    lines = out.splitlines()
    assert lines[0] == "R,I,g" and len(lines) == 4


def test_simplex_search_invalid_and_failure(tmp_path):
    from cuspforge.boundary_lab import QuadraticBoundarySystem, dump_systems

    import numpy as np

    bad = QuadraticBoundarySystem(np.ones(2), -10.0, 0.5, 1.0, np.full((2, 2), 3.0), np.zeros((2, 2)))
    path = tmp_path / "s.json"
    path.write_text(dump_systems([bad], [0]))
    status, out, _ = run(["simplex", "search", str(path), "--json"])
    assert status == 1
    doc = json.loads(out)
    assert doc["schema"] == "cusp-forge-simplex-search/1"
    assert doc["results"] == [{"index": 0, "valid": False}]


def test_simplex_search_n2_counts_zeros(tmp_path):
    path = tmp_path / "s.json"
    run(["simplex", "random", "--n", "2", "--count", "3", "--seed", "100", "-o", str(path)])
    status, out, _ = run(["simplex", "search", str(path), "--json"])
    assert status == 0
    for r in json.loads(out)["results"]:
        assert r["zeros_on_edge"] % 2 == 1
        assert r["lemma41"]["min_b"] >= -1e-9


def test_module_entry_point():
    import subprocess
    import sys

    proc = subprocess.run([sys.executable, "-m", "cuspforge", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("cuspforge ")
