import json
import subprocess
import sys
from pathlib import Path

import pytest

from garlandlab.cli import main

DATA = Path(__file__).resolve().parent.parent / "data"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def result(out):
    doc = json.loads(out)
    assert doc["tool"] == "garland-lab" and "version" in doc and "config" in doc
    return doc["result"]


def test_spectra_cycle(capsys):
    code, out, _ = run(capsys, "spectra", "cycle", "--k", 6)
    assert code == 0 and result(out)["lambda"] == pytest.approx(0.5)


def test_spectra_file_and_closed_form(capsys):
    code, out, _ = run(capsys, "spectra", DATA / "heawood.graph", "--trace-k", 3)
    assert code == 0
    r = result(out)
    assert r["lambda"] == pytest.approx(1 - 2 ** 0.5 / 3)
    assert r["trace_bound"] <= r["lambda"]
    code, out, _ = run(capsys, "spectra", "--closed-form", 5)
    assert result(out)["closed_form"] == pytest.approx(0.6909830056250525)


def test_certify_exit_codes(capsys):
    code, out, _ = run(capsys, "garland", "certify", "icosahedron")
    assert code == 0 and result(out)["granted"]
    code, out, _ = run(capsys, "garland", "certify", DATA / "torus.complex")
    assert code == 2 and not result(out)["granted"]
    code, out, _ = run(capsys, "garland", "certify", "icosahedron", "--delta", 0.4122)
    assert code == 2


def test_identity_on_lattice(capsys):
    code, out, _ = run(capsys, "garland", "identity", "torus", "--lattice")
    r = result(out)
    assert code == 0 and r["harmonic"] and r["energy"] == pytest.approx(54.0)


def test_inequality_default_lambda(capsys):
    code, out, _ = run(capsys, "garland", "inequality", "icosahedron", "--seed", 4)
    assert code == 0 and result(out)["slack"] >= 0


def test_flow_csv_and_seed(capsys):
    code, out, _ = run(capsys, "flow", "icosahedron", "--iterations", 5, "--seed", 2)
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "step,energy,laplacian_norm" and len(lines) == 7
    _, again, _ = run(capsys, "flow", "icosahedron", "--iterations", 5, "--seed", 2)
    assert again == out


def test_flow_tree_target_json(capsys):
    code, out, _ = run(capsys, "flow", "octahedron", "--target", f"tree:{DATA / 'tripod.tree'}",
                       "--iterations", 3, "--format", "json")
    r = result(out)
    assert code == 0 and r["monotone"] and r["seed"] == 0


def test_seed_from_environment(capsys, monkeypatch):
    monkeypatch.setenv("GARLAND_LAB_SEED", "11")
    _, out, _ = run(capsys, "random-graph", "--n", 20, "--d", 2, "--samples", 2)
    assert result(out)["seed"] == 11
    monkeypatch.setenv("GARLAND_LAB_SEED", "eleven")
    code, _, err = run(capsys, "random-graph", "--n", 20, "--d", 2, "--samples", 2)
    assert code == 1 and "GARLAND_LAB_SEED" in err


def test_wirtinger_commands(capsys):
    code, out, _ = run(capsys, "wirtinger", "--check", 6, "--samples", 50, "--target", "random-tree:4")
    r = result(out)
    assert code == 0 and r["failures"] == 0
    code, out, _ = run(capsys, "wirtinger", "--certificate", DATA / "heawood_hexagons.json",
                       "--graph", "pg2:2", "--averaged")
    assert result(out)["bound"] == pytest.approx(14 / 37)
    code, out, _ = run(capsys, "wirtinger", "--certificate", DATA / "heawood_hexagons.json",
                       "--graph", DATA / "heawood.graph")
    assert result(out)["bound"] == pytest.approx(0.29167, abs=1e-5)
    code, out, _ = run(capsys, "wirtinger", "--constant", 6, 3)
    assert result(out)["W"] == pytest.approx(24.0)


def test_incidence_and_export(capsys, tmp_path):
    path = tmp_path / "pg3.graph"
    code, out, _ = run(capsys, "incidence", "--p", 3, "--census", "--feit-higman", "--triangle-check",
                       "--export", path)
    r = result(out)
    assert code == 0 and r["vertices"] == 26 and r["census"]["counts_match"]
    assert r["generalized_triangle"]["ok"]
    code, out, _ = run(capsys, "spectra", path)
    assert result(out)["lambda"] == pytest.approx(r["lambda"])


def test_random_group_csv(capsys):
    code, out, _ = run(capsys, "random-group", "--m", 10, "--density", 0.4, "--samples", 3, "--format", "csv")
    lines = out.strip().splitlines()
    assert code == 0 and lines[0] == "index,relators,connected,lambda,certified" and len(lines) == 4


def test_in_bounds(capsys):
    code, out, _ = run(capsys, "in-bounds", "--p", 2, 3)
    assert result(out)["in_lower_bound"]["2"] == pytest.approx(0.0540971, abs=1e-7)
    code, out, _ = run(capsys, "in-bounds", "--lambda", 0.75, "--delta", 0.3)
    assert code == 0 and result(out)["granted"]
    code, _, _ = run(capsys, "in-bounds", "--lambda", 0.75, "--delta", 0.4122)
    assert code == 2


def test_errors_exit_one(capsys, tmp_path):
    bad = tmp_path / "bad.complex"
    bad.write_text("complex\nv 3\nt 0 1 5 1\n")
    code, _, err = run(capsys, "garland", "certify", bad)
    assert code == 1 and "bad.complex:3" in err
    code, _, err = run(capsys, "flow", "icosahedron", "--target", "sphere:2")
    assert code == 1 and "unknown target" in err
    code, _, err = run(capsys, "spectra")
    assert code == 1


def test_reproduce_subset(capsys, tmp_path):
    report = tmp_path / "r.json"
    code, out, _ = run(capsys, "reproduce", "--only", "1,12", "--report", report)
    assert code == 0
    assert out.count("[PASS]") == 2
    doc = json.loads(report.read_text())
    assert set(doc) == {"1", "12"}


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "garlandlab", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and "garland-lab" in proc.stdout
