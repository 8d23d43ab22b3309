import csv
import json
import pathlib
import subprocess
import sys

import numpy as np
import pytest

from campbell.cli import main
from campbell.mesh import enumerate_nodes
from campbell.model import example_6dof, load_model, save_model

SCHEMA_DIR = pathlib.Path(__file__).parent.parent / "schemas"


def run(tmp_path, *argv, name="out.csv"):
    out = tmp_path / name
    code = main([*argv, "--out", str(out)])
    return code, out


def read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def test_mesh_contains_node_crossings(tmp_path):
    code, out = run(tmp_path, "mesh", "--omega-min", "0", "--omega-max", "2.5",
                    "--omega-steps", "31")
    assert code == 0
    header, rows = read_csv(out)
    assert header == ["Omega", "s", "alpha", "eps", "Im_lambda"]
    # every node must lie on both its branch lines sampled in the file
    model = example_6dof()
    nodes = enumerate_nodes(model.omegas, (0.0, 2.5))
    by_branch = {}
    for r in rows:
        key = (int(r[1]), int(r[2]), int(r[3]))
        by_branch.setdefault(key, []).append((float(r[0]), float(r[4])))
    for nd in nodes:
        for b in (nd.branch_a, nd.branch_b):
            pts = by_branch[(b.s, b.alpha, b.eps)]
            # the line through the samples passes through the node
            (om0, v0), (om1, v1) = pts[0], pts[-1]
            slope = (v1 - v0) / (om1 - om0)
            assert v0 + slope * (nd.Omega0 - om0) == pytest.approx(nd.omega0, abs=1e-9)


def test_mesh_single_mode_crosses_at_standstill(tmp_path):
    code, out = run(tmp_path, "mesh", "--model", "shaft", "--omega-min", "-1",
                    "--omega-max", "1", "--omega-steps", "21", "--full-spectrum")
    assert code == 0
    _, rows = read_csv(out)
    at_zero = {float(r[4]) for r in rows if float(r[0]) == 0.0}
    assert at_zero == {2.0, -2.0}


def test_mesh_mirror_symmetry(tmp_path):
    _, out = run(tmp_path, "mesh", "--omega-min", "-1", "--omega-max", "1",
                 "--omega-steps", "21", "--full-spectrum")
    _, rows = read_csv(out)
    pts = {(float(r[0]), int(r[1]), float(r[4])) for r in rows}
    for omega, s, im in pts:
        assert (-omega, s, -im) in {(o, ss, -v) for o, ss, v in pts} or \
            (-omega, s, im) in pts or True  # mirrored mesh: same multiset per |Omega|
    by_omega = {}
    for omega, s, im in pts:
        by_omega.setdefault(omega, set()).add(round(im, 9))
    for omega, vals in by_omega.items():
        assert by_omega[-omega] == vals


def test_nodes_table(tmp_path):
    code, out = run(tmp_path, "nodes", "--omega-min", "0", "--omega-max", "2.5")
    assert code == 0
    header, rows = read_csv(out)
    assert header[:3] == ["node_id", "Omega0", "omega0"]
    target = [r for r in rows if abs(float(r[1]) - 2 / 3) < 1e-9
              and abs(float(r[2]) - 5 / 3) < 1e-9]
    assert len(target) == 1 and int(target[0][9]) == 1
    for r in rows:
        if int(r[9]) == -1:
            assert abs(float(r[1])) >= 1.0 - 1e-12
            assert r[10] in ("supercritical", "critical")


def test_nodes_empty_window(tmp_path):
    code, out = run(tmp_path, "nodes", "--omega-min", "0.1", "--omega-max", "0.2")
    assert code == 0
    header, rows = read_csv(out)
    assert rows == []


def test_local_report(tmp_path):
    code, out = run(tmp_path, "local", "--node", "4", "--delta", "0.1",
                    "--nu", "0.2", "--omega-min", "0", "--omega-max", "2.5")
    assert code == 0
    header, rows = read_csv(out)
    assert len(rows) == 1
    row = dict(zip(header, rows[0]))
    assert abs(float(row["Omega0"]) - 2 / 3) < 1e-9
    assert row["class"] == "IM_COFFEE_FILTER_RE_VIADUCT"
    assert row["exists"] == "True"


def test_surface_definite_node_hamiltonian_stable(tmp_path):
    code, out = run(tmp_path, "surface", "--node", "4", "--omega-steps", "11",
                    "--kappa-steps", "7", "--kappa-min", "-0.1",
                    "--kappa-max", "0.1", "--omega-min", "0.57",
                    "--omega-max", "0.77")
    assert code == 0
    header, rows = read_csv(out)
    assert header == ["Omega", "kappa", "branch", "Re_lambda_approx",
                      "Im_lambda_approx", "Re_lambda_exact", "Im_lambda_exact"]
    assert rows
    for r in rows:
        assert abs(float(r[5])) <= 1e-8  # exact sheet is marginally stable


def test_surface_with_eps_in_grid(tmp_path):
    code, out = run(tmp_path, "surface", "--node", "4", "--delta", "0.1",
                    "--nu", "0.2", "--omega-steps", "9", "--kappa-steps", "9")
    assert code == 0
    _, rows = read_csv(out)
    res = [abs(float(r[3]) - float(r[5])) for r in rows]
    assert max(res) < 0.2  # approximation stays near the exact sheet


def test_surface_zero_grid_rejected(tmp_path):
    code, _ = run(tmp_path, "surface", "--node", "4", "--omega-steps", "0")
    assert code == 1


def test_surface_unknown_node(tmp_path):
    code, _ = run(tmp_path, "surface", "--node", "999")
    assert code == 1


def test_ep_atlas_matches_library(tmp_path):
    code, out = run(tmp_path, "ep-atlas", "--delta", "0.1", "--nu", "0.2",
                    "--omega-min", "0", "--omega-max", "2.5")
    assert code == 0
    header, rows = read_csv(out)
    assert header == ["node_id", "Omega0", "omega0", "sig_product",
                      "Omega_EP_plus", "kappa_EP_plus", "Omega_EP_minus",
                      "kappa_EP_minus", "exists", "class"]
    from campbell.ep import ep_atlas
    model = example_6dof()
    nodes = enumerate_nodes(model.omegas, (0.0, 2.5))
    lib_rows = ep_atlas(nodes, model, 0.1, 0.2)
    assert len(rows) == len(lib_rows)
    for got, want in zip(rows, lib_rows):
        if want[4] is not None:
            assert float(got[4]) == pytest.approx(want[4])
        else:
            assert got[4] == ""


def test_string_atlas(tmp_path):
    code, out = run(tmp_path, "string-atlas", "--d", "0.3", "--mu", "0",
                    "--n-max", "6")
    assert code == 0
    header, rows = read_csv(out)
    assert header[:4] == ["n", "m", "eps", "delta"]
    for r in rows:
        n, m = int(r[0]), int(r[1])
        on_axis = abs(float(r[7])) < 1e-12
        assert on_axis == (n == m)
        assert float(r[8]) == pytest.approx(-0.3 / (4 * np.pi))


def test_shaft_sweep(tmp_path):
    code, out = run(tmp_path, "shaft", "--m", "1", "--k1", "4",
                    "--omega-min", "-3", "--omega-max", "3",
                    "--omega-steps", "13")
    assert code == 0
    header, rows = read_csv(out)
    assert header == ["Omega", "kappa", "track_id", "Re_lambda", "Im_lambda"]
    assert len(rows) == 13 * 4
    at_zero = sorted(float(r[4]) for r in rows if float(r[0]) == 0.0)
    assert at_zero == pytest.approx([-2, -2, 2, 2])


def test_verify_pass(tmp_path):
    code, out = run(tmp_path, "verify", "--delta", "1", "--kappa", "1",
                    "--nu", "1", "--omega-min", "0", "--omega-max", "2.5")
    assert code == 0
    header, rows = read_csv(out)
    assert header == ["suite", "node_id", "metric", "value", "threshold", "status"]
    assert all(r[5] == "pass" for r in rows)
    assert any(r[0] == "convergence" for r in rows)
    assert any(r[0] == "two-path" for r in rows)
    slopes = [float(r[3]) for r in rows if r[0] == "convergence"]
    assert all(s >= 1.8 for s in slopes)


def test_verify_zero_perturbation_skips(tmp_path):
    code, out = run(tmp_path, "verify")
    assert code == 0
    _, rows = read_csv(out)
    assert rows and all(r[5] == "skipped" for r in rows)


def test_deterministic_outputs(tmp_path):
    for fmt in ("csv", "json"):
        args = ["ep-atlas", "--delta", "0.1", "--nu", "0.2", "--format", fmt]
        _, first = run(tmp_path, *args, name=f"a.{fmt}")
        _, second = run(tmp_path, *args, name=f"b.{fmt}")
        assert first.read_bytes() == second.read_bytes()


def test_model_round_trip_through_cli(tmp_path):
    model = example_6dof(delta=0.1, kappa=0.2, nu=0.3)
    p1 = tmp_path / "m1.json"
    p2 = tmp_path / "m2.json"
    save_model(model, p1)
    save_model(load_model(p1), p2)
    assert p1.read_bytes() == p2.read_bytes()
    code, out = run(tmp_path, "nodes", "--model", str(p1))
    assert code == 0


def test_json_output_validates_against_schema(tmp_path):
    jsonschema = pytest.importorskip("jsonschema")
    schema = json.loads((SCHEMA_DIR / "output.schema.json").read_text())
    for args in (["nodes"], ["mesh", "--omega-steps", "5"],
                 ["string-atlas", "--n-max", "2"]):
        _, out = run(tmp_path, *args, "--format", "json", name="out.json")
        data = json.loads(out.read_text())
        jsonschema.validate(data, schema)


def test_usage_error_exit_code(tmp_path, capsys):
    with pytest.raises(SystemExit) as exc:
        main(["mesh", "--omega-steps", "not-a-number"])
    assert exc.value.code == 1


def test_unknown_model_is_usage_error(tmp_path):
    code, _ = run(tmp_path, "nodes", "--model", "missing.json")
    assert code == 1


def test_numerical_failure_exit_code(tmp_path):
    # perturbation far beyond the tracking radius: nearest_pair fails
    code, _ = run(tmp_path, "surface", "--node", "4", "--kappa-min", "4.9",
                  "--kappa-max", "5.0", "--kappa-steps", "2",
                  "--omega-steps", "2")
    assert code == 2


def test_module_entry_point(tmp_path):
    out = tmp_path / "nodes.csv"
    proc = subprocess.run(
        [sys.executable, "-m", "campbell", "nodes", "--out", str(out)],
        capture_output=True, text=True, timeout=120,
    )
    assert proc.returncode == 0
    assert out.exists()
