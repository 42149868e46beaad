import json
import subprocess
import sys

import numpy as np
import pytest

from ptffool import gw, spaces
from ptffool.cli import main
from ptffool.poly import DegTwoPoly, dump_poly


@pytest.fixture
def product_poly_file(tmp_path):
    path = tmp_path / "prod.poly"
    dump_poly(DegTwoPoly.from_terms(2, quad_terms={(0, 1): 1.0}), path)
    return str(path)


def _read_report(path):
    with open(path) as fh:
        return json.load(fh)


def test_kwise_build_then_verify(tmp_path):
    out = str(tmp_path / "s.space")
    assert main(["kwise", "build", "--n", "8", "--k", "2", "--out", out]) == 0
    assert main(["kwise", "verify", "--space", out]) == 0
    assert main(["kwise", "verify", "--space", out, "--k", "2"]) == 0


def test_poly_info_report_envelope(tmp_path, product_poly_file):
    rep_path = str(tmp_path / "r.json")
    assert main(["poly", "info", "--poly", product_poly_file,
                 "--tau", "0.3", "--report", rep_path]) == 0
    rep = _read_report(rep_path)
    for key in ("config", "config_hash", "version", "master_seed", "timestamp"):
        assert key in rep
    assert rep["n"] == 2
    assert rep["max_ratio"] == 0.5
    assert rep["is_regular"] is False
    assert len(rep["config_hash"]) == 64


def test_poly_decompose(tmp_path, product_poly_file):
    out = str(tmp_path / "d.json")
    assert main(["poly", "decompose", "--poly", product_poly_file,
                 "--delta", "0.25", "--out", out]) == 0
    rep = _read_report(out)
    assert all(rep["invariants"].values())


def test_moments_exact_report(tmp_path, product_poly_file):
    rep_path = str(tmp_path / "m.json")
    assert main(["moments", "--poly", product_poly_file, "--k", "2",
                 "--report", rep_path]) == 0
    rep = _read_report(rep_path)
    assert rep["value"] == 1.0
    assert rep["mode"] == "exact"


def test_moments_mc_seeded(tmp_path, product_poly_file):
    a, b = str(tmp_path / "a.json"), str(tmp_path / "b.json")
    for path in (a, b):
        assert main(["moments", "--poly", product_poly_file, "--k", "2",
                     "--mode", "mc", "--samples", "20000",
                     "--report", path]) == 0
    ra, rb = _read_report(a), _read_report(b)
    assert ra["value"] == rb["value"]
    assert ra["seed"] == rb["seed"]


def test_ftmol_check_unit(capsys):
    assert main(["ftmol", "check", "--d", "1", "--suite", "unit"]) == 0
    out = capsys.readouterr().out
    rep = json.loads(out)
    assert rep["checks"][0]["status"] == "pass"


def test_fool_exact(tmp_path, product_poly_file):
    space_path = str(tmp_path / "s.space")
    sp = spaces.SampleSpace(n=2, k_claimed=2,
                            points=np.array([[1, 1], [1, -1], [-1, 1], [-1, -1]],
                                            dtype=np.int8),
                            method="explicit")
    spaces.dump_sample_space(sp, space_path)
    rep_path = str(tmp_path / "r.json")
    assert main(["fool", "exact", "--poly", product_poly_file,
                 "--space", space_path, "--report", rep_path]) == 0
    assert _read_report(rep_path)["deviation"] == 0.0


def test_fool_lp_with_emissions(tmp_path, product_poly_file):
    rep_path = str(tmp_path / "r.json")
    wit = str(tmp_path / "w.space")
    cert = str(tmp_path / "c.json")
    assert main(["fool", "lp", "--poly", product_poly_file, "--k", "1",
                 "--emit-witness", wit, "--emit-cert", cert,
                 "--report", rep_path]) == 0
    rep = _read_report(rep_path)
    assert rep["deviation"] == 1.0
    assert rep["witness_verified"] is True
    # witness file loads back as a valid one-wise space
    back = spaces.load_sample_space(wit)
    assert back.n == 2
    certs = _read_report(cert)
    assert certs["upper"]["verified"] and certs["lower"]["verified"]


def test_fool_lp_k2_collapses(tmp_path, product_poly_file):
    rep_path = str(tmp_path / "r.json")
    assert main(["fool", "lp", "--poly", product_poly_file, "--k", "2",
                 "--report", rep_path]) == 0
    assert abs(_read_report(rep_path)["deviation"]) <= 1e-9


def test_fool_sweep_csv(tmp_path, product_poly_file):
    csv_path = str(tmp_path / "s.csv")
    assert main(["fool", "sweep", "--poly", product_poly_file,
                 "--kmax", "2", "--csv", csv_path]) == 0
    lines = open(csv_path).read().splitlines()
    assert lines[0] == "k,lp_max,lp_min,uniform,deviation"
    assert lines[1].startswith("1,1.0,-1.0,0.0,1.0")
    assert lines[2].startswith("2,0.0,0.0,0.0,0.0")


def test_tree_build(tmp_path, product_poly_file):
    out = str(tmp_path / "t.json")
    assert main(["tree", "build", "--poly", product_poly_file,
                 "--tau", "0.4", "--out", out]) == 0
    doc = _read_report(out)
    assert "var" in doc


def test_gw_round_exact(tmp_path):
    g = gw.single_edge()
    emb = gw.generate_test_embedding(g, "antipodal")
    gpath, epath = str(tmp_path / "g.graph"), str(tmp_path / "e.emb")
    gw.dump_graph(g, gpath)
    gw.dump_embedding(emb, epath)
    csv_path = str(tmp_path / "out.csv")
    assert main(["gw", "round", "--graph", gpath, "--embedding", epath,
                 "--k", "2", "--resolution", "256", "--csv", csv_path]) == 0
    lines = open(csv_path).read().splitlines()
    assert lines[1].split(",")[0] == "1.0"


def test_suite_quick():
    assert main(["suite", "all", "--quick"]) == 0


def test_replay_is_byte_identical_modulo_timestamp(tmp_path, product_poly_file):
    a, b = str(tmp_path / "a.json"), str(tmp_path / "b.json")
    argv = ["poly", "info", "--poly", product_poly_file, "--tau", "0.2"]
    assert main(argv + ["--report", a]) == 0
    assert main(argv + ["--report", b]) == 0
    la = [l for l in open(a).read().splitlines() if '"timestamp"' not in l]
    lb = [l for l in open(b).read().splitlines() if '"timestamp"' not in l]
    assert la == lb


def test_schema_violations_exit_64(tmp_path, product_poly_file):
    assert main(["fool", "lp", "--poly", product_poly_file]) == 64  # no --k
    assert main(["no-such-command"]) == 64
    assert main(["poly", "info", "--poly", str(tmp_path / "missing.poly")]) == 64
    bad = tmp_path / "bad.poly"
    bad.write_text("garbage\n")
    assert main(["poly", "info", "--poly", str(bad)]) == 64


def test_failed_check_exits_1(tmp_path):
    # claim order 5 for a space that is only 4-wise: verify must fail
    sp = spaces.build_kwise_bernoulli(16, 4, method="bch_parity")
    path = str(tmp_path / "s.space")
    spaces.dump_sample_space(sp, path)
    assert main(["kwise", "verify", "--space", path, "--k", "5"]) == 1


def test_console_script_runs():
    proc = subprocess.run([sys.executable, "-m", "ptffool.cli",
                           "suite", "all", "--quick"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "checks passed" in proc.stdout
