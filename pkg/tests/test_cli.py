import json
import subprocess
import sys

import numpy as np
import pytest

from qslab.cli import main
from qslab.core import read_samples
from qslab.simulator import read_distribution


def run(*argv):
    return main([str(a) for a in argv])


def read(path):
    return path.read_bytes()


@pytest.fixture
def circuit_dir(tmp_path):
    out = tmp_path / "c"
    assert run("circuit", "--n", 8, "--depth", 10, "--seed", 7, "--out", out) == 0
    return out


def test_circuit_command(tmp_path, capsys):
    assert run("circuit", "--n", 12, "--depth", 14, "--seed", 7, "--out", tmp_path / "a") == 0
    doc = json.loads((tmp_path / "a" / "circuit.json").read_text())
    assert len(doc["cycles"]) == 14
    assert "14 cycles" in capsys.readouterr().out
    assert run("circuit", "--n", 12, "--depth", 14, "--seed", 7, "--out", tmp_path / "b") == 0
    assert read(tmp_path / "a" / "circuit.json") == read(tmp_path / "b" / "circuit.json")
    assert read(tmp_path / "a" / "manifest-circuit.json") != b""


def test_usage_and_validation_exit_codes(tmp_path):
    assert run("circuit", "--n", 1, "--depth", 2, "--out", tmp_path) == 3
    assert run("circuit", "--depth", 2) == 2
    assert run("frobnicate") == 2
    assert run("ptgen", "--n", 12, "--order", "parity", "--mask-bits", 28, "--out", tmp_path) == 3
    assert run("eval", "--model", tmp_path / "missing.json", "--out", tmp_path) == 3
    assert run("train", "--samples", tmp_path / "missing.txt", "--out", tmp_path) == 3


def test_resource_cap_exit_code(tmp_path):
    assert run("circuit", "--n", 27, "--depth", 1, "--out", tmp_path) == 0
    assert run("simulate", "--circuit", tmp_path / "circuit.json", "--out", tmp_path) == 4
    assert run("simulate", "--circuit", tmp_path / "circuit.json", "--mem-cap-gib", 0.5, "--out", tmp_path) == 4


def test_depth_zero_samples_are_zero(tmp_path):
    assert run("circuit", "--n", 4, "--depth", 0, "--out", tmp_path) == 0
    assert run("sample", "--circuit", tmp_path / "circuit.json", "--count", 50, "--out", tmp_path) == 0
    assert set(read_samples(tmp_path / "samples.txt").samples.tolist()) == {0}
    assert (tmp_path / "samples.txt").read_text().splitlines()[0] == "0000"


def test_simulate_deterministic_across_threads(circuit_dir, tmp_path):
    c = circuit_dir / "circuit.json"
    assert run("simulate", "--circuit", c, "--threads", 1, "--out", tmp_path / "t1") == 0
    assert run("simulate", "--circuit", c, "--threads", 4, "--out", tmp_path / "t4") == 0
    assert read(tmp_path / "t1" / "distribution.qsld") == read(tmp_path / "t4" / "distribution.qsld")
    assert run("simulate", "--circuit", c, "--format", "csv", "--out", tmp_path / "csv") == 0
    a = read_distribution(tmp_path / "csv" / "distribution.csv")
    b = read_distribution(tmp_path / "t1" / "distribution.qsld")
    assert a == b


def test_pipeline_train_eval(circuit_dir, tmp_path, capsys):
    c = circuit_dir / "circuit.json"
    out = tmp_path / "p"
    assert run("simulate", "--circuit", c, "--out", out) == 0
    assert run("sample", "--circuit", c, "--count", 200000, "--seed", 3, "--out", out) == 0
    assert run("train", "--samples", out / "samples.txt", "--out", out) == 0
    assert run("eval", "--truth", out / "distribution.qsld", "--model", out / "model.json", "--out", out) == 0
    f = float((out / "xeb.csv").read_text().splitlines()[1].split(",")[0])
    assert f > 0.9
    assert run("eval", "--truth", out / "distribution.qsld", "--uniform", "--out", tmp_path / "u") == 0
    f = float((tmp_path / "u" / "xeb.csv").read_text().splitlines()[1].split(",")[0])
    assert abs(f) < 0.03
    assert run("eval", "--model", out / "model.json", "--out", out) == 3
    assert "--truth" in capsys.readouterr().err
    manifest = json.loads((out / "manifest-eval.json").read_text())
    assert set(manifest["inputs"]) == {"distribution.qsld", "model.json"}
    assert manifest["versions"]["numpy"] == np.__version__


def test_noise_then_eval(circuit_dir, tmp_path):
    c = circuit_dir / "circuit.json"
    assert run("simulate", "--circuit", c, "--out", tmp_path) == 0
    assert run("sample", "--circuit", c, "--noise-f", 0.5, "--count", 200000, "--out", tmp_path, "--name", "noisy.txt") == 0
    assert run("eval", "--truth", tmp_path / "distribution.qsld", "--samples", tmp_path / "noisy.txt",
               "--chi2", "--out", tmp_path) == 0
    dist = read_distribution(tmp_path / "distribution.qsld")
    ideal = 256 * float((dist.probs ** 2).sum()) - 1
    f = float((tmp_path / "xeb.csv").read_text().splitlines()[1].split(",")[0])
    assert abs(f - 0.5 * ideal) < 0.03
    assert (tmp_path / "chi2.csv").read_text().startswith("stat,dof,p\n")


def test_ptgen_variants(tmp_path):
    assert run("ptgen", "--n", 10, "--order", "integer", "--count", 1000, "--out", tmp_path) == 0
    d = read_distribution(tmp_path / "q10_integer_s0.qsld")
    assert np.all(np.diff(d.probs) <= 0)
    assert run("ptgen", "--n", 10, "--permute", "--perm-seed", 3, "--count", 1000, "--out", tmp_path) == 0
    assert (tmp_path / "q10_perm3_s0.txt").exists()
    assert run("ptgen", "--n", 6, "--order", "parity", "--mask", "000011", "--count", 10, "--out", tmp_path) == 0
    assert (tmp_path / "q06_parity2_s0.qsld").exists()
    assert run("ptgen", "--n", 6, "--order", "parity", "--count", 10, "--out", tmp_path) == 2


def test_ptgen_rerun_byte_identical(tmp_path):
    for d in ("a", "b"):
        assert run("ptgen", "--n", 12, "--order", "parity", "--mask-bits", 4, "--count", 5000,
                   "--seed", 9, "--out", tmp_path / d) == 0
    for name in ("q12_parity4_s9.qsld", "q12_parity4_s9.txt"):
        assert read(tmp_path / "a" / name) == read(tmp_path / "b" / name)
    # manifests differ only in the recorded output directory
    ma, mb = (json.loads((tmp_path / d / "manifest-ptgen.json").read_text()) for d in ("a", "b"))
    assert ma["flags"].pop("out") != mb["flags"].pop("out")
    assert ma == mb and ma["seeds"]["seed"] == 9


def test_analyze_commands(circuit_dir, tmp_path, capsys):
    assert run("analyze", "entropy-sweep", "--n", 6, "--depths", "1:3", "--out", tmp_path) == 0
    lines = (tmp_path / "entropy_sweep.csv").read_text().splitlines()
    assert lines[0] == "depth,entropy,pt_reference" and len(lines) == 4
    assert run("analyze", "dbm-count", "--n", 3, "--depth", 2, "--out", tmp_path) == 0
    rows = (tmp_path / "dbm_count.csv").read_text().splitlines()
    assert rows[0] == "cycle,rule_hidden,rule_deep,hidden,deep,edges,match"
    assert rows[1].startswith("0,3,0,3,0,")
    assert run("analyze", "conditionals", "--circuit", circuit_dir / "circuit.json", "--max-order", 2,
               "--out", tmp_path) == 0
    assert "order 2" in capsys.readouterr().out
    (tmp_path / "sweep.csv").write_text("k,params,fidelity\n0,8,0.01\n1,16,0.03\n2,32,0.09\n3,64,0.25\n4,128,0.7\n")
    assert run("analyze", "capacity-fit", "--sweep", tmp_path / "sweep.csv", "--out", tmp_path) == 0
    assert (tmp_path / "capacity_fit.csv").read_text().startswith("a,b,c,rms_residual,degenerate\n")
    assert run("analyze", "capacity-fit", "--out", tmp_path) == 2


def test_module_entry_point(tmp_path):
    r = subprocess.run([sys.executable, "-m", "qslab", "circuit", "--n", "3", "--depth", "1",
                        "--out", str(tmp_path)], capture_output=True, text=True)
    assert r.returncode == 0 and (tmp_path / "circuit.json").exists()
    r = subprocess.run([sys.executable, "-m", "qslab", "circuit"], capture_output=True, text=True)
    assert r.returncode == 2
