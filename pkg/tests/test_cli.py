import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from jetnormal.cli import run

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run([str(a) for a in argv], out, err)
    return code, out.getvalue(), err.getvalue()


def fx(name):
    return FIXTURES / name


def test_verify_rep_ok_prints_table():
    code, out, _ = call("verify-rep", "--input", fx("sl2.rep"))
    assert code == 0
    assert "residual: 0" in out
    assert "[X,Y] = -1*Z" in out


def test_verify_rep_float_field():
    code, out, _ = call("verify-rep", "--input", fx("sl2.rep"), "--field", "float")
    assert code == 0 and "residual: 0.0" in out


def test_verify_rep_broken_exits_2():
    code, out, err = call("verify-rep", "--input", fx("broken.rep"))
    assert code == 2
    assert "FAILED" in err


def test_linearize_conjugated_fixture():
    code, out, _ = call("linearize", "--input", fx("sl2_conjugated.rep"), "--order", 4)
    assert code == 0
    assert "residual 0" in out


def test_linearize_requires_exact_field():
    code, _, err = call("linearize", "--input", fx("sl2_conjugated.rep"), "--field", "float")
    assert code == 1 and "exact" in err


@pytest.mark.parametrize("cmd,fixture", [("darboux", "darboux.json"),
                                         ("equivariant-darboux", "equivariant_darboux.json"),
                                         ("b-darboux", "b_darboux.json"),
                                         ("split", "split.json"),
                                         ("cotangent-lift", "sl2.rep")])
def test_normal_form_commands_succeed(cmd, fixture):
    code, out, err = call(cmd, "--input", fx(fixture))
    assert code == 0, err
    assert "residual 0" in out


def test_b_darboux_reports_divisibility():
    _, out, _ = call("b-darboux", "--input", fx("b_darboux.json"))
    assert "z-component divisible by z: True" in out


def test_split_reports_transverse_function():
    _, out, _ = call("split", "--input", fx("split.json"))
    assert "bracket check 0" in out
    assert "f[z1,z2] = 1*z1 + 1*z2^2" in out


def test_moment_map_golden_output():
    code, out, _ = call("moment-map", "--input", fx("sl2.rep"))
    assert code == 0
    assert "mu[X] = 1*y*c + 1*z*b" in out
    assert "mu[Z] = 1*x*b - 1*y*a" in out
    assert "hamiltonian residual 0" in out


def test_orbit_dim_csv(tmp_path):
    dest = tmp_path / "o.csv"
    code, out, _ = call("orbit-dim", "--input", fx("sl2.rep"), "--seed", 1, "--samples", 5,
                        "--out", dest)
    assert code == 0
    rows = dest.read_text().splitlines()
    assert rows[0] == "x,y,z,rank" and len(rows) == 6


def test_orbit_dim_explicit_points(tmp_path):
    doc = json.loads(fx("sl2.rep").read_text())
    doc["points"] = [[0, 0, 0], [1, 0, 0]]
    path = tmp_path / "p.json"
    path.write_text(json.dumps(doc))
    code, out, _ = call("orbit-dim", "--input", path)
    assert code == 0
    assert out.splitlines()[1:] == ["0,0,0,0", "1,0,0,2"]


def test_random_sampling_needs_seed():
    code, _, err = call("orbit-dim", "--input", fx("sl2.rep"))
    assert code == 1 and "--seed" in err


def test_strata_scan_grid_on_omega(tmp_path):
    dest = tmp_path / "s.csv"
    code, out, _ = call("strata-scan", "--input", fx("sl2.rep"), "--order", 1, "--sampler",
                        "grid", "--region", "omega", "--samples", 500, "--out", dest)
    assert code == 0
    ranks = {line.rsplit(",", 1)[1] for line in dest.read_text().splitlines()[1:]}
    assert ranks <= {"0", "2"}


def test_demo_is_deterministic(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for dest in (a, b):
        code, out, _ = call("demo", "cairns-ghys", "--seed", 7, "--samples", 300, "--out", dest)
        assert code == 0
    assert a.read_bytes() == b.read_bytes()
    assert "inside the cone" in out


def test_usage_errors():
    assert call("verify-rep")[0] == 1
    assert call("linearize", "--input", fx("sl2.rep"), "--order", 0)[0] == 1
    assert call("verify-rep", "--input", "/nonexistent.json")[0] == 1
    assert call("no-such-command")[0] == 1


def test_missing_key_is_usage_error(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"nvars": 4, "order": 3}))
    code, _, err = call("darboux", "--input", path)
    assert code == 1 and "missing key" in err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "jetnormal", "verify-rep", "--input",
                           str(fx("sl2.rep"))], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "residual: 0" in proc.stdout
