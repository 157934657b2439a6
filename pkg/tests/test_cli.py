import csv
import io
import json
import subprocess
import sys

import pytest

from opcheb.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.reader(io.StringIO(text)))


def test_coeffs(capsys):
    code, out, _ = run(capsys, "coeffs", "--m", "2", "--p", "1", "--count", "4")
    assert code == 0
    table = rows(out)
    assert table[0] == ["n", "t_n", "t_n_decimal"]
    assert [r[1] for r in table[1:]] == ["0/1", "1/2", "1/3", "1/6"]
    assert out.endswith("\r\n")


def test_coeffs_chebyshev_case(capsys):
    code, out, _ = run(capsys, "coeffs", "--m", "2", "--p", "0", "--count", "8")
    assert [r[1] for r in rows(out)[2:]] == ["1/2"] + ["1/4"] * 6


def test_coeffs_derived(capsys):
    code, out, _ = run(capsys, "coeffs", "--m", "2", "--p", "1", "--count", "3", "--derived")
    table = rows(out)
    assert table[0][-2:] == ["r_n", "s_n"]
    assert table[1][3] == "3/40" and table[1][4] == ""


def test_m1_rejected(capsys):
    code, _, err = run(capsys, "coeffs", "--m", "1", "--p", "1")
    assert code == 2 and "m = 1" in err


@pytest.mark.parametrize("p", ["-1", "0.5", "abc", "1/2.5"])
def test_bad_p(capsys, p):
    code, _, err = run(capsys, "polys", "--m", "2", "--p", p)
    assert code == 2 and err


def test_usage_errors(capsys):
    assert run(capsys, "bogus")[0] == 2
    assert run(capsys, "polys", "--count", "0")[0] == 2
    assert run(capsys, "example", "--m", "2", "--j", "4")[0] == 2


def test_polys_chebyshev(capsys):
    code, out, _ = run(capsys, "polys", "--m", "2", "--p", "0", "--count", "5")
    table = rows(out)
    assert table[0] == ["family", "n", "degree", "coeffs"]
    assert table[3] == ["P", "2", "2", "-1/2;0/1;1/1"]
    assert table[5] == ["P", "4", "4", "1/8;0/1;-1/1;0/1;1/1"]


def test_example_row_matches_polys(capsys):
    _, polys_out, _ = run(capsys, "polys", "--m", "2", "--p", "1", "--count", "6")
    code, ex_out, _ = run(capsys, "example", "--m", "2", "--p", "1", "--n", "0", "--j", "1", "--check")
    assert code == 0
    assert ex_out.splitlines()[1] == polys_out.splitlines()[5]


def test_example_printed_form_detected(capsys):
    code, _, err = run(capsys, "example", "--m", "2", "--p", "1", "--n", "0", "--j", "1",
                       "--form", "printed", "--check")
    assert code == 1 and "recurrence" in err


def test_polys_json(capsys):
    code, out, _ = run(capsys, "polys", "--format", "json", "--count", "3", "--family", "both")
    data = json.loads(out)
    assert data[2] == {"family": "P", "n": 2, "degree": 2, "coeffs": ["-1/2", "0/1", "1/1"]}
    assert [d["family"] for d in data] == ["P"] * 3 + ["Q"] * 3


@pytest.mark.parametrize("m,p,blocks", [("2", "1", "3"), ("3", "0", "3"), ("2", "5/2", "2")])
def test_verify(capsys, m, p, blocks):
    code, out, _ = run(capsys, "verify", "--m", m, "--p", p, "--blocks", blocks, "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert data["passed"] is True
    assert all(r["passed"] for r in data["gating"])
    s_report = [r for r in data["gating"] if r["title"].startswith("s_n prefactor")][0]
    assert s_report["checks"][0]["data"]["verdict"] == "generic"


def test_measure_gram(capsys, tmp_path):
    target = tmp_path / "m.json"
    code, _, _ = run(capsys, "measure", "--m", "2", "--p", "1", "--gram", "13",
                     "--format", "json", "--out", str(target))
    assert code == 0
    data = json.loads(target.read_text())
    assert abs(data["M"]) <= 1e-8
    assert data["gram_max_offdiag"] <= 1e-9
    assert len(data["E"]) == 4


def test_measure_recover(capsys):
    code, out, _ = run(capsys, "measure", "--m", "2", "--p", "2", "--recover", "30")
    assert code == 0
    table = dict(rows(out)[1:])
    assert float(table["recover_max_t_deviation"]) <= 1e-8


def test_measure_singular_weight(capsys):
    code, out, _ = run(capsys, "measure", "--m", "2", "--p", "-1/2", "--gram", "9", "--recover", "20")
    assert code == 0
    table = dict(rows(out)[1:])
    assert float(table["p"]) == -0.5


def test_measure_decimal_p(capsys):
    assert run(capsys, "measure", "--m", "3", "--p", "0.5")[0] == 0
    assert run(capsys, "measure", "--m", "2", "--p", "-1.5")[0] == 2


def test_numerical_failure_exit(capsys):
    code, _, err = run(capsys, "measure", "--m", "2", "--p", "1", "--tol", "1e-40")
    assert code == 3 and "numerical" in err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "opcheb", "coeffs", "--count", "2"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[2].startswith("1,1/2,")
