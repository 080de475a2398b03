import json
import subprocess
import sys
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from oracles import catalecticant_ranks
from wlpkit.cli import RunConfig, emit_json, emit_text, main, parse_report, run_command

DATA = Path(__file__).resolve().parent.parent / "data"
BASE_KEYS = {"schema_version", "command", "field", "input_sha256", "hvector", "wlp", "jordan", "timing_ms", "result"}


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr().out
    return code, json.loads(out)


def test_hilbert(capsys):
    code, rep = run(capsys, "hilbert", DATA / "ci333.ideal")
    assert code == 0
    assert rep["hvector"] == [1, 3, 6, 7, 6, 3, 1]
    assert BASE_KEYS <= set(rep)
    assert rep["schema_version"] == 1 and rep["field"] == "Q"


def test_wlp_exhaustive_exceptional(capsys):
    code, rep = run(capsys, "wlp", "--exhaustive", "--table", DATA / "exceptional.ideal")
    assert code == 0
    assert rep["wlp"]["verdict"] == "fails"
    middle = [r for r in rep["wlp"]["ranks"] if r["i"] == 2]
    assert [(r["rank"], r["rows"], r["cols"]) for r in middle] == [(5, 6, 6)]
    assert len(rep["result"]["form_table"]) == 13


def test_wlp_other_fields(capsys):
    for field in ("GF(2)", "GF(5)", "GF(7)", "GF(101)"):
        code, rep = run(capsys, "wlp", "--exhaustive", "--field", field, DATA / "exceptional.ideal")
        assert code == 0 and rep["wlp"]["verdict"] == "holds" and rep["field"] == field


def test_slp(capsys):
    code, rep = run(capsys, "slp", "--exhaustive", DATA / "exceptional.ideal")
    assert code == 0 and rep["result"]["slp"]["verdict"] == "fails"


def test_jordan(capsys):
    code, rep = run(capsys, "jordan", "-L", "x", DATA / "exceptional.ideal")
    assert rep["jordan"] == {"form": "x", "parts": [6, 2, 2, 2, 2, 2, 2, 2]}
    code, rep = run(capsys, "jordan", DATA / "exceptional.ideal")
    assert rep["jordan"]["parts"] == [6, 3, 3, 3, 3, 1, 1]


def test_green(capsys):
    code, rep = run(capsys, "green", "-L", "x+y+2*z", "-d", "3", DATA / "exceptional.ideal")
    assert code == 0 and rep["result"]["restriction_dim"] == 1


def test_annihilator_and_certify(capsys):
    code, rep = run(capsys, "annihilator", DATA / "gorenstein_dual.ideal")
    assert rep["hvector"] == [1, 3, 5, 5, 3, 1]
    code, rep = run(capsys, "certify", DATA / "exceptional.skew")
    assert code == 0 and rep["result"]["certified"] and rep["hvector"] == [1, 3, 6, 6, 3, 1]
    assert rep["result"]["dual_form"] == "2*X^5 + X*Y^2*Z^2"


def test_compressed(capsys):
    code, rep = run(capsys, "compressed", "-e", "5", "--field", "GF(101)")
    assert code == 0 and rep["hvector"] == rep["result"]["expected"] == [1, 3, 6, 6, 3, 1]


def test_pfaffian(capsys):
    code, rep = run(capsys, "pfaffian", DATA / "exceptional.skew")
    assert code == 0 and rep["hvector"] == [1, 3, 6, 6, 3, 1]
    assert len(rep["result"]["pfaffians"]) == 5


def test_truncate_and_decompose(capsys):
    code, rep = run(capsys, "truncate", "-d", "4", DATA / "exceptional.ideal")
    assert rep["hvector"] == [1, 3, 6, 6, 3] and rep["result"]["type"] == 3 and rep["result"]["level"]
    code, rep = run(capsys, "decompose", DATA / "two_quintics.ideal")
    assert code == 0 and rep["result"]["socle_dims"][-1] == 2
    forms = [{(5, 0, 0): 1, (0, 2, 3): 1}, {(1, 1, 3): 1, (0, 5, 0): 1}]
    assert [f["hvector"] for f in rep["result"]["factors"]] == [catalecticant_ranks(F, 5, 101) for F in forms]


def test_plane_geometry_commands(capsys):
    code, rep = run(capsys, "hesse", DATA / "hesse.ideal")
    assert code == 0 and rep["result"]["is_hesse"] and len(rep["result"]["lines"]) == 12
    code, rep = run(capsys, "fibers", "--decompose", DATA / "fermat_w.ideal")
    assert rep["result"]["generic_fiber_size"] == 3 and rep["result"]["decomposition"]["collinearity_check"]


def test_hb(tmp_path, capsys):
    path = tmp_path / "x.ideal"
    path.write_text("field GF(101)\ngen x^2*z - y^3\ngen y*z^2\ngen z^3\n")
    code, rep = run(capsys, "hb", path)
    assert code == 0 and rep["result"]["linear_part_rank"] == 2


def test_linkage_mismatch_exit_code(capsys):
    code, rep = run(capsys, "linkage", DATA / "exceptional.skew")
    assert code == 2 and rep["error"].startswith("StructureMismatch")


def test_input_errors(tmp_path, capsys):
    code, rep = run(capsys, "hilbert", tmp_path / "missing.ideal")
    assert code == 2
    bad = tmp_path / "bad.ideal"
    bad.write_text("field GF(3)\ngen x^\n")
    code, rep = run(capsys, "hilbert", bad)
    assert code == 2 and "line 2" in rep["error"]
    code, rep = run(capsys, "search", "--trials", "1")
    assert code == 2


def test_undetermined_exit_code(capsys):
    code, rep = run(capsys, "wlp", "--field", "GF(3)", "--trials", "5", DATA / "ci233.ideal")
    assert code == 3 and rep["wlp"]["verdict"] == "undetermined"


def test_not_artinian_hilbert(tmp_path, capsys):
    path = tmp_path / "c.ideal"
    path.write_text("gen x\ngen y\n")
    code, rep = run(capsys, "hilbert", "--max-degree", "6", path)
    assert code == 0 and rep["result"]["artinian"] is False and rep["result"]["stable_value"] == 1


def test_search_command(tmp_path, capsys):
    out = tmp_path / "r.jsonl"
    code, rep = run(capsys, "search", "--field", "GF(3)", "--trials", "20", "--record-all", "--out", out)
    assert code == 0 and rep["result"]["trials"] == 20
    assert len(out.read_text().splitlines()) == rep["result"]["gorenstein_target"]
    code, rep = run(capsys, "search", "--field", "GF(3)", "--trials", "0", "--out", out)
    assert out.read_text() == "" and rep["result"]["failures"] == 0


def test_report_file_and_text_output(tmp_path, capsys):
    out = tmp_path / "rep.json"
    assert main(["hilbert", str(DATA / "ci233.ideal"), "--out", str(out)]) == 0
    assert json.loads(out.read_text())["hvector"] == [1, 3, 5, 5, 3, 1]
    main(["hilbert", str(DATA / "ci233.ideal"), "--output", "text"])
    text = capsys.readouterr().out
    assert "hvector: [1, 3, 5, 5, 3, 1]" in text


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "wlpkit", "hilbert", str(DATA / "ci233.ideal")],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and json.loads(proc.stdout)["hvector"] == [1, 3, 5, 5, 3, 1]


def test_run_command_unknown():
    code, rep = run_command(RunConfig(command="frobnicate"))
    assert code == 2 and "error" in rep


json_values = st.recursive(
    st.none() | st.booleans() | st.integers() | st.text(max_size=8),
    lambda inner: st.lists(inner, max_size=4) | st.dictionaries(st.text(max_size=6), inner, max_size=4),
    max_leaves=20,
)


@settings(max_examples=100, deadline=None)
@given(st.dictionaries(st.text(max_size=6), json_values, max_size=6))
def test_report_round_trip(report):
    assert parse_report(emit_json(report)) == report


@pytest.mark.parametrize("name", ["exceptional.ideal", "ci333.ideal", "exceptional.skew"])
def test_real_reports_round_trip(name, capsys):
    cmd = "pfaffian" if name.endswith(".skew") else "hilbert"
    code, rep = run_command(RunConfig(command=cmd, input_path=str(DATA / name)))
    assert parse_report(emit_json(rep)) == rep
    assert emit_text(rep)
