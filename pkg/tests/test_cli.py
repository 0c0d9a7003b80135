import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from indiscern.cli import run
from indiscern.structfile import dumps, loads, parse_struct_file

DATA = Path(__file__).resolve().parent.parent / "data"


def call(*argv):
    out = io.StringIO()
    status = run([str(a) for a in argv], stdout=out)
    return status, out.getvalue()


def report(tmp_path, *argv):
    path = tmp_path / "r.json"
    status, _ = call(*argv, "--json", path)
    return status, json.loads(path.read_text())


def test_classify_henkin_rank0(tmp_path):
    status, rep = report(tmp_path, "classify", DATA / "henkin4.struct", "--max-rank", "0", "--atomic-only")
    assert status == 0
    pair = rep["payload"]["pairs"][0]
    assert pair["pair"] == [0, 1] and pair["verdict"] == "structurally_indiscernible"
    assert pair["witness"] is None and pair["orbit_certificate"] == "(0 1)"
    assert rep["command"]["options"]["max_rank"] == 0


def test_rigidify_greedy_singlet(tmp_path):
    status, rep = report(tmp_path, "rigidify", DATA / "singlet.struct", "--strategy", "greedy")
    assert status == 0 and rep["payload"]["added"] == [["I0", 0]]
    ext = loads(rep["payload"]["structure"])
    assert ext.relations["I0"] == {(0,)}


def test_ef_identical_files():
    status, out = call("ef", DATA / "singlet.struct", DATA / "singlet.struct", "--rounds", "3")
    assert status == 0 and out.strip() == "equivalent at rank 3"


def test_ef_separated():
    status, out = call("ef", DATA / "singlet.struct", DATA / "k2loop.struct", "--rounds", "1")
    assert status == 0 and out.startswith("separated within 1 round")


def test_frege_exit_codes():
    assert call("frege", DATA / "k2loop_eq.struct")[0] == 0
    status, out = call("frege", DATA / "singlet.struct", "--blocks", "0,1")
    assert status == 1 and "fails substitution" in out
    assert call("frege", DATA / "singlet.struct")[0] == 2


def test_validate_exit_codes(tmp_path):
    assert call("validate", DATA / "z5add.struct")[0] == 0
    bad = tmp_path / "bad.struct"
    bad.write_text("structure B { domain 2; rel R/2 = {(0,1),(1,0)}; rel Eq/2 = {(0,0),(1,1),(0,1),(1,0)};"
                   " equality Eq; }")
    status, out = call("validate", bad)
    assert status == 1 and "invalid" in out


def test_input_errors(tmp_path, capsys):
    assert call("orbits", tmp_path / "missing.struct")[0] == 2
    broken = tmp_path / "broken.struct"
    broken.write_text("structure A {\n  domain 2;\n  rel R/2 = {(0,5)};\n}\n")
    assert call("orbits", broken)[0] == 2
    assert "3:14" in capsys.readouterr().err
    assert call("quotient", DATA / "singlet.struct", "--blocks", "0,1")[0] == 2
    assert call("leibniz", DATA / "henkin4.struct", "0")[0] == 2
    with pytest.raises(SystemExit) as info:
        call("ef", DATA / "singlet.struct")
    assert info.value.code == 2


def test_quotient_output_reparses(tmp_path):
    status, rep = report(tmp_path, "quotient", DATA / "z3add_inflated_eq.struct")
    assert status == 0
    parsed = parse_struct_file(rep["payload"]["structure"])
    assert parsed.mapping == (0, 1, 2, 0, 1, 2)
    assert dumps(parsed.structure, parsed.mapping) == rep["payload"]["structure"]
    assert rep["payload"]["truth_transfer"]["passed"]


def test_leibniz_verb(tmp_path):
    status, rep = report(tmp_path, "leibniz", DATA / "henkin4.struct", "0", "1", "--family", "P1,P2,P3")
    assert status == 0
    assert rep["payload"]["pairs"] == [{"pair": [0, 1], "full": False, "separator": [0], "family": True}]


def test_hb_and_group(tmp_path):
    status, rep = report(tmp_path, "hb", DATA / "henkin4.struct")
    assert rep["payload"]["classes"] == [[0, 1], [2], [3]] and not rep["payload"]["is_diagonal"]
    status, rep = report(tmp_path, "group", DATA / "z5add.struct")
    assert rep["payload"]["order"] == 4 and rep["payload"]["orbits"] == [[0], [1, 2, 3, 4]]


def test_report_envelope(tmp_path):
    _, rep = report(tmp_path, "orbits", DATA / "singlet.struct")
    assert rep["format"] == "indiscern-report" and rep["version"] == 1
    assert set(rep) == {"format", "version", "tool_version", "command", "structure_digest", "exit_status", "payload"}
    assert len(rep["structure_digest"]) == 64


ALL_COMMANDS = [
    ["validate", "singlet.struct"],
    ["orbits", "z5add.struct"],
    ["group", "z5add.struct"],
    ["rigidify", "z5add.struct", "--strategy", "greedy"],
    ["classify", "z5add.struct"],
    ["hierarchy", "singlet.struct"],
    ["hb", "henkin4.struct"],
    ["frege", "k2loop_eq.struct"],
    ["quotient", "z3add_inflated_eq.struct"],
    ["ef", "z3add_eq.struct", "z3add_eq.struct", "--rounds", "2"],
    ["leibniz", "henkin4.struct", "--family", "P1,P2"],
]


@pytest.mark.parametrize("argv", ALL_COMMANDS, ids=lambda a: a[0])
def test_reports_are_byte_identical(tmp_path, argv, monkeypatch):
    monkeypatch.chdir(DATA)
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert call(*argv, "--json", a)[0] == call(*argv, "--json", b)[0]
    assert a.read_bytes() == b.read_bytes()


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "indiscern", "orbits", str(DATA / "singlet.struct")],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "{0, 1}" in proc.stdout
