import json
import subprocess
import sys
from pathlib import Path

import pytest

from equik import suites
from equik.cli import main, run

SPECS = Path(__file__).resolve().parents[1] / "specs"


def json_run(capsys, *argv):
    code = main([*argv, "--format", "json"])
    out, err = capsys.readouterr()
    return code, (json.loads(out) if out else None), err


def test_euler_octahedron(capsys):
    code, rep, err = json_run(capsys, "euler", "--complex", str(SPECS / "octahedron_c2.json"))
    assert code == 0
    assert rep["result"] == {"class": {"C2/C2": 0, "C2/e": 1}, "marks": [2, 0]}
    assert "took" in err


def test_euler_catalog_fallback(capsys):
    code, rep, _ = json_run(capsys, "euler", "--complex", "antipodal_square")
    assert code == 0 and rep["result"]["marks"] == [0, 0]


def test_marks(capsys):
    code, rep, _ = json_run(capsys, "marks", "--group", "C2")
    assert code == 0
    assert rep["result"]["matrix"] == [[2, 0], [1, 1]]
    assert rep["result"]["rows"] == ["C2/e", "C2/C2"] and rep["result"]["columns"] == ["e", "C2"]


@pytest.mark.parametrize("argv,key,value", [
    (["gset", "s3_gset.json"], "census", {"S3/C2": 1, "S3/S3": 1, "S3/e": 1}),
    (["gset", "c4_generators.toml"], "census", {"C4/e": 1}),
    (["span", "span_transfer.json"], "middle_size", 18),
    (["doublecoset", "doublecoset_s3.json"], "iso", True),
    (["k0", "module_c2.json"], "zranks", [2, 1]),
    (["functor", "induce_c2_to_s3.json"], "ranks", {"C2": 0, "C3": 0, "S3": 0, "e": 6}),
    (["coeff", "ring_s3.json"], "violations", []),
])
def test_spec_commands(capsys, argv, key, value):
    code, rep, _ = json_run(capsys, argv[0], str(SPECS / argv[1]))
    assert code == 0 and rep["result"][key] == value


def test_split_and_twisted(capsys):
    code, rep, _ = json_run(capsys, "split", str(SPECS / "module_c2.json"))
    assert code == 0 and rep["verdict"] == "pass"
    assert rep["result"]["stages"][0] == {"class": "C2", "quotient_ranks": [2, 0], "sub_ranks": [1, 1]}
    code, rep, _ = json_run(capsys, "twisted", "--group", "C2", "--s3-iso")
    assert code == 0 and rep["result"]["found"] is True


def test_input_errors_exit_2(capsys):
    assert main(["gset", str(SPECS / "broken.json")]) == 2
    _, err = capsys.readouterr()
    assert "gset.orbits[1].class: expected a class index in 0..3" in err
    assert main(["gset", str(SPECS / "nope.json")]) == 2
    assert main(["marks"]) == 2                             # no group given
    assert main(["marks", "--group", "C13"]) == 2
    assert main(["frobnicate"]) == 2
    assert main(["euler", "--complex", "not_a_complex"]) == 2


def test_verify_pass_and_fail(capsys, monkeypatch):
    code, rep, err = json_run(capsys, "verify", "twisted", "--groups", "C2,S3")
    assert code == 0 and rep["verdict"] == "pass"
    assert "[PASS]  7 twisted" in err

    def failing(**kw):
        return suites.SuiteResult("twisted", 7, cases=1, failures=["forced"])
    monkeypatch.setitem(suites.SUITES, "twisted", failing)
    code, rep, err = json_run(capsys, "verify", "twisted")
    assert code == 1 and rep["verdict"] == "fail" and "[FAIL]" in err


def test_json_is_byte_identical(capsys):
    outs = []
    for _ in range(2):
        main(["linearize", "--complex", str(SPECS / "s3_triangle.json"), "--format", "json"])
        outs.append(capsys.readouterr().out)
    assert outs[0] == outs[1]
    assert "." not in json.dumps(json.loads(outs[0])["result"]).replace("s3_triangle.json", "")


def test_text_format(capsys):
    report, code = run(["group", "--group", "S3"])
    out = capsys.readouterr().out
    assert code == 0 and report["result"]["order"] == 6
    assert "S3" in out and not out.lstrip().startswith("{")


def test_console_script():
    proc = subprocess.run([sys.executable, "-m", "equik.cli", "marks", "--group", "C3", "--format", "json"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["result"]["matrix"] == [[3, 0], [1, 1]]
