import json

import pytest

from udcohom.cli import CHECKS, emit_report, main, parse_config, run_checks, RunConfig
from udcohom.errors import ParseError, ValidationError


def test_parse_key_value():
    run = parse_config("primes=[3,7]\nmodulus=2\nn_max=3\nchecks=[all]\n")
    assert run.primes == (3, 7) and run.modulus == 2 and run.n_max == 3
    assert run.checks == tuple(sorted(CHECKS))


def test_parse_json_and_ideal():
    run = parse_config('{"primes": [7, 3], "modulus": 2, "ideal": [[3], [7]], "checks": ["cup"]}')
    assert run.primes == (3, 7) and run.ideal == ((3,), (7,)) and run.checks == ("cup",)


def test_parse_comments_and_spacing():
    run = parse_config("# demo\n primes = [ 3 , 7 ]   # S\n\nchecks = [theorem-a, lift]\n")
    assert run.checks == ("lift", "theorem-a")


@pytest.mark.parametrize("text,line,col", [
    ("primes=[3,7\n", 1, 12),
    ("primes=[3,7]\nmodulus\n", 2, 1),
    ("primes=[3,7]\nchecks=[a b]\n", 2, 11),
    ('{"primes": [3,\n 7', 2, 3),
])
def test_parse_errors_carry_position(text, line, col):
    with pytest.raises(ParseError) as info:
        parse_config(text)
    assert (info.value.line, info.value.position) == (line, col)


@pytest.mark.parametrize("text", [
    "primes=[3,9]",
    "primes=[3,7]\nmodulus=3",
    "primes=[3,7]\nn_max=-1",
    "primes=[3,7]\nchecks=[bogus]",
    "primes=[3,7]\nideal=[[5]]",
    "modulus=2",
    "primes=[3,7]\ncolour=red",
])
def test_validation_errors(text):
    with pytest.raises(ValidationError):
        parse_config(text)


def test_empty_check_list_gives_empty_report():
    run = parse_config("primes=[3]\nchecks=[]")
    doc = json.loads(emit_report(run_checks(run)))
    assert doc["results"] == [] and doc["meta"]["config"]["checks"] == []


def test_r3_all_checks_pass():
    report = run_checks(parse_config("primes=[3]\nmodulus=2\nn_max=3\nchecks=[all]"))
    assert report.passed
    table = [r["computed"] for r in report.results if r["name"].startswith("theorem-a/")]
    assert table == ["Z", "Z/2", "Z/2", "Z/2"]


def test_theorem_b_record_lists_four_elements():
    report = run_checks(parse_config("primes=[3,7]\nmodulus=2\nchecks=[theorem-b]"))
    assert report.passed
    family = next(r for r in report.results if r["name"] == "theorem-b/family")
    assert len(family["computed"]) == 4


def test_theorem_a_record_schema():
    report = run_checks(parse_config("primes=[3]\nn_max=1\nchecks=[theorem-a]"))
    rec = report.results[0]
    assert set(rec) == {"name", "inputs", "computed", "expected", "provenance", "pass"}
    assert rec["inputs"]["degree"] == 0 and rec["expected"] == "Z"


def test_reports_are_deterministic():
    run = parse_config("primes=[3,7]\nmodulus=2\nn_max=1\nchecks=[theorem-a,theorem-b,lift]")
    a = emit_report(run_checks(run))
    b = emit_report(run_checks(run))
    assert a == b
    assert "timings" not in json.loads(a)["meta"]
    assert "timings" in json.loads(emit_report(run_checks(run), timings=True))["meta"]
    md = emit_report(run_checks(run), "markdown")
    assert md.startswith("# udcohom report") and "overall: pass" in md


def test_engine_errors_become_failed_records(monkeypatch):
    from udcohom import cli

    def boom(run, cfg):
        raise ValueError("synthetic")
    monkeypatch.setitem(cli.SUITES, "appendix", boom)
    report = run_checks(RunConfig((3,), 2, 1, None, ("appendix",)))
    assert not report.passed
    assert report.results[0]["computed"].startswith("error: ValueError")


def test_main_exit_codes(tmp_path, capsys):
    assert main(["verify", "--primes", "3", "--modulus", "2", "--checks", "theorem-a,theorem-b"]) == 0
    out = capsys.readouterr().out
    assert "PASS  theorem-a/degree-0" in out
    assert main(["verify", "--primes", "3,9"]) == 2
    cfg = tmp_path / "run.cfg"
    cfg.write_text("primes=[3]\nmodulus=2\nchecks=[theorem-b]\n")
    target = tmp_path / "out.json"
    assert main(["report", "--primes", "7", "--config", str(cfg), "--out", str(target)]) == 0
    doc = json.loads(target.read_text())
    assert doc["meta"]["config"]["primes"] == [3]


def test_basis_and_cohomology_commands(capsys):
    assert main(["basis", "--primes", "3,7"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("U_21: rank 12")
    assert main(["cohomology", "--primes", "3,7", "--n-max", "1"]) == 0
    assert "H^1(G_21, U_21) = Z/2 + Z/2 + Z/6" in capsys.readouterr().out
