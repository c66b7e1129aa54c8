import json
import subprocess
import sys

import pytest

from reidemeister import __version__
from reidemeister.cli import CHECKS, RunConfig, dumps, main, run, scan


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_passing_run(capsys):
    code, out, _ = run_cli(capsys, "--group", "abelian:2,2", "--check", "condition-all")
    assert code == 0
    assert "condition-all" in out and "pass" in out


def test_failing_check_prints_witness(capsys):
    code, out, _ = run_cli(capsys, "--group", "symmetric:3", "--check", "condition-inner")
    assert code == 1
    assert "fail" in out and "witness" in out


def test_goldens_fail_on_relative_class(capsys):
    code, out, _ = run_cli(capsys, "--group", "gpn:3:3", "--check", "gpn-goldens", "--json")
    assert code == 1
    check = json.loads(out)["reports"][0]["checks"][0]
    assert check["verdict"] == "fail"
    assert list(check["witnesses"]) == ["worked-examples"]
    assert check["witnesses"]["worked-examples"]["relative_class"]["computed_is_subgroup"]
    assert check["details"]["nux"]["verdict"] == "pass"
    assert check["details"]["7pr"]["verdict"] == "pass"


@pytest.mark.parametrize(
    "argv",
    [
        ["--group", "nonsense:1"],
        ["--group", "gpn:3:3", "--check", "bogus"],
        ["--group", "gpn:2:3"],
        ["--group", "cyclic:4", "--word", "[x1,"],
        ["--group", "cyclic:4", "--seed", "-1"],
        ["--group", "cyclic:4", "--budget", "0"],
        ["--no-such-flag"],
        [],
    ],
)
def test_usage_errors(capsys, argv):
    code, _, err = run_cli(capsys, *argv)
    assert code == 2
    assert err


def test_json_schema(capsys):
    code, out, _ = run_cli(capsys, "--group", "gpn:3:3", "--check", "condition-inner,series", "--json")
    assert code == 0
    doc = json.loads(out)
    assert doc["tool_version"] == __version__
    assert doc["config_echo"] == {
        "groups": ["gpn:3:3"],
        "checks": ["condition-inner", "series"],
        "seed": 0,
        "budget": doc["config_echo"]["budget"],
        "words": [],
    }
    block = doc["reports"][0]
    assert block["order"] == 243 and block["generators"] == ["(1,0)", "(0,1)"]
    for check in block["checks"]:
        assert set(check) >= {"check", "verdict", "details", "witnesses", "notes"}
        assert "timing_ms" not in check
    series = block["checks"][1]
    assert series["details"]["nilpotency_class"] == 3


def test_timing_flag(capsys):
    _, out, _ = run_cli(capsys, "--group", "cyclic:5", "--json", "--timing")
    assert all("timing_ms" in c for c in json.loads(out)["reports"][0]["checks"])


def test_byte_identical(capsys):
    argv = ["--group", "gpn:3:3", "--group", "heisenberg:3", "--check", "lemmas,width-bounds", "--seed", "7", "--json"]
    _, first, _ = run_cli(capsys, *argv)
    _, second, _ = run_cli(capsys, *argv)
    assert first == second


def test_seed_changes_only_sampling():
    a = run(RunConfig(["gpn:3:3"], ["condition-inner"], seed=1, structured=True))
    b = run(RunConfig(["gpn:3:3"], ["condition-inner"], seed=2, structured=True))
    assert a["reports"] == b["reports"]


def test_too_large_group_is_skipped(capsys):
    code, out, _ = run_cli(capsys, "--group", "gpn:7:3", "--check", "condition-inner", "--json")
    assert code == 0
    check = json.loads(out)["reports"][0]["checks"][0]
    assert check["verdict"] == "skipped" and "4096" in check["notes"][0]


def test_condition_all_skipped_above_cap(capsys):
    code, out, _ = run_cli(capsys, "--group", "gpn:3:4", "--check", "condition-all", "--json")
    assert code == 0
    assert json.loads(out)["reports"][0]["checks"][0]["verdict"] == "skipped"


def test_not_applicable_checks(capsys):
    code, out, _ = run_cli(capsys, "--group", "symmetric:3", "--check", "corex,lincom,gpn-goldens,wfin", "--json")
    assert code == 0
    assert {c["verdict"] for c in json.loads(out)["reports"][0]["checks"]} == {"not-applicable"}


def test_word_flag(capsys):
    code, out, _ = run_cli(capsys, "--group", "gpn:3:3", "--word", "[x1,x2,x3]", "--json")
    assert code == 0
    word = json.loads(out)["reports"][0]["checks"][-1]
    assert word["details"]["verbal_subgroup_order"] == 3 and word["details"]["width"] == 1


def test_list_catalog(capsys):
    code, out, _ = run_cli(capsys, "--list-catalog", "--json")
    assert code == 0
    rows = json.loads(out)["catalog"]
    assert rows[0] == {"selector": "gpn:3:3", "name": "G(3,3)", "order": 243}
    code, out, _ = run_cli(capsys, "--list-catalog")
    assert "gpn:7:3" in out and "unavailable" in out


def test_scan_summary(capsys):
    code, out, _ = run_cli(
        capsys, "--scan", "--json", "--group", "gpn:3:3", "--group", "symmetric:3",
        "--group", "gpn:3:3", "--group", "gpn:2:3", "--group", "gpn:7:3",
    )
    doc = json.loads(out)
    rows = {r["group"]: r for r in doc["summary"]}
    assert list(rows) == ["gpn:3:3", "symmetric:3", "gpn:2:3", "gpn:7:3"]
    assert rows["gpn:3:3"]["condition_inner"] == "pass" and rows["gpn:3:3"]["nilpotency_class"] == 3
    assert rows["gpn:3:3"]["condition_all"] == "fail"
    assert rows["symmetric:3"]["condition_inner"] == "fail" and rows["symmetric:3"]["nilpotency_class"] is None
    assert "error" in rows["gpn:2:3"]
    assert rows["gpn:7:3"]["condition_inner"] == "skipped"
    assert all(r.get("consistent", True) for r in doc["summary"])
    assert code == 1  # error entry and failing verdicts


def test_scan_empty_batch():
    doc = scan([], RunConfig([]))
    assert doc["summary"] == [] and doc["reports"] == []


def test_dumps_is_stable():
    doc = run(RunConfig(["cyclic:3"], ["axioms"]))
    assert dumps(doc) == dumps(json.loads(dumps(doc)))


def test_every_check_runs_on_g33(capsys):
    code, out, _ = run_cli(capsys, "--group", "gpn:3:3", "--check", ",".join(CHECKS), "--json")
    verdicts = {c["check"]: c["verdict"] for c in json.loads(out)["reports"][0]["checks"]}
    assert set(verdicts) == set(CHECKS)
    assert verdicts["condition-all"] == "fail" and verdicts["gpn-goldens"] == "fail"
    assert verdicts["corex"] == "not-applicable"
    assert code == 1


def test_console_script():
    proc = subprocess.run(
        [sys.executable, "-m", "reidemeister.cli", "--group", "cyclic:6", "--json"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["reports"][0]["order"] == 6
