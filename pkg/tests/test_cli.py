import csv
import io
import json
import subprocess
import sys
from importlib import resources

import jsonschema
import pytest

from primverify import cli
from primverify.interval import Interval, Status
from primverify.report import (CSV_COLUMNS, EXIT_CONFIG, EXIT_INDETERMINATE, EXIT_OK, EXIT_REFUTED, CheckResult,
                               VerificationReport)


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture(scope="module")
def schema():
    return json.loads(resources.files("primverify").joinpath("report-schema.json").read_text())


# exit statuses ----------------------------------------------------------------------------


def test_exit_ok_with_expected_refutation(capsys):
    code, out, _ = run_cli(capsys, "mertens", "--bound", "1000", "--format", "json")
    assert code == EXIT_OK
    doc = json.loads(out)
    q2 = [c for c in doc["checks"] if c["subject"] == "q=2"]
    assert q2 and q2[0]["status"] == "Refuted" and q2[0]["expected_refuted"]
    assert doc["summary"]["checked_odd_primes"] == 167


def test_exit_refuted(capsys, monkeypatch):
    bad = CheckResult("constants", "forced", Status.REFUTED, Interval(1.0, 1.0))
    monkeypatch.setitem(cli.RUNNERS, "rs-product", lambda cfg: ([bad], {}))
    code, out, _ = run_cli(capsys, "rs-product", "--format", "json")
    assert code == EXIT_REFUTED
    assert json.loads(out)["failures"][0]["subject"] == "forced"


def test_exit_config_errors(capsys):
    assert run_cli(capsys, "mertens", "--bound", "2e8")[0] == EXIT_CONFIG
    assert run_cli(capsys, "brute", "--max", "35")[0] == EXIT_CONFIG
    assert run_cli(capsys, "mertens", "--bound", "100", "--resume")[0] == EXIT_CONFIG
    assert run_cli(capsys, "set-eval", "2", "4")[0] == EXIT_CONFIG
    with pytest.raises(SystemExit) as exc:
        cli.main(["mertens", "--no-such-flag"])
    assert exc.value.code == EXIT_CONFIG


def test_exit_incomplete(capsys, tmp_path):
    ck = str(tmp_path / "m.json")
    code, out, _ = run_cli(capsys, "mertens", "--bound", "1e6", "--segment-odds", "1024",
                           "--checkpoint", ck, "--stop-after-segments", "3", "--format", "json")
    assert code == EXIT_INDETERMINATE
    assert json.loads(out)["complete"] is False
    code, out, _ = run_cli(capsys, "mertens", "--bound", "1e6", "--segment-odds", "1024",
                           "--checkpoint", ck, "--resume", "--format", "json")
    assert code == EXIT_OK
    resumed = json.loads(out)
    code, out, _ = run_cli(capsys, "mertens", "--bound", "1e6", "--segment-odds", "1024", "--threads", "4",
                           "--format", "json")
    assert json.loads(out)["fingerprint"] == resumed["fingerprint"]


def test_resume_with_other_bound_is_config_error(capsys, tmp_path):
    ck = str(tmp_path / "m.json")
    run_cli(capsys, "mertens", "--bound", "1e5", "--checkpoint", ck, "--segment-odds", "1024",
            "--stop-after-segments", "1")
    code, _, err = run_cli(capsys, "mertens", "--bound", "2e5", "--checkpoint", ck, "--segment-odds", "1024",
                           "--resume")
    assert code == EXIT_CONFIG and "error" in err


def test_indeterminate_status():
    r = VerificationReport("x", {}, [CheckResult("a", "b", Status.INDETERMINATE)])
    assert r.exit_status() == EXIT_INDETERMINATE
    r.checks.append(CheckResult("a", "c", Status.REFUTED))
    assert r.exit_status() == EXIT_REFUTED
    unexpected_pass = CheckResult("a", "d", Status.CERTIFIED, expected_refuted=True)
    assert VerificationReport("x", {}, [unexpected_pass]).exit_status() == EXIT_REFUTED


# formats -----------------------------------------------------------------------------------


def test_json_schema_and_idempotence(capsys, schema):
    code, out, _ = run_cli(capsys, "zhang", "--bound", "100", "--format", "json")
    assert code == EXIT_OK
    doc = json.loads(out)
    jsonschema.validate(doc, schema)
    assert json.loads(json.dumps(doc)) == doc
    _, again, _ = run_cli(capsys, "zhang", "--bound", "100", "--format", "json")
    assert json.loads(again)["fingerprint"] == doc["fingerprint"]
    assert {c["subject"] for c in doc["checks"] if c["expected_refuted"]} == {"q=2", "q=3"}


def test_csv_columns(capsys):
    code, out, _ = run_cli(capsys, "rs-product", "--format", "csv")
    assert code == EXIT_OK
    rows = list(csv.reader(io.StringIO(out)))
    assert tuple(rows[0]) == CSV_COLUMNS
    assert len(rows) == 1 + 1 + 61
    for row in rows[1:]:
        assert row[2] == "Certified"
        assert float.fromhex(row[3]) <= float.fromhex(row[4])


def test_text_format(capsys):
    code, out, _ = run_cli(capsys, "fg-ratio", "--bound", "1000")
    assert code == EXIT_OK
    assert "argmax p=7" in out and "Certified" in out


def test_output_file(capsys, tmp_path):
    path = tmp_path / "r.json"
    run_cli(capsys, "pairs", "--format", "json", "--output", str(path))
    doc = json.loads(path.read_text())
    assert all(c["status"] == "Certified" for c in doc["checks"])


# individual commands -------------------------------------------------------------------------


def test_constants_command(capsys, schema):
    code, out, _ = run_cli(capsys, "constants", "--format", "json")
    assert code == EXIT_OK
    doc = json.loads(out)
    jsonschema.validate(doc, schema)
    provenance = {c["name"]: c["provenance"] for c in doc["details"]["constants"]}
    assert provenance["C"] == "computed"
    assert provenance["f_A3_bound"] == "external-literature"


def test_nk_command(capsys):
    code, out, _ = run_cli(capsys, "nk", "--Q", "5,7,11", "--k", "2", "--omega-bound", "1000", "--format", "json")
    assert code == EXIT_OK
    ids = {c["check_id"] for c in json.loads(out)["checks"]}
    assert {"h-N2", "h-N1", "h-nk-monotone", "g-identity"} <= ids


def test_set_eval_file(capsys, tmp_path):
    path = tmp_path / "A.txt"
    path.write_text("# odd\n15\n21\n35\n")
    code, out, _ = run_cli(capsys, "set", "eval", "--file", str(path), "--format", "json")
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["details"]["support"] == [3, 5, 7]


def test_brute_command(capsys):
    code, out, _ = run_cli(capsys, "brute", "--max", "12", "--format", "json")
    assert code == EXIT_OK
    assert json.loads(out)["summary"]["subsets"] > 0


def test_env_thread_default(capsys, monkeypatch):
    monkeypatch.setenv("PRIMVERIFY_THREADS", "3")
    _, out, _ = run_cli(capsys, "mertens", "--bound", "1000", "--format", "json")
    assert json.loads(out)["config"]["threads"] == 3


def test_int_parsing():
    assert cli._int("1e7") == 10**7 and cli._int("10^8") == 10**8 and cli._int("1_000") == 1000


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "primverify.cli", "rs-product", "--max", "10"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "x=7" in proc.stdout
