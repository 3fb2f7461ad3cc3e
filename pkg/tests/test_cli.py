"""Command-line client tests: exit codes, artifacts, determinism."""

import yaml
import pytest

from qpcsim.cli import EXIT_ABORT, EXIT_OK, EXIT_USAGE, main


def write_scenario(path, document):
    path.write_text(yaml.safe_dump(document))
    return str(path)


@pytest.fixture
def attack_scenario_doc():
    return {
        "protocol": {
            "levels": 9,
            "participants": 3,
            "privacy_length": 1,
            "random_privacies": True,
        },
        "decoys": 1,
        "seed": 5,
        "attack": {"kind": "intercept-resend", "target": 0, "trials": 200, "workers": 1},
    }


# ---------------------------------------------------------------------------
# run
# ---------------------------------------------------------------------------


def test_run_bundled_golden_scenario(tmp_path, capsys):
    out = tmp_path / "artifacts"
    code = main(["run", "--scenario", "paper-example", "--out", str(out)])
    assert code == EXIT_OK
    stdout = capsys.readouterr().out
    assert "R1: 0<1=2" in stdout
    assert "R2: 1<2<0" in stdout
    outcome = (out / "outcome.records").read_text()
    assert "total.0=1,5" in outcome
    assert "total.1=2,3" in outcome
    assert "total.2=2,4" in outcome
    report = (out / "report.txt").read_text()
    assert "R1: 0<1=2" in report
    transcript = (out / "transcript.log").read_text()
    assert transcript.splitlines()[0].startswith("1-preparation\tquantum-send\tTP\tP0")


def test_run_same_seed_byte_identical(tmp_path):
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    assert main(["run", "--scenario", "paper-example", "--out", str(out_a)]) == EXIT_OK
    assert main(["run", "--scenario", "paper-example", "--out", str(out_b)]) == EXIT_OK
    for name in ("transcript.log", "outcome.records", "report.txt"):
        assert (out_a / name).read_bytes() == (out_b / name).read_bytes()


def test_run_seed_override_changes_artifacts(tmp_path):
    doc = {
        "protocol": {"levels": 5, "participants": 3, "privacy_length": 2, "random_privacies": True},
        "seed": 1,
    }
    path = write_scenario(tmp_path / "s.yaml", doc)
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    assert main(["run", "--scenario", path, "--out", str(out_a)]) == EXIT_OK
    assert main(["run", "--scenario", path, "--seed", "2", "--out", str(out_b)]) == EXIT_OK
    assert (out_a / "transcript.log").read_bytes() != (out_b / "transcript.log").read_bytes()


def test_run_rejects_out_of_range_privacy(tmp_path, capsys):
    doc = {
        "protocol": {
            "levels": 9,
            "participants": 3,
            "privacy_length": 1,
            "privacies": [[5], [0], [1]],
        },
        "seed": 0,
    }
    path = write_scenario(tmp_path / "bad.yaml", doc)
    assert main(["run", "--scenario", path]) == EXIT_USAGE
    stderr = capsys.readouterr().err
    assert "privacies[0][0]" in stderr
    assert "0..4" in stderr


def test_run_missing_scenario_file(capsys):
    assert main(["run", "--scenario", "does-not-exist"]) == EXIT_USAGE
    assert "no bundled scenario" in capsys.readouterr().err


def test_run_invalid_yaml(tmp_path, capsys):
    path = tmp_path / "broken.yaml"
    path.write_text("protocol: [unclosed")
    assert main(["run", "--scenario", str(path)]) == EXIT_USAGE
    assert "invalid YAML" in capsys.readouterr().err


def test_run_adversarial_abort_exits_two(tmp_path, capsys):
    doc = {
        "protocol": {"levels": 9, "participants": 3, "privacy_length": 1, "random_privacies": True},
        "decoys": 3,
        "seed": 0,  # known to abort at the return-leg check
        "attack": {"kind": "intercept-resend", "target": 0, "trials": 10, "workers": 1},
    }
    path = write_scenario(tmp_path / "atk.yaml", doc)
    out = tmp_path / "out"
    assert main(["run", "--scenario", path, "--out", str(out)]) == EXIT_ABORT
    stdout = capsys.readouterr().out
    assert "protocol aborted at 4-measurement" in stdout
    transcript = (out / "transcript.log").read_text()
    # Transcript truncates at the failing check.
    assert transcript.rstrip().splitlines()[-1].split("\t")[1] == "decoy-check-result"
    assert "pass=False" in transcript


def test_run_usage_error_exit_code():
    assert main(["run"]) == EXIT_USAGE  # --scenario is required


# ---------------------------------------------------------------------------
# attack
# ---------------------------------------------------------------------------


def test_attack_writes_report(tmp_path, capsys, attack_scenario_doc):
    path = write_scenario(tmp_path / "atk.yaml", attack_scenario_doc)
    out = tmp_path / "out"
    code = main(["attack", "--scenario", path, "--out", str(out)])
    assert code == EXIT_OK
    stdout = capsys.readouterr().out
    assert "intercept-resend" in stdout
    report = (out / "attack-report.txt").read_text()
    assert "independent-decoy model" in report
    assert "error-rate-power variant" in report


def test_attack_trials_override(tmp_path, capsys, attack_scenario_doc):
    path = write_scenario(tmp_path / "atk.yaml", attack_scenario_doc)
    code = main(["attack", "--scenario", path, "--trials", "1", "--out", str(tmp_path / "o")])
    assert code == EXIT_OK
    assert "/1 detected" in capsys.readouterr().out


def test_attack_missing_section(tmp_path, capsys):
    doc = {
        "protocol": {"levels": 9, "participants": 3, "privacy_length": 1, "random_privacies": True},
        "seed": 0,
    }
    path = write_scenario(tmp_path / "plain.yaml", doc)
    assert main(["attack", "--scenario", path]) == EXIT_USAGE
    assert "no attack section" in capsys.readouterr().err


def test_attack_unknown_kind(tmp_path, capsys, attack_scenario_doc):
    attack_scenario_doc["attack"]["kind"] = "trojan-horse"
    path = write_scenario(tmp_path / "atk.yaml", attack_scenario_doc)
    assert main(["attack", "--scenario", path]) == EXIT_USAGE
    assert "kind" in capsys.readouterr().err


def test_attack_determinism(tmp_path, attack_scenario_doc):
    path = write_scenario(tmp_path / "atk.yaml", attack_scenario_doc)
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    assert main(["attack", "--scenario", path, "--out", str(out_a)]) == EXIT_OK
    assert main(["attack", "--scenario", path, "--out", str(out_b)]) == EXIT_OK
    assert (out_a / "attack-report.txt").read_bytes() == (out_b / "attack-report.txt").read_bytes()


# ---------------------------------------------------------------------------
# efficiency / audit
# ---------------------------------------------------------------------------


def test_efficiency_single_k(capsys):
    assert main(["efficiency", "--k", "3"]) == EXIT_OK
    stdout = capsys.readouterr().out
    assert "Ours" in stdout and "1/9" in stdout


def test_efficiency_range_prints_blocks(capsys):
    assert main(["efficiency", "--k", "3..5"]) == EXIT_OK
    stdout = capsys.readouterr().out
    assert stdout.count("k = ") == 3


def test_efficiency_csv_format(capsys):
    assert main(["efficiency", "--k", "3", "--format", "csv"]) == EXIT_OK
    stdout = capsys.readouterr().out
    assert stdout.startswith("protocol,k,m,c,q,b,eta")
    assert "HHG2015,3,1,1,15,3,1/18" in stdout


def test_efficiency_rejects_small_k(capsys):
    assert main(["efficiency", "--k", "2"]) == EXIT_USAGE
    assert "at least 3" in capsys.readouterr().err


def test_efficiency_rejects_garbage_range(capsys):
    assert main(["efficiency", "--k", "three"]) == EXIT_USAGE


def test_audit_command(tmp_path, capsys):
    out = tmp_path / "audit"
    assert main(["audit", "--max-dim", "4", "--format", "records", "--out", str(out)]) == EXIT_OK
    stdout = capsys.readouterr().out
    assert "x-line holds for 0/29" in stdout
    report = (out / "audit-report.records").read_text()
    assert "audit.z_line=pass" in report
    assert "audit.x_line.d4.r3.s3=fail" in report
