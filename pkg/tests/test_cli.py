from __future__ import annotations

import json

import pytest
from click.testing import CliRunner

from accessgov.audit import load_csv
from accessgov.cli import main


@pytest.fixture()
def runner():
    return CliRunner()


def _decide_args(**overrides):
    base = {
        "--requester": "u_ana",
        "--dataset": "prod_metrics_public",
        "--purpose": "Monthly analytics review",
        "--retention-days": "30",
    }
    base.update(overrides)
    args = ["decide"]
    for key, value in base.items():
        if value is not None:
            args.extend([key, str(value)])
    return args


class TestDecideCommand:
    def test_approve_prints_decision(self, runner):
        result = runner.invoke(main, _decide_args())
        assert result.exit_code == 0
        assert "decision: APPROVE" in result.output

    def test_json_output(self, runner):
        result = runner.invoke(main, _decide_args() + ["--json"])
        assert result.exit_code == 0
        doc = json.loads(result.output)
        assert doc["label"] == "APPROVE"
        assert doc["raw_label"] == "APPROVE"

    def test_gate_deny_shows_gate(self, runner):
        result = runner.invoke(main, _decide_args(**{
            "--requester": "u_mkt", "--dataset": "subscriber_usage",
            "--purpose": "Campaign audience outreach plan",
            "--sharing": "external_third_party", "--external-party": "acme_ads",
        }))
        assert result.exit_code == 0
        assert "decision: DENY" in result.output
        assert "ExternalSharingNoAgreement" in result.output

    def test_label_exit_codes(self, runner):
        assert runner.invoke(main, _decide_args() + ["--label-exit-codes"]).exit_code == 0

        conditional = _decide_args(**{
            "--requester": "u_ana", "--dataset": "transactions_2024",
            "--purpose": "Train churn model on recent transactions",
        })
        assert runner.invoke(main, conditional + ["--label-exit-codes"]).exit_code == 3

        deny = _decide_args(**{"--purpose": "Need data for a project"})
        assert runner.invoke(main, deny + ["--label-exit-codes"]).exit_code == 4

    def test_validation_problem_exits_2(self, runner):
        result = runner.invoke(main, _decide_args(**{"--retention-days": "-5"}))
        assert result.exit_code == 2
        assert "declared_retention_days" in result.output

    def test_missing_required_option_exits_2(self, runner):
        result = runner.invoke(main, ["decide", "--requester", "u_ana"])
        assert result.exit_code == 2

    def test_audit_path_appends_record(self, runner, tmp_path):
        audit = tmp_path / "audit.jsonl"
        result = runner.invoke(main, _decide_args() + ["--audit-path", str(audit)])
        assert result.exit_code == 0
        assert len(audit.read_text().splitlines()) == 1

    def test_org_file_used_when_given(self, runner, tmp_path):
        gen = runner.invoke(main, ["gen-org", "--sector", "finance",
                                   "--out", str(tmp_path / "org.json")])
        assert gen.exit_code == 0
        result = runner.invoke(main, _decide_args(**{
            "--requester": "f_fin", "--dataset": "budget_summary",
            "--purpose": "Quarterly budget report",
        }) + ["--org-file", str(tmp_path / "org.json"), "--json"])
        assert result.exit_code == 0
        assert json.loads(result.output)["label"] == "APPROVE"


class TestEvalCommand:
    def test_scripted_eval_prints_report(self, runner):
        result = runner.invoke(main, ["eval", "--seeds", "3"])
        assert result.exit_code == 0
        assert "13/14" in result.output
        assert "Stable across seeds" in result.output

    def test_json_report(self, runner):
        result = runner.invoke(main, ["eval", "--seeds", "3", "--json"])
        assert result.exit_code == 0
        doc = json.loads(result.output)
        assert doc["edm_final"]["hits"] == 13

    def test_check_passes_on_default_suite(self, runner):
        result = runner.invoke(main, ["eval", "--seeds", "3,5", "--check"])
        assert result.exit_code == 0
        assert "all checks passed" in result.output

    def test_check_fails_when_threshold_not_met(self, runner):
        result = runner.invoke(main, ["eval", "--seeds", "3", "--check", "--min-edm", "0.99"])
        assert result.exit_code == 1
        assert "check failed" in result.output

    def test_rule_mode(self, runner):
        result = runner.invoke(main, ["eval", "--mode", "rule", "--seeds", "3"])
        assert result.exit_code == 0
        assert "14/14" in result.output

    def test_bad_seeds_exit_2(self, runner):
        assert runner.invoke(main, ["eval", "--seeds", "three"]).exit_code == 2
        assert runner.invoke(main, ["eval", "--seeds", ","]).exit_code == 2

    def test_audit_dir_receives_per_seed_logs(self, runner, tmp_path):
        result = runner.invoke(main, ["eval", "--seeds", "3,5",
                                      "--audit-dir", str(tmp_path)])
        assert result.exit_code == 0
        assert (tmp_path / "audit_seed_3.jsonl").exists()
        assert (tmp_path / "audit_seed_5.jsonl").exists()


class TestAuditExportCommand:
    def test_exports_csv(self, runner, tmp_path):
        audit = tmp_path / "audit.jsonl"
        runner.invoke(main, _decide_args() + ["--audit-path", str(audit)])
        out = tmp_path / "audit.csv"
        result = runner.invoke(main, ["audit-export", "--audit-path", str(audit),
                                      "--out", str(out)])
        assert result.exit_code == 0
        assert "wrote 1 records" in result.output
        assert len(load_csv(out)) == 1

    def test_corrupt_log_exits_2(self, runner, tmp_path):
        bad = tmp_path / "bad.jsonl"
        bad.write_text("{broken\n")
        result = runner.invoke(main, ["audit-export", "--audit-path", str(bad),
                                      "--out", str(tmp_path / "x.csv")])
        assert result.exit_code == 2

    def test_missing_file_exits_2(self, runner, tmp_path):
        result = runner.invoke(main, ["audit-export",
                                      "--audit-path", str(tmp_path / "nope.jsonl"),
                                      "--out", str(tmp_path / "x.csv")])
        assert result.exit_code == 2


class TestGenOrgCommand:
    def test_stdout_is_parseable_org(self, runner):
        result = runner.invoke(main, ["gen-org", "--sector", "healthcare"])
        assert result.exit_code == 0
        doc = json.loads(result.output)
        assert doc["org_id"] == "healthcare-7"

    def test_deterministic_for_seed(self, runner, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        runner.invoke(main, ["gen-org", "--sector", "technology", "--seed", "9",
                             "--out", str(a)])
        runner.invoke(main, ["gen-org", "--sector", "technology", "--seed", "9",
                             "--out", str(b)])
        assert a.read_text() == b.read_text()

    def test_unknown_sector_exits_2(self, runner):
        assert runner.invoke(main, ["gen-org", "--sector", "retail"]).exit_code == 2


def test_help_lists_commands(runner):
    result = runner.invoke(main, ["--help"])
    assert result.exit_code == 0
    for command in ("decide", "eval", "audit-export", "gen-org", "serve"):
        assert command in result.output
