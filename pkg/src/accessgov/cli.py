"""Command-line interface: decide, eval, audit-export, gen-org, serve.

Exit codes: 0 success, 2 input/validation problems, 1 runtime failures.
`decide --label-exit-codes` maps the decision itself onto the exit code
(approve 0, conditional 3, deny 4) for shell pipelines.
"""

from __future__ import annotations

import json
import logging
import sys
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

import click

from .audit import AuditError, AuditLog
from .bench.cases import SuiteError, load_suite
from .bench.report import build_report, render_text
from .bench.runner import DEFAULT_SEEDS, RunConfig, run_benchmark
from .catalog.load import CatalogLoadError, OrgSpec, dump_org, load_org
from .catalog.synth import SECTORS, generate_synthetic_org
from .engine.controller import decide as engine_decide
from .engine.model import AccessRequest, RequestValidationError, SharingScope
from .reasoner.rule import RuleReasoner

logger = logging.getLogger(__name__)

LABEL_EXIT_CODES = {"A": 0, "C": 3, "D": 4}


def _load_org_for_cli(org_file: Optional[str], sector: str, seed: int) -> OrgSpec:
    if org_file:
        return load_org(org_file)
    return generate_synthetic_org(sector, seed)


@click.group()
@click.option("--verbose", is_flag=True, help="Enable debug logging.")
def main(verbose: bool) -> None:
    """Policy-aware access decisions from the command line."""
    logging.basicConfig(level=logging.DEBUG if verbose else logging.WARNING)


@main.command("decide")
@click.option("--org-file", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Org document to decide against; defaults to a synthetic org.")
@click.option("--sector", type=click.Choice(SECTORS), default="technology", show_default=True)
@click.option("--seed", type=int, default=7, show_default=True)
@click.option("--requester", required=True, help="Requester user id.")
@click.option("--dataset", required=True, help="Dataset id.")
@click.option("--purpose", required=True, help="Stated business purpose.")
@click.option("--sharing", type=click.Choice([s.value for s in SharingScope]),
              default="internal", show_default=True)
@click.option("--retention-days", type=int, default=None)
@click.option("--destination-region", default=None)
@click.option("--external-party", default=None)
@click.option("--request-id", default=None)
@click.option("--audit-path", type=click.Path(dir_okay=False), default=None,
              help="Append the decision to this audit log.")
@click.option("--json", "as_json", is_flag=True, help="Print the full decision document.")
@click.option("--label-exit-codes", is_flag=True,
              help="Exit 0/3/4 for approve/conditional/deny instead of always 0.")
def decide_cmd(org_file: Optional[str], sector: str, seed: int, requester: str, dataset: str,
               purpose: str, sharing: str, retention_days: Optional[int],
               destination_region: Optional[str], external_party: Optional[str],
               request_id: Optional[str], audit_path: Optional[str], as_json: bool,
               label_exit_codes: bool) -> None:
    """Decide one access request and print the outcome."""
    try:
        org = _load_org_for_cli(org_file, sector, seed)
        request = AccessRequest(
            request_id=request_id or f"cli-{datetime.now(timezone.utc).strftime('%Y%m%d%H%M%S%f')}",
            requester_id=requester,
            dataset_id=dataset,
            purpose=purpose,
            submitted_at=datetime.now(timezone.utc),
            declared_retention_days=retention_days,
            sharing_scope=SharingScope(sharing),
            destination_region=destination_region,
            external_party=external_party,
        )
        outcome = engine_decide(request, org.policies, org.catalog, reasoner=RuleReasoner())
    except (RequestValidationError, CatalogLoadError) as exc:
        # Input problems exit 2, like any other usage error.
        raise click.UsageError(str(exc)) from exc

    if audit_path:
        AuditLog(audit_path).record_decision(
            request, outcome, model_settings={"implementation": "rule"}, org_id=org.org_id
        )

    if as_json:
        click.echo(json.dumps(outcome.to_doc(), indent=2, sort_keys=True))
    else:
        click.echo(f"decision: {outcome.label.value}")
        if outcome.gate_hit:
            click.echo(f"gate: {outcome.gate_hit.gate_id} - {outcome.gate_hit.message}")
        if outcome.controls:
            click.echo("controls: " + ", ".join(c.control_id for c in outcome.controls))
        click.echo(outcome.rationale.summary)

    if label_exit_codes:
        sys.exit(LABEL_EXIT_CODES[outcome.label.code])


@main.command("eval")
@click.option("--suite-file", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Suite definition; defaults to the packaged core suite.")
@click.option("--mode", type=click.Choice(["scripted", "rule"]), default="scripted",
              show_default=True)
@click.option("--fixture", default=None,
              help="Scripted fixture: a file path or a packaged fixture name.")
@click.option("--seeds", default=",".join(str(s) for s in DEFAULT_SEEDS), show_default=True,
              help="Comma-separated run seeds.")
@click.option("--audit-dir", type=click.Path(file_okay=False), default=None,
              help="Write one audit log per seed into this directory.")
@click.option("--json", "as_json", is_flag=True, help="Print the report as JSON.")
@click.option("--check", is_flag=True,
              help="Exit nonzero unless the run meets the thresholds below.")
@click.option("--min-edm", type=float, default=0.9, show_default=True,
              help="Minimum final exact-match rate for --check.")
@click.option("--max-far", type=int, default=0, show_default=True,
              help="Maximum final must-deny violations for --check.")
def eval_cmd(suite_file: Optional[str], mode: str, fixture: Optional[str], seeds: str,
             audit_dir: Optional[str], as_json: bool, check: bool,
             min_edm: float, max_far: int) -> None:
    """Run the benchmark suite and print the metrics report."""
    try:
        seed_values = tuple(int(part) for part in seeds.split(",") if part.strip())
    except ValueError as exc:
        raise click.UsageError(f"--seeds must be comma-separated integers: {exc}") from exc
    if not seed_values:
        raise click.UsageError("--seeds must name at least one seed")

    try:
        suite = load_suite(suite_file)
    except SuiteError as exc:
        raise click.UsageError(str(exc)) from exc
    if audit_dir:
        Path(audit_dir).mkdir(parents=True, exist_ok=True)
    config = RunConfig(
        seeds=seed_values,
        mode=mode,
        fixture=fixture,
        audit_dir=Path(audit_dir) if audit_dir else None,
    )
    run = run_benchmark(suite, config)
    report = build_report(suite, run)
    click.echo(report.to_json() if as_json else render_text(report))

    if check:
        edm = report.edm_final["rate"] or 0.0
        far = report.far_table_final["hits"]
        failures = []
        if edm < min_edm:
            failures.append(f"final exact-match {edm:.3f} < {min_edm}")
        if far > max_far:
            failures.append(f"must-deny violations {far} > {max_far}")
        if run.errors:
            failures.append(f"{len(run.errors)} case(s) raised errors")
        if failures:
            for failure in failures:
                click.echo(f"check failed: {failure}", err=True)
            sys.exit(1)
        click.echo("all checks passed", err=True)


@main.command("audit-export")
@click.option("--audit-path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True,
              help="Destination CSV file.")
def audit_export_cmd(audit_path: str, out: str) -> None:
    """Export an audit log to CSV."""
    try:
        count = AuditLog(audit_path).export_csv(out)
    except AuditError as exc:
        # A corrupt source log is an input problem.
        raise click.UsageError(str(exc)) from exc
    click.echo(f"wrote {count} records to {out}")


@main.command("gen-org")
@click.option("--sector", type=click.Choice(SECTORS), required=True)
@click.option("--seed", type=int, default=7, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="Write the org document here; prints to stdout when omitted.")
def gen_org_cmd(sector: str, seed: int, out: Optional[str]) -> None:
    """Generate a synthetic organization document."""
    org = generate_synthetic_org(sector, seed)
    if out:
        Path(out).write_text(dump_org(org) + "\n", encoding="utf-8")
        click.echo(f"wrote org {org.org_id} to {out}")
    else:
        click.echo(dump_org(org))


@main.command("serve")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
def serve_cmd(host: str, port: int) -> None:
    """Start the HTTP service (reads GOV_* environment variables)."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=host, port=port)


if __name__ == "__main__":
    main()
