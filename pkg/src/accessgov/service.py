"""HTTP facade for the decision engine.

Endpoints:
  POST /decisions           submit an access request, get the decision
  GET  /audit               query the audit log (admin)
  GET  /audit/export        download the audit log as CSV (admin)
  GET  /catalog/{section}   read one org section
  POST /catalog/{section}   replace one org section atomically (admin)
  POST /eval/runs           run the benchmark suite (admin, one at a time)
  GET  /healthz             liveness, org identity, circuit state

The service fails closed: if a decision cannot be written to the audit log,
the decision is not returned.
"""

from __future__ import annotations

import hmac
import io
import json
import logging
import os
import threading
import uuid
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Any, Optional

from fastapi import Body, Depends, FastAPI, Header, HTTPException, Request
from fastapi.exceptions import RequestValidationError as BodyValidationError
from fastapi.responses import JSONResponse, PlainTextResponse
from pydantic import BaseModel, Field

from .audit import AuditLog, AuditWriteError, dump_csv
from .bench.cases import load_suite
from .bench.report import build_report
from .bench.runner import RunConfig, run_benchmark
from .catalog.load import CatalogLoadError, OrgSpec, load_org, parse_org
from .catalog.synth import generate_synthetic_org
from .engine.controller import decide
from .engine.model import AccessRequest, RequestValidationError, SharingScope
from .reasoner.base import Reasoner
from .reasoner.remote import RemoteModelConfig, RemoteReasoner
from .reasoner.rule import RuleReasoner

logger = logging.getLogger(__name__)

CATALOG_SECTIONS = ("datasets", "users", "sod_rules", "agreements", "policies")


class ServiceConfigError(RuntimeError):
    pass


@dataclass
class Settings:
    admin_token: str
    org_file: Optional[str] = None
    org_sector: str = "technology"
    org_seed: int = 7
    audit_path: str = "audit_log.jsonl"
    reasoner_mode: str = "rule"

    @classmethod
    def from_env(cls, env: Optional[dict[str, str]] = None) -> Settings:
        env = dict(os.environ if env is None else env)
        token = env.get("GOV_ADMIN_TOKEN", "")
        if not token:
            # The token value itself must never appear in logs or errors.
            raise ServiceConfigError(
                "GOV_ADMIN_TOKEN is not set; refusing to start without an admin credential"
            )
        return cls(
            admin_token=token,
            org_file=env.get("GOV_ORG_FILE") or None,
            org_sector=env.get("GOV_ORG_SECTOR", "technology"),
            org_seed=int(env.get("GOV_ORG_SEED", "7")),
            audit_path=env.get("GOV_AUDIT_PATH", "audit_log.jsonl"),
            reasoner_mode=env.get("GOV_REASONER_MODE", "rule"),
        )


class _State:
    def __init__(self, settings: Settings) -> None:
        self.settings = settings
        if settings.org_file:
            self.org: OrgSpec = load_org(settings.org_file)
        else:
            self.org = generate_synthetic_org(settings.org_sector, settings.org_seed)
        self.audit = AuditLog(settings.audit_path)
        self.reasoner = self._build_reasoner(settings.reasoner_mode)
        self.org_lock = threading.Lock()
        self.eval_lock = threading.Lock()

    @staticmethod
    def _build_reasoner(mode: str) -> Reasoner:
        if mode == "rule":
            return RuleReasoner()
        if mode == "remote":
            return RemoteReasoner(RemoteModelConfig.from_env())
        raise ServiceConfigError(f"unsupported reasoner mode {mode!r}; use rule or remote")

    def circuit_state(self) -> str:
        reasoner = self.reasoner
        if isinstance(reasoner, RemoteReasoner):
            return reasoner.circuit.state
        return "n/a"


class DecisionBody(BaseModel):
    request_id: Optional[str] = None
    requester_id: str
    dataset_id: str
    purpose: str
    sharing_scope: str = "internal"
    declared_retention_days: Optional[int] = Field(default=None, ge=1)
    destination_region: Optional[str] = None
    external_party: Optional[str] = None
    submitted_at: Optional[datetime] = None


class EvalRunBody(BaseModel):
    mode: str = "scripted"
    seeds: list[int] = Field(default_factory=lambda: [3])
    fixture: Optional[str] = None


def create_app(settings: Optional[Settings] = None) -> FastAPI:
    settings = settings or Settings.from_env()
    state = _State(settings)
    app = FastAPI(title="accessgov", version="0.1.0")
    app.state.gov = state

    def require_admin(x_admin_token: Optional[str] = Header(default=None)) -> None:
        supplied = x_admin_token or ""
        if not hmac.compare_digest(supplied, settings.admin_token):
            raise HTTPException(status_code=403, detail="admin token required")

    @app.exception_handler(BodyValidationError)
    async def _body_errors(_: Request, exc: BodyValidationError) -> JSONResponse:
        errors: dict[str, str] = {}
        for err in exc.errors():
            loc = [str(part) for part in err["loc"] if part != "body"]
            errors[".".join(loc) or "body"] = err["msg"]
        return JSONResponse(status_code=400, content={"errors": errors})

    @app.exception_handler(RequestValidationError)
    async def _request_errors(_: Request, exc: RequestValidationError) -> JSONResponse:
        return JSONResponse(status_code=400, content={"errors": exc.errors})

    @app.post("/decisions")
    def post_decision(body: DecisionBody) -> JSONResponse:
        try:
            scope = SharingScope(body.sharing_scope)
        except ValueError:
            return JSONResponse(
                status_code=400,
                content={"errors": {"sharing_scope": f"unknown scope {body.sharing_scope!r}"}},
            )
        request = AccessRequest(
            request_id=body.request_id or str(uuid.uuid4()),
            requester_id=body.requester_id,
            dataset_id=body.dataset_id,
            purpose=body.purpose,
            submitted_at=body.submitted_at or datetime.now(timezone.utc),
            declared_retention_days=body.declared_retention_days,
            sharing_scope=scope,
            destination_region=body.destination_region,
            external_party=body.external_party,
        )
        org = state.org  # one snapshot for the whole decision
        outcome = decide(request, org.policies, org.catalog, reasoner=state.reasoner)
        try:
            record = state.audit.record_decision(
                request,
                outcome,
                model_settings=state.reasoner.model_settings(),
                org_id=org.org_id,
            )
        except AuditWriteError:
            logger.error("audit backend unavailable; refusing to release decision")
            raise HTTPException(
                status_code=503,
                detail="audit backend unavailable; decisions are suspended",
            )
        doc = outcome.to_doc()
        doc["audit_seq"] = record.seq
        return JSONResponse(content=doc)

    @app.get("/audit", dependencies=[Depends(require_admin)])
    def get_audit(
        request_id: Optional[str] = None,
        requester_id: Optional[str] = None,
        dataset_id: Optional[str] = None,
        decision: Optional[str] = None,
        gate_id: Optional[str] = None,
        case_id: Optional[str] = None,
        limit: Optional[int] = None,
    ) -> dict[str, Any]:
        try:
            records = state.audit.query(
                request_id=request_id,
                requester_id=requester_id,
                dataset_id=dataset_id,
                decision=decision,
                gate_id=gate_id,
                case_id=case_id,
                limit=limit,
            )
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return {"count": len(records), "records": [r.to_doc() for r in records]}

    @app.get("/audit/export", dependencies=[Depends(require_admin)])
    def export_audit() -> PlainTextResponse:
        buffer = io.StringIO()
        dump_csv(state.audit.records(), buffer)
        return PlainTextResponse(content=buffer.getvalue(), media_type="text/csv")

    @app.get("/catalog/{section}")
    def get_catalog_section(section: str) -> dict[str, Any]:
        if section not in CATALOG_SECTIONS:
            raise HTTPException(status_code=404, detail=f"unknown catalog section {section!r}")
        return {section: state.org.to_doc()[section]}

    @app.post("/catalog/{section}", dependencies=[Depends(require_admin)])
    def replace_catalog_section(section: str, payload: Any = Body(default=None)) -> Any:
        if section not in CATALOG_SECTIONS:
            raise HTTPException(status_code=404, detail=f"unknown catalog section {section!r}")
        with state.org_lock:
            doc = state.org.to_doc()
            body = payload
            if isinstance(body, dict) and section in body:
                body = body[section]
            doc[section] = body
            try:
                candidate = parse_org(doc)
            except CatalogLoadError as exc:
                return JSONResponse(
                    status_code=400,
                    content={"errors": [
                        {"location": loc, "message": msg} for loc, msg in exc.errors
                    ]},
                )
            state.org = candidate  # atomic snapshot swap
        logger.info("catalog section %s replaced; org snapshot swapped", section)
        return {"ok": True, "org_id": candidate.org_id, "section": section}

    @app.post("/eval/runs", dependencies=[Depends(require_admin)])
    def run_eval(body: EvalRunBody) -> dict[str, Any]:
        if not state.eval_lock.acquire(blocking=False):
            raise HTTPException(status_code=409, detail="an evaluation run is already in progress")
        try:
            suite = load_suite()
            config = RunConfig(
                seeds=tuple(body.seeds),
                mode=body.mode,
                fixture=body.fixture,
                audit_log=state.audit,
            )
            run = run_benchmark(suite, config)
            report = build_report(suite, run)
            return {"report": json.loads(report.to_json())}
        finally:
            state.eval_lock.release()

    @app.get("/healthz")
    def healthz() -> dict[str, Any]:
        return {
            "status": "ok",
            "org_id": state.org.org_id,
            "reasoner": state.reasoner.tag,
            "circuit": state.circuit_state(),
            "audit_records": len(state.audit),
        }

    return app


def main() -> None:
    """Entry point for running the service directly."""
    import uvicorn

    logging.basicConfig(level=logging.INFO)
    host = os.environ.get("GOV_HOST", "127.0.0.1")
    port = int(os.environ.get("GOV_PORT", "8000"))
    uvicorn.run(create_app(), host=host, port=port)


if __name__ == "__main__":
    main()
