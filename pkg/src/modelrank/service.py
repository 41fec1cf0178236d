"""HTTP/JSON service exposing decision problems as mutable sessions.

Each session wraps one scenario document with a monotonically
increasing version. Mutations (judgments, weights, knock-outs) must
carry the last seen version in an ``If-Match`` header; a stale version
is rejected with 409 and the state left untouched, so concurrent
editors cannot silently overwrite each other. Sessions persist as one
JSON file each, written atomically (temp file + rename).

Routes:
    POST /problems                                create session from a document
    GET  /problems                                list sessions
    GET  /problems/{id}                           document + derived weights
    PUT  /problems/{id}/judgments/{stakeholder}   upsert a judgment matrix
    PUT  /problems/{id}/weights                   set literal weight vectors
    PUT  /problems/{id}/knockouts                 replace knock-out rules
    GET  /problems/{id}/ranking                   screening + score breakdowns
    POST /problems/{id}/sensitivity               weight sweep / sampling

Errors are structured JSON: {"code", "message", "location"}.
"""

from __future__ import annotations

import copy
import json
import os
import secrets
import tempfile
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from fastapi import FastAPI, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from . import ahp, io_formats
from .errors import ModelRankError, ScenarioError, ValidationFailure
from .model import apply_knockouts
from .scoring import total_scores
from .sensitivity import oat_sweep, random_weight_sampling


class ServiceError(Exception):
    """Mapped to a structured JSON error response."""

    def __init__(self, status: int, code: str, message: str, location: str = ""):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message
        self.location = location

    def response(self) -> JSONResponse:
        return JSONResponse(
            status_code=self.status,
            content={"code": self.code, "message": self.message, "location": self.location},
        )


@dataclass
class Session:
    """One decision problem under elicitation."""

    id: str
    version: int
    document: dict
    scenario: io_formats.Scenario
    derived: dict = field(default_factory=dict)


class SessionStore:
    """File-backed session registry; one JSON file per session.

    Mutations are serialized per session and guarded by an optimistic
    version check, so exactly one of two conflicting writers succeeds.
    Reads always see a fully applied document: the in-memory session
    object is replaced in one assignment after the file write.
    """

    def __init__(self, data_dir: Path):
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self._registry_lock = threading.Lock()
        self._session_locks: dict[str, threading.Lock] = {}
        self._sessions: dict[str, Session] = {}
        for path in sorted(self.data_dir.glob("*.json")):
            try:
                raw = json.loads(path.read_text(encoding="utf-8"))
                scenario = io_formats.parse_document(raw["document"])
                session = Session(
                    id=raw["id"], version=int(raw["version"]),
                    document=scenario.document, scenario=scenario,
                )
                self._sessions[session.id] = session
                self._session_locks[session.id] = threading.Lock()
            except (OSError, KeyError, ValueError, ModelRankError):
                continue  # skip unreadable session files rather than refuse to start

    def _persist(self, session: Session) -> None:
        payload = json.dumps(
            {"id": session.id, "version": session.version, "document": session.document},
            indent=2, sort_keys=True,
        )
        fd, tmp_path = tempfile.mkstemp(dir=self.data_dir, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as handle:
                handle.write(payload)
            os.replace(tmp_path, self.data_dir / f"{session.id}.json")
        except BaseException:
            try:
                os.unlink(tmp_path)
            except OSError:
                pass
            raise

    def create(self, document: dict) -> Session:
        scenario = io_formats.parse_document(document)
        session_id = secrets.token_hex(8)
        session = Session(id=session_id, version=1,
                          document=scenario.document, scenario=scenario)
        with self._registry_lock:
            self._sessions[session_id] = session
            self._session_locks[session_id] = threading.Lock()
        self._persist(session)
        return session

    def get(self, session_id: str) -> Session:
        session = self._sessions.get(session_id)
        if session is None:
            raise ServiceError(404, "not_found", f"no session {session_id!r}", "id")
        return session

    def list_sessions(self) -> list[Session]:
        return sorted(self._sessions.values(), key=lambda s: s.id)

    def mutate(self, session_id: str, expected_version: int, transform) -> Session:
        """Apply ``transform(document) -> document`` under the session lock."""
        lock = self._session_locks.get(session_id)
        if lock is None:
            raise ServiceError(404, "not_found", f"no session {session_id!r}", "id")
        with lock:
            current = self.get(session_id)
            if current.version != expected_version:
                raise ServiceError(
                    409, "version_conflict",
                    f"If-Match version {expected_version} does not match "
                    f"current version {current.version}",
                    "If-Match",
                )
            draft = transform(copy.deepcopy(current.document))
            scenario = io_formats.parse_document(draft)  # reject before committing
            successor = Session(
                id=current.id, version=current.version + 1,
                document=scenario.document, scenario=scenario,
            )
            self._persist(successor)
            self._sessions[session_id] = successor
            return successor


def _require_if_match(request: Request) -> int:
    header = request.headers.get("If-Match")
    if header is None:
        raise ServiceError(
            428, "missing_precondition",
            "mutations require an If-Match header carrying the last seen version",
            "If-Match",
        )
    try:
        return int(header.strip().strip('"'))
    except ValueError:
        raise ServiceError(400, "bad_precondition",
                           f"If-Match must be an integer version, got {header!r}",
                           "If-Match") from None


async def _json_body(request: Request) -> dict:
    try:
        body = await request.json()
    except json.JSONDecodeError as exc:
        raise ServiceError(400, "bad_json", f"request body is not valid JSON: {exc.msg}",
                           "body") from None
    return body


def _vector_payload(vector: ahp.PriorityVector) -> dict:
    return {"labels": list(vector.labels), "values": [float(w) for w in vector.weights]}


def _consistency_payload(report: ahp.ConsistencyReport) -> dict:
    return {
        "lambda_max": report.lambda_max,
        "ci": report.ci,
        "ri": report.ri,
        "cr": report.cr,
        "acceptable": report.acceptable,
    }


def _derived_payload(scenario: io_formats.Scenario) -> dict:
    problem = scenario.problem
    stakeholders = {}
    for criterion_id, group in scenario.judgments.items():
        entries = []
        for judgment, weights, report in ahp.stakeholder_reports(group):
            entries.append({
                "stakeholder": judgment.stakeholder_id,
                "weights": _vector_payload(weights),
                "consistency": _consistency_payload(report),
            })
        stakeholders[criterion_id] = entries
    return {
        "top_level_weights": _vector_payload(problem.top_level_weights),
        "sub_weights": {cid: _vector_payload(v) for cid, v in sorted(problem.sub_weights.items())},
        "stakeholders": stakeholders,
        "warnings": list(scenario.warnings),
    }


def _ranking_payload(session: Session) -> dict:
    cached = session.derived.get("ranking")
    if cached is not None:
        return cached
    problem = session.scenario.problem
    screening = apply_knockouts(problem)
    breakdowns = total_scores(problem, screening.retained, validate=False)
    payload = {
        "id": session.id,
        "version": session.version,
        "objective": problem.objective,
        "retained": [a.id for a in screening.retained],
        "eliminated": [
            {"id": e.alternative.id, "criterion": e.rule.criterion_id, "reason": e.reason}
            for e in screening.eliminated
        ],
        "breakdowns": [
            {
                "alternative_id": b.alternative_id,
                "criterion_scores": b.criterion_scores,
                "sub_scores": b.sub_scores,
                "labels": b.labels,
                "total": b.total,
                "rank": b.rank,
            }
            for b in breakdowns
        ],
        "warnings": list(session.scenario.warnings),
    }
    session.derived["ranking"] = payload
    return payload


def create_app(data_dir: Path, cors_origins: Optional[Sequence[str]] = None) -> FastAPI:
    """Build the service around a session directory.

    Args:
        data_dir: directory holding one JSON file per session; created
            if missing, re-read at startup.
        cors_origins: browser origins allowed to call the API
            (default: any, suiting a local single-user deployment).
    """
    app = FastAPI(title="modelrank service", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=list(cors_origins) if cors_origins else ["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    store = SessionStore(data_dir)
    app.state.store = store

    @app.exception_handler(ServiceError)
    async def handle_service_error(_request, exc: ServiceError):
        return exc.response()

    @app.exception_handler(ScenarioError)
    async def handle_scenario_error(_request, exc: ScenarioError):
        return JSONResponse(status_code=422, content={
            "code": "invalid_scenario", "message": str(exc.args[0]),
            "location": exc.location or "document",
        })

    @app.exception_handler(ValidationFailure)
    async def handle_validation_failure(_request, exc: ValidationFailure):
        return JSONResponse(status_code=422, content={
            "code": "validation_failed",
            "message": "; ".join(exc.violations) or str(exc),
            "location": "document",
        })

    @app.exception_handler(ModelRankError)
    async def handle_engine_error(_request, exc: ModelRankError):
        return JSONResponse(status_code=422, content={
            "code": "engine_error", "message": str(exc), "location": "document",
        })

    @app.post("/problems", status_code=201)
    async def create_problem(request: Request):
        document = await _json_body(request)
        session = store.create(document)
        return {"id": session.id, "version": session.version}

    @app.get("/problems")
    async def list_problems():
        return {"problems": [
            {"id": s.id, "version": s.version, "objective": s.scenario.problem.objective}
            for s in store.list_sessions()
        ]}

    @app.get("/problems/{session_id}")
    async def get_problem(session_id: str):
        session = store.get(session_id)
        return {
            "id": session.id,
            "version": session.version,
            "document": session.document,
            "derived": _derived_payload(session.scenario),
        }

    @app.put("/problems/{session_id}/judgments/{stakeholder}")
    async def put_judgments(session_id: str, stakeholder: str, request: Request):
        expected = _require_if_match(request)
        body = await _json_body(request)
        for key in body:
            if key not in ("criterion", "labels", "entries"):
                raise ServiceError(400, "bad_request", f"unknown field {key!r}", key)
        if "labels" not in body or "entries" not in body:
            raise ServiceError(400, "bad_request",
                               "judgment body needs 'labels' and 'entries'", "body")
        criterion_id = body.get("criterion")
        if criterion_id is None:
            current = store.get(session_id).document
            composites = [c["id"] for c in current.get("criteria", []) if c.get("children")]
            if len(composites) != 1:
                raise ServiceError(
                    400, "bad_request",
                    "scenario has several composite criteria; body must name one",
                    "criterion",
                )
            criterion_id = composites[0]

        def transform(document: dict) -> dict:
            groups = document.setdefault("judgments", {})
            group = [j for j in groups.get(criterion_id, [])
                     if j.get("stakeholder") != stakeholder]
            group.append({"stakeholder": stakeholder,
                          "labels": body["labels"], "entries": body["entries"]})
            groups[criterion_id] = group
            # elicited judgments supersede a literal vector for this criterion
            document.get("weights", {}).get("sub", {}).pop(criterion_id, None)
            return document

        session = store.mutate(session_id, expected, transform)
        group = session.scenario.judgments[criterion_id]
        judgment = next(j for j in group if j.stakeholder_id == stakeholder)
        weights = ahp.priorities_geometric(judgment.matrix)
        report = ahp.consistency(judgment.matrix, weights)
        return {
            "id": session.id,
            "version": session.version,
            "criterion": criterion_id,
            "stakeholder": stakeholder,
            "stakeholder_weights": _vector_payload(weights),
            "consistency": _consistency_payload(report),
            "weights": _vector_payload(session.scenario.problem.sub_weights[criterion_id]),
            "warnings": list(session.scenario.warnings),
        }

    @app.put("/problems/{session_id}/weights")
    async def put_weights(session_id: str, request: Request):
        expected = _require_if_match(request)
        body = await _json_body(request)
        if not body or any(key not in ("top_level", "sub") for key in body):
            raise ServiceError(400, "bad_request",
                               "weights body must carry 'top_level' and/or 'sub'", "body")

        def transform(document: dict) -> dict:
            weights = document.setdefault("weights", {})
            if "top_level" in body:
                weights["top_level"] = body["top_level"]
            for criterion_id, vector in body.get("sub", {}).items():
                weights.setdefault("sub", {})[criterion_id] = vector
            return document

        session = store.mutate(session_id, expected, transform)
        return {
            "id": session.id,
            "version": session.version,
            "derived": _derived_payload(session.scenario),
        }

    @app.put("/problems/{session_id}/knockouts")
    async def put_knockouts(session_id: str, request: Request):
        expected = _require_if_match(request)
        body = await _json_body(request)
        rules = body.get("knockouts") if isinstance(body, dict) else body
        if not isinstance(rules, list):
            raise ServiceError(400, "bad_request",
                               "knockouts body must be a list of rules "
                               "(or an object with a 'knockouts' list)", "body")

        def transform(document: dict) -> dict:
            document["knockouts"] = rules
            return document

        session = store.mutate(session_id, expected, transform)
        return {"id": session.id, "version": session.version,
                "knockouts": session.document.get("knockouts", [])}

    @app.get("/problems/{session_id}/ranking")
    async def get_ranking(session_id: str):
        return _ranking_payload(store.get(session_id))

    @app.post("/problems/{session_id}/sensitivity")
    async def post_sensitivity(session_id: str, request: Request):
        session = store.get(session_id)
        body = await _json_body(request)
        criterion_id = body.get("criterion")
        problem = session.scenario.problem
        if criterion_id not in problem.top_level_weights.labels:
            raise ServiceError(
                422, "unknown_criterion",
                f"criterion must be one of {list(problem.top_level_weights.labels)}",
                "criterion",
            )
        grid = int(body.get("grid", 101))
        result = oat_sweep(problem, criterion_id, grid=grid)
        payload = {
            "id": session.id,
            "version": session.version,
            "criterion": criterion_id,
            "baseline_weight": result.baseline_weight,
            "baseline_ranking": list(result.baseline_ranking),
            "stability_interval": {
                "lower": result.stability_interval.lower,
                "upper": result.stability_interval.upper,
                "tie_at_baseline": result.stability_interval.tie_at_baseline,
            },
            "sweep": [
                {"weight": p.weight, "ranking": list(p.ranking), "totals": p.totals}
                for p in result.sweep
            ],
            "reversals": [
                {"weight": r.weight, "displaced": r.displaced, "displacing": r.displacing}
                for r in result.reversals
            ],
        }
        if body.get("samples"):
            seed = body.get("seed")
            if seed is None:
                raise ServiceError(422, "missing_seed",
                                   "sampling requires an explicit integer seed", "seed")
            payload["sampling"] = {
                "samples": int(body["samples"]),
                "seed": int(seed),
                "frequencies": random_weight_sampling(
                    problem, int(body["samples"]), seed=int(seed)),
            }
        return payload

    return app
