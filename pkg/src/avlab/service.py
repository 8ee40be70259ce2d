"""HTTP backend for the live voting-game study.

Participants open a session, receive a fixed queue of voting conditions
(every single-winner condition, then every condition of a randomly
assigned 2- or 3-winner block), submit approval ballots, and get back the
realized winners and their payoff for each one. Every mutation is
appended to a per-session event log so a restarted server replays to the
identical state.
"""

from __future__ import annotations

import datetime as _dt
import json
import os
import random
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

from fastapi import FastAPI, HTTPException, Query, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, PlainTextResponse
from pydantic import BaseModel

from . import dataio
from .core import Scenario, optimal_ballot, run_election
from .errors import ValidationError
from .fitting import MISSING_LEVELS, Model, ResponseRecord
from .heuristics import (
    DEFAULT_EPSILON,
    ModelParams,
    au_ballot,
    au_scores,
    aut_ballot,
    complete_ballot,
    take_x_best,
)

_SEED_SPAN = 2**63


@dataclass(frozen=True)
class ServiceConfig:
    """Tunable study parameters; file values are overridden by env vars."""

    port: int = 8000
    seed: int = 0
    data_dir: str | None = None
    base_payout: float = 1.0
    payoff_cap: float = 8.0
    payout_multiplier: float = 2.0
    shuffle_queue: bool = False
    study_scenarios: tuple[str, ...] = ("A", "B")

    @classmethod
    def load(cls, config_path: str | None = None, env: Mapping[str, str] | None = None, **overrides) -> "ServiceConfig":
        env = dict(os.environ if env is None else env)
        values: dict = {}
        if config_path:
            obj = json.loads(Path(config_path).read_text(encoding="utf-8"))
            mapping = {
                "port": int,
                "seed": int,
                "dataDir": str,
                "basePayout": float,
                "payoffCap": float,
                "payoutMultiplier": float,
                "shuffleQueue": bool,
                "studyScenarios": tuple,
            }
            keys = {
                "dataDir": "data_dir",
                "basePayout": "base_payout",
                "payoffCap": "payoff_cap",
                "payoutMultiplier": "payout_multiplier",
                "shuffleQueue": "shuffle_queue",
                "studyScenarios": "study_scenarios",
            }
            for k, cast in mapping.items():
                if k in obj:
                    values[keys.get(k, k)] = cast(obj[k])
        env_map = {
            "AVLAB_PORT": ("port", int),
            "AVLAB_SEED": ("seed", int),
            "AVLAB_DATA_DIR": ("data_dir", str),
            "AVLAB_PAYOUT_MULTIPLIER": ("payout_multiplier", float),
            "AVLAB_PAYOFF_CAP": ("payoff_cap", float),
        }
        for var, (key, cast) in env_map.items():
            if var in env:
                values[key] = cast(env[var])
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


@dataclass(frozen=True)
class OutcomeRecord:
    """Resolved result of one submitted ballot."""

    scenario_id: str
    winners: int
    missing: int
    sampled_ballots: list[list[str]]
    winner_set: list[str]
    utility_delta: float
    payoff_delta: float

    def to_obj(self) -> dict:
        return {
            "scenarioId": self.scenario_id,
            "winners": self.winners,
            "missing": self.missing,
            "sampledBallots": self.sampled_ballots,
            "winnerSet": self.winner_set,
            "utilityDelta": self.utility_delta,
            "payoffDelta": self.payoff_delta,
        }


@dataclass
class Session:
    session_id: str
    participant_id: str
    assigned_k: int
    seed: int
    queue: list[tuple[str, int, int]]
    responses: list[ResponseRecord] = field(default_factory=list)
    outcomes: list[OutcomeRecord] = field(default_factory=list)

    @property
    def position(self) -> int:
        return len(self.responses)

    @property
    def completed(self) -> bool:
        return self.position >= len(self.queue)

    @property
    def accumulated_payoff(self) -> float:
        return sum(o.payoff_delta for o in self.outcomes)


def sample_missing_ballots(labels: tuple[str, ...], n: int, rng: random.Random) -> list[list[str]]:
    """Draw n approval subsets uniformly (the empty ballot included)."""
    out = []
    for _ in range(n):
        bits = rng.randrange(2 ** len(labels))
        out.append([c for i, c in enumerate(labels) if bits >> i & 1])
    return out


def resolve_outcome(
    condition: Scenario,
    approved: frozenset[str],
    rng: random.Random,
    payout_multiplier: float,
) -> OutcomeRecord:
    """Sample the missing ballots, run the election, and price the result."""
    labels = condition.candidates.labels
    sampled = sample_missing_ballots(labels, condition.tally.missing_ballots, rng)
    counts = {c: condition.count(c) + (1 if c in approved else 0) for c in labels}
    for ballot in sampled:
        for c in ballot:
            counts[c] += 1
    winner_set = run_election(counts, condition.winners, seed=rng.randrange(_SEED_SPAN))
    utility_delta = sum(condition.utility(c) for c in winner_set)
    return OutcomeRecord(
        scenario_id=condition.id,
        winners=condition.winners,
        missing=condition.tally.missing_ballots,
        sampled_ballots=sampled,
        winner_set=sorted(winner_set),
        utility_delta=utility_delta,
        payoff_delta=utility_delta * payout_multiplier,
    )


class SessionStore:
    """All live sessions plus the append-only persistence underneath."""

    def __init__(self, config: ServiceConfig, scenarios: Mapping[str, Scenario] | None = None):
        self.config = config
        self.scenarios: dict[str, Scenario] = dict(scenarios or dataio.builtin_scenarios())
        self.sessions: dict[str, Session] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._store_lock = threading.Lock()
        self._rng = random.Random(config.seed)
        self._counter = 0
        if config.data_dir:
            Path(config.data_dir).mkdir(parents=True, exist_ok=True)
            self._replay()

    # -- persistence ----------------------------------------------------

    def _log_path(self, session_id: str) -> Path | None:
        if not self.config.data_dir:
            return None
        return Path(self.config.data_dir) / f"{session_id}.ndjson"

    def _append_event(self, session_id: str, event: dict) -> None:
        path = self._log_path(session_id)
        if path is None:
            return
        with open(path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(event) + "\n")
            fh.flush()
            os.fsync(fh.fileno())

    def _replay(self) -> None:
        for path in sorted(Path(self.config.data_dir).glob("*.ndjson")):
            session: Session | None = None
            for line in path.read_text(encoding="utf-8").splitlines():
                if not line.strip():
                    continue
                event = json.loads(line)
                if event["event"] == "created":
                    session = Session(
                        session_id=event["sessionId"],
                        participant_id=event["participantId"],
                        assigned_k=event["assignedK"],
                        seed=event["seed"],
                        queue=[tuple(q) for q in event["queue"]],
                    )
                elif event["event"] == "ballot" and session is not None:
                    rec = event["record"]
                    session.responses.append(
                        ResponseRecord(
                            voter_id=rec["voter_id"],
                            scenario_id=rec["scenario_id"],
                            winners=rec["winners"],
                            missing=rec["missing"],
                            ballot=frozenset(rec["ballot"]),
                            timestamp=rec["timestamp"],
                        )
                    )
                    out = event["outcome"]
                    session.outcomes.append(
                        OutcomeRecord(
                            scenario_id=out["scenarioId"],
                            winners=out["winners"],
                            missing=out["missing"],
                            sampled_ballots=out["sampledBallots"],
                            winner_set=out["winnerSet"],
                            utility_delta=out["utilityDelta"],
                            payoff_delta=out["payoffDelta"],
                        )
                    )
            if session is not None:
                self.sessions[session.session_id] = session
                self._locks[session.session_id] = threading.Lock()
                self._counter = max(self._counter, int(session.session_id[1:7]))

    # -- session flow ----------------------------------------------------

    def _build_queue(self, assigned_k: int, rng: random.Random) -> list[tuple[str, int, int]]:
        queue: list[tuple[str, int, int]] = []
        for k in (1, assigned_k):
            for miss in MISSING_LEVELS:
                for sid in self.config.study_scenarios:
                    queue.append((sid, k, miss))
        if self.config.shuffle_queue:
            rng.shuffle(queue)
        return queue

    def create_session(self, participant_id: str) -> Session:
        if not participant_id:
            raise ValidationError("participantId must be non-empty")
        with self._store_lock:
            self._counter += 1
            session_id = f"s{self._counter:06d}"
            assigned_k = self._rng.choice((2, 3))
            seed = self._rng.randrange(_SEED_SPAN)
            session = Session(
                session_id=session_id,
                participant_id=participant_id,
                assigned_k=assigned_k,
                seed=seed,
                queue=self._build_queue(assigned_k, random.Random(seed)),
            )
            self.sessions[session_id] = session
            self._locks[session_id] = threading.Lock()
        self._append_event(
            session_id,
            {
                "event": "created",
                "sessionId": session_id,
                "participantId": participant_id,
                "assignedK": assigned_k,
                "seed": seed,
                "queue": [list(q) for q in session.queue],
            },
        )
        return session

    def get(self, session_id: str) -> Session:
        try:
            return self.sessions[session_id]
        except KeyError:
            raise NotFoundError(f"unknown session {session_id!r}") from None

    def condition_for(self, entry: tuple[str, int, int]) -> Scenario:
        sid, k, miss = entry
        if sid not in self.scenarios:
            raise ValidationError(f"unknown scenario id {sid!r}")
        return self.scenarios[sid].condition(winners=k, missing=miss)

    def submit_ballot(
        self, session_id: str, scenario_id: str, winners: int, missing: int, approved: list[str]
    ) -> OutcomeRecord:
        session = self.get(session_id)
        with self._locks[session_id]:
            if session.completed:
                raise QueueMismatch("session already completed")
            head = session.queue[session.position]
            if (scenario_id, winners, missing) != head:
                raise QueueMismatch(
                    f"submitted condition {(scenario_id, winners, missing)} is not the "
                    f"queue head {head}"
                )
            condition = self.condition_for(head)
            ballot = condition.check_ballot(approved)
            # Per-submission PRNG derived from the session seed and queue
            # position: stateless, so replayed sessions continue identically.
            rng = random.Random(session.seed * 1_000_003 + session.position)
            outcome = resolve_outcome(condition, ballot, rng, self.config.payout_multiplier)
            record = ResponseRecord(
                voter_id=session.session_id,
                scenario_id=scenario_id,
                winners=winners,
                missing=missing,
                ballot=ballot,
                timestamp=_dt.datetime.now(_dt.timezone.utc).isoformat(),
            )
            session.responses.append(record)
            session.outcomes.append(outcome)
            self._append_event(
                session_id,
                {
                    "event": "ballot",
                    "position": session.position - 1,
                    "record": {
                        "voter_id": record.voter_id,
                        "scenario_id": record.scenario_id,
                        "winners": record.winners,
                        "missing": record.missing,
                        "ballot": sorted(record.ballot),
                        "timestamp": record.timestamp,
                    },
                    "outcome": outcome.to_obj(),
                },
            )
            return outcome

    # -- read side --------------------------------------------------------

    def scenario_payload(self, session: Session) -> dict | None:
        if session.completed:
            return None
        entry = session.queue[session.position]
        condition = self.condition_for(entry)
        return {
            "scenarioId": entry[0],
            "winners": entry[1],
            "missing": entry[2],
            "position": session.position,
            "total": len(session.queue),
            "knownBallots": condition.tally.known_ballots,
            "candidates": [
                {
                    "label": c,
                    "utility": condition.utility(c),
                    "cash": condition.utility(c) * self.config.payout_multiplier,
                    "count": condition.count(c),
                }
                for c in condition.candidates
            ],
        }

    def results_payload(self, session: Session) -> dict:
        bonus = min(self.config.payoff_cap, session.accumulated_payoff)
        return {
            "sessionId": session.session_id,
            "participantId": session.participant_id,
            "assignedK": session.assigned_k,
            "position": session.position,
            "total": len(session.queue),
            "completed": session.completed,
            "accumulatedPayoff": session.accumulated_payoff,
            "bonus": bonus,
            "earnings": self.config.base_payout + bonus,
            "outcomes": [o.to_obj() for o in session.outcomes],
            "currentScenario": self.scenario_payload(session),
        }

    def export_records(self) -> list[ResponseRecord]:
        records: list[ResponseRecord] = []
        for sid in sorted(self.sessions):
            records.extend(self.sessions[sid].responses)
        return records


class QueueMismatch(Exception):
    """Submitted condition is not the session's current queue head."""


class NotFoundError(Exception):
    """Session or scenario id does not exist."""


class CreateSessionRequest(BaseModel):
    participantId: str = ""


class BallotRequest(BaseModel):
    scenarioId: str
    winners: int
    missing: int
    approved: list[str] = []


def predict_ballot(
    scenario: Scenario, model: str, params: dict[str, float | None]
) -> tuple[frozenset[str], float | None]:
    """Shared prediction dispatch for the CLI and the /predict endpoint."""
    def need(name: str) -> float:
        value = params.get(name)
        if value is None:
            raise ValidationError(f"model {model!r} requires parameter {name!r}")
        return value

    epsilon = params.get("epsilon") or DEFAULT_EPSILON
    if model == Model.COMPLETE.value:
        return complete_ballot(scenario), None
    if model in ("takex", Model.TAKE_K_BEST.value):
        x = params.get("x")
        return take_x_best(scenario, int(x) if x is not None else scenario.winners), None
    if model == Model.AU.value:
        mp = ModelParams(alpha=need("alpha"), beta=need("beta"), epsilon=epsilon)
        return au_ballot(scenario, mp), None
    if model == Model.AUT.value:
        mp = ModelParams(alpha=params.get("alpha") or 1.0, beta=need("beta"), tau=need("tau"), epsilon=epsilon)
        return aut_ballot(scenario, mp), None
    if model == Model.OPTIMAL.value:
        ballot, value = optimal_ballot(scenario)
        return ballot, value
    raise ValidationError(f"unknown model {model!r}")


def create_app(store: SessionStore) -> FastAPI:
    app = FastAPI(title="avlab experiment service")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    app.state.store = store

    @app.exception_handler(ValidationError)
    async def _validation_handler(request: Request, exc: ValidationError):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.exception_handler(QueueMismatch)
    async def _queue_handler(request: Request, exc: QueueMismatch):
        return JSONResponse(status_code=409, content={"detail": str(exc)})

    @app.exception_handler(NotFoundError)
    async def _missing_handler(request: Request, exc: NotFoundError):
        return JSONResponse(status_code=404, content={"detail": str(exc)})

    @app.post("/sessions")
    def create_session(body: CreateSessionRequest):
        session = store.create_session(body.participantId)
        return {
            "sessionId": session.session_id,
            "assignedK": session.assigned_k,
            "firstScenario": store.scenario_payload(session),
        }

    @app.post("/sessions/{session_id}/ballots")
    def submit_ballot(session_id: str, body: BallotRequest):
        outcome = store.submit_ballot(
            session_id, body.scenarioId, body.winners, body.missing, body.approved
        )
        session = store.get(session_id)
        return {
            "outcome": outcome.to_obj(),
            "accumulatedPayoff": session.accumulated_payoff,
            "nextScenario": store.scenario_payload(session),
        }

    @app.get("/sessions/{session_id}/results")
    def session_results(session_id: str):
        return store.results_payload(store.get(session_id))

    @app.get("/export")
    def export(format: str = Query(default="csv")):
        records = store.export_records()
        if format == "json":
            return [
                {
                    "voterId": r.voter_id,
                    "scenarioId": r.scenario_id,
                    "winners": r.winners,
                    "missing": r.missing,
                    "ballot": sorted(r.ballot),
                    "timestamp": r.timestamp,
                }
                for r in records
            ]
        if format != "csv":
            raise ValidationError(f"unsupported export format {format!r}")
        return PlainTextResponse(dataio.responses_to_csv(records), media_type="text/csv")

    @app.get("/scenarios")
    def list_scenarios():
        return {sid: dataio.scenario_to_obj(s) for sid, s in sorted(store.scenarios.items())}

    @app.post("/scenarios", status_code=201)
    def register_scenario(body: dict):
        scenario = dataio.parse_scenario(body, source="<request>")
        store.scenarios[scenario.id] = scenario
        return dataio.scenario_to_obj(scenario)

    @app.get("/predict")
    def predict(
        scenarioId: str,
        k: int = Query(ge=1),
        missing: int = Query(ge=0),
        model: str = Query(),
        alpha: float | None = None,
        beta: float | None = None,
        tau: float | None = None,
        x: int | None = None,
        epsilon: float | None = None,
    ):
        if scenarioId not in store.scenarios:
            raise NotFoundError(f"unknown scenario {scenarioId!r}")
        condition = store.scenarios[scenarioId].condition(winners=k, missing=missing)
        ballot, value = predict_ballot(
            condition, model, {"alpha": alpha, "beta": beta, "tau": tau, "x": x, "epsilon": epsilon}
        )
        return {
            "model": model,
            "scenarioId": scenarioId,
            "winners": k,
            "missing": missing,
            "ballot": sorted(ballot),
            "value": value,
            "note": "analysis only",
        }

    @app.get("/scores")
    def scores(
        scenarioId: str,
        k: int = Query(ge=1),
        missing: int = Query(ge=0),
        beta: float = Query(gt=0),
        alpha: float = 1.0,
        epsilon: float = DEFAULT_EPSILON,
    ):
        if scenarioId not in store.scenarios:
            raise NotFoundError(f"unknown scenario {scenarioId!r}")
        condition = store.scenarios[scenarioId].condition(winners=k, missing=missing)
        params = ModelParams(alpha=alpha, beta=beta, epsilon=epsilon)
        return {
            "scenarioId": scenarioId,
            "winners": k,
            "missing": missing,
            "scores": au_scores(condition, params),
            "note": "analysis only",
        }

    @app.get("/healthz")
    def healthz():
        return {"status": "ok", "sessions": len(store.sessions)}

    return app


def serve(config: ServiceConfig) -> None:
    """Run the service under uvicorn (blocking)."""
    import uvicorn

    store = SessionStore(config)
    app = create_app(store)
    uvicorn.run(app, host="0.0.0.0", port=config.port)
