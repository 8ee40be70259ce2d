"""Grid-search parameter fitting and leave-one-out evaluation of the five
voter models (optimal, complete, take-k-best, AU, AUT) against per-voter
response data, plus synthetic-cohort generation for end-to-end checks.
"""

from __future__ import annotations

import datetime as _dt
import random
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Sequence

import numpy as np

from .core import Ballot, Scenario, optimal_ballot
from .errors import IncompleteConditionsError, ValidationError
from .heuristics import (
    DEFAULT_EPSILON,
    ModelParams,
    au_ballot,
    au_scores,
    aut_ballot,
    complete_ballot,
    take_x_best,
    threshold_ballot,
)


class Model(str, Enum):
    OPTIMAL = "optimal"
    COMPLETE = "complete"
    TAKE_K_BEST = "take_k_best"
    AU = "au"
    AUT = "aut"

    @property
    def display_name(self) -> str:
        return {
            Model.OPTIMAL: "Optimal",
            Model.COMPLETE: "Complete",
            Model.TAKE_K_BEST: "Take k best",
            Model.AU: "AU",
            Model.AUT: "AUT",
        }[self]


#: Search grids used when fitting.
AU_ALPHAS: tuple[float, ...] = (0.0, 1.0, 2.0)
AU_BETAS: tuple[float, ...] = tuple(float(b) for b in range(1, 33))
AUT_BETAS: tuple[float, ...] = AU_BETAS
AUT_TAUS: tuple[float, ...] = tuple(i / 2000.0 for i in range(201))  # 0, 0.0005, ..., 0.1000

#: Missing-ballot levels every voter answers in each winner-count block.
MISSING_LEVELS: tuple[int, ...] = (0, 1, 3)


@dataclass(frozen=True)
class ResponseRecord:
    """One observed ballot from one voter in one condition."""

    voter_id: str
    scenario_id: str
    winners: int
    missing: int
    ballot: Ballot
    timestamp: str = ""

    @property
    def condition(self) -> tuple[str, int, int]:
        return (self.scenario_id, self.winners, self.missing)


@dataclass
class FitResult:
    """Per-voter leave-one-out outcome for one model at one winner count.

    ``params`` is the fit on all of the voter's records (None for the
    deterministic models); ``per_split_hits`` holds the held-out
    exact-match indicator of each split in condition order.
    """

    model: Model
    voter_id: str
    winners: int
    per_split_hits: list[int]
    params: ModelParams | None = None
    per_split_jaccard: list[float] = field(default_factory=list)

    @property
    def accuracy(self) -> float:
        return sum(self.per_split_hits) / len(self.per_split_hits)

    @property
    def jaccard(self) -> float:
        return sum(self.per_split_jaccard) / len(self.per_split_jaccard)


@dataclass
class AccuracyReport:
    """Mean (sd) of per-voter LOO accuracies, per model and winner count.

    The headline metric is exact ballot match; the Jaccard column is a
    supplementary softer overlap measure, not part of the reference
    accuracy definition.
    """

    winner_counts: tuple[int, ...]
    cells: dict[tuple[Model, int], dict]

    MODELS = (Model.OPTIMAL, Model.AU, Model.COMPLETE, Model.TAKE_K_BEST, Model.AUT)

    def cell(self, model: Model, k: int) -> dict:
        return self.cells[(model, k)]

    def to_obj(self) -> dict:
        return {
            "winnerCounts": list(self.winner_counts),
            "models": [m.value for m in self.MODELS],
            "cells": [
                {
                    "model": model.value,
                    "winners": k,
                    "voters": cell["n"],
                    "meanAccuracy": cell["mean"],
                    "sdAccuracy": cell["sd"],
                    "meanJaccard": cell["jaccard"],
                }
                for (model, k), cell in sorted(
                    self.cells.items(), key=lambda kv: (self.MODELS.index(kv[0][0]), kv[0][1])
                )
            ],
        }

    def to_text(self) -> str:
        header = ["model"] + [f"{k} winner" for k in self.winner_counts]
        rows = [header]
        for model in self.MODELS:
            row = [model.display_name + ":"]
            for k in self.winner_counts:
                cell = self.cells.get((model, k))
                if cell is None or cell["n"] == 0:
                    row.append("-")
                else:
                    row.append(f"{100 * cell['mean']:.1f}% ({100 * cell['sd']:.1f}%)")
            rows.append(row)
        widths = [max(len(r[i]) for r in rows) for i in range(len(header))]
        return "\n".join("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows)


class PredictionContext:
    """Shared per-condition prediction caches used by fitting and scoring.

    All five models' predictions depend only on (scenario, k, n-missing)
    and the model parameters, so one context can serve a whole cohort.
    """

    def __init__(self, scenarios: Mapping[str, Scenario], epsilon: float = DEFAULT_EPSILON):
        self.scenarios = dict(scenarios)
        self.epsilon = epsilon
        self._conditions: dict[tuple[str, int, int], Scenario] = {}
        self._au: dict[tuple, Ballot] = {}
        self._aut_scores: dict[tuple, dict[str, float]] = {}
        self._optimal: dict[tuple[str, int, int], Ballot] = {}

    def condition(self, scenario_id: str, winners: int, missing: int) -> Scenario:
        key = (scenario_id, winners, missing)
        if key not in self._conditions:
            if scenario_id not in self.scenarios:
                raise ValidationError(f"unknown scenario id {scenario_id!r}")
            self._conditions[key] = self.scenarios[scenario_id].condition(winners=winners, missing=missing)
        return self._conditions[key]

    def au_prediction(self, cond: tuple[str, int, int], alpha: float, beta: float) -> Ballot:
        key = (cond, alpha, beta)
        if key not in self._au:
            params = ModelParams(alpha=alpha, beta=beta, epsilon=self.epsilon)
            self._au[key] = au_ballot(self.condition(*cond), params)
        return self._au[key]

    def aut_candidate_scores(self, cond: tuple[str, int, int], beta: float) -> dict[str, float]:
        key = (cond, beta)
        if key not in self._aut_scores:
            params = ModelParams(alpha=1.0, beta=beta, epsilon=self.epsilon)
            self._aut_scores[key] = au_scores(self.condition(*cond), params)
        return self._aut_scores[key]

    def aut_prediction(self, cond: tuple[str, int, int], beta: float, tau: float) -> Ballot:
        return threshold_ballot(self.aut_candidate_scores(cond, beta), tau)

    def predict(self, model: Model, cond: tuple[str, int, int], params: ModelParams | None = None) -> Ballot:
        scenario = self.condition(*cond)
        if model is Model.OPTIMAL:
            if cond not in self._optimal:
                self._optimal[cond] = optimal_ballot(scenario)[0]
            return self._optimal[cond]
        if model is Model.COMPLETE:
            return complete_ballot(scenario)
        if model is Model.TAKE_K_BEST:
            return take_x_best(scenario, scenario.winners)
        if params is None:
            raise ValidationError(f"model {model.value} requires fitted parameters")
        if model is Model.AU:
            return self.au_prediction(cond, params.alpha, params.beta)
        if model is Model.AUT:
            return self.aut_prediction(cond, params.beta, params.tau)
        raise ValidationError(f"unknown model {model!r}")

    # Hit matrices over the search grids (integer 0/1, so sums are exact
    # and independent of record order).

    def au_hit_matrix(self, record: ResponseRecord) -> np.ndarray:
        out = np.zeros((len(AU_ALPHAS), len(AU_BETAS)), dtype=np.int64)
        for ai, alpha in enumerate(AU_ALPHAS):
            for bi, beta in enumerate(AU_BETAS):
                if self.au_prediction(record.condition, alpha, beta) == record.ballot:
                    out[ai, bi] = 1
        return out

    def aut_hit_matrix(self, record: ResponseRecord) -> np.ndarray:
        taus = np.asarray(AUT_TAUS)
        out = np.zeros((len(AUT_BETAS), len(AUT_TAUS)), dtype=np.int64)
        for bi, beta in enumerate(AUT_BETAS):
            scores = self.aut_candidate_scores(record.condition, beta)
            inside = [scores[c] for c in record.ballot]
            outside = [s for c, s in scores.items() if c not in record.ballot]
            min_in = min(inside) if inside else np.inf
            max_out = max(outside) if outside else -np.inf
            out[bi] = (taus <= min_in) & (taus > max_out)
        return out


def _require_records(records: Sequence[ResponseRecord]) -> None:
    if not records:
        raise ValidationError("no response records given")


def fit_au(
    records: Sequence[ResponseRecord],
    scenarios: Mapping[str, Scenario],
    context: PredictionContext | None = None,
) -> ModelParams:
    """Grid-search (alpha, beta) maximizing exact-match count on ``records``.

    Ties resolve to the smaller alpha, then the smaller beta.
    """
    _require_records(records)
    ctx = context or PredictionContext(scenarios)
    hits = sum(ctx.au_hit_matrix(rec) for rec in records)
    ai, bi = np.unravel_index(int(np.argmax(hits)), hits.shape)
    return ModelParams(alpha=AU_ALPHAS[ai], beta=AU_BETAS[bi], epsilon=ctx.epsilon)


def fit_aut(
    records: Sequence[ResponseRecord],
    scenarios: Mapping[str, Scenario],
    context: PredictionContext | None = None,
) -> ModelParams:
    """Grid-search (beta, tau) at alpha = 1 maximizing exact-match count.

    Ties resolve to the smaller beta, then the smaller tau.
    """
    _require_records(records)
    ctx = context or PredictionContext(scenarios)
    hits = sum(ctx.aut_hit_matrix(rec) for rec in records)
    bi, ti = np.unravel_index(int(np.argmax(hits)), hits.shape)
    return ModelParams(alpha=1.0, beta=AUT_BETAS[bi], tau=AUT_TAUS[ti], epsilon=ctx.epsilon)


def _jaccard(a: Ballot, b: Ballot) -> float:
    if not a and not b:
        return 1.0
    return len(a & b) / len(a | b)


def _condition_block(
    records: Sequence[ResponseRecord], scenarios: Mapping[str, Scenario]
) -> list[ResponseRecord]:
    """Validate that the records cover each scenario x missing level once."""
    expected = {
        (sid, miss) for sid in sorted(scenarios) for miss in MISSING_LEVELS
    }
    got = {(r.scenario_id, r.missing) for r in records}
    missing_conds = sorted(expected - got)
    if missing_conds:
        raise IncompleteConditionsError(
            "missing conditions (scenario, n-missing): "
            + ", ".join(f"({sid}, {miss})" for sid, miss in missing_conds)
        )
    if len(records) != len(expected):
        raise IncompleteConditionsError(
            f"expected {len(expected)} records, got {len(records)} (duplicate or extra conditions)"
        )
    return sorted(records, key=lambda r: (r.missing, r.scenario_id))


def _group_by_voter_k(
    records: Iterable[ResponseRecord],
) -> dict[tuple[str, int], list[ResponseRecord]]:
    groups: dict[tuple[str, int], list[ResponseRecord]] = {}
    for rec in records:
        groups.setdefault((rec.voter_id, rec.winners), []).append(rec)
    return groups


def loo_evaluate(
    model: Model,
    records: Sequence[ResponseRecord],
    scenarios: Mapping[str, Scenario],
    context: PredictionContext | None = None,
) -> list[FitResult]:
    """Leave-one-out evaluation of one model, per (voter, winner count).

    For each of a voter's conditions, the parametric models are refit on
    the remaining conditions and scored by exact ballot match on the
    held-out one; deterministic models are scored directly.
    """
    _require_records(records)
    ctx = context or PredictionContext(scenarios)
    results: list[FitResult] = []
    for (voter_id, winners), recs in sorted(_group_by_voter_k(records).items()):
        block = _condition_block(recs, scenarios)
        hits: list[int] = []
        jac: list[float] = []
        if model in (Model.AU, Model.AUT):
            matrices = [
                ctx.au_hit_matrix(r) if model is Model.AU else ctx.aut_hit_matrix(r) for r in block
            ]
            total = sum(matrices)
            for held, mat in zip(block, matrices):
                train = total - mat
                idx = np.unravel_index(int(np.argmax(train)), train.shape)
                if model is Model.AU:
                    params = ModelParams(alpha=AU_ALPHAS[idx[0]], beta=AU_BETAS[idx[1]], epsilon=ctx.epsilon)
                else:
                    params = ModelParams(
                        alpha=1.0, beta=AUT_BETAS[idx[0]], tau=AUT_TAUS[idx[1]], epsilon=ctx.epsilon
                    )
                pred = ctx.predict(model, held.condition, params)
                hits.append(int(pred == held.ballot))
                jac.append(_jaccard(pred, held.ballot))
            fitted = fit_au(block, scenarios, ctx) if model is Model.AU else fit_aut(block, scenarios, ctx)
        else:
            for held in block:
                pred = ctx.predict(model, held.condition)
                hits.append(int(pred == held.ballot))
                jac.append(_jaccard(pred, held.ballot))
            fitted = None
        results.append(
            FitResult(
                model=model,
                voter_id=voter_id,
                winners=winners,
                per_split_hits=hits,
                params=fitted,
                per_split_jaccard=jac,
            )
        )
    return results


def evaluate_cohort(
    dataset: Sequence[ResponseRecord],
    scenarios: Mapping[str, Scenario],
    winner_counts: tuple[int, ...] = (1, 2, 3),
    epsilon: float = DEFAULT_EPSILON,
) -> AccuracyReport:
    """Evaluate all five models over a cohort and aggregate per winner count."""
    _require_records(dataset)
    ctx = PredictionContext(scenarios, epsilon=epsilon)
    cells: dict[tuple[Model, int], dict] = {}
    by_model: dict[Model, list[FitResult]] = {
        model: loo_evaluate(model, dataset, scenarios, ctx) for model in AccuracyReport.MODELS
    }
    for model in AccuracyReport.MODELS:
        for k in winner_counts:
            accs = [r.accuracy for r in by_model[model] if r.winners == k]
            jacs = [r.jaccard for r in by_model[model] if r.winners == k]
            if accs:
                arr = np.asarray(accs)
                cells[(model, k)] = {
                    "n": len(accs),
                    "mean": float(arr.mean()),
                    "sd": float(arr.std()),
                    "jaccard": float(np.mean(jacs)),
                }
            else:
                cells[(model, k)] = {"n": 0, "mean": None, "sd": None, "jaccard": None}
    return AccuracyReport(winner_counts=winner_counts, cells=cells)


@dataclass(frozen=True)
class CohortSpec:
    """Recipe for a synthetic cohort standing in for real respondents."""

    voters: int
    model: Model
    param_ranges: Mapping[str, Sequence[float]] | None = None
    noise: float = 0.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.voters < 1:
            raise ValidationError("cohort needs at least one voter")
        if not 0.0 <= self.noise <= 1.0:
            raise ValidationError(f"noise must be a probability: {self.noise}")


def generate_synthetic_cohort(
    spec: CohortSpec,
    scenarios: Mapping[str, Scenario],
    winner_counts: tuple[int, ...] = (1, 2, 3),
    epsilon: float = DEFAULT_EPSILON,
) -> list[ResponseRecord]:
    """Deterministically simulate a cohort answering every condition.

    Each voter draws its parameters from the configured ranges, answers
    all conditions of every winner-count block with its model, and with
    probability ``noise`` a ballot is replaced by a uniformly random
    subset of the candidates.
    """
    rng = random.Random(spec.seed)
    ctx = PredictionContext(scenarios, epsilon=epsilon)
    ranges = dict(spec.param_ranges or {})
    alphas = tuple(ranges.get("alpha", AU_ALPHAS))
    betas = tuple(ranges.get("beta", AU_BETAS))
    taus = tuple(ranges.get("tau", AUT_TAUS))
    base_time = _dt.datetime(2026, 1, 1, 0, 0, 0)
    records: list[ResponseRecord] = []
    for v in range(spec.voters):
        if spec.model is Model.AU:
            params = ModelParams(alpha=rng.choice(alphas), beta=rng.choice(betas), epsilon=epsilon)
        elif spec.model is Model.AUT:
            params = ModelParams(alpha=1.0, beta=rng.choice(betas), tau=rng.choice(taus), epsilon=epsilon)
        else:
            params = None
        voter_id = f"{spec.model.value}-{v:03d}"
        for k in winner_counts:
            for miss in MISSING_LEVELS:
                for sid in sorted(scenarios):
                    cond = (sid, k, miss)
                    ballot = ctx.predict(spec.model, cond, params)
                    if spec.noise > 0 and rng.random() < spec.noise:
                        labels = ctx.scenarios[sid].candidates.labels
                        bits = rng.randrange(2 ** len(labels))
                        ballot = frozenset(c for i, c in enumerate(labels) if bits >> i & 1)
                    stamp = (base_time + _dt.timedelta(seconds=len(records))).isoformat() + "Z"
                    records.append(
                        ResponseRecord(
                            voter_id=voter_id,
                            scenario_id=sid,
                            winners=k,
                            missing=miss,
                            ballot=ballot,
                            timestamp=stamp,
                        )
                    )
    return records
