"""Heuristic voter models: Complete, Take-X-Best, attainability-utility
(AU) over whole ballots, and its per-candidate thresholded variant (AUT).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping

from .core import Ballot, Scenario, Tally, UTILITY_EQ_TOL
from .errors import UtilityTieError, ValidationError

DEFAULT_EPSILON = 1e-6


@dataclass(frozen=True)
class ModelParams:
    """Parameters of the attainability-utility family.

    ``alpha`` weighs utility against attainability (0 = attainability
    only, 2 = utility only); ``beta`` shapes perceived attainability;
    ``tau`` is the per-candidate approval threshold used by the
    thresholded model; ``epsilon`` guards the 0^0 corner when a ballot
    has zero utility.
    """

    alpha: float = 1.0
    beta: float = 1.0
    tau: float = 0.0
    epsilon: float = DEFAULT_EPSILON

    def __post_init__(self) -> None:
        if not 0.0 <= self.alpha <= 2.0:
            raise ValidationError(f"alpha out of range [0, 2]: {self.alpha}")
        if self.beta <= 0:
            raise ValidationError(f"beta must be > 0: {self.beta}")
        if self.tau < 0:
            raise ValidationError(f"tau must be >= 0: {self.tau}")
        if self.epsilon <= 0:
            raise ValidationError(f"epsilon must be > 0: {self.epsilon}")


@dataclass(frozen=True)
class ApprovalCountSet:
    """The contiguous range of total approval counts the election can end
    with: from the approvals already cast up to every missing ballot
    approving everyone."""

    total_approvals: int
    missing_ballots: int
    m: int

    def __post_init__(self) -> None:
        if self.total_approvals < 1:
            raise ValidationError(
                "attainability is undefined with no approvals cast (denominator 0 in the count set)"
            )

    @classmethod
    def for_tally(cls, tally: Tally, m: int) -> "ApprovalCountSet":
        return cls(tally.total_approvals, tally.missing_ballots, m)

    @property
    def values(self) -> range:
        return range(self.total_approvals, self.total_approvals + self.missing_ballots * self.m + 1)

    def __len__(self) -> int:
        return self.missing_ballots * self.m + 1

    def __iter__(self):
        return iter(self.values)


def attainability_single(label: str, tally: Tally, m: int, beta: float) -> float:
    """Perceived chance of ``label`` winning a single-winner election.

    An arctan squash of how far the candidate's approval share sits from
    the uniform share 1/m; strictly inside (0, 1).
    """
    r = tally.total_approvals
    if r < 1:
        raise ValidationError("attainability is undefined with no approvals cast (r = 0)")
    return math.atan(beta * (tally.of(label) / r - 1.0 / m)) / math.pi + 0.5


def attainability_multi(label: str, tally: Tally, m: int, k: int, beta: float) -> float:
    """Attainability with k winners, averaged over the possible totals.

    Each missing ballot can add 0..m approvals, so the final total is any
    value in the approval-count set; the uniform share becomes 1/(m*k).
    Reduces exactly to :func:`attainability_single` when k = 1 and no
    ballots are missing.
    """
    ts = ApprovalCountSet.for_tally(tally, m)
    s = tally.of(label)
    share = 1.0 / (m * k)
    return sum(math.atan(beta * (s / t - share)) / math.pi + 0.5 for t in ts) / len(ts)


def set_attainability(ballot: Iterable[str], scenario: Scenario, beta: float) -> float:
    """Joint attainability of an exact winning set: every approved
    candidate gets in and every other candidate stays out."""
    b = scenario.check_ballot(ballot)
    p = 1.0
    for c in scenario.candidates:
        a = attainability_multi(c, scenario.tally, scenario.m, scenario.winners, beta)
        p *= a if c in b else 1.0 - a
    return p


def au_objective(scenario: Scenario, ballot: Iterable[str], params: ModelParams) -> float:
    """The attainability-utility trade-off value of one ballot:
    (epsilon + u(ballot))^alpha * attainability(ballot)^(2 - alpha)."""
    b = scenario.check_ballot(ballot)
    u = scenario.utilities.of_set(b)
    att = set_attainability(b, scenario, params.beta)
    return (params.epsilon + u) ** params.alpha * att ** (2.0 - params.alpha)


def au_ballot(scenario: Scenario, params: ModelParams) -> Ballot:
    """Ballot maximizing :func:`au_objective` over all 2^m subsets.

    Ties go to the smaller ballot, then candidate order.
    """
    # Per-candidate attainability does not depend on the ballot, so hoist
    # it out of the subset loop; the product below multiplies in candidate
    # order, exactly like set_attainability.
    atts = {
        c: attainability_multi(c, scenario.tally, scenario.m, scenario.winners, params.beta)
        for c in scenario.candidates
    }
    best: Ballot | None = None
    best_v = -1.0
    for b in scenario.candidates.all_ballots():
        att = 1.0
        for c in scenario.candidates:
            att *= atts[c] if c in b else 1.0 - atts[c]
        u = scenario.utilities.of_set(b)
        v = (params.epsilon + u) ** params.alpha * att ** (2.0 - params.alpha)
        if v > best_v + UTILITY_EQ_TOL * max(1.0, abs(best_v)):
            best, best_v = b, v
    assert best is not None
    return best


def au_score(label: str, scenario: Scenario, params: ModelParams) -> float:
    """Per-candidate AU score: the trade-off value of approving exactly
    this one candidate.

    Thresholding these singleton-ballot scores is what reproduces the
    published worked examples; scoring candidates by bare per-candidate
    attainability does not.
    """
    return au_objective(scenario, frozenset({label}), params)


def au_scores(scenario: Scenario, params: ModelParams) -> dict[str, float]:
    """AU score of every candidate (always strictly positive)."""
    return {c: au_score(c, scenario, params) for c in scenario.candidates}


def threshold_ballot(scores: Mapping[str, float], tau: float) -> Ballot:
    """Everyone scoring at least ``tau`` (inclusive comparison)."""
    return frozenset(c for c, s in scores.items() if s >= tau)


def aut_ballot(scenario: Scenario, params: ModelParams) -> Ballot:
    """Thresholded model: approve each candidate whose AU score reaches
    ``params.tau``. May be empty when the threshold exceeds every score."""
    return threshold_ballot(au_scores(scenario, params), params.tau)


def complete_ballot(scenario: Scenario) -> Ballot:
    """Approve every candidate with positive utility."""
    return frozenset(c for c in scenario.candidates if scenario.utility(c) > 0)


def take_x_best(scenario: Scenario, x: int) -> Ballot:
    """Approve the x highest-utility candidates.

    Requires a strict utility ordering around the cut: a tie at the
    boundary would make the selection ambiguous, so it raises rather than
    silently picking.
    """
    m = scenario.m
    if not 1 <= x <= m:
        raise ValidationError(f"x out of range: {x} (must be 1..{m})")
    ranked = sorted(
        scenario.candidates,
        key=lambda c: (-scenario.utility(c), scenario.candidates.index(c)),
    )
    if x < m:
        u_in, u_out = scenario.utility(ranked[x - 1]), scenario.utility(ranked[x])
        if abs(u_in - u_out) <= UTILITY_EQ_TOL:
            raise UtilityTieError(
                f"utilities tied at the take-{x} boundary ({ranked[x - 1]!r} vs {ranked[x]!r})"
            )
    return frozenset(ranked[:x])
