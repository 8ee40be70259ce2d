"""Exact approval-election mechanics.

Tallies, winner selection with uniform-random tie-breaking, exact winner
probabilities under enumerated missing ballots, expected utility of a
ballot, and the exhaustive optimal-ballot baseline.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Iterable, Mapping

from .errors import ValidationError

#: An approval ballot is a plain set of candidate labels.
Ballot = frozenset[str]

#: Tolerance for treating two utility/expected-utility values as equal.
UTILITY_EQ_TOL = 1e-12


@dataclass(frozen=True)
class CandidateSet:
    """Ordered collection of distinct candidate labels.

    The declared order is fixed and used for deterministic tie-breaking
    between otherwise equivalent ballots.
    """

    labels: tuple[str, ...]

    def __post_init__(self) -> None:
        if len(self.labels) < 1:
            raise ValidationError("candidate set must contain at least one candidate")
        if len(set(self.labels)) != len(self.labels):
            raise ValidationError(f"candidate labels are not unique: {self.labels}")

    @property
    def m(self) -> int:
        return len(self.labels)

    def __iter__(self):
        return iter(self.labels)

    def __contains__(self, label: object) -> bool:
        return label in self.labels

    def index(self, label: str) -> int:
        return self.labels.index(label)

    def ballot_sort_key(self, ballot: Iterable[str]) -> tuple[int, tuple[int, ...]]:
        """Key ordering ballots by cardinality, then candidate order."""
        idx = tuple(sorted(self.labels.index(c) for c in ballot))
        return (len(idx), idx)

    def all_ballots(self) -> list[Ballot]:
        """Every subset of the candidates, in deterministic tie-break order."""
        out: list[Ballot] = []
        for r in range(self.m + 1):
            for combo in itertools.combinations(self.labels, r):
                out.append(frozenset(combo))
        return out


@dataclass(frozen=True)
class UtilityProfile:
    """Per-candidate utility of one voter (dimensionless reward, >= 0)."""

    values: Mapping[str, float]

    def __post_init__(self) -> None:
        for label, u in self.values.items():
            if u < 0:
                raise ValidationError(f"negative utility for {label!r}: {u}")

    def of(self, label: str) -> float:
        return self.values[label]

    def of_set(self, ballot: Iterable[str]) -> float:
        return sum(self.values[c] for c in ballot)


@dataclass(frozen=True)
class Tally:
    """Current approval counts plus how much of the electorate is known.

    ``missing_ballots`` is the number of ballots still to be cast; each is
    treated as a uniformly random subset of the candidates.
    """

    counts: Mapping[str, int]
    known_ballots: int
    missing_ballots: int = 0

    def __post_init__(self) -> None:
        if self.known_ballots < 0:
            raise ValidationError("known ballot count must be >= 0")
        if self.missing_ballots < 0:
            raise ValidationError("missing ballot count must be >= 0")
        for label, n in self.counts.items():
            if n < 0 or n != int(n):
                raise ValidationError(f"approval count for {label!r} must be a non-negative integer")
            if n > self.known_ballots:
                raise ValidationError(
                    f"count for {label!r} ({n}) exceeds known ballots ({self.known_ballots})"
                )
        if self.total_approvals > self.known_ballots * len(self.counts):
            raise ValidationError("total approvals exceed known ballots x candidates")

    @property
    def total_approvals(self) -> int:
        return sum(self.counts.values())

    def of(self, label: str) -> int:
        return self.counts[label]


@dataclass(frozen=True)
class Scenario:
    """One decision situation: candidates, the voter's utilities, the
    current tally, and the number of winners to elect."""

    id: str
    candidates: CandidateSet
    utilities: UtilityProfile
    tally: Tally
    winners: int

    def __post_init__(self) -> None:
        m = self.candidates.m
        if not 1 <= self.winners <= m:
            raise ValidationError(f"k out of range: winners={self.winners}, m={m}")
        missing_u = [c for c in self.candidates if c not in self.utilities.values]
        if missing_u:
            raise ValidationError(f"utilities missing for candidates: {missing_u}")
        missing_c = [c for c in self.candidates if c not in self.tally.counts]
        if missing_c:
            raise ValidationError(f"counts missing for candidates: {missing_c}")
        extra = set(self.tally.counts) - set(self.candidates.labels)
        if extra:
            raise ValidationError(f"counts given for unknown candidates: {sorted(extra)}")

    @property
    def m(self) -> int:
        return self.candidates.m

    def utility(self, label: str) -> float:
        return self.utilities.of(label)

    def count(self, label: str) -> int:
        return self.tally.of(label)

    def condition(self, winners: int | None = None, missing: int | None = None) -> "Scenario":
        """Variant of this scenario with a different condition (k, n-missing)."""
        tally = self.tally
        if missing is not None and missing != tally.missing_ballots:
            tally = replace(tally, missing_ballots=missing)
        return replace(
            self,
            winners=self.winners if winners is None else winners,
            tally=tally,
        )

    def check_ballot(self, ballot: Iterable[str]) -> Ballot:
        b = frozenset(ballot)
        unknown = b - set(self.candidates.labels)
        if unknown:
            raise ValidationError(f"ballot approves unknown candidates: {sorted(unknown)}")
        return b


@dataclass(frozen=True)
class WinnerDistribution:
    """Per-candidate probability of being in the winning set."""

    probs: Mapping[str, float] = field(hash=False)

    def of(self, label: str) -> float:
        return self.probs[label]

    def expected_value(self, utilities: UtilityProfile) -> float:
        return sum(p * utilities.of(c) for c, p in self.probs.items())


def _cutoff_partition(counts: Mapping[str, int], k: int) -> tuple[list[str], list[str], int]:
    """Split candidates into (strictly above cutoff, tied at cutoff, open slots)."""
    m = len(counts)
    if not 1 <= k <= m:
        raise ValidationError(f"k out of range: k={k}, m={m}")
    ordered = sorted(counts.values(), reverse=True)
    cutoff = ordered[k - 1]
    above = [c for c, n in counts.items() if n > cutoff]
    tied = [c for c, n in counts.items() if n == cutoff]
    return above, tied, k - len(above)


def winner_probabilities(counts: Mapping[str, int], k: int) -> WinnerDistribution:
    """Exact election probabilities under uniform tie-breaking at the cutoff.

    Candidates scoring strictly above the k-th highest count win with
    probability 1; candidates tied at the cutoff share the remaining slots
    uniformly; everyone else has probability 0.
    """
    above, tied, slots = _cutoff_partition(counts, k)
    share = slots / len(tied)
    probs = {c: 0.0 for c in counts}
    for c in above:
        probs[c] = 1.0
    for c in tied:
        probs[c] = share
    return WinnerDistribution(probs)


def run_election(counts: Mapping[str, int], k: int, seed: int) -> frozenset[str]:
    """Resolve one concrete election, breaking cutoff ties with a seeded PRNG."""
    above, tied, slots = _cutoff_partition(counts, k)
    rng = random.Random(seed)
    return frozenset(above) | frozenset(rng.sample(sorted(tied), slots))


@lru_cache(maxsize=None)
def _completion_distribution(
    m: int, n_missing: int, include_empty: bool
) -> tuple[tuple[tuple[int, ...], float], ...]:
    """Joint distribution of per-candidate count increments contributed by
    ``n_missing`` uniformly random approval subsets.

    Exhaustive over the (2^m)^n ways the missing ballots can be cast,
    collapsed by convolution over identical increment vectors.
    """
    singles = [bits for bits in itertools.product((0, 1), repeat=m) if include_empty or any(bits)]
    p_single = 1.0 / len(singles)
    dist: dict[tuple[int, ...], float] = {(0,) * m: 1.0}
    for _ in range(n_missing):
        nxt: dict[tuple[int, ...], float] = {}
        for inc, p in dist.items():
            for bits in singles:
                key = tuple(a + b for a, b in zip(inc, bits))
                nxt[key] = nxt.get(key, 0.0) + p * p_single
        dist = nxt
    return tuple(sorted(dist.items()))


def expected_utility(scenario: Scenario, ballot: Iterable[str], *, include_empty_ballot: bool = True) -> float:
    """Exact expected utility of casting ``ballot`` in ``scenario``.

    The ballot is added to the current tally; every one of the missing
    ballots independently takes each approval subset with equal
    probability; within each completion the winning set follows
    :func:`winner_probabilities`; the expectation sums P(c elected) x u(c)
    over all candidates.

    ``include_empty_ballot`` controls whether abstention counts as a
    possible missing ballot (the default) or is excluded as a sensitivity
    check.
    """
    b = scenario.check_ballot(ballot)
    labels = scenario.candidates.labels
    base = tuple(scenario.count(c) + (1 if c in b else 0) for c in labels)
    uvec = tuple(scenario.utility(c) for c in labels)
    k = scenario.winners
    dist = _completion_distribution(scenario.m, scenario.tally.missing_ballots, include_empty_ballot)
    cache: dict[tuple[int, ...], float] = {}
    total = 0.0
    for inc, p in dist:
        final = tuple(a + d for a, d in zip(base, inc))
        ev = cache.get(final)
        if ev is None:
            probs = winner_probabilities(dict(zip(labels, final)), k).probs
            ev = sum(probs[c] * u for c, u in zip(labels, uvec))
            cache[final] = ev
        total += p * ev
    return total


def optimal_ballot(scenario: Scenario, *, include_empty_ballot: bool = True) -> tuple[Ballot, float]:
    """Exhaustive argmax of :func:`expected_utility` over all 2^m ballots.

    Ties (within :data:`UTILITY_EQ_TOL`) go to the smaller ballot, then to
    the one earliest in candidate order.
    """
    best: Ballot | None = None
    best_eu = -1.0
    for b in scenario.candidates.all_ballots():
        eu = expected_utility(scenario, b, include_empty_ballot=include_empty_ballot)
        if eu > best_eu + UTILITY_EQ_TOL:
            best, best_eu = b, eu
    assert best is not None
    return best, best_eu


def format_ballot(ballot: Iterable[str]) -> str:
    """Render a ballot as pipe-joined labels (empty string for abstention)."""
    return "|".join(sorted(ballot))
