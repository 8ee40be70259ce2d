"""Independently written naive reference implementations.

These deliberately re-derive everything from first principles with
different algorithms than the package (explicit tie-break enumeration,
completion enumeration by cartesian product, direct formula
transcription) so the two sides can cross-check each other.
"""

import itertools
import math
from fractions import Fraction


def all_subsets(labels):
    for r in range(len(labels) + 1):
        for combo in itertools.combinations(labels, r):
            yield frozenset(combo)


def naive_winner_probabilities(counts, k):
    """Enumerate every tie-break selection explicitly."""
    ordered = sorted(counts.values(), reverse=True)
    cutoff = ordered[k - 1]
    above = sorted(c for c, n in counts.items() if n > cutoff)
    tied = sorted(c for c, n in counts.items() if n == cutoff)
    slots = k - len(above)
    selections = list(itertools.combinations(tied, slots))
    probs = {c: Fraction(0) for c in counts}
    for c in above:
        probs[c] = Fraction(1)
    for sel in selections:
        for c in sel:
            probs[c] += Fraction(1, len(selections))
    return probs


def naive_expected_utility(scenario, ballot, include_empty_ballot=True):
    """Average over every way the missing ballots can be cast."""
    labels = scenario.candidates.labels
    subsets = [s for s in all_subsets(labels) if include_empty_ballot or s]
    base = {c: scenario.count(c) + (1 if c in ballot else 0) for c in labels}
    total = Fraction(0)
    combos = list(itertools.product(subsets, repeat=scenario.tally.missing_ballots))
    for combo in combos:
        counts = dict(base)
        for sub in combo:
            for c in sub:
                counts[c] += 1
        probs = naive_winner_probabilities(counts, scenario.winners)
        total += sum(probs[c] * Fraction(scenario.utility(c)).limit_denominator(10**9) for c in labels)
    return float(total / len(combos))


def naive_attainability_single(count, total, m, beta):
    return (1.0 / math.pi) * math.atan(beta * (count / total - 1.0 / m)) + 0.5


def naive_attainability_multi(count, total, n_missing, m, k, beta):
    ts = list(range(total, total + n_missing * m + 1))
    acc = 0.0
    for t in ts:
        acc += (1.0 / math.pi) * math.atan(beta * (count / t - 1.0 / (m * k))) + 0.5
    return acc / len(ts)


def naive_set_attainability(scenario, ballot, beta):
    value = 1.0
    for c in scenario.candidates.labels:
        a = naive_attainability_multi(
            scenario.count(c),
            scenario.tally.total_approvals,
            scenario.tally.missing_ballots,
            scenario.m,
            scenario.winners,
            beta,
        )
        value *= a if c in ballot else 1.0 - a
    return value


def naive_au_argmax(scenario, alpha, beta, epsilon=1e-6):
    """Direct power-set argmax with smaller-then-earlier tie-breaking."""
    best = None
    best_v = None
    for b in all_subsets(scenario.candidates.labels):
        u = sum(scenario.utility(c) for c in b)
        v = (epsilon + u) ** alpha * naive_set_attainability(scenario, b, beta) ** (2.0 - alpha)
        if best_v is None or v > best_v + 1e-12 * max(1.0, abs(best_v)):
            best, best_v = b, v
    return best


def naive_take_best(scenario, x):
    ranked = sorted(scenario.candidates.labels, key=lambda c: -scenario.utility(c))
    return frozenset(ranked[:x])
