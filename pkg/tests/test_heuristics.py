"""Voter-model behavior: attainability, AU, AUT, complete, take-X-best."""

import math

import pytest

from avlab.core import CandidateSet, Scenario, Tally, UtilityProfile
from avlab.errors import UtilityTieError, ValidationError
from avlab.heuristics import (
    ApprovalCountSet,
    ModelParams,
    attainability_multi,
    attainability_single,
    au_ballot,
    au_score,
    au_scores,
    aut_ballot,
    complete_ballot,
    set_attainability,
    take_x_best,
    threshold_ballot,
)

from oracles import (
    naive_attainability_multi,
    naive_attainability_single,
    naive_au_argmax,
    naive_set_attainability,
    naive_take_best,
)


class TestAttainabilitySingle:
    def test_uniform_share_is_half(self):
        tally = Tally(counts={"A": 2, "B": 2, "C": 2, "D": 2, "E": 2}, known_ballots=10)
        for beta in (1, 5, 50):
            assert attainability_single("A", tally, 5, beta) == pytest.approx(0.5, abs=1e-15)

    def test_leader_value_frozen(self, scn_a):
        # s=4, r=16, m=5, beta=8 -> arctan(0.4)/pi + 0.5
        got = attainability_single("D", scn_a.tally, 5, 8.0)
        assert got == pytest.approx(0.6211189415908434, abs=1e-15)
        assert got == pytest.approx(naive_attainability_single(4, 16, 5, 8.0), abs=1e-15)

    def test_large_beta_limits(self, scn_a):
        # leader approaches 1, trailers approach 0, both monotonically
        prev_lead, prev_trail = 0.5, 0.5
        for beta in (1, 4, 16, 64, 256, 1024):
            lead = attainability_single("D", scn_a.tally, 5, beta)
            trail = attainability_single("A", scn_a.tally, 5, beta)
            assert lead > prev_lead and trail < prev_trail
            prev_lead, prev_trail = lead, trail
        assert prev_lead > 0.95 and prev_trail < 0.05

    def test_strictly_inside_unit_interval(self, scn_a):
        for c in "ABCDE":
            a = attainability_single(c, scn_a.tally, 5, 32.0)
            assert 0.0 < a < 1.0

    def test_zero_approvals_rejected(self):
        tally = Tally(counts={"A": 0, "B": 0}, known_ballots=0)
        with pytest.raises(ValidationError, match="r = 0"):
            attainability_single("A", tally, 2, 1.0)


class TestAttainabilityMulti:
    def test_reduces_to_single_winner_form(self, scn_a, scn_b):
        for scn in (scn_a, scn_b):
            for c in scn.candidates:
                for beta in (1.0, 2.0, 7.5, 32.0):
                    multi = attainability_multi(c, scn.tally, scn.m, 1, beta)
                    single = attainability_single(c, scn.tally, scn.m, beta)
                    assert multi == pytest.approx(single, abs=1e-15)

    def test_six_term_mean_with_one_missing(self, scn_a):
        from dataclasses import replace

        tally = replace(scn_a.tally, missing_ballots=1)
        for c in scn_a.candidates:
            got = attainability_multi(c, tally, 5, 1, 8.0)
            want = naive_attainability_multi(scn_a.count(c), 16, 1, 5, 1, 8.0)
            assert got == pytest.approx(want, abs=1e-15)
        assert attainability_multi("D", tally, 5, 1, 8.0) == pytest.approx(0.544542376, abs=1e-9)

    def test_uniform_share_with_k_winners(self):
        # m = 5, k = 5: a candidate with s/t = 1/25 sits exactly at the
        # uniform share, so every arctan term vanishes
        tally = Tally(counts={"A": 1, "B": 6, "C": 6, "D": 6, "E": 6}, known_ballots=10)
        assert tally.total_approvals == 25
        assert attainability_multi("A", tally, 5, 5, 3.0) == pytest.approx(0.5, abs=1e-15)

    def test_approval_count_set(self):
        tally = Tally(counts={"A": 2, "B": 2}, known_ballots=4, missing_ballots=3)
        acs = ApprovalCountSet.for_tally(tally, 2)
        assert list(acs) == [4, 5, 6, 7, 8, 9, 10]
        assert len(acs) == 3 * 2 + 1

    def test_zero_total_rejected(self):
        tally = Tally(counts={"A": 0, "B": 0}, known_ballots=0, missing_ballots=1)
        with pytest.raises(ValidationError, match="denominator"):
            attainability_multi("A", tally, 2, 1, 1.0)


class TestSetAttainability:
    def test_empty_ballot_is_product_of_complements(self, scn_b):
        cond = scn_b.condition(winners=1, missing=0)
        want = 1.0
        for c in cond.candidates:
            want *= 1.0 - attainability_single(c, cond.tally, 5, 2.0)
        assert set_attainability(frozenset(), cond, 2.0) == pytest.approx(want, abs=1e-15)

    def test_full_ballot_is_product_of_attainabilities(self, scn_b):
        cond = scn_b.condition(winners=1, missing=0)
        want = 1.0
        for c in cond.candidates:
            want *= attainability_single(c, cond.tally, 5, 2.0)
        assert set_attainability(frozenset("ABCDE"), cond, 2.0) == pytest.approx(want, abs=1e-15)

    def test_singleton_product_frozen(self, scn_b):
        cond = scn_b.condition(winners=1, missing=0)
        got = set_attainability({"D"}, cond, 2.0)
        assert got == pytest.approx(0.030198325925745548, abs=1e-15)
        assert got == pytest.approx(naive_set_attainability(cond, {"D"}, 2.0), abs=1e-15)


class TestAuBallot:
    def test_attainability_only_predicts_leader(self, scn_a):
        cond = scn_a.condition(winners=1, missing=0)
        for beta in range(1, 33):
            assert au_ballot(cond, ModelParams(alpha=0.0, beta=beta)) == {"D"}

    def test_utility_only_predicts_positive_set(self, scn_a):
        # {A,B,C,E} ties {A,B,C,D,E} on utility; smaller ballot wins
        cond = scn_a.condition(winners=1, missing=0)
        for beta in range(1, 33):
            assert au_ballot(cond, ModelParams(alpha=2.0, beta=beta)) == set("ABCE")

    def test_balanced_alpha_beta_runs(self, scn_a):
        cond = scn_a.condition(winners=1, missing=0)
        runs = {
            1: set("ABCDE"),
            2: set("ABDE"),
            8: set("ABDE"),
            9: set("BDE"),
            21: set("BDE"),
            22: set("DE"),
            32: set("DE"),
        }
        for beta, want in runs.items():
            assert au_ballot(cond, ModelParams(alpha=1.0, beta=beta)) == want

    def test_matches_naive_power_set_argmax(self, scn_a, scn_b):
        for scn in (scn_a, scn_b):
            for k, miss in [(1, 0), (2, 1), (3, 3)]:
                cond = scn.condition(winners=k, missing=miss)
                for alpha in (0.0, 1.0, 2.0):
                    for beta in (1.0, 3.0, 9.0, 27.0):
                        got = au_ballot(cond, ModelParams(alpha=alpha, beta=beta))
                        assert got == naive_au_argmax(cond, alpha, beta)


class TestAuScore:
    def test_alpha_zero_ignores_utility(self, scn_b):
        cond = scn_b.condition(winners=1, missing=0)
        params = ModelParams(alpha=0.0, beta=2.0)
        # A, B, D, E share the same count, so their scores coincide even
        # though their utilities differ wildly
        scores = au_scores(cond, params)
        assert scores["A"] == pytest.approx(scores["B"], abs=1e-15)
        assert scores["A"] == pytest.approx(scores["D"], abs=1e-15)
        assert scores["A"] == pytest.approx(scores["E"], abs=1e-15)
        assert scores["A"] == pytest.approx(set_attainability({"A"}, cond, 2.0) ** 2, abs=1e-15)

    def test_zero_utility_alpha_two_gives_epsilon_squared(self, scn_b):
        cond = scn_b.condition(winners=1, missing=0)
        params = ModelParams(alpha=2.0, beta=2.0, epsilon=1e-6)
        assert au_score("E", cond, params) == pytest.approx(1e-12, rel=1e-9)

    def test_worked_example_scores(self, scn_b):
        cond = scn_b.condition(winners=1, missing=0)
        params = ModelParams(alpha=1.0, beta=2.0)
        scores = au_scores(cond, params)
        # frozen from the independent hand expansion of the products
        assert scores["D"] == pytest.approx(0.007549611680, abs=1e-11)
        assert scores["A"] == pytest.approx(0.001509946495, abs=1e-11)
        assert scores["B"] == pytest.approx(0.003019862791, abs=1e-11)
        assert scores["C"] == pytest.approx(0.000354026373, abs=1e-11)
        assert scores["D"] >= 0.007
        assert 0.001 <= scores["A"] < 0.007
        assert 0.001 <= scores["B"] < 0.007
        assert all(s > 0 for s in scores.values())


class TestAutBallot:
    def test_worked_example_tau_high(self, scn_b):
        cond = scn_b.condition(winners=1, missing=0)
        assert aut_ballot(cond, ModelParams(alpha=1.0, beta=2.0, tau=0.007)) == {"D"}

    def test_worked_example_tau_low(self, scn_b):
        cond = scn_b.condition(winners=1, missing=0)
        assert aut_ballot(cond, ModelParams(alpha=1.0, beta=2.0, tau=0.001)) == {"A", "B", "D"}

    def test_zero_threshold_approves_everyone(self, scn_a, scn_b):
        for scn in (scn_a, scn_b):
            cond = scn.condition(winners=2, missing=1)
            assert aut_ballot(cond, ModelParams(alpha=1.0, beta=5.0, tau=0.0)) == set("ABCDE")

    def test_antitone_in_tau(self, scn_b):
        cond = scn_b.condition(winners=1, missing=0)
        taus = [0.0, 0.0005, 0.001, 0.003, 0.007, 0.02, 0.1]
        for beta in (1.0, 2.0, 16.0):
            ballots = [aut_ballot(cond, ModelParams(alpha=1.0, beta=beta, tau=t)) for t in taus]
            for small, large in zip(ballots, ballots[1:]):
                assert large <= small

    def test_threshold_semantics_invariant_under_monotone_transform(self, scn_b):
        cond = scn_b.condition(winners=1, missing=0)
        scores = au_scores(cond, ModelParams(alpha=1.0, beta=2.0))
        for tau in (0.001, 0.007, 0.03):
            direct = threshold_ballot(scores, tau)
            cubed = threshold_ballot({c: s**3 for c, s in scores.items()}, tau**3)
            logged = threshold_ballot({c: math.log(s) for c, s in scores.items()}, math.log(tau))
            assert direct == cubed == logged

    def test_crossovers_at_low_threshold(self, scn_b):
        # tau = 0.001 predictions as beta sweeps the grid: A falls out at
        # beta = 21 and the current leader C enters at beta = 26
        cond = scn_b.condition(winners=1, missing=0)
        by_beta = {
            beta: aut_ballot(cond, ModelParams(alpha=1.0, beta=beta, tau=0.001))
            for beta in range(1, 33)
        }
        for beta in range(1, 21):
            assert by_beta[beta] == {"A", "B", "D"}
        for beta in range(21, 26):
            assert by_beta[beta] == {"B", "D"}
        for beta in range(26, 33):
            assert by_beta[beta] == {"B", "C", "D"}


class TestSimpleHeuristics:
    def test_complete_ballots(self, scn_a, scn_b):
        assert complete_ballot(scn_a) == set("ABCE")
        assert complete_ballot(scn_b) == set("ABCD")

    def test_complete_all_zero(self):
        scn = Scenario(
            id="z",
            candidates=CandidateSet(("A", "B")),
            utilities=UtilityProfile({"A": 0.0, "B": 0.0}),
            tally=Tally(counts={"A": 1, "B": 1}, known_ballots=2),
            winners=1,
        )
        assert complete_ballot(scn) == frozenset()

    def test_take_x_examples(self, scn_a, scn_b):
        assert take_x_best(scn_b, 2) == {"D", "B"}
        assert take_x_best(scn_a, 3) == {"E", "B", "A"}
        assert take_x_best(scn_b, 1) == {"D"}

    def test_take_x_matches_naive_sort(self, scn_a, scn_b):
        for scn in (scn_a, scn_b):
            for x in range(1, 6):
                assert take_x_best(scn, x) == naive_take_best(scn, x)

    def test_nesting(self, scn_a):
        for x in range(1, 5):
            assert take_x_best(scn_a, x) < take_x_best(scn_a, x + 1)

    def test_sincerity(self, scn_a, scn_b):
        # approving a candidate implies approving everyone strictly preferred
        for scn in (scn_a, scn_b):
            for x in range(1, 6):
                ballot = take_x_best(scn, x)
                low = min(scn.utility(c) for c in ballot)
                for c in scn.candidates:
                    if scn.utility(c) > low:
                        assert c in ballot

    def test_complete_equals_take_positive_count(self, scn_a, scn_b):
        for scn in (scn_a, scn_b):
            positives = sum(1 for c in scn.candidates if scn.utility(c) > 0)
            assert complete_ballot(scn) == take_x_best(scn, positives)

    def test_boundary_tie_raises(self):
        scn = Scenario(
            id="tie",
            candidates=CandidateSet(("A", "B", "C")),
            utilities=UtilityProfile({"A": 0.5, "B": 0.5, "C": 0.1}),
            tally=Tally(counts={"A": 1, "B": 1, "C": 1}, known_ballots=3),
            winners=1,
        )
        with pytest.raises(UtilityTieError, match="tied"):
            take_x_best(scn, 1)
        # no boundary tie at x = 2: both tied candidates are inside
        assert take_x_best(scn, 2) == {"A", "B"}

    def test_x_out_of_range(self, scn_a):
        with pytest.raises(ValidationError, match="out of range"):
            take_x_best(scn_a, 0)
        with pytest.raises(ValidationError, match="out of range"):
            take_x_best(scn_a, 6)


class TestModelParams:
    def test_validation(self):
        with pytest.raises(ValidationError):
            ModelParams(alpha=2.5)
        with pytest.raises(ValidationError):
            ModelParams(beta=0.0)
        with pytest.raises(ValidationError):
            ModelParams(tau=-0.1)
        with pytest.raises(ValidationError):
            ModelParams(epsilon=0.0)
