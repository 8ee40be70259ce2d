"""avlab: approval-voting behavior lab.

Election mechanics with exact winner probabilities under missing-ballot
uncertainty, heuristic voter models (complete, take-X-best, AU, AUT), an
exhaustive optimal-ballot baseline, grid-search model fitting with
leave-one-out evaluation, and an HTTP experiment service for running the
voting game with live participants.
"""

__version__ = "0.1.0"

from .core import (
    Ballot,
    CandidateSet,
    Scenario,
    Tally,
    UtilityProfile,
    WinnerDistribution,
    expected_utility,
    format_ballot,
    optimal_ballot,
    run_election,
    winner_probabilities,
)
from .errors import IncompleteConditionsError, UtilityTieError, ValidationError
from .fitting import (
    AccuracyReport,
    CohortSpec,
    FitResult,
    Model,
    ResponseRecord,
    evaluate_cohort,
    fit_au,
    fit_aut,
    generate_synthetic_cohort,
    loo_evaluate,
)
from .heuristics import (
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

__all__ = [name for name in dir() if not name.startswith("_")]
