"""Public-goods model of personal-information disclosure in online comments."""

from .config import DEFAULTS, Tolerances
from .dataset import (
    ArticleAggregate,
    CommentRecord,
    DatasetError,
    aggregate_articles,
    load_records,
    simulate_dataset,
)
from .equilibrium import (
    EquilibriumReport,
    KktCertificate,
    KktVerdict,
    Method,
    best_response_dynamics,
    brute_force_pure_equilibria,
    certificate_from_profile,
    check_all_disclose,
    check_all_withhold,
    construct_threshold_equilibrium,
    nlp_objective,
    solve_equilibria,
    verify_kkt,
)
from .game import (
    DisclosureOutcome,
    EnumerationCapError,
    GameSpec,
    StrategyProfile,
    contraction_coefficients,
    expected_utility,
    marginal_utility,
    pure_payoff,
)

__version__ = "0.1.0"
