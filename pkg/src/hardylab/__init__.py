"""hardylab: characterization constants for weighted iterated Hardy inequalities."""

from .characterization import (
    ConditionReport,
    Regime,
    classify,
    continuous_constants,
    discrete_constants,
    local_hardy_constant,
    monotone_constants,
)
from .discretization import (
    DiscretizingSequence,
    LEMMA_KINDS,
    NonNegSequence,
    build_discretizing_sequence,
    lemma_pair,
)
from .errors import (
    ConfigError,
    DiscretizationError,
    ExponentError,
    HardyLabError,
    IntervalError,
    MonotonicityError,
    NotGeometricError,
    TruncationDominatedError,
    WeightDomainError,
)
from .harness import (
    CampaignReport,
    ExperimentConfig,
    ExperimentResult,
    parse_config,
    run_campaign,
    run_experiment,
    sample_lemma_pair,
    sweep_campaign,
)
from .measure import (
    Exponents,
    Interval,
    PiecewiseConstant,
    PowerLaw,
    Tabulated,
    Weight,
    ess_sup,
    integrate,
    parse_weight,
    unit_weight,
    vp,
    wstar,
)
from .oracle import (
    OracleEstimate,
    TestFunction,
    best_constant_search,
    discrete_best_constant,
    lhs_iterated,
    lhs_kernel_q1,
    monotone_pair_check,
    rhs_norm,
)

__version__ = "0.1.0"

__all__ = [
    "ConditionReport", "Regime", "classify", "continuous_constants",
    "discrete_constants", "local_hardy_constant", "monotone_constants",
    "DiscretizingSequence", "LEMMA_KINDS", "NonNegSequence",
    "build_discretizing_sequence", "lemma_pair",
    "ConfigError", "DiscretizationError", "ExponentError", "HardyLabError",
    "IntervalError", "MonotonicityError", "NotGeometricError",
    "TruncationDominatedError", "WeightDomainError",
    "CampaignReport", "ExperimentConfig", "ExperimentResult", "parse_config",
    "run_campaign", "run_experiment", "sample_lemma_pair", "sweep_campaign",
    "Exponents", "Interval", "PiecewiseConstant", "PowerLaw", "Tabulated",
    "Weight", "ess_sup", "integrate", "parse_weight", "unit_weight", "vp",
    "wstar",
    "OracleEstimate", "TestFunction", "best_constant_search",
    "discrete_best_constant", "lhs_iterated", "lhs_kernel_q1",
    "monotone_pair_check", "rhs_norm",
    "__version__",
]
