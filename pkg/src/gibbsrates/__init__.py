"""Convergence-rate laboratory for two-component Gibbs samplers.

The package computes both sides of a sharp contrast: generic
drift/minorization certificates that demand ~10^34 steps, and exact
eigenvalue analysis showing the same chains mix in a few hundred — with
every analytic bound cross-checked against exact finite-state computation.
"""
from .bounds import (
    AZUMA_RATE,
    BoundCurve,
    DriftMinorization,
    RosenthalGridCell,
    RosenthalGridResult,
    RosenthalIngredients,
    RosenthalParams,
    SYSTEMATIC_ORDERS,
    chisq_bound_pg,
    chisq_min_steps_pg,
    random_scan_lower,
    random_scan_rate,
    random_scan_upper,
    random_scan_validity_threshold,
    rosenthal_bound,
    rosenthal_grid_optimize,
    rosenthal_ingredients,
    rosenthal_min_steps,
    scan_time_ratio,
    systematic_rate,
    systematic_upper,
    systematic_validity_threshold,
    two_term_bound,
    two_term_min_steps,
)
from .errors import (
    ConvergenceError,
    EmptyFeasibleGridError,
    NoSolutionError,
    NonContractingError,
    NonContractingWarning,
    NumericsError,
    ParameterError,
    TruncationError,
    UnsupportedPriorError,
    ValidityThresholdError,
)
from .families import (
    BetaBinomialFamily,
    PoissonGammaFamily,
    SpectralData,
    SpectralLevel,
    bb_drift_minorization,
    bb_eigenfunction_phi,
    bb_spectral_data,
    bb_xchain,
    pg_geometric_reference,
    pg_spectral_data,
    pg_xchain,
)
from .numerics import (
    Distribution,
    GeometricTerm,
    LogMagnitude,
    StepCount,
    StochasticMatrix,
    as_geometric_term,
    binomial_tail_le,
    log1mexp,
    log_sum_terms,
    matrix_power_tv,
    min_steps_geometric,
    reversible_spectrum,
    round_sig,
    stationary_distribution,
    tv_distance,
)
from .operators import (
    AlphaMultiplier,
    CollapseCensus,
    JointState,
    ScanStrategy,
    Word,
    alpha_multipliers,
    collapse_census,
    eigenfunction_decay,
    run_trajectory,
    step,
    word_reduce,
)
from .scan_compare import (
    ComparisonReport,
    ComparisonRow,
    DecayCheckRow,
    PgDemoRow,
    PgMixingDemo,
    WorstStart,
    compare,
    exact_tv_curve,
    first_crossing,
    pg_mixing_demo,
    rebuild_random_scan_upper,
    worst_start_search,
)
from .spectral import (
    CouplingRoots,
    GapMaximum,
    ScanLevel,
    ScanSpectrum,
    alpha_scan_eigenvalues,
    argmax_gap,
    coupling_u,
    eigen_lower_bound,
    scan_eigenvalue_pair,
    spectral_gap,
)

__version__ = "0.1.0"

__all__ = [
    "AZUMA_RATE",
    "AlphaMultiplier",
    "BetaBinomialFamily",
    "BoundCurve",
    "CollapseCensus",
    "ComparisonReport",
    "ComparisonRow",
    "ConvergenceError",
    "CouplingRoots",
    "DecayCheckRow",
    "Distribution",
    "DriftMinorization",
    "EmptyFeasibleGridError",
    "GapMaximum",
    "GeometricTerm",
    "JointState",
    "LogMagnitude",
    "NoSolutionError",
    "NonContractingError",
    "NonContractingWarning",
    "NumericsError",
    "ParameterError",
    "PgDemoRow",
    "PgMixingDemo",
    "PoissonGammaFamily",
    "RosenthalGridCell",
    "RosenthalGridResult",
    "RosenthalIngredients",
    "RosenthalParams",
    "SYSTEMATIC_ORDERS",
    "ScanLevel",
    "ScanSpectrum",
    "ScanStrategy",
    "SpectralData",
    "SpectralLevel",
    "StepCount",
    "StochasticMatrix",
    "TruncationError",
    "UnsupportedPriorError",
    "ValidityThresholdError",
    "Word",
    "WorstStart",
    "alpha_multipliers",
    "alpha_scan_eigenvalues",
    "argmax_gap",
    "as_geometric_term",
    "bb_drift_minorization",
    "bb_eigenfunction_phi",
    "bb_spectral_data",
    "bb_xchain",
    "binomial_tail_le",
    "chisq_bound_pg",
    "chisq_min_steps_pg",
    "collapse_census",
    "compare",
    "coupling_u",
    "eigen_lower_bound",
    "eigenfunction_decay",
    "exact_tv_curve",
    "first_crossing",
    "log1mexp",
    "log_sum_terms",
    "matrix_power_tv",
    "min_steps_geometric",
    "pg_geometric_reference",
    "pg_mixing_demo",
    "pg_spectral_data",
    "pg_xchain",
    "random_scan_lower",
    "random_scan_rate",
    "random_scan_upper",
    "random_scan_validity_threshold",
    "rebuild_random_scan_upper",
    "reversible_spectrum",
    "rosenthal_bound",
    "rosenthal_grid_optimize",
    "rosenthal_ingredients",
    "rosenthal_min_steps",
    "round_sig",
    "run_trajectory",
    "scan_eigenvalue_pair",
    "scan_time_ratio",
    "spectral_gap",
    "stationary_distribution",
    "step",
    "systematic_rate",
    "systematic_upper",
    "systematic_validity_threshold",
    "tv_distance",
    "two_term_bound",
    "two_term_min_steps",
    "word_reduce",
    "worst_start_search",
]
