"""Finite-key analysis and key-rate simulation for QKD with correlated leaky sources."""

from .bounds import (
    LogEpsilon,
    cher_lower_expectation,
    cher_lower_observation,
    cher_upper_expectation,
    cher_upper_observation,
    ln_definetti_factor,
)
from .channel import ChannelParams, ExpectedCounts, expected_statistics, success_probability
from .framework import (
    BudgetInfeasible,
    ChainBudget,
    binary_entropy,
    chain_penalty_bits,
    compose_partition_entropies,
    composed_min_entropy,
    epsilon_hat,
)
from .security import (
    KeyRateResult,
    PhaseCoefficients,
    SecurityBudget,
    evaluate_point,
    key_length,
    phase_coefficients,
    phase_error_count,
    phase_error_probability,
    z_count_lower,
)
from .source import (
    EquivalentSource,
    NoEquivalentSource,
    SourceCharacterization,
    correlation_adjusted_vacuum,
    equivalent_intensity,
    vacuum_bounds_from_intensity,
)

__version__ = "0.1.0"
