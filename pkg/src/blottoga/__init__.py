"""Genetic-algorithm learning for Colonel Blotto games with heterogeneous valuations."""

from .analysis import (
    ExpFit,
    QuadFit,
    align_by_valuation,
    concentration_share,
    fit_exponential,
    fit_quadratic,
    pearson,
)
from .engine import (
    GAParams,
    RunTrace,
    StrategyFamily,
    crossover,
    evaluate_fitness,
    evolve,
    init_family,
    init_strategy,
    mutate,
    run,
    select_parent_indices,
)
from .equilibrium import (
    EquilibriumStrategySpec,
    continuum_allocation,
    discrete_equilibrium,
    nash_3field,
    versus_equilibrium,
)
from .game import (
    GameConfig,
    GameOutcome,
    Strategy,
    battlefield_utility,
    make_valuations,
    play_game,
    validate_strategy,
)

__version__ = "0.1.0"
