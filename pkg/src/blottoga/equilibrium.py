"""Analytical reference strategies and a scorer against them.

With uniform(0, 1) valuations the symmetric continuum equilibrium spends
resources in proportion to the squared valuation.  On a finite grid the
same rule is applied as an exact share ``v**2 / sum(v**2)`` so that the
budget is met.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .errors import DegenerateError, DimensionError, DomainError
from .game import GameConfig, TIE_TOL, match_utility, score_matrices

KINDS = ("continuum-uniform", "discrete-grid", "nash-3field")


@dataclass(frozen=True)
class EquilibriumStrategySpec:
    kind: str
    budget: float
    grid: Optional[tuple] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown equilibrium kind {self.kind!r}")
        if not self.budget > 0:
            raise DomainError("budget must be positive")
        if self.grid is not None:
            object.__setattr__(self, "grid", tuple(float(v) for v in self.grid))
        if self.kind in ("discrete-grid", "continuum-uniform"):
            if self.grid is None:
                raise DomainError(f"{self.kind} needs a valuation grid")
            if self.kind == "discrete-grid" and not any(v > 0 for v in self.grid):
                raise DegenerateError("grid needs at least one positive valuation")

    def strategy(self) -> np.ndarray:
        if self.kind == "nash-3field":
            return nash_3field(self.budget)
        if self.kind == "discrete-grid":
            return discrete_equilibrium(self.grid, self.budget)
        # density 3 v^2 n carried by a mass of 1/k per grid point
        grid = np.asarray(self.grid)
        return np.array([continuum_allocation(v, self.budget) for v in grid]) / grid.shape[0]


def continuum_allocation(v: float, budget: float) -> float:
    """Equilibrium allocation density at valuation ``v``: ``budget * 3 v**2``."""
    if not 0 <= v <= 1:
        raise DomainError(f"valuation {v!r} outside [0, 1]")
    if not budget > 0:
        raise DomainError("budget must be positive")
    return budget * 3.0 * v * v


def discrete_equilibrium(grid, budget: float) -> np.ndarray:
    v = np.asarray(grid, dtype=float)
    sq = v * v
    total = sq.sum()
    if not total > 0:
        raise DegenerateError("all-zero valuation grid")
    return budget * sq / total


def nash_3field(budget: float) -> np.ndarray:
    """Pure symmetric equilibrium of the win/lose 3-battlefield game: all on the last one."""
    if not budget > 0:
        raise DomainError("budget must be positive")
    return np.array([0.0, 0.0, float(budget)])


class VersusEquilibrium(NamedTuple):
    score_diff: np.ndarray  # score(learned) - score(equilibrium), per iteration
    utility: np.ndarray  # win/tie/loss utility of the learned strategy


def default_spec(config: GameConfig, valuations, player: str = "A") -> EquilibriumStrategySpec:
    return EquilibriumStrategySpec("discrete-grid", config.budget(player), tuple(valuations))


def versus_equilibrium(trace, spec: Optional[EquilibriumStrategySpec] = None,
                       config: Optional[GameConfig] = None, player: str = "A",
                       use_average: bool = True) -> VersusEquilibrium:
    """Score a player's learned strategy at every iteration against an equilibrium strategy.

    Both sides are valued with the player's own valuations.  By default the
    running average-best strategy is scored; ``use_average=False`` scores the
    instantaneous best instead.
    """
    config = config or trace.config
    V = trace.valuations(player)
    if spec is None:
        spec = default_spec(config, V, player)
    eq = spec.strategy()
    series = trace[player].avg_best if use_average else trace[player].best
    if series.shape[0] == 0:
        return VersusEquilibrium(np.empty(0), np.empty(0))
    if series.shape[1] != eq.shape[0] or eq.shape[0] != V.shape[0]:
        raise DimensionError("trace and equilibrium strategy lengths differ")
    S_own, S_eq = score_matrices(series, eq[None, :], V, V)
    diff = S_own[:, 0] - S_eq[:, 0]
    diff = np.where(np.abs(diff) <= TIE_TOL, 0.0, diff)
    return VersusEquilibrium(diff, match_utility(S_own[:, 0], S_eq[:, 0]))
