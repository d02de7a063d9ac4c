"""Genetic-algorithm learning for the Blotto game.

Each player keeps a family of ``p`` allocation vectors.  One iteration
scores every member against the opponent's whole family, then builds the
next family from the elite, a mutated copy of the elite, and ``p - 2``
children obtained by fitness-proportional tournament, weighted-average
crossover and mutation.  Both families advance from the same time-t state.

Allocation vectors are plain ``numpy`` arrays inside the engine; a family
stores them as the rows of a ``(p, k)`` matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Dict, Optional

import numpy as np

from .errors import DimensionError, DomainError
from .game import (
    PLAYERS,
    GameConfig,
    Strategy,
    make_valuations,
    match_utility,
    score_matrices,
)

EPSILON_MODES = ("uniform", "scaled")


@dataclass(frozen=True)
class GAParams:
    """Evolution settings.

    ``mu=None`` means the default ``k / p`` (clamped to 1).  ``epsilon_mode``
    picks the size of the budget-preserving noise transfer: ``uniform`` draws
    it from U(0, 1) resource units, ``scaled`` from U(0, budget / k).
    """

    p: int = 50
    mu: Optional[float] = None
    epsilon_mode: str = "uniform"
    T: int = 1000
    unit: float = 1.0
    noise_only_on_mutation: bool = False

    def __post_init__(self):
        if int(self.p) != self.p or self.p < 3:
            raise DomainError(f"p must be an integer >= 3, got {self.p!r}")
        if self.mu is not None and not 0 <= self.mu <= 1:
            raise DomainError(f"mu must lie in [0, 1], got {self.mu!r}")
        if self.epsilon_mode not in EPSILON_MODES:
            raise DomainError(f"unknown epsilon_mode {self.epsilon_mode!r}")
        if int(self.T) != self.T or self.T < 0:
            raise DomainError(f"T must be a non-negative integer, got {self.T!r}")
        if not self.unit > 0:
            raise DomainError(f"unit must be > 0, got {self.unit!r}")

    def mutation_rate(self, k: int) -> float:
        if self.mu is not None:
            return float(self.mu)
        return min(1.0, k / self.p)

    def resolved(self, k: int) -> "GAParams":
        return replace(self, mu=self.mutation_rate(k))


@dataclass
class StrategyFamily:
    """One generation of ``p`` strategies belonging to ``owner``."""

    members: np.ndarray
    owner: str
    generation_index: int = 0

    def __post_init__(self):
        self.members = np.asarray(self.members, dtype=float)
        if self.members.ndim != 2:
            raise DimensionError("family members must form a (p, k) matrix")
        if self.owner not in PLAYERS:
            raise DomainError(f"unknown owner {self.owner!r}")

    def __len__(self):
        return self.members.shape[0]

    def __getitem__(self, i) -> Strategy:
        return Strategy(self.members[i], self.owner)

    @property
    def k(self) -> int:
        return self.members.shape[1]


@dataclass
class PlayerTrace:
    best: np.ndarray  # (T, k) best member at each iteration
    fitness: np.ndarray  # (T,) its fitness
    avg_best: np.ndarray  # (T, k) running mean of best[0..t]


@dataclass
class RunTrace:
    config: GameConfig
    params: GAParams
    V_A: np.ndarray
    V_B: np.ndarray
    initial: Dict[str, StrategyFamily]
    final: Dict[str, StrategyFamily]
    players: Dict[str, PlayerTrace] = field(default_factory=dict)

    def __getitem__(self, player: str) -> PlayerTrace:
        return self.players[player]

    @property
    def iterations(self) -> int:
        return self.players["A"].best.shape[0]

    def valuations(self, player: str) -> np.ndarray:
        return self.V_A if player == "A" else self.V_B

    def opponent_valuations(self, player: str) -> np.ndarray:
        return self.V_B if player == "A" else self.V_A


def _increments(budget: float, unit: float) -> int:
    return max(1, math.ceil(budget / unit - 1e-9))


def init_strategy(budget: float, k: int, unit: float, rng: np.random.Generator) -> np.ndarray:
    """Random allocation built by dropping ``unit`` increments on uniform battlefields.

    The last increment is cut short so the allocation spends the budget exactly.
    """
    if not budget > 0 or not unit > 0:
        raise DomainError("budget and unit must be positive")
    m = _increments(budget, unit)
    idx = rng.integers(k, size=m)
    x = np.bincount(idx[:-1], minlength=k).astype(float) * unit
    x[idx[-1]] += budget - (m - 1) * unit
    return x


def init_family(config: GameConfig, params: GAParams, rng: np.random.Generator,
                owner: str = "A") -> StrategyFamily:
    budget = config.budget(owner)
    rows = [init_strategy(budget, config.k, params.unit, rng) for _ in range(params.p)]
    return StrategyFamily(np.vstack(rows), owner, 0)


def evaluate_fitness(family, opp_family, V_own, V_opp, mode: str = "match-win") -> np.ndarray:
    """Total utility of each member over games against every opponent member."""
    own = family.members if isinstance(family, StrategyFamily) else np.asarray(family, dtype=float)
    opp = opp_family.members if isinstance(opp_family, StrategyFamily) else np.asarray(opp_family, dtype=float)
    S_own, S_opp = score_matrices(own, opp, V_own, V_opp)
    if mode == "match-win":
        return match_utility(S_own, S_opp).sum(axis=1)
    if mode == "score-sum":
        return S_own.sum(axis=1)
    raise DomainError(f"unknown fitness mode {mode!r}")


def selection_probabilities(fitness) -> np.ndarray:
    f = np.asarray(fitness, dtype=float)
    total = f.sum()
    if total <= 0:
        return np.full(f.shape[0], 1.0 / f.shape[0])
    return f / total


def select_parent_indices(fitness, rng: np.random.Generator):
    """Draw three members fitness-proportionally and keep the two fittest.

    Draws are with replacement, so both parents may be the same member.
    """
    f = np.asarray(fitness, dtype=float)
    if f.shape[0] < 3:
        raise DimensionError("tournament needs at least 3 members")
    cum = np.cumsum(f)
    total = cum[-1]
    if total <= 0:
        drawn = rng.integers(f.shape[0], size=3)
    else:
        drawn = np.searchsorted(cum, rng.random(3) * total, side="right")
        # guards u*total landing on the final edge through rounding
        np.minimum(drawn, f.shape[0] - 1, out=drawn)
    drawn = drawn.tolist()
    worst = min(range(3), key=lambda j: (f[drawn[j]], drawn[j]))
    a, b = [drawn[j] for j in range(3) if j != worst]
    return a, b


def crossover(parent_a, parent_b, rng: Optional[np.random.Generator] = None,
              omega: Optional[float] = None) -> np.ndarray:
    """Child = omega * a + (1 - omega) * b with one omega ~ U(0, 1) per child."""
    a = np.asarray(parent_a, dtype=float)
    b = np.asarray(parent_b, dtype=float)
    if a.shape != b.shape:
        raise DimensionError("parents differ in length")
    if omega is None:
        omega = rng.random()
    return omega * a + (1.0 - omega) * b


def epsilon_transfer(x, eps: float, source: int, target: int) -> np.ndarray:
    """Move ``eps`` from ``source`` to ``target``, never below zero at the source."""
    out = np.array(x, dtype=float)
    amount = min(eps, out[source])
    out[source] -= amount
    out[target] += amount
    return out


def _draw_epsilon(rng, budget, k, epsilon_mode):
    eps = rng.random()
    if epsilon_mode == "scaled":
        eps *= budget / k
    return eps


def _noise(x, budget, k, rng, epsilon_mode):
    if k < 2:
        return np.array(x, dtype=float)
    eps = _draw_epsilon(rng, budget, k, epsilon_mode)
    i = int(rng.integers(k))
    j = int(rng.integers(k - 1))
    if j >= i:
        j += 1
    return epsilon_transfer(x, eps, i, j)


def mutate(child, mu: float, budget: float, k: int, unit: float, rng: np.random.Generator,
           epsilon_mode: str = "uniform", noise_only_on_mutation: bool = False) -> np.ndarray:
    """Reset to a fresh random allocation with probability ``mu``, else add transfer noise.

    With ``noise_only_on_mutation`` the noise is applied only right after a
    reset and surviving children pass through unchanged.
    """
    delta = rng.random()
    if delta <= mu:
        fresh = init_strategy(budget, k, unit, rng)
        if noise_only_on_mutation:
            return _noise(fresh, budget, k, rng, epsilon_mode)
        return fresh
    if noise_only_on_mutation:
        return np.array(child, dtype=float)
    return _noise(child, budget, k, rng, epsilon_mode)


def evolve(family: StrategyFamily, opp_family: StrategyFamily, fitness, config: GameConfig,
           params: GAParams, rng: np.random.Generator) -> StrategyFamily:
    """Next generation: elite, mutated elite, then ``p - 2`` bred children."""
    del opp_family  # fitness already carries everything needed about the opponent
    fitness = np.asarray(fitness, dtype=float)
    p, k = family.members.shape
    if fitness.shape[0] != p:
        raise DimensionError("fitness length differs from family size")
    budget = config.budget(family.owner)
    mu = params.mutation_rate(k)
    args = (mu, budget, k, params.unit, rng, params.epsilon_mode, params.noise_only_on_mutation)

    X = family.members
    elite = X[int(np.argmax(fitness))]
    out = np.empty_like(X)
    out[0] = elite
    out[1] = mutate(elite, *args)
    for row in range(2, p):
        a, b = select_parent_indices(fitness, rng)
        out[row] = mutate(crossover(X[a], X[b], rng), *args)
    return StrategyFamily(out, family.owner, family.generation_index + 1)


def run(config: GameConfig, params: GAParams) -> RunTrace:
    """Co-evolve both families for ``params.T`` iterations from ``config.seed``."""
    rng = np.random.default_rng(config.seed)
    V_A, V_B = make_valuations(config, rng)
    params = params.resolved(config.k)
    fam = {"A": init_family(config, params, rng, "A"), "B": init_family(config, params, rng, "B")}
    initial = dict(fam)
    vals = {"A": V_A, "B": V_B}
    opp = {"A": "B", "B": "A"}

    T, k = params.T, config.k
    best = {pl: np.empty((T, k)) for pl in PLAYERS}
    best_fit = {pl: np.empty(T) for pl in PLAYERS}
    for t in range(T):
        fits = {
            pl: evaluate_fitness(fam[pl], fam[opp[pl]], vals[pl], vals[opp[pl]], config.fitness_mode)
            for pl in PLAYERS
        }
        nxt = {}
        for pl in PLAYERS:
            i = int(np.argmax(fits[pl]))
            best[pl][t] = fam[pl].members[i]
            best_fit[pl][t] = fits[pl][i]
            nxt[pl] = evolve(fam[pl], fam[opp[pl]], fits[pl], config, params, rng)
        fam = nxt

    counts = np.arange(1, T + 1, dtype=float)[:, None]
    players = {
        pl: PlayerTrace(best[pl], best_fit[pl], np.cumsum(best[pl], axis=0) / counts)
        for pl in PLAYERS
    }
    return RunTrace(config, params, V_A, V_B, initial, fam, players)
