"""The two-player Blotto game with per-player battlefield valuations.

Battlefields go to the larger allocation; a tie splits the battlefield's
value in expectation.  Players are scored either by the valuation they
collect (``score-sum``) or by whether that score beats the opponent's
(``match-win``: 1 for a win, 1/2 for a tie, 0 for a loss).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .errors import ConstraintViolation, DimensionError, DomainError

TIE_TOL = 1e-12
BUDGET_TOL = 1e-9

PLAYERS = ("A", "B")
VALUATION_MODES = ("homogeneous", "heterogeneous", "explicit")
FITNESS_MODES = ("match-win", "score-sum")


@dataclass(frozen=True)
class GameConfig:
    """Static description of one game.

    ``alpha`` scales player B's budget: ``n_B = alpha * n_A``.  ``V_A`` and
    ``V_B`` are only read in ``explicit`` valuation mode.
    """

    k: int
    n_A: float
    alpha: float = 1.0
    valuation_mode: str = "homogeneous"
    fitness_mode: str = "match-win"
    seed: int = 0
    V_A: Optional[tuple] = None
    V_B: Optional[tuple] = None

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 1:
            raise DomainError(f"k must be a positive integer, got {self.k!r}")
        if not self.n_A > 0:
            raise DomainError(f"n_A must be > 0, got {self.n_A!r}")
        if not 0 < self.alpha <= 1:
            raise DomainError(f"alpha must lie in (0, 1], got {self.alpha!r}")
        if self.valuation_mode not in VALUATION_MODES:
            raise DomainError(f"unknown valuation_mode {self.valuation_mode!r}")
        if self.fitness_mode not in FITNESS_MODES:
            raise DomainError(f"unknown fitness_mode {self.fitness_mode!r}")
        if not 0 <= int(self.seed) < 2**64:
            raise DomainError("seed must be an unsigned 64-bit integer")
        if self.valuation_mode == "explicit":
            if self.V_A is None or self.V_B is None:
                raise DomainError("explicit valuation mode needs V_A and V_B")
            for name in ("V_A", "V_B"):
                vec = getattr(self, name)
                if len(vec) != self.k:
                    raise DimensionError(f"{name} has {len(vec)} entries, expected k={self.k}")
                object.__setattr__(self, name, tuple(float(v) for v in vec))

    @property
    def n_B(self) -> float:
        return self.alpha * self.n_A

    def budget(self, player: str) -> float:
        if player == "A":
            return float(self.n_A)
        if player == "B":
            return float(self.n_B)
        raise DomainError(f"unknown player {player!r}")


@dataclass(frozen=True)
class Strategy:
    """An allocation of resources over the k battlefields."""

    allocations: np.ndarray
    owner: str = "A"

    def __post_init__(self):
        arr = np.array(self.allocations, dtype=float)
        if arr.ndim != 1:
            raise DimensionError("allocations must be one-dimensional")
        arr.setflags(write=False)
        object.__setattr__(self, "allocations", arr)
        if self.owner not in PLAYERS:
            raise DomainError(f"unknown owner {self.owner!r}")

    @property
    def k(self) -> int:
        return self.allocations.shape[0]

    def __len__(self):
        return self.k

    def __iter__(self):
        return iter(self.allocations.tolist())


class BattlefieldResult(NamedTuple):
    winner: Optional[str]  # None on a tie
    value_A: float
    value_B: float


@dataclass(frozen=True)
class GameOutcome:
    score_A: float
    score_B: float
    utility_A: float
    utility_B: float
    per_battlefield: tuple = field(default_factory=tuple)


class ValidationResult(NamedTuple):
    valid: bool
    index: Optional[int] = None
    excess: float = 0.0
    reason: str = ""

    def __bool__(self):
        return self.valid


def _as_vector(x) -> np.ndarray:
    if isinstance(x, Strategy):
        return x.allocations
    return np.asarray(x, dtype=float)


def battlefield_utility(x_own: float, x_opp: float, v_own: float) -> float:
    """Expected value one player collects from a single battlefield."""
    if x_own < 0 or x_opp < 0:
        raise ConstraintViolation(f"negative allocation ({x_own}, {x_opp})")
    if abs(x_own - x_opp) <= TIE_TOL:
        return 0.5 * v_own
    return float(v_own) if x_own > x_opp else 0.0


def match_utility(score_own, score_opp):
    """Win/tie/loss utility of a score comparison; works elementwise."""
    score_own = np.asarray(score_own, dtype=float)
    diff = score_own - np.asarray(score_opp, dtype=float)
    out = np.where(diff > TIE_TOL, 1.0, np.where(diff < -TIE_TOL, 0.0, 0.5))
    return float(out) if out.ndim == 0 else out


def play_game(s_A, s_B, V_A, V_B, mode: str = "match-win") -> GameOutcome:
    """Play one game between strategies of A and B."""
    xa, xb = _as_vector(s_A), _as_vector(s_B)
    va, vb = np.asarray(V_A, dtype=float), np.asarray(V_B, dtype=float)
    k = xa.shape[0]
    if not (xb.shape[0] == va.shape[0] == vb.shape[0] == k):
        raise DimensionError(
            f"length mismatch: s_A={k}, s_B={xb.shape[0]}, V_A={va.shape[0]}, V_B={vb.shape[0]}"
        )
    if mode not in FITNESS_MODES:
        raise DomainError(f"unknown fitness mode {mode!r}")
    if (xa < 0).any() or (xb < 0).any():
        raise ConstraintViolation("strategies must be non-negative")

    per = []
    for h in range(k):
        ua = battlefield_utility(xa[h], xb[h], va[h])
        ub = battlefield_utility(xb[h], xa[h], vb[h])
        if abs(xa[h] - xb[h]) <= TIE_TOL:
            winner = None
        else:
            winner = "A" if xa[h] > xb[h] else "B"
        per.append(BattlefieldResult(winner, ua, ub))
    score_a = float(sum(r.value_A for r in per))
    score_b = float(sum(r.value_B for r in per))
    if mode == "match-win":
        ua = match_utility(score_a, score_b)
        ub = 1.0 - ua
    else:
        ua, ub = score_a, score_b
    return GameOutcome(score_a, score_b, ua, ub, tuple(per))


def score_matrices(X_A: np.ndarray, X_B: np.ndarray, V_A, V_B):
    """Scores of every pairing of rows of ``X_A`` against rows of ``X_B``.

    Returns ``(S_A, S_B)`` of shape ``(len(X_A), len(X_B))``.  Entry ``[l, m]``
    matches what :func:`play_game` reports for ``X_A[l]`` against ``X_B[m]``.
    """
    X_A = np.atleast_2d(np.asarray(X_A, dtype=float))
    X_B = np.atleast_2d(np.asarray(X_B, dtype=float))
    va, vb = np.asarray(V_A, dtype=float), np.asarray(V_B, dtype=float)
    if not (X_A.shape[1] == X_B.shape[1] == va.shape[0] == vb.shape[0]):
        raise DimensionError("strategy and valuation lengths differ")
    diff = X_A[:, None, :] - X_B[None, :, :]
    tie = np.abs(diff) <= TIE_TOL
    a_wins = (diff > 0) & ~tie
    b_wins = (diff < 0) & ~tie
    S_A = (a_wins + 0.5 * tie) @ va
    S_B = (b_wins + 0.5 * tie) @ vb
    return S_A, S_B


def validate_strategy(s, budget: float) -> ValidationResult:
    """Check non-negativity and the budget constraint; never raises."""
    x = _as_vector(s)
    neg = np.flatnonzero(x < 0)
    if neg.size:
        i = int(neg[0])
        return ValidationResult(False, i, float(-x[i]), f"negative allocation at index {i}")
    excess = float(x.sum() - budget)
    if excess > BUDGET_TOL:
        return ValidationResult(False, None, excess, f"budget exceeded by {excess:.6g}")
    return ValidationResult(True)


def evenly_spaced(k: int) -> np.ndarray:
    """The grid 0, 1/k, ..., (k-1)/k."""
    return np.arange(k, dtype=float) / k


def check_valuations(values, k: Optional[int] = None) -> np.ndarray:
    v = np.asarray(values, dtype=float)
    if v.ndim != 1:
        raise DimensionError("valuations must be one-dimensional")
    if k is not None and v.shape[0] != k:
        raise DimensionError(f"expected {k} valuations, got {v.shape[0]}")
    if not np.all((v >= 0) & (v <= 1)):
        raise DomainError("valuations must lie in [0, 1]")
    return v


def make_valuations(config: GameConfig, rng: np.random.Generator):
    """Draw (V_A, V_B) for a game.

    Heterogeneous mode consumes one permutation from ``rng``; the other
    modes leave it untouched.
    """
    if config.valuation_mode == "explicit":
        return check_valuations(config.V_A, config.k), check_valuations(config.V_B, config.k)
    grid = evenly_spaced(config.k)
    if config.valuation_mode == "homogeneous":
        return grid, grid.copy()
    return grid, grid[rng.permutation(config.k)]

