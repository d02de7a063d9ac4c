"""Battlefield auction, game scoring and valuation construction."""

import itertools

import numpy as np
import pytest

from blottoga.errors import ConstraintViolation, DimensionError, DomainError
from blottoga.game import (
    GameConfig,
    Strategy,
    battlefield_utility,
    make_valuations,
    play_game,
    score_matrices,
    validate_strategy,
)


class TestBattlefieldUtility:
    @pytest.mark.parametrize("x_own, x_opp, v, expected", [
        (0.6, 0.4, 0.5, 0.5),
        (0.3, 0.3, 0.4, 0.2),
        (0.0, 0.1, 0.9, 0.0),
    ])
    def test_examples(self, x_own, x_opp, v, expected):
        assert battlefield_utility(x_own, x_opp, v) == pytest.approx(expected, abs=1e-15)

    def test_tie_within_tolerance(self):
        assert battlefield_utility(0.3, 0.3 + 5e-13, 1.0) == 0.5

    def test_negative_allocation_rejected(self):
        with pytest.raises(ConstraintViolation):
            battlefield_utility(-0.1, 0.2, 0.5)


class TestPlayGame:
    def test_three_field_nash_self_play(self):
        V = (0, 1 / 3, 2 / 3)
        out = play_game((0, 0, 1), (0, 0, 1), V, V)
        # every battlefield is tied, zero-zero ones included: half of 0 + 1/3 + 2/3
        assert (out.score_A, out.score_B) == pytest.approx((0.5, 0.5))
        assert (out.utility_A, out.utility_B) == (0.5, 0.5)

    def test_two_fields_won(self):
        out = play_game((0.6, 0.4), (0.4, 0.3), (0.1, 0.3), (0.5, 0.5), mode="score-sum")
        assert out.score_A == pytest.approx(0.1 + 0.3)
        assert out.score_B == 0.0
        assert out.utility_A == out.score_A
        assert [r.winner for r in out.per_battlefield] == ["A", "A"]

    def test_single_field_tie(self):
        out = play_game((1.0,), (1.0,), (1.0,), (1.0,))
        assert (out.score_A, out.score_B) == (0.5, 0.5)
        assert (out.utility_A, out.utility_B) == (0.5, 0.5)
        assert out.per_battlefield[0].winner is None

    def test_length_mismatch(self):
        with pytest.raises(DimensionError):
            play_game((1, 0), (1, 0, 0), (0, 1), (0, 1))

    def test_accepts_strategy_objects(self):
        out = play_game(Strategy((0, 1), "A"), Strategy((1, 0), "B"), (0.2, 0.8), (0.8, 0.2))
        assert out.utility_A == 0.5  # both score 0.8

    def test_score_matrices_match_play_game(self, rng):
        XA = rng.dirichlet(np.ones(4), size=6)
        XB = rng.dirichlet(np.ones(4), size=5)
        XB[0] = XA[0]
        VA, VB = rng.random(4), rng.random(4)
        SA, SB = score_matrices(XA, XB, VA, VB)
        for l, m in itertools.product(range(6), range(5)):
            out = play_game(XA[l], XB[m], VA, VB, mode="score-sum")
            assert SA[l, m] == pytest.approx(out.score_A, abs=1e-12)
            assert SB[l, m] == pytest.approx(out.score_B, abs=1e-12)


class TestValidateStrategy:
    def test_exhausted_budget_valid(self):
        assert validate_strategy((0.5, 0.5), 1.0).valid

    def test_over_budget(self):
        res = validate_strategy((0.7, 0.5), 1.0)
        assert not res.valid
        assert res.excess == pytest.approx(0.2)

    def test_negative_entry(self):
        res = validate_strategy((-0.1, 1.1), 1.0)
        assert not res.valid
        assert res.index == 0

    def test_tolerance(self):
        assert validate_strategy((0.5, 0.5 + 5e-10), 1.0)
        assert not validate_strategy((0.5, 0.5 + 5e-9), 1.0)


class TestGameConfig:
    def test_budget_of_b(self):
        cfg = GameConfig(k=10, n_A=10, alpha=0.85)
        assert cfg.n_B == pytest.approx(8.5)
        assert cfg.budget("B") == pytest.approx(8.5)

    @pytest.mark.parametrize("kw", [
        dict(k=0, n_A=1), dict(k=3, n_A=0), dict(k=3, n_A=1, alpha=0),
        dict(k=3, n_A=1, alpha=1.2), dict(k=3, n_A=1, valuation_mode="x"),
        dict(k=3, n_A=1, fitness_mode="x"), dict(k=3, n_A=1, valuation_mode="explicit"),
    ])
    def test_rejects(self, kw):
        with pytest.raises((DomainError, DimensionError)):
            GameConfig(**kw)


class TestMakeValuations:
    def test_homogeneous_grid(self, rng):
        VA, VB = make_valuations(GameConfig(k=10, n_A=10), rng)
        np.testing.assert_allclose(VA, [0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9])
        np.testing.assert_array_equal(VA, VB)

    def test_explicit_passthrough(self, rng):
        cfg = GameConfig(k=3, n_A=1, valuation_mode="explicit",
                         V_A=(0, 1 / 3, 2 / 3), V_B=(1 / 3, 0, 2 / 3))
        VA, VB = make_valuations(cfg, rng)
        np.testing.assert_array_equal(VA, [0, 1 / 3, 2 / 3])
        np.testing.assert_array_equal(VB, [1 / 3, 0, 2 / 3])

    def test_explicit_out_of_range(self, rng):
        cfg = GameConfig(k=2, n_A=1, valuation_mode="explicit", V_A=(0, 1.5), V_B=(0, 1))
        with pytest.raises(DomainError):
            make_valuations(cfg, rng)

    def test_heterogeneous_is_permutation(self, rng):
        VA, VB = make_valuations(GameConfig(k=10, n_A=10, valuation_mode="heterogeneous"), rng)
        np.testing.assert_array_equal(np.sort(VB), VA)

    def test_heterogeneous_seeded(self):
        cfg = GameConfig(k=10, n_A=10, valuation_mode="heterogeneous")
        a = make_valuations(cfg, np.random.default_rng(7))[1]
        b = make_valuations(cfg, np.random.default_rng(7))[1]
        np.testing.assert_array_equal(a, b)
