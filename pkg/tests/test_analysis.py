import math

import numpy as np
import pytest

from blottoga.analysis import (
    align_by_valuation,
    concentration_share,
    fit_exponential,
    fit_quadratic,
    net_valuation,
    pearson,
    series_beta,
    summarize_run,
    total_valuation,
)
from blottoga.engine import GAParams, run
from blottoga.errors import DegenerateError, InsufficientDataError
from blottoga.game import GameConfig

GRID = np.arange(10) / 10


class TestFitExponential:
    def test_exact_model(self):
        fit = fit_exponential(list(zip(GRID, 2 * np.exp(3 * GRID))))
        assert fit.a == pytest.approx(2, abs=1e-6)
        assert fit.b == pytest.approx(3, abs=1e-6)
        assert fit.residual_sse < 1e-9
        assert fit.converged

    def test_constant(self):
        fit = fit_exponential([(v, 5.0) for v in GRID])
        assert fit.b == pytest.approx(0, abs=1e-9)
        assert fit.a == pytest.approx(5, abs=1e-9)

    def test_zeros_kept_in_objective(self):
        y = 0.5 * np.exp(4 * GRID)
        y[:3] = 0.0
        fit = fit_exponential(list(zip(GRID, y)))
        # a log-linear fit over the positive points alone would return (0.5, 4) exactly
        assert fit.residual_sse > 0
        r = y - fit(GRID)
        assert fit.residual_sse == pytest.approx(r @ r)
        assert fit.converged

    def test_matches_brute_force_grid(self):
        rng = np.random.default_rng(2)
        y = 0.3 * np.exp(2.5 * GRID) + rng.normal(0, 0.05, 10)
        fit = fit_exponential(list(zip(GRID, y)))
        # coarse independent search around the optimum
        best = min(((a, b) for a in np.linspace(0.1, 0.6, 201) for b in np.linspace(1.5, 3.5, 201)),
                   key=lambda ab: ((y - ab[0] * np.exp(ab[1] * GRID)) ** 2).sum())
        assert fit.a == pytest.approx(best[0], abs=0.005)
        assert fit.b == pytest.approx(best[1], abs=0.02)

    def test_insufficient(self):
        with pytest.raises(InsufficientDataError):
            fit_exponential([(0.1, 1.0)])

    def test_single_abscissa(self):
        with pytest.raises(DegenerateError):
            fit_exponential([(0.1, 1.0), (0.1, 2.0)])


class TestFitQuadratic:
    def test_exact_polynomial(self):
        w = np.linspace(-1, 1, 9)
        fit = fit_quadratic(list(zip(w, 1 - w ** 2)))
        np.testing.assert_allclose(fit.coefficients, (1, 0, -1), atol=1e-12)
        assert fit.vertex == pytest.approx(0, abs=1e-12)

    def test_interpolates_three_points(self):
        fit = fit_quadratic([(0, 1.0), (0.5, 3.0), (2, -1.0)])
        assert fit.residual_sse < 1e-9

    def test_degenerate(self):
        with pytest.raises(DegenerateError):
            fit_quadratic([(0, 1), (0, 2), (1, 3), (1, 4)])


class TestPearson:
    def test_identity_and_reversal(self):
        assert pearson((1, 2, 3), (1, 2, 3)) == pytest.approx(1)
        assert pearson((1, 2, 3), (3, 2, 1)) == pytest.approx(-1)

    def test_matches_numpy(self, rng):
        x, y = rng.random(20), rng.random(20)
        assert pearson(x, y) == pytest.approx(np.corrcoef(x, y)[0, 1], abs=1e-12)

    def test_zero_variance(self):
        with pytest.raises(DegenerateError):
            pearson((1, 1, 1), (1, 2, 3))


class TestConcentration:
    def test_uniform(self):
        assert concentration_share(np.ones(10), GRID, 0.3) == pytest.approx(0.3)

    def test_point_mass(self):
        x = np.zeros(10)
        x[-1] = 4
        for frac in (0.1, 0.5, 1.0):
            assert concentration_share(x, GRID, frac) == 1.0

    def test_uses_own_valuations(self):
        V = np.array([0.7, 0.5, 0.4, 0.1, 0.2, 0, 0.8, 0.9, 0.6, 0.3])
        x = np.zeros(10)
        x[7] = 1.0  # valued 0.9
        assert concentration_share(x, V, 0.1) == 1.0

    def test_float_fraction_count(self):
        # 0.7 * 10 is 7.000000000000001 in floating point
        assert concentration_share(np.ones(10), GRID, 0.7) == pytest.approx(0.7)

    def test_zero_strategy(self):
        with pytest.raises(DegenerateError):
            concentration_share(np.zeros(3), GRID[:3], 0.5)


class TestAlign:
    def test_sort(self):
        assert align_by_valuation((3, 1, 2), (0.5, 0.0, 0.9)) == [(0.0, 1), (0.5, 3), (0.9, 2)]

    def test_sorted_input(self):
        assert align_by_valuation((1, 2), (0.1, 0.2)) == [(0.1, 1), (0.2, 2)]

    def test_permuted_valuations(self):
        V = np.array([0.7, 0.5, 0.4, 0.1, 0.2, 0, 0.8, 0.9, 0.6, 0.3])
        pairs = align_by_valuation(np.arange(10.0), V)
        assert [v for v, _ in pairs] == sorted(V.tolist())
        assert pairs[-1] == (0.9, 7.0)


def test_net_and_total():
    np.testing.assert_allclose(net_valuation((0, 0.7), (0.7, 0.9)), (-0.7, -0.2))
    np.testing.assert_allclose(total_valuation((0, 0.7), (0.7, 0.9)), (0.7, 1.6))


def test_summarize_run_fields():
    tr = run(GameConfig(k=3, n_A=1, seed=1), GAParams(p=10, T=20))
    s = summarize_run(tr)
    assert set(s["players"]) == {"A", "B"}
    assert "l1_to_nash_3field" in s["players"]["A"]
    assert s["iterations"] == 20


def test_series_beta_length():
    tr = run(GameConfig(k=10, n_A=10, seed=1), GAParams(p=10, T=20))
    rows = series_beta(tr, "A", every=5)
    assert [t for t, _ in rows] == [5, 10, 15, 20]
    assert all(math.isfinite(b) for _, b in rows)
