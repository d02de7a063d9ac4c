"""Acceptance gate: one PASS/FAIL line per criterion, each at its stated tolerance.

Run alone with ``pytest tests/test_acceptance.py -v -s`` (or ``python
tests/test_acceptance.py``).  The multi-seed GA criteria take a few minutes.
"""

import functools
import sys
import time
import timeit

import numpy as np
import pytest

from blottoga.analysis import align_by_valuation, concentration_share, fit_exponential, fit_quadratic, l1_distance, pearson
from blottoga.engine import GAParams, run
from blottoga.equilibrium import EquilibriumStrategySpec, discrete_equilibrium, versus_equilibrium
from blottoga.game import GameConfig, evenly_spaced

SEEDS = range(10)

pytestmark = pytest.mark.slow


def report(capsys, criterion, ok, detail):
    with capsys.disabled():
        print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {criterion}: {detail}")


@functools.lru_cache(maxsize=None)
def cached_run(k, n_A, mode, alpha, seed, T, p=50, mu=None, V=None):
    cfg = GameConfig(k=k, n_A=n_A, alpha=alpha, valuation_mode=mode, seed=seed, V_A=V, V_B=V)
    start = time.perf_counter()
    trace = run(cfg, GAParams(p=p, mu=mu, T=T))
    return trace, time.perf_counter() - start


def test_c1_nash_convergence(capsys):
    V = (0.0, 1 / 3, 2 / 3)
    dists, times = [], []
    for s in SEEDS:
        tr, dt = cached_run(3, 1.0, "explicit", 1.0, s, 1000, mu=0.06, V=V)
        dists.append(max(l1_distance(tr[pl].avg_best[-1], (0, 0, 1)) for pl in ("A", "B")))
        times.append(dt)
    hits = sum(d <= 0.05 for d in dists)
    ok = hits >= 8 and max(times) < 10
    report(capsys, 1, ok, f"{hits}/10 seeds within L1 0.05 of (0,0,1) for both players; "
                          f"max {max(times):.1f}s per seed")
    assert hits >= 8
    assert max(times) < 10


def test_c2_oracle_concentration(capsys):
    v = evenly_spaced(100)
    share = discrete_equilibrium(v, 1.0)
    top50 = concentration_share(share, v, 0.5)
    top10 = concentration_share(share, v, 0.1)
    elapsed = min(timeit.repeat(lambda: discrete_equilibrium(v, 1.0), number=100, repeat=5)) / 100
    ok = top50 > 0.84 and 0.25 <= top10 <= 0.30 and elapsed < 1e-3
    report(capsys, 2, ok, f"top-50% share {top50:.4f}, top-10 share {top10:.4f}, {elapsed * 1e6:.1f} us")
    assert top50 > 0.84
    assert 0.25 <= top10 <= 0.30
    assert elapsed < 1e-3


def test_c3_beat_baseline(capsys):
    passed, lines, alt = 0, [], 0
    for s in SEEDS:
        tr, _ = cached_run(10, 10.0, "homogeneous", 1.0, s, 1000, mu=0.2)
        diffs = [float(versus_equilibrium(tr, player=pl).score_diff[-1]) for pl in ("A", "B")]
        passed += all(d >= 0 for d in diffs)
        lines.append("/".join(f"{d:+.2f}" for d in diffs))
        spec = EquilibriumStrategySpec("continuum-uniform", 10.0, tuple(tr.V_A))
        alt += versus_equilibrium(tr, spec=spec, player="A").score_diff[-1] >= 0
    report(capsys, 3, passed >= 7,
           f"{passed}/10 seeds with final score difference >= 0 for both players "
           f"(A/B per seed: {', '.join(lines)}); informational: A >= 0 against the "
           f"unnormalised 3v^2 n/k allocation in {alt}/10")
    assert passed >= 7


def test_c4_horizon_stability(capsys):
    short, _ = cached_run(10, 10.0, "homogeneous", 1.0, 0, 1000, mu=0.2)
    long, _ = cached_run(10, 10.0, "homogeneous", 1.0, 0, 5000, mu=0.2)
    d = {pl: l1_distance(short[pl].avg_best[-1], long[pl].avg_best[-1]) for pl in ("A", "B")}
    ok = all(x < 1.5 for x in d.values())
    report(capsys, 4, ok, f"L1(T=1000, T=5000) A {d['A']:.3f}, B {d['B']:.3f} (bound 0.15 n = 1.5)")
    assert ok


def beta_B(trace):
    return fit_exponential(align_by_valuation(trace["B"].avg_best[-1], trace.V_B)).b


def test_c5_asymmetry_ordering(capsys):
    hits, cols = 0, []
    for s in SEEDS:
        b = [beta_B(cached_run(10, 10.0, "heterogeneous", a, s, 1000)[0]) for a in (0.85, 0.9, 1.0)]
        hits += b[0] > b[1] > b[2]
        cols.append("{:.2f}>{:.2f}>{:.2f}".format(*b))
    report(capsys, 5, hits >= 6, f"{hits}/10 seeds with beta(0.85) > beta(0.9) > beta(1) "
                                 f"({', '.join(cols)})")
    assert hits >= 6


def test_c6_correlation(capsys):
    rs = []
    for s in SEEDS:
        tr, _ = cached_run(10, 10.0, "heterogeneous", 1.0, s, 1000)
        rs.append(pearson(tr["A"].avg_best[-1], tr["B"].avg_best[-1]))
    hits = sum(r > 0.9 for r in rs)
    report(capsys, 6, hits >= 7, f"{hits}/10 seeds with Pearson r > 0.9 (min {min(rs):.3f})")
    assert hits >= 7


def test_c7_invariant_suite(capsys):
    import test_properties as props

    checks = [
        ("closure over 1e5 operator applications",
         lambda: props.test_operator_closure_1e5(np.random.default_rng(12345))),
        ("crossover conservation", props.test_crossover_conservation),
        ("elitism each generation", props.test_elitism_every_generation),
        ("bit-identical replay, 3 seeds", lambda: [props.test_replay_bit_identical(s) for s in range(3)]),
        ("frozen-opponent monotonicity, 200 generations", props.test_frozen_opponent_monotone),
        ("nash_3field grid best response", props.test_nash_3field_best_response_grid),
    ]
    failed = []
    for name, fn in checks:
        try:
            fn()
        except AssertionError:
            failed.append(name)
    report(capsys, 7, not failed, "all invariants hold" if not failed else f"failed: {', '.join(failed)}")
    assert not failed


def test_c8_fit_oracle(capsys):
    v = evenly_spaced(10)
    exp = fit_exponential(list(zip(v, 2 * np.exp(3 * v))))
    quad = fit_quadratic([(0.0, 1.0), (0.5, 3.0), (2.0, -1.0)])
    ok = abs(exp.a - 2) <= 1e-6 and abs(exp.b - 3) <= 1e-6 and quad.residual_sse < 1e-9
    report(capsys, 8, ok, f"exponential ({exp.a:.9f}, {exp.b:.9f}); quadratic residual {quad.residual_sse:.2e}")
    assert abs(exp.a - 2) <= 1e-6 and abs(exp.b - 3) <= 1e-6
    assert quad.residual_sse < 1e-9


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v", "-s"]))
