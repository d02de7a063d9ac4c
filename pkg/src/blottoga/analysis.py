"""Post-processing of learned strategies: fits, correlations, concentration."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from .errors import DegenerateError, DimensionError, DomainError, InsufficientDataError

GRAD_TOL = 1e-10
MAX_ITER = 500


@dataclass(frozen=True)
class ExpFit:
    """Least-squares fit of ``y = a * exp(b * v)``."""

    a: float
    b: float
    residual_sse: float
    converged: bool
    iterations: int = 0

    def __call__(self, v):
        return self.a * np.exp(self.b * np.asarray(v, dtype=float))


@dataclass(frozen=True)
class QuadFit:
    coefficients: Tuple[float, float, float]  # (c0, c1, c2) for c0 + c1 w + c2 w^2
    residual_sse: float

    def __call__(self, w):
        c0, c1, c2 = self.coefficients
        w = np.asarray(w, dtype=float)
        return c0 + c1 * w + c2 * w * w

    @property
    def vertex(self) -> float:
        """Abscissa of the turning point, ``nan`` for a straight line."""
        c2 = self.coefficients[2]
        return -self.coefficients[1] / (2 * c2) if c2 != 0 else math.nan


def _split(points) -> Tuple[np.ndarray, np.ndarray]:
    arr = np.asarray(points, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise DimensionError("points must be a sequence of (x, y) pairs")
    return arr[:, 0], arr[:, 1]


def _exp_start(v, y):
    pos = y > 1e-9
    if pos.sum() >= 2 and np.ptp(v[pos]) > 0:
        b, log_a = np.polyfit(v[pos], np.log(y[pos]), 1)
        return math.exp(log_a), float(b)
    return float(np.mean(y)), 0.0


def fit_exponential(points) -> ExpFit:
    """Fit ``y = a e^{b v}`` by damped Gauss-Newton from a log-linear start.

    Zero observations are kept in the nonlinear objective; only the starting
    point ignores them.
    """
    v, y = _split(points)
    if v.shape[0] < 2:
        raise InsufficientDataError("exponential fit needs at least 2 points")
    if np.ptp(v) == 0:
        raise DegenerateError("all abscissae are equal")

    a, b = _exp_start(v, y)

    def residual(a, b):
        return y - a * np.exp(b * v)

    r = residual(a, b)
    sse = float(r @ r)
    lam = 1e-3
    grad_norm = math.inf
    it = 0
    for it in range(1, MAX_ITER + 1):
        e = np.exp(b * v)
        J = np.column_stack([e, a * v * e])
        g = J.T @ r
        grad_norm = float(np.linalg.norm(g))
        if grad_norm < GRAD_TOL:
            break
        H = J.T @ J
        improved = False
        while lam < 1e12:
            try:
                step = np.linalg.solve(H + lam * np.diag(np.diag(H) + 1e-30), g)
            except np.linalg.LinAlgError:
                lam *= 10
                continue
            r_new = residual(a + step[0], b + step[1])
            sse_new = float(r_new @ r_new)
            if np.isfinite(sse_new) and sse_new <= sse:
                a, b, r, sse = a + step[0], b + step[1], r_new, sse_new
                lam = max(lam / 10, 1e-12)
                improved = True
                break
            lam *= 10
        if not improved:
            break
    else:
        e = np.exp(b * v)
        grad_norm = float(np.linalg.norm(np.column_stack([e, a * v * e]).T @ r))
    return ExpFit(float(a), float(b), sse, grad_norm < GRAD_TOL, it)


def fit_quadratic(points) -> QuadFit:
    """Ordinary least squares on (1, w, w^2) through the normal equations."""
    w, y = _split(points)
    if w.shape[0] < 3 or np.unique(w).shape[0] < 3:
        raise DegenerateError("quadratic fit needs 3 distinct abscissae")
    A = np.column_stack([np.ones_like(w), w, w * w])
    M = A.T @ A
    if np.linalg.matrix_rank(A) < 3:
        raise DegenerateError("design matrix is rank deficient")
    # LAPACK gesv: LU with partial pivoting
    c = np.linalg.solve(M, A.T @ y)
    r = y - A @ c
    return QuadFit((float(c[0]), float(c[1]), float(c[2])), float(r @ r))


def pearson(x, y) -> float:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise DimensionError("pearson needs two equal-length 1-d sequences")
    if x.shape[0] < 2:
        raise InsufficientDataError("pearson needs at least 2 observations")
    dx = x - x.mean()
    dy = y - y.mean()
    sx, sy = math.sqrt(dx @ dx), math.sqrt(dy @ dy)
    if sx == 0 or sy == 0:
        raise DegenerateError("correlation undefined for a constant sequence")
    return float(np.clip((dx @ dy) / (sx * sy), -1.0, 1.0))


def top_count(k: int, top_fraction: float) -> int:
    return max(1, math.ceil(top_fraction * k - 1e-9))


def concentration_share(strategy, valuations, top_fraction: float) -> float:
    """Share of the allocated total sitting on the top-valued ``top_fraction`` of battlefields."""
    x = np.asarray(strategy, dtype=float)
    v = np.asarray(valuations, dtype=float)
    if x.shape != v.shape:
        raise DimensionError("strategy and valuations differ in length")
    if not 0 < top_fraction <= 1:
        raise DomainError("top_fraction must lie in (0, 1]")
    total = x.sum()
    if not total > 0:
        raise DegenerateError("strategy allocates nothing")
    order = np.lexsort((np.arange(v.shape[0]), -v))
    return float(x[order[: top_count(v.shape[0], top_fraction)]].sum() / total)


def align_by_valuation(strategy, valuations) -> List[Tuple[float, float]]:
    x = np.asarray(strategy, dtype=float)
    v = np.asarray(valuations, dtype=float)
    if x.shape != v.shape:
        raise DimensionError("strategy and valuations differ in length")
    order = np.argsort(v, kind="stable")
    return [(float(v[i]), float(x[i])) for i in order]


def net_valuation(V_own, V_opp) -> np.ndarray:
    return np.asarray(V_own, dtype=float) - np.asarray(V_opp, dtype=float)


def total_valuation(V_A, V_B) -> np.ndarray:
    return np.asarray(V_A, dtype=float) + np.asarray(V_B, dtype=float)


def l1_distance(x, y) -> float:
    return float(np.abs(np.asarray(x, dtype=float) - np.asarray(y, dtype=float)).sum())


def _fit_dict(fit) -> dict:
    if isinstance(fit, ExpFit):
        return {"a": fit.a, "b": fit.b, "residual_sse": fit.residual_sse,
                "converged": fit.converged}
    return {"coefficients": list(fit.coefficients), "residual_sse": fit.residual_sse}


def _safe(fn, *args):
    try:
        return fn(*args)
    except (DegenerateError, InsufficientDataError):
        return None


def summarize_run(trace, vs_eq=None) -> dict:
    """Diagnostics for the final average-best strategies of a finished run.

    ``vs_eq`` maps player to a ``VersusEquilibrium``; its last entries are
    reported when given.
    """
    out: dict = {"iterations": trace.iterations, "players": {}}
    if trace.iterations == 0:
        return out
    from .equilibrium import nash_3field

    final = {pl: trace[pl].avg_best[-1] for pl in ("A", "B")}
    total = total_valuation(trace.V_A, trace.V_B)
    for pl in ("A", "B"):
        own, opp = trace.valuations(pl), trace.opponent_valuations(pl)
        x = final[pl]
        exp_fit = _safe(fit_exponential, align_by_valuation(x, own))
        tot_fit = _safe(fit_exponential, align_by_valuation(x, total))
        quad = _safe(fit_quadratic, list(zip(net_valuation(own, opp), x)))
        rec = {
            "final_avg_best": x.tolist(),
            "final_best": trace[pl].best[-1].tolist(),
            "final_best_fitness": float(trace[pl].fitness[-1]),
            "beta_fit": _fit_dict(exp_fit) if exp_fit else None,
            "total_valuation_fit": _fit_dict(tot_fit) if tot_fit else None,
            "net_valuation_fit": _fit_dict(quad) if quad else None,
            "share_top_50pct": _safe(concentration_share, x, own, 0.5),
            "share_top_10pct": _safe(concentration_share, x, own, 0.1),
        }
        if trace.config.k == 3:
            rec["l1_to_nash_3field"] = l1_distance(x, nash_3field(trace.config.budget(pl)))
        if vs_eq is not None and pl in vs_eq:
            rec["vs_equilibrium_final_diff"] = float(vs_eq[pl].score_diff[-1])
            rec["vs_equilibrium_final_utility"] = float(vs_eq[pl].utility[-1])
        out["players"][pl] = rec
    out["pearson_avg_best"] = _safe(pearson, final["A"], final["B"])
    return out


def series_beta(trace, player: str, every: int = 1) -> List[Tuple[int, float]]:
    """Concentration coefficient of the average-best strategy along the run."""
    V = trace.valuations(player)
    rows = []
    for t in range(every - 1, trace.iterations, every):
        fit = _safe(fit_exponential, align_by_valuation(trace[player].avg_best[t], V))
        rows.append((t + 1, fit.b if fit else math.nan))
    return rows


__all__: Sequence[str] = [
    "ExpFit", "QuadFit", "fit_exponential", "fit_quadratic", "pearson",
    "concentration_share", "align_by_valuation", "net_valuation", "total_valuation",
    "l1_distance", "summarize_run", "series_beta", "top_count",
]
