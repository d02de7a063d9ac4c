"""Plot-ready CSV series (and PNG renderings) for each figure of the study.

Every CSV may open with ``# key=value`` metadata lines, followed by a
header row.  Run-based figures write one file per qualifying run, named
``fig<id>_<run_id>.csv``.
"""

from __future__ import annotations

import csv
import math
from pathlib import Path
from typing import Callable, Dict, List, Optional

import numpy as np

from ..analysis import (
    align_by_valuation,
    fit_exponential,
    fit_quadratic,
    net_valuation,
    pearson,
    total_valuation,
)
from ..equilibrium import discrete_equilibrium
from ..errors import BlottoError, DomainError, MissingRunsError
from ..game import evenly_spaced
from . import plotting
from .runner import RunManifest, StoredRun, load_run

SNAPSHOTS = {"4": (50, 250, 1000), "7": (1000, 2500, 5000)}


def write_csv(path: Path, header: List[str], rows, meta: Optional[Dict] = None) -> Path:
    with open(path, "w", newline="") as fh:
        for key, value in (meta or {}).items():
            fh.write(f"# {key}={value}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([repr(x) if isinstance(x, float) else x for x in row])
    return path


def read_figure_csv(path):
    """Return ``(meta, header, rows)`` with numeric cells converted to float."""
    meta, rows, header = {}, [], None
    with open(path, newline="") as fh:
        for line in fh:
            if line.startswith("# "):
                key, _, value = line[2:].rstrip("\n").partition("=")
                meta[key] = value
            else:
                break
        fh.seek(0)
        body = [ln for ln in fh if not ln.startswith("# ")]
    reader = csv.reader(body)
    header = next(reader)
    for r in reader:
        rows.append([_num(c) for c in r])
    return meta, header, rows


def _num(cell: str):
    try:
        return float(cell)
    except ValueError:
        return cell


def _fmt(value) -> str:
    if value is None:
        return "nan"
    return repr(float(value))


def _ok_runs(manifest: RunManifest) -> List[dict]:
    return [r for r in manifest.runs if r["status"] == "ok"]


def _select(manifest, figure_id, predicate=None, requirement="at least one completed run"):
    if manifest is None:
        raise MissingRunsError(f"figure {figure_id} needs a manifest with {requirement}")
    runs = [load_run(manifest, r) for r in _ok_runs(manifest)]
    runs = [r for r in runs if predicate is None or predicate(r)]
    if not runs:
        raise MissingRunsError(f"figure {figure_id} needs {requirement}; none found in {manifest.path}")
    return runs


def _homogeneous(run: StoredRun) -> bool:
    return np.array_equal(run.valuations("A"), run.valuations("B"))


def _heterogeneous(run: StoredRun) -> bool:
    return not _homogeneous(run)


def _has_iterations(run: StoredRun) -> bool:
    return run.iterations > 0


def _safe_exp(points):
    try:
        return fit_exponential(points)
    except BlottoError:
        return None


def fig2(manifest, out: Path, plots: bool, k: int = 100, **_):
    v = evenly_spaced(k)
    share = discrete_equilibrium(v, 1.0)
    path = write_csv(out / "fig2.csv", ["valuation", "share"], zip(v.tolist(), share.tolist()),
                     {"k": k, "share_sum": _fmt(share.sum())})
    paths = [path]
    if plots:
        paths.append(plotting.equilibrium_shares(out / "fig2.png", v, share))
    return paths


def fig3(manifest, out: Path, plots: bool, **_):
    paths = []
    for run in _select(manifest, "3"):
        rows = []
        unit = float(run.diagnostics["ga"]["unit"])
        for pl in ("A", "B"):
            X = run.families[(0, pl)]
            top = float(X.max())
            edges = np.arange(0.0, top + unit * 1.000001, unit)
            if edges.shape[0] < 2:
                edges = np.array([0.0, unit])
            counts, edges = np.histogram(X.ravel(), bins=edges)
            rows.extend((pl, float(lo), float(hi), int(c))
                        for lo, hi, c in zip(edges[:-1], edges[1:], counts))
        p, k = run.families[(0, "A")].shape
        path = write_csv(out / f"fig3_{run.run_id}.csv", ["player", "bin_left", "bin_right", "count"],
                         rows, {"run_id": run.run_id, "p": p, "k": k, "mean_allocation_A":
                                _fmt(run.families[(0, "A")].mean())})
        paths.append(path)
        if plots:
            paths.append(plotting.initial_histogram(path.with_suffix(".png"), rows))
    return paths


def _snapshots(fig_id, run: StoredRun, iterations=None):
    wanted = iterations or SNAPSHOTS[fig_id]
    its = [t for t in wanted if t <= run.iterations]
    return its or [run.iterations]


def _snapshot_fig(fig_id):
    def build(manifest, out: Path, plots: bool, iterations=None, **_):
        paths = []
        for run in _select(manifest, fig_id, _has_iterations, "runs with T >= 1"):
            its = _snapshots(fig_id, run, iterations)
            rows = []
            for t in its:
                for pl in ("A", "B"):
                    x = run.series[pl]["avg_best"][t - 1]
                    V = run.valuations(pl)
                    for h in np.argsort(V, kind="stable"):
                        rows.append((t, pl, int(h) + 1, float(V[h]), float(x[h])))
            path = write_csv(out / f"fig{fig_id}_{run.run_id}.csv",
                             ["iteration", "player", "battlefield", "valuation", "allocation"],
                             rows, {"run_id": run.run_id, "iterations": " ".join(map(str, its))})
            paths.append(path)
            if plots:
                paths.append(plotting.strategies_by_snapshot(path.with_suffix(".png"), rows, its))
        return paths
    return build


def _versus_fig(fig_id):
    def build(manifest, out: Path, plots: bool, **_):
        paths = []
        runs = _select(manifest, fig_id, lambda r: _homogeneous(r) and _has_iterations(r),
                       "runs with valuation_mode = homogeneous and T >= 1")
        for run in runs:
            rows = []
            for pl in ("A", "B"):
                s = run.series[pl]
                rows.extend((t + 1, pl, float(s["eq_score_diff"][t]), float(s["eq_utility"][t]))
                            for t in range(run.iterations))
            meta = {"run_id": run.run_id, "T": run.iterations,
                    "final_diff_A": _fmt(run.series["A"]["eq_score_diff"][-1]),
                    "final_diff_B": _fmt(run.series["B"]["eq_score_diff"][-1])}
            path = write_csv(out / f"fig{fig_id}_{run.run_id}.csv",
                             ["iteration", "player", "score_diff", "utility"], rows, meta)
            paths.append(path)
            if plots:
                paths.append(plotting.versus_series(path.with_suffix(".png"), rows))
            if fig_id == "5":
                V = run.valuations("A")
                eq = discrete_equilibrium(V, run.game["n_A"])
                srows = [(float(V[h]), float(run.series["A"]["avg_best"][-1][h]),
                          float(run.series["B"]["avg_best"][-1][h]), float(eq[h]))
                         for h in np.argsort(V, kind="stable")]
                paths.append(write_csv(out / f"fig5_{run.run_id}_strategy.csv",
                                       ["valuation", "avg_best_A", "avg_best_B", "equilibrium"],
                                       srows, {"run_id": run.run_id}))
        return paths
    return build


def _exp_fit_fig(fig_id, predicate, requirement):
    def build(manifest, out: Path, plots: bool, **_):
        paths = []
        for run in _select(manifest, fig_id, predicate, requirement):
            rows, meta = [], {"run_id": run.run_id, "alpha": run.game["alpha"]}
            for pl in ("A", "B"):
                pts = align_by_valuation(run.series[pl]["avg_best"][-1], run.valuations(pl))
                fit = _safe_exp(pts)
                meta[f"a_{pl}"] = _fmt(fit.a if fit else None)
                meta[f"beta_{pl}"] = _fmt(fit.b if fit else None)
                rows.extend((pl, v, y, float(fit(v)) if fit else math.nan) for v, y in pts)
            path = write_csv(out / f"fig{fig_id}_{run.run_id}.csv",
                             ["player", "valuation", "allocation", "fitted"], rows, meta)
            paths.append(path)
            if plots:
                paths.append(plotting.strategy_with_fit(path.with_suffix(".png"), rows, "own valuation"))
        return paths
    return build


def fig11(manifest, out: Path, plots: bool, **_):
    paths = []
    runs = _select(manifest, "11", lambda r: _heterogeneous(r) and _has_iterations(r),
                   "runs with valuation_mode = heterogeneous (or distinct explicit vectors)")
    for run in runs:
        VA, VB = run.valuations("A"), run.valuations("B")
        xa, xb = run.series["A"]["avg_best"][-1], run.series["B"]["avg_best"][-1]
        try:
            r = pearson(xa, xb)
        except BlottoError:
            r = None
        rows = [(h + 1, float(VA[h]), float(VB[h]), float(xa[h]), float(xb[h])) for h in range(len(VA))]
        left = write_csv(out / f"fig11_{run.run_id}.csv",
                         ["battlefield", "V_A", "V_B", "avg_best_A", "avg_best_B"], rows,
                         {"run_id": run.run_id, "pearson": _fmt(r)})
        paths.append(left)
        if plots:
            paths.append(plotting.strategies_by_index(left.with_suffix(".png"), rows, r))
        total = total_valuation(VA, VB)
        trows, meta = [], {"run_id": run.run_id}
        for pl, x in (("A", xa), ("B", xb)):
            pts = align_by_valuation(x, total)
            fit = _safe_exp(pts)
            meta[f"beta_{pl}"] = _fmt(fit.b if fit else None)
            trows.extend((pl, w, y, float(fit(w)) if fit else math.nan) for w, y in pts)
        right = write_csv(out / f"fig11_{run.run_id}_total.csv",
                          ["player", "total_valuation", "allocation", "fitted"], trows, meta)
        paths.append(right)
        if plots:
            paths.append(plotting.strategy_with_fit(right.with_suffix(".png"), trows, "total valuation"))
    return paths


def fig12(manifest, out: Path, plots: bool, **_):
    paths = []
    runs = _select(manifest, "12", lambda r: _heterogeneous(r) and _has_iterations(r),
                   "runs with valuation_mode = heterogeneous (or distinct explicit vectors)")
    for run in runs:
        rows, meta = [], {"run_id": run.run_id, "alpha": run.game["alpha"]}
        for pl, opp in (("A", "B"), ("B", "A")):
            w = net_valuation(run.valuations(pl), run.valuations(opp))
            x = run.series[pl]["avg_best"][-1]
            try:
                fit = fit_quadratic(list(zip(w, x)))
                meta[f"quad_{pl}"] = " ".join(_fmt(c) for c in fit.coefficients)
            except BlottoError:
                fit = None
                meta[f"quad_{pl}"] = "nan nan nan"
            order = np.argsort(w, kind="stable")
            rows.extend((pl, float(w[h]), float(x[h]), float(fit(w[h])) if fit else math.nan)
                        for h in order)
        path = write_csv(out / f"fig12_{run.run_id}.csv",
                         ["player", "net_valuation", "allocation", "fitted"], rows, meta)
        paths.append(path)
        if plots:
            paths.append(plotting.strategy_with_fit(path.with_suffix(".png"), rows, "net valuation"))
    return paths


FIGURES: Dict[str, Callable] = {
    "2": fig2,
    "3": fig3,
    "4": _snapshot_fig("4"),
    "5": _versus_fig("5"),
    "7": _snapshot_fig("7"),
    "8": _versus_fig("8"),
    "9": _exp_fit_fig("9", lambda r: _homogeneous(r) and _has_iterations(r),
                      "runs with valuation_mode = homogeneous"),
    "10": _exp_fit_fig("10", lambda r: _heterogeneous(r) and _has_iterations(r),
                       "runs with valuation_mode = heterogeneous"),
    "11": fig11,
    "12": fig12,
}


def normalize_figure_id(figure_id) -> str:
    fid = str(figure_id).lower().removeprefix("fig").removeprefix("ure").strip()
    if fid not in FIGURES:
        raise DomainError(f"unknown figure {figure_id!r}; choose from {', '.join(FIGURES)}")
    return fid


def emit_figure_data(manifest: Optional[RunManifest], figure_id, out_dir=None,
                     plots: bool = True, **options) -> List[Path]:
    """Write the data files (and PNGs unless ``plots=False``) for one figure."""
    fid = normalize_figure_id(figure_id)
    if out_dir is None:
        if manifest is None:
            out_dir = Path("figures")
        else:
            out_dir = Path(manifest.out_dir) / "figures"
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return FIGURES[fid](manifest, out, plots, **options)
