"""Execute experiment specs and persist their traces.

Layout under the output directory::

    manifest.json
    runs/<run_id>/trace.csv         per-iteration best and average-best strategies
    runs/<run_id>/families.csv      initial and final families
    runs/<run_id>/diagnostics.json  fits, correlations, shares, baseline comparison

Per-run files hold no timestamps, so re-running a spec reproduces them
byte for byte; wall-clock durations live only in the manifest.
"""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import json
import logging
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional

import numpy as np

from ..analysis import summarize_run
from ..engine import RunTrace, run
from ..equilibrium import versus_equilibrium
from .config import ExperimentSpec, RunSpec, resolve_out_dir

log = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"
TRACE_NAME = "trace.csv"
FAMILIES_NAME = "families.csv"
DIAGNOSTICS_NAME = "diagnostics.json"


def trace_header(k: int) -> List[str]:
    return (["iteration", "player", "best_fitness"]
            + [f"best_{h}" for h in range(1, k + 1)]
            + [f"avg_best_{h}" for h in range(1, k + 1)]
            + ["eq_score_diff", "eq_utility"])


def write_trace_csv(path: Path, trace: RunTrace, vs_eq: dict) -> None:
    k = trace.config.k
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(trace_header(k))
        for t in range(trace.iterations):
            for pl in ("A", "B"):
                pt = trace[pl]
                w.writerow([t + 1, pl, repr(float(pt.fitness[t]))]
                           + [repr(float(x)) for x in pt.best[t]]
                           + [repr(float(x)) for x in pt.avg_best[t]]
                           + [repr(float(vs_eq[pl].score_diff[t])), repr(float(vs_eq[pl].utility[t]))])


def write_families_csv(path: Path, trace: RunTrace) -> None:
    k = trace.config.k
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["generation", "player", "member"] + [f"x_{h}" for h in range(1, k + 1)])
        for fams in (trace.initial, trace.final):
            for pl in ("A", "B"):
                fam = fams[pl]
                for i, row in enumerate(fam.members):
                    w.writerow([fam.generation_index, pl, i] + [repr(float(x)) for x in row])


def sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def execute_run(rs: RunSpec, out_dir: Path) -> dict:
    """Run one GA instance and write its files; errors are captured in the record."""
    record = {
        "run_id": rs.run_id, "point_index": rs.point_index, "seed_index": rs.seed_index,
        "seed": rs.seed, "run_seed": rs.game.seed, "overrides": rs.overrides,
        "dir": f"runs/{rs.run_id}", "files": {}, "status": "ok", "error": None,
    }
    start = time.perf_counter()
    try:
        trace = run(rs.game, rs.ga)
        vs_eq = {pl: versus_equilibrium(trace, player=pl) for pl in ("A", "B")}
        run_dir = out_dir / record["dir"]
        run_dir.mkdir(parents=True, exist_ok=True)
        write_trace_csv(run_dir / TRACE_NAME, trace, vs_eq)
        write_families_csv(run_dir / FAMILIES_NAME, trace)
        diag = {
            "run_id": rs.run_id,
            "game": dataclasses.asdict(rs.game),
            "ga": dataclasses.asdict(trace.params),
            "V_A": trace.V_A.tolist(),
            "V_B": trace.V_B.tolist(),
            "summary": summarize_run(trace, vs_eq if trace.iterations else None),
            "vs_equilibrium": {pl: {"score_diff": vs_eq[pl].score_diff.tolist(),
                                    "utility": vs_eq[pl].utility.tolist()} for pl in ("A", "B")},
        }
        with open(run_dir / DIAGNOSTICS_NAME, "w") as fh:
            json.dump(diag, fh, indent=1, sort_keys=True, allow_nan=True)
            fh.write("\n")
        for name in (TRACE_NAME, FAMILIES_NAME, DIAGNOSTICS_NAME):
            rel = f"{record['dir']}/{name}"
            record["files"][name] = {"path": rel, "sha256": sha256(out_dir / rel)}
    except Exception as exc:  # recorded per run; the batch keeps going
        log.exception("run %s failed", rs.run_id)
        record["status"] = "error"
        record["error"] = f"{type(exc).__name__}: {exc}"
    record["duration_s"] = time.perf_counter() - start
    return record


def _execute(args):
    return execute_run(*args)


@dataclass
class RunManifest:
    spec: dict
    runs: List[dict] = field(default_factory=list)
    out_dir: Optional[Path] = None

    @property
    def ok(self) -> bool:
        return all(r["status"] == "ok" for r in self.runs)

    @property
    def path(self) -> Path:
        return Path(self.out_dir) / MANIFEST_NAME

    def to_dict(self) -> dict:
        return {"spec": self.spec, "runs": self.runs}

    def save(self) -> Path:
        with open(self.path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=1, sort_keys=True)
            fh.write("\n")
        return self.path

    @classmethod
    def load(cls, path) -> "RunManifest":
        path = Path(path)
        if path.is_dir():
            path = path / MANIFEST_NAME
        with open(path) as fh:
            data = json.load(fh)
        return cls(data["spec"], data["runs"], path.parent)

    def validate(self) -> List[str]:
        """Problems found when re-checking every listed file; empty when all match."""
        problems = []
        for r in self.runs:
            for name, entry in r.get("files", {}).items():
                p = Path(self.out_dir) / entry["path"]
                if not p.exists():
                    problems.append(f"{r['run_id']}: missing {entry['path']}")
                elif sha256(p) != entry["sha256"]:
                    problems.append(f"{r['run_id']}: checksum mismatch for {entry['path']}")
        return problems


def run_experiments(spec: ExperimentSpec, out_dir=None, jobs: int = 1) -> RunManifest:
    out = resolve_out_dir(spec, out_dir)
    out.mkdir(parents=True, exist_ok=True)
    runs = spec.runs()
    log.info("scheduling %d runs into %s", len(runs), out)
    if jobs > 1 and len(runs) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(_execute, [(rs, out) for rs in runs]))
    else:
        records = [execute_run(rs, out) for rs in runs]
    manifest = RunManifest(spec.to_dict(), records, out)
    manifest.save()
    return manifest


def load_run(manifest: RunManifest, record: dict):
    """Arrays and metadata persisted for one run."""
    run_dir = Path(manifest.out_dir) / record["dir"]
    with open(run_dir / DIAGNOSTICS_NAME) as fh:
        diag = json.load(fh)
    k = diag["game"]["k"]
    rows = _read_csv(run_dir / TRACE_NAME)
    fams = _read_csv(run_dir / FAMILIES_NAME)
    return StoredRun(record["run_id"], diag, _trace_arrays(rows, k), _family_arrays(fams, k))


@dataclass
class StoredRun:
    run_id: str
    diagnostics: dict
    series: dict  # player -> {"best", "avg_best", "fitness", "eq_score_diff", "eq_utility"}
    families: dict  # (generation, player) -> (p, k) array

    @property
    def game(self) -> dict:
        return self.diagnostics["game"]

    def valuations(self, player: str) -> np.ndarray:
        return np.asarray(self.diagnostics["V_A" if player == "A" else "V_B"])

    @property
    def iterations(self) -> int:
        return self.series["A"]["avg_best"].shape[0]


def _read_csv(path: Path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def _trace_arrays(rows, k: int) -> dict:
    body = rows[1:]
    out = {}
    for pl in ("A", "B"):
        sel = [r for r in body if r[1] == pl]
        arr = np.array([[float(x) for x in r[2:]] for r in sel]).reshape(len(sel), 2 * k + 3)
        out[pl] = {
            "fitness": arr[:, 0], "best": arr[:, 1:1 + k], "avg_best": arr[:, 1 + k:1 + 2 * k],
            "eq_score_diff": arr[:, 1 + 2 * k], "eq_utility": arr[:, 2 + 2 * k],
        }
    return out


def _family_arrays(rows, k: int) -> dict:
    out: dict = {}
    for r in rows[1:]:
        out.setdefault((int(r[0]), r[1]), []).append([float(x) for x in r[3:3 + k]])
    return {key: np.array(v) for key, v in out.items()}


def configure_logging(verbose: bool = False) -> None:
    logging.basicConfig(stream=sys.stderr, level=logging.DEBUG if verbose else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
