"""Experiment configuration files.

The format is line-oriented::

    # comment
    [game]
    k = 10
    n_A = 10
    valuation_mode = heterogeneous

    [ga]
    p = 50
    T = 1000

    [sweep]
    alpha = 1, 0.9, 0.85
    seeds = 0..9

    [outputs]
    dir = results/fig10

Keys before the first section header are routed to ``game`` or ``ga`` by
name.  List values are comma separated; ``a..b`` is an inclusive integer
range.  Booleans are ``true``/``false``.
"""

from __future__ import annotations

import dataclasses
import hashlib
import itertools
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

from ..engine import GAParams
from ..errors import BlottoError, SpecParseError
from ..game import GameConfig

OUT_ENV = "BLOTTOGA_OUT"
DEFAULT_OUT = "results"

SECTIONS = ("game", "ga", "sweep", "outputs")

GAME_KEYS = {
    "k": int, "n_A": float, "alpha": float, "valuation_mode": str,
    "fitness_mode": str, "seed": int, "V_A": "floats", "V_B": "floats",
}
GA_KEYS = {
    "p": int, "mu": float, "epsilon_mode": str, "T": int, "unit": float,
    "noise_only_on_mutation": bool,
}
SWEEP_RESERVED = {"seeds": "ints", "common_random_numbers": bool}
OUTPUT_KEYS = {"dir": str, "figures": "strs", "plots": bool}
NOT_SWEEPABLE = {"V_A", "V_B", "seed"}


@dataclass
class OutputSpec:
    dir: str = DEFAULT_OUT
    figures: List[str] = field(default_factory=list)
    plots: bool = True


@dataclass
class ExperimentSpec:
    game: GameConfig
    ga: GAParams
    sweep: List[Tuple[str, list]] = field(default_factory=list)
    seeds: List[int] = field(default_factory=lambda: [0])
    outputs: OutputSpec = field(default_factory=OutputSpec)
    common_random_numbers: bool = True
    source: Optional[str] = None

    def points(self) -> List[Dict[str, Any]]:
        """Parameter overrides for every sweep point, in cross-product order."""
        if not self.sweep:
            return [{}]
        names = [n for n, _ in self.sweep]
        return [dict(zip(names, combo)) for combo in itertools.product(*(v for _, v in self.sweep))]

    def runs(self) -> List["RunSpec"]:
        out = []
        for pi, overrides in enumerate(self.points()):
            game_over = {k: v for k, v in overrides.items() if k in GAME_KEYS}
            ga_over = {k: v for k, v in overrides.items() if k in GA_KEYS}
            for si, seed in enumerate(self.seeds):
                rs = derive_seed(self.game.seed, 0 if self.common_random_numbers else pi, seed)
                game = dataclasses.replace(self.game, seed=rs, **game_over)
                ga = dataclasses.replace(self.ga, **ga_over)
                out.append(RunSpec(f"p{pi:03d}_s{seed}", pi, si, seed, overrides, game, ga))
        return out

    def to_dict(self) -> dict:
        return {
            "game": dataclasses.asdict(self.game),
            "ga": dataclasses.asdict(self.ga.resolved(self.game.k)),
            "sweep": [[n, list(v)] for n, v in self.sweep],
            "seeds": list(self.seeds),
            "common_random_numbers": self.common_random_numbers,
            "outputs": dataclasses.asdict(self.outputs),
            "source": self.source,
        }


@dataclass
class RunSpec:
    run_id: str
    point_index: int
    seed_index: int
    seed: int
    overrides: Dict[str, Any]
    game: GameConfig
    ga: GAParams


def derive_seed(master_seed: int, point_index: int, seed: int) -> int:
    """Stable 64-bit run seed from (master seed, sweep point, listed seed)."""
    digest = hashlib.blake2b(f"{master_seed}:{point_index}:{seed}".encode(), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def _parse_bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("true", "yes", "on", "1"):
        return True
    if low in ("false", "no", "off", "0"):
        return False
    raise ValueError(f"expected true/false, got {text!r}")


def _parse_ints(text: str) -> List[int]:
    out: List[int] = []
    for part in _split_list(text):
        if ".." in part:
            lo, hi = part.split("..", 1)
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    return out


def _split_list(text: str) -> List[str]:
    return [p.strip() for p in text.split(",") if p.strip()]


def _parse_int(text: str) -> int:
    value = float(text)
    if value != int(value):
        raise ValueError(f"expected an integer, got {text!r}")
    return int(value)


def _convert(kind, text: str):
    if kind is int:
        return _parse_int(text)
    if kind is float:
        return float(text)
    if kind is bool:
        return _parse_bool(text)
    if kind is str:
        return text.strip()
    if kind == "floats":
        return tuple(float(p) for p in _split_list(text))
    if kind == "ints":
        return _parse_ints(text)
    if kind == "strs":
        return _split_list(text)
    raise AssertionError(kind)


def _kind_for(name: str):
    return GAME_KEYS.get(name) or GA_KEYS.get(name)


def parse_text(text: str, source: Optional[str] = None) -> ExperimentSpec:
    raw: Dict[str, Dict[str, Tuple[str, int]]] = {s: {} for s in SECTIONS}
    section = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if stripped.startswith("["):
            if not stripped.endswith("]"):
                raise SpecParseError(f"malformed section header {stripped!r}", lineno, source)
            section = stripped[1:-1].strip()
            if section not in SECTIONS:
                raise SpecParseError(f"unknown section [{section}]", lineno, source)
            continue
        if "=" not in stripped:
            raise SpecParseError(f"expected 'key = value', got {stripped!r}", lineno, source)
        key, value = (s.strip() for s in stripped.split("=", 1))
        target = section
        if target is None:
            if key in GAME_KEYS:
                target = "game"
            elif key in GA_KEYS:
                target = "ga"
            else:
                raise SpecParseError(f"unknown key {key!r}", lineno, source)
        allowed = {"game": GAME_KEYS, "ga": GA_KEYS, "outputs": OUTPUT_KEYS}.get(target)
        if target == "sweep":
            if key not in SWEEP_RESERVED and _kind_for(key) is None:
                raise SpecParseError(f"sweep parameter {key!r} is not a game or ga field", lineno, source)
            if key in NOT_SWEEPABLE:
                raise SpecParseError(f"{key!r} cannot be swept", lineno, source)
        elif key not in allowed:
            raise SpecParseError(f"unknown key {key!r} in [{target}]", lineno, source)
        if key in raw[target]:
            raise SpecParseError(f"duplicate key {key!r} in [{target}]", lineno, source)
        raw[target][key] = (value, lineno)

    def typed(section_name, table):
        out = {}
        for key, (value, lineno) in raw[section_name].items():
            try:
                out[key] = _convert(table[key], value)
            except ValueError as exc:
                raise SpecParseError(f"bad value for {key!r}: {exc}", lineno, source) from None
        return out

    game_kw = typed("game", GAME_KEYS)
    ga_kw = typed("ga", GA_KEYS)
    missing = [key for key in ("k", "n_A") if key not in game_kw]
    if missing:
        raise SpecParseError(f"missing required game key(s): {', '.join(missing)}", None, source)
    try:
        game = GameConfig(**game_kw)
    except BlottoError as exc:
        raise SpecParseError(str(exc), _line_for(raw["game"], str(exc)), source) from None
    try:
        ga = GAParams(**ga_kw)
    except BlottoError as exc:
        raise SpecParseError(str(exc), _line_for(raw["ga"], str(exc)), source) from None

    sweep, seeds, crn = [], [0], True
    for key, (value, lineno) in raw["sweep"].items():
        try:
            if key == "seeds":
                seeds = _parse_ints(value)
            elif key == "common_random_numbers":
                crn = _parse_bool(value)
            else:
                kind = _kind_for(key)
                values = [_convert(kind, part) for part in _split_list(value)]
                if not values:
                    raise ValueError("empty value list")
                for v in values:
                    # validate every sweep value against its dataclass
                    if key in GAME_KEYS:
                        dataclasses.replace(game, **{key: v})
                    else:
                        dataclasses.replace(ga, **{key: v})
                sweep.append((key, values))
        except (ValueError, BlottoError) as exc:
            raise SpecParseError(f"bad sweep value for {key!r}: {exc}", lineno, source) from None
    for seed in seeds:
        if not 0 <= seed < 2**64:
            raise SpecParseError("seeds must be unsigned 64-bit integers", raw["sweep"]["seeds"][1], source)

    outputs = OutputSpec(**typed("outputs", OUTPUT_KEYS))
    return ExperimentSpec(game, ga, sweep, seeds, outputs, crn, source)


def _line_for(entries, message: str) -> Optional[int]:
    """Line of the key an error message names, else the section's first line."""
    for key, (_, lineno) in entries.items():
        if message.startswith(key + " ") or f" {key} " in message:
            return lineno
    lines = [ln for _, ln in entries.values()]
    return min(lines) if lines else None


def parse_spec(path) -> ExperimentSpec:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise SpecParseError(f"cannot read spec: {exc}", None, str(path)) from None
    return parse_text(text, str(path))


def resolve_out_dir(spec: ExperimentSpec, override: Optional[str] = None) -> Path:
    """Command line beats ``$BLOTTOGA_OUT`` beats the spec file."""
    if override:
        return Path(override)
    env = os.environ.get(OUT_ENV)
    if env:
        return Path(env)
    return Path(spec.outputs.dir)
