"""Flat-file formats: game documents, rho sample CSVs and summary reports.

Game document (JSON)::

    {"n": 3, "big_boss": 1, "values": [0, 56, 0, 111, 0, 136, 0, 140]}

``values`` is either the dense table in bitmask order or an object keyed by
comma-joined ascending player labels (``"1,3": 136``); unlisted coalitions
are worth 0 and ``""`` names the empty coalition. Dense form is what gets
written.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Any, Iterable

import numpy as np

from .errors import BigBossError
from .game import Game, make_game
from .generator import SampleRun
from .stats import ReportRow

__all__ = [
    "GameFileError",
    "fmt",
    "game_from_dict",
    "game_to_dict",
    "parse_game",
    "dumps_game",
    "load_game",
    "save_game",
    "write_sample_csv",
    "read_sample_csv",
    "write_sample_metadata",
    "write_report_csv",
    "read_report_csv",
]


class GameFileError(BigBossError):
    """Malformed game document."""


def fmt(x: float) -> str:
    """17 significant digits: enough to round-trip any double."""
    return format(float(x), ".17g")


def _parse_key(key: str) -> list[int]:
    key = key.strip()
    if not key:
        return []
    try:
        players = [int(p) for p in key.split(",")]
    except ValueError:
        raise GameFileError(f"bad coalition key {key!r}") from None
    if players != sorted(players):
        raise GameFileError(f"coalition key {key!r} is not in ascending order")
    return players


def game_from_dict(doc: dict[str, Any]) -> Game:
    if not isinstance(doc, dict) or "n" not in doc or "values" not in doc:
        raise GameFileError("game document needs 'n' and 'values'")
    n = doc["n"]
    if not isinstance(n, int) or isinstance(n, bool):
        raise GameFileError(f"'n' must be an integer, got {n!r}")
    boss = doc.get("big_boss")
    if boss is not None and (not isinstance(boss, int) or isinstance(boss, bool)):
        raise GameFileError(f"'big_boss' must be an integer or null, got {boss!r}")
    values = doc["values"]
    if isinstance(values, list):
        if n < 1 or len(values) != 1 << n:
            raise GameFileError(f"dense 'values' must have 2**n entries, got {len(values)}")
        if not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in values):
            raise GameFileError("dense 'values' must be numbers")
        return Game(n, np.asarray(values, dtype=np.float64), boss)
    if isinstance(values, dict):
        entries = []
        for key, worth in values.items():
            if not isinstance(worth, (int, float)) or isinstance(worth, bool):
                raise GameFileError(f"worth of {key!r} is not a number")
            entries.append((_parse_key(key), worth))
        return make_game(n, entries, boss)
    raise GameFileError("'values' must be a list or an object")


def game_to_dict(g: Game) -> dict[str, Any]:
    return {"n": g.n, "big_boss": g.big_boss, "values": [float(x) for x in g.values]}


def dumps_game(g: Game) -> str:
    boss = "null" if g.big_boss is None else str(g.big_boss)
    values = ", ".join(fmt(x) for x in g.values)
    return f'{{"n": {g.n}, "big_boss": {boss}, "values": [{values}]}}\n'


def parse_game(text: str) -> Game:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GameFileError(f"invalid JSON: {exc}") from None
    return game_from_dict(doc)


def load_game(path: str | Path) -> Game:
    return parse_game(Path(path).read_text())


def save_game(g: Game, path: str | Path) -> None:
    Path(path).write_text(dumps_game(g))


def write_sample_csv(run: SampleRun, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["sample_index", "rho"])
        for i, rho in zip(run.provenance, run.rhos):
            w.writerow([int(i), fmt(rho)])


def read_sample_csv(path: str | Path) -> np.ndarray:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return np.array([float(r["rho"]) for r in rows])


def write_sample_metadata(run: SampleRun, path: str | Path, **extra: Any) -> None:
    cfg = run.config
    meta = {
        "n": cfg.n,
        "m": run.m,
        "mu_scale": cfg.mu_scale,
        "rng_seed": cfg.rng_seed,
        "rejected": run.rejected,
        "increment": cfg.increment,
        **extra,
    }
    Path(path).write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")


def write_report_csv(rows: Iterable[ReportRow], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(ReportRow.COLUMNS)
        for row in rows:
            vals = row.values()
            w.writerow([vals[0], vals[1], *(fmt(x) for x in vals[2:])])


def read_report_csv(path: str | Path) -> list[dict[str, float]]:
    """Rows of a summary report; only ``n`` and ``mu_hat`` are required."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"n", "mu_hat"} <= set(reader.fieldnames):
            raise GameFileError(f"{path}: report needs 'n' and 'mu_hat' columns")
        return [
            {k: float(v) for k, v in r.items() if v not in (None, "")} for r in reader
        ]
