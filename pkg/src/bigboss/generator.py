"""Random Big Boss games built layer by layer, and samples of rho over them.

Player 1 is the boss. Coalitions containing the boss are filled by size: the
singleton draws from ``[1, mu]``, every coalition of size ``k >= 2`` draws
independently from ``[L, L + mu]`` where ``L`` is the largest worth among the
size ``k - 1`` boss coalitions. All other coalitions are worth 0. Draws that
break the union axiom are thrown away and redrawn.

Each sample index owns its own random stream (derived from the master seed and
the index), so results do not depend on how samples are split across workers.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from numpy.typing import NDArray

from .errors import RejectionBudgetExhausted
from .game import TOL, Game, _masks, _popcount, marginal_contributions, validate_big_boss
from .psv import rho_from_parts
from .solutions import shapley

__all__ = ["GenConfig", "SampleRun", "generate_bbg", "draw_bbg", "run_sample"]


@dataclass(frozen=True)
class GenConfig:
    """Generator settings.

    ``increment`` switches to the fixed-width variant: the singleton draws from
    ``[1, mu_scale]`` and each later layer widens by ``increment`` instead of a
    per-sample ``mu``.
    """

    n: int
    mu_scale: int = 100
    rng_seed: int = 0
    max_rejects: int = 10_000
    increment: int | None = None

    def __post_init__(self) -> None:
        if self.n < 3:
            raise ValueError(f"generator needs n >= 3, got {self.n}")
        if self.mu_scale < 1:
            raise ValueError(f"mu_scale must be >= 1, got {self.mu_scale}")
        if self.max_rejects < 1:
            raise ValueError(f"max_rejects must be >= 1, got {self.max_rejects}")
        if self.increment is not None and self.increment < 1:
            raise ValueError(f"increment must be >= 1, got {self.increment}")

    @classmethod
    def three_player_preset(cls, rng_seed: int = 0) -> GenConfig:
        """Three players, singleton in [1, 100], each layer 100 wider."""
        return cls(n=3, mu_scale=100, rng_seed=rng_seed, increment=100)


@dataclass(frozen=True)
class SampleRun:
    config: GenConfig
    m: int
    rhos: NDArray[np.float64]
    rejected: int
    provenance: NDArray[np.int64] = field(repr=False)
    attempts: NDArray[np.int64] = field(repr=False)

    @property
    def empirical_fraction_le_1(self) -> float:
        return float(np.mean(self.rhos <= 1.0))


@lru_cache(maxsize=None)
def _layers(n: int) -> tuple[NDArray[np.int64], ...]:
    """Masks containing player 1, grouped by coalition size 1..n."""
    masks = _masks(n)
    pc = _popcount(n)
    boss = masks[(masks & 1) == 1]
    return tuple(boss[pc[boss] == k] for k in range(1, n + 1))


@lru_cache(maxsize=None)
def _union_structure(n: int) -> tuple[NDArray[np.int64], NDArray[np.float64], NDArray[np.int64]]:
    """Boss coalitions, their outsider-indicator matrix, and the N minus {i} masks."""
    masks = _masks(n)
    boss = masks[(masks & 1) == 1]
    outside = (((boss[:, None] >> np.arange(n)) & 1) == 0).astype(np.float64)
    drop = ((1 << n) - 1) ^ (1 << np.arange(n))
    return boss, outside, drop


def _union_ok(values: NDArray[np.float64], n: int) -> bool:
    # layered draws are monotone with a veto boss by construction; only B3 can fail
    boss, outside, drop = _union_structure(n)
    worth = values[-1]
    slack = worth - values[boss] - outside @ (worth - values[drop])
    return bool(np.all(slack >= -TOL))


def _stream(cfg: GenConfig, sample_index: int) -> np.random.Generator:
    seq = np.random.SeedSequence(cfg.rng_seed, spawn_key=(sample_index,))
    return np.random.Generator(np.random.PCG64(seq))


def _draw_once(cfg: GenConfig, rng: np.random.Generator) -> NDArray[np.float64]:
    values = np.zeros(1 << cfg.n)
    if cfg.increment is None:
        width = int(rng.integers(1, cfg.mu_scale, endpoint=True))
        top = width
    else:
        width = cfg.increment
        top = cfg.mu_scale
    layers = _layers(cfg.n)
    values[layers[0]] = rng.integers(1, top, endpoint=True)
    low = values[layers[0]].max()
    for layer in layers[1:]:
        values[layer] = rng.integers(low, low + width, size=layer.size, endpoint=True)
        low = values[layer].max()
    return values


def draw_bbg(cfg: GenConfig, sample_index: int) -> tuple[Game, int]:
    """Accepted game for ``sample_index`` and the number of draws it took."""
    rng = _stream(cfg, sample_index)
    for attempt in range(1, cfg.max_rejects + 1):
        values = _draw_once(cfg, rng)
        if not _union_ok(values, cfg.n):
            continue
        g = Game(cfg.n, values, big_boss=1)
        report = validate_big_boss(g)
        if not report.is_big_boss:  # pragma: no cover - construction guarantees B1/B2
            raise AssertionError(f"generated game fails {report.first_violation}")
        return g, attempt
    raise RejectionBudgetExhausted(
        f"sample {sample_index}: {cfg.max_rejects} consecutive draws failed the union axiom"
    )


def generate_bbg(cfg: GenConfig, sample_index: int) -> Game:
    return draw_bbg(cfg, sample_index)[0]


def _rho_chunk(cfg: GenConfig, indices: range) -> tuple[list[float], list[int]]:
    rhos, attempts = [], []
    for i in indices:
        g, tries = draw_bbg(cfg, i)
        rhos.append(rho_from_parts(g.worth, marginal_contributions(g), shapley(g), 1))
        attempts.append(tries)
    return rhos, attempts


def run_sample(cfg: GenConfig, m: int, workers: int = 1) -> SampleRun:
    """Generate ``m`` accepted games and their unclipped rho values.

    The output is identical for any ``workers`` value.
    """
    if m < 1:
        raise ValueError(f"sample size must be >= 1, got {m}")
    workers = max(1, min(workers, m))
    if workers == 1:
        rhos, attempts = _rho_chunk(cfg, range(m))
    else:
        bounds = np.linspace(0, m, workers + 1).astype(int)
        chunks = [range(lo, hi) for lo, hi in zip(bounds[:-1], bounds[1:])]
        rhos, attempts = [], []
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for r, a in pool.map(_rho_chunk, [cfg] * len(chunks), chunks):
                rhos.extend(r)
                attempts.extend(a)
    attempts_arr = np.asarray(attempts, dtype=np.int64)
    return SampleRun(
        config=cfg,
        m=m,
        rhos=np.asarray(rhos, dtype=np.float64),
        rejected=int((attempts_arr - 1).sum()),
        provenance=np.arange(m, dtype=np.int64),
        attempts=attempts_arr,
    )
