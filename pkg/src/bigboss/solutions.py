"""Point solutions (Shapley value, Big Boss tau-value) and core membership.

Allocations are plain float64 arrays of length ``n``; entry ``k - 1`` is the
payoff of player ``k``.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Iterable

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import CapacityExceeded, DimensionMismatch, NotBigBoss
from .game import (
    MAX_PLAYERS,
    TOL,
    Game,
    _masks,
    _popcount,
    marginal_contributions,
    validate_big_boss,
)

__all__ = [
    "shapley",
    "shapley_many",
    "shapley_weights",
    "tau_bbg",
    "tau_from_marginals",
    "require_big_boss",
    "core_contains",
    "coalition_sums",
]


@lru_cache(maxsize=None)
def shapley_weights(n: int) -> NDArray[np.float64]:
    """w[s] = s! (n-s-1)! / n! for s = 0..n-1, built by a running product."""
    w = np.empty(n)
    w[0] = 1.0 / n
    for s in range(n - 1):
        w[s + 1] = w[s] * (s + 1) / (n - s - 1)
    w.setflags(write=False)
    return w


def shapley(g: Game) -> NDArray[np.float64]:
    """Exact Shapley value by the subset formula, O(n 2**n)."""
    n = g.n
    if n > MAX_PLAYERS:
        raise CapacityExceeded(f"n={n} exceeds the cap of {MAX_PLAYERS}")
    masks = _masks(n)
    weight_of = shapley_weights(n)[np.minimum(_popcount(n), n - 1)]
    v = g.values
    phi = np.empty(n)
    for k in range(n):
        bit = 1 << k
        s = masks[(masks & bit) == 0]
        phi[k] = np.dot(weight_of[s], v[s | bit] - v[s])
    return phi


def shapley_many(games: Iterable[Game]) -> list[NDArray[np.float64]]:
    return [shapley(g) for g in games]


def require_big_boss(g: Game, boss: int | None = None) -> int:
    """Return the boss label, raising :class:`NotBigBoss` if the axioms fail."""
    if boss is not None and boss != g.big_boss:
        g = Game(g.n, g.values, boss)
    report = validate_big_boss(g)
    if not report.is_big_boss:
        raise NotBigBoss(f"not a Big Boss game: {report.first_violation}")
    return report.boss  # type: ignore[return-value]


def tau_from_marginals(worth: float, marg: NDArray[np.float64], boss: int) -> NDArray[np.float64]:
    tau = 0.5 * marg
    weak = np.arange(marg.size) != boss - 1
    tau[boss - 1] = worth - 0.5 * marg[weak].sum()
    return tau


def tau_bbg(g: Game, boss: int | None = None) -> NDArray[np.float64]:
    """Closed-form tau-value of a Big Boss game: half of each weak marginal."""
    boss = require_big_boss(g, boss)
    return tau_from_marginals(g.worth, marginal_contributions(g), boss)


def coalition_sums(x: NDArray[np.float64]) -> NDArray[np.float64]:
    """sum_{i in S} x_i for every mask S."""
    n = x.size
    masks = _masks(n)
    out = np.zeros(1 << n)
    for k in range(n):
        out += np.where((masks >> k) & 1, x[k], 0.0)
    return out


def core_contains(
    g: Game, x: ArrayLike, boss: int | None = None, tol: float = TOL
) -> bool:
    """Core membership of allocation ``x``.

    With ``boss=None`` every coalition constraint is checked. With a boss
    label the Big Boss box ``0 <= x_i <= M_i(v)`` for weak players is used;
    the two agree on valid Big Boss games.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (g.n,):
        raise DimensionMismatch(f"allocation has shape {x.shape}, game has {g.n} players")
    if abs(x.sum() - g.worth) > tol:
        return False
    if boss is None:
        return bool(np.all(coalition_sums(x) >= g.values - tol))
    marg = marginal_contributions(g)
    weak = np.arange(g.n) != boss - 1
    return bool(np.all(x[weak] >= -tol) and np.all(x[weak] <= marg[weak] + tol))
