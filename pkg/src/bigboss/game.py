"""TU-games stored as dense coalition tables, plus structural checks.

A coalition is a bitmask: bit ``k - 1`` is set iff player ``k`` belongs to it.
Players are labelled ``1..n`` everywhere in the public API.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import (
    AmbiguousBoss,
    CapacityExceeded,
    DuplicateCoalition,
    NonFiniteWorth,
    NonzeroEmptyCoalition,
    PlayerOutOfRange,
)

__all__ = [
    "MAX_PLAYERS",
    "TOL",
    "Game",
    "Violation",
    "BigBossReport",
    "make_game",
    "coalition_mask",
    "members",
    "marginal_contributions",
    "is_monotone",
    "monotonicity_witness",
    "is_superadditive",
    "is_convex",
    "validate_big_boss",
    "check_prop2",
]

MAX_PLAYERS = 26
TOL = 1e-9


@lru_cache(maxsize=None)
def _masks(n: int) -> NDArray[np.int64]:
    out = np.arange(1 << n, dtype=np.int64)
    out.setflags(write=False)
    return out


@lru_cache(maxsize=None)
def _popcount(n: int) -> NDArray[np.int64]:
    masks = _masks(n)
    pc = np.zeros(1 << n, dtype=np.int64)
    for k in range(n):
        pc += (masks >> k) & 1
    pc.setflags(write=False)
    return pc


def coalition_mask(players: Iterable[int]) -> int:
    mask = 0
    for p in players:
        mask |= 1 << (p - 1)
    return mask


def members(mask: int) -> frozenset[int]:
    """Player labels contained in ``mask``."""
    return frozenset(k + 1 for k in range(mask.bit_length()) if mask >> k & 1)


@dataclass(frozen=True, eq=False)
class Game:
    """A transferable-utility game on players ``1..n``.

    ``values[mask]`` is the worth of the coalition encoded by ``mask``. The
    table is copied to a read-only float64 array on construction.
    """

    n: int
    values: NDArray[np.float64]
    big_boss: int | None = None

    def __post_init__(self) -> None:
        if self.n < 1:
            raise PlayerOutOfRange(f"need at least one player, got n={self.n}")
        if self.n > MAX_PLAYERS:
            raise CapacityExceeded(f"n={self.n} exceeds the cap of {MAX_PLAYERS}")
        values = np.array(self.values, dtype=np.float64)
        if values.shape != (1 << self.n,):
            raise ValueError(
                f"value table must have length 2**{self.n}={1 << self.n}, got {values.shape}"
            )
        if not np.all(np.isfinite(values)):
            raise NonFiniteWorth("all coalition worths must be finite")
        if values[0] != 0.0:
            raise NonzeroEmptyCoalition(f"v(empty set) must be 0, got {values[0]!r}")
        if self.big_boss is not None and not 1 <= self.big_boss <= self.n:
            raise PlayerOutOfRange(f"big boss {self.big_boss} not in 1..{self.n}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def grand(self) -> int:
        return (1 << self.n) - 1

    @property
    def worth(self) -> float:
        """v(N)."""
        return float(self.values[-1])

    def v(self, players: Iterable[int]) -> float:
        return float(self.values[coalition_mask(players)])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Game):
            return NotImplemented
        return (
            self.n == other.n
            and self.big_boss == other.big_boss
            and np.array_equal(self.values, other.values)
        )

    def __add__(self, other: Game) -> Game:
        if other.n != self.n:
            raise ValueError("games must share the player set")
        return Game(self.n, self.values + other.values)

    def scaled(self, c: float) -> Game:
        return Game(self.n, self.values * c, self.big_boss)

    def relabeled(self, perm: Sequence[int]) -> Game:
        """Game in which player ``perm[k-1]`` plays the role of player ``k``.

        ``perm`` is a permutation of ``1..n``. The returned game ``w`` satisfies
        ``w(perm(S)) = v(S)``.
        """
        n = self.n
        masks = _masks(n)
        image = np.zeros_like(masks)
        for k, p in enumerate(perm):
            image |= ((masks >> k) & 1) << (p - 1)
        values = np.empty_like(self.values)
        values[image] = self.values
        boss = None if self.big_boss is None else perm[self.big_boss - 1]
        return Game(n, values, boss)


def make_game(
    n: int,
    entries: Iterable[tuple[Iterable[int], float]],
    big_boss: int | None = None,
) -> Game:
    """Build a game from ``(coalition, worth)`` pairs; missing coalitions are 0."""
    if n < 1:
        raise PlayerOutOfRange(f"need at least one player, got n={n}")
    if n > MAX_PLAYERS:
        raise CapacityExceeded(f"n={n} exceeds the cap of {MAX_PLAYERS}")
    values = np.zeros(1 << n)
    seen: set[int] = set()
    for players, worth in entries:
        players = list(players)
        for p in players:
            if not 1 <= p <= n:
                raise PlayerOutOfRange(f"player {p} not in 1..{n}")
        mask = coalition_mask(players)
        if mask in seen or len(set(players)) != len(players):
            raise DuplicateCoalition(f"coalition {sorted(players)} given twice")
        seen.add(mask)
        worth = float(worth)
        if not math.isfinite(worth):
            raise NonFiniteWorth(f"worth of {sorted(players)} is {worth}")
        if mask == 0 and worth != 0.0:
            raise NonzeroEmptyCoalition(f"v(empty set) must be 0, got {worth}")
        values[mask] = worth
    return Game(n, values, big_boss)


def marginal_contributions(g: Game) -> NDArray[np.float64]:
    """M_i(v) = v(N) - v(N \\ {i}) for every player, in label order."""
    grand = g.grand
    drop = grand ^ (1 << np.arange(g.n))
    return g.worth - g.values[drop]


def monotonicity_witness(g: Game, tol: float = TOL) -> tuple[int, int] | None:
    """First ``(S \\ {i}, S)`` mask pair with v(S \\ {i}) > v(S), or None."""
    masks = _masks(g.n)
    v = g.values
    best: tuple[int, int] | None = None
    for k in range(g.n):
        bit = 1 << k
        with_k = masks[(masks & bit) != 0]
        bad = with_k[v[with_k ^ bit] > v[with_k] + tol]
        if bad.size:
            cand = (int(bad[0]) ^ bit, int(bad[0]))
            if best is None or cand[1] < best[1]:
                best = cand
    return best


def is_monotone(g: Game, tol: float = TOL) -> bool:
    return monotonicity_witness(g, tol) is None


def is_superadditive(g: Game, tol: float = TOL) -> bool:
    """v(S | T) >= v(S) + v(T) for every disjoint pair.

    Cost is O(4**n) vectorised work; intended for n up to about 12.
    """
    masks = _masks(g.n)
    v = g.values
    for s in range(1, 1 << g.n):
        t = masks[(masks & s) == 0]
        t = t[t > s]  # each unordered pair once; t == 0 is trivial
        if t.size and np.any(v[s | t] < v[s] + v[t] - tol):
            return False
    return True


def is_convex(g: Game, tol: float = TOL) -> bool:
    """Supermodularity via the local test over pairs of outside players."""
    masks = _masks(g.n)
    v = g.values
    for i in range(g.n):
        for j in range(i + 1, g.n):
            bi, bj = 1 << i, 1 << j
            s = masks[(masks & (bi | bj)) == 0]
            if np.any(v[s | bi] + v[s | bj] > v[s | bi | bj] + v[s] + tol):
                return False
    return True


@dataclass(frozen=True)
class Violation:
    """Which axiom failed and the coalitions that show it.

    B1: ``(S \\ {i}, S)`` with the smaller coalition worth more.
    B2: ``(S,)`` a boss-free coalition with nonzero worth.
    B3: ``(S, N \\ S)`` where the outsiders' marginals exceed v(N) - v(S).
    """

    axiom: str
    coalitions: tuple[frozenset[int], ...]


@dataclass(frozen=True)
class BigBossReport:
    is_big_boss: bool
    boss: int | None
    b1_monotone: bool
    b2_veto: bool
    b3_union: bool
    marginals: NDArray[np.float64] = field(repr=False)
    first_violation: Violation | None = None


def _veto_witness(g: Game, boss: int, tol: float) -> int | None:
    masks = _masks(g.n)
    free = masks[(masks & (1 << (boss - 1))) == 0]
    bad = free[np.abs(g.values[free]) > tol]
    return int(bad[0]) if bad.size else None


def _outsider_sums(n: int, weights: NDArray[np.float64]) -> NDArray[np.float64]:
    """For every mask S, the sum of ``weights`` over players outside S."""
    masks = _masks(n)
    out = np.zeros(1 << n)
    for k in range(n):
        out += np.where((masks >> k) & 1, 0.0, weights[k])
    return out


def _union_witness(
    g: Game, boss: int, marg: NDArray[np.float64], tol: float
) -> int | None:
    masks = _masks(g.n)
    outside = _outsider_sums(g.n, marg)
    with_boss = masks[(masks & (1 << (boss - 1))) != 0]
    slack = g.worth - g.values[with_boss] - outside[with_boss]
    bad = with_boss[slack < -tol]
    return int(bad[0]) if bad.size else None


def validate_big_boss(g: Game, tol: float = TOL) -> BigBossReport:
    """Check the three Big Boss axioms.

    If ``g.big_boss`` is set only that player is tried. Otherwise every player
    is tried in label order; a second player passing all axioms raises
    :class:`AmbiguousBoss`.
    """
    marg = marginal_contributions(g)
    mono = monotonicity_witness(g, tol)
    b1 = mono is None
    b1_violation = (
        None
        if b1
        else Violation("B1", (members(mono[0]), members(mono[1])))  # type: ignore[index]
    )

    candidates = [g.big_boss] if g.big_boss is not None else list(range(1, g.n + 1))
    verdicts = []
    for b in candidates:
        veto = _veto_witness(g, b, tol)
        union = _union_witness(g, b, marg, tol) if veto is None else None
        verdicts.append((b, veto, union))

    passing = [b for b, veto, union in verdicts if b1 and veto is None and union is None]
    if len(passing) > 1:
        raise AmbiguousBoss(f"players {passing} all satisfy the Big Boss axioms")

    if passing:
        boss = passing[0]
        return BigBossReport(True, boss, True, True, True, marg)

    # report against the first veto player if there is one, else the first candidate
    vetoed = [vd for vd in verdicts if vd[1] is None]
    boss, veto, union = vetoed[0] if vetoed else verdicts[0]
    b2 = veto is None
    b3 = b2 and union is None
    if b1_violation is not None:
        violation = b1_violation
    elif not b2:
        violation = Violation("B2", (members(veto),))  # type: ignore[arg-type]
    else:
        violation = Violation("B3", (members(union), members(g.grand ^ union)))  # type: ignore[operator]
    return BigBossReport(
        False, boss if b2 else None, b1, b2, b3, marg, violation
    )


def check_prop2(g: Game, boss: int, tol: float = TOL) -> bool:
    """The union axiom restated through worths of the (n-1)-player coalitions.

    Checks ``(n - s - 1) v(N) + v(S) <= sum_{i not in S} v(N \\ {i})`` for every
    coalition S containing ``boss``.
    """
    n = g.n
    masks = _masks(n)
    pc = _popcount(n)
    drop_worths = g.values[g.grand ^ (1 << np.arange(n))]
    outside = _outsider_sums(n, drop_worths)
    s = masks[(masks & (1 << (boss - 1))) != 0]
    lhs = (n - pc[s] - 1) * g.worth + g.values[s]
    return bool(np.all(lhs <= outside[s] + tol))
