"""Projection of the Shapley value onto the tau-diagonal of a Big Boss game.

The tau-diagonal joins ``e0`` (the boss takes everything) to ``e1`` (every weak
player gets its full marginal contribution). Points on it are indexed by
``rho`` in [0, 1]; ``rho = 1/2`` is the tau-value.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .errors import RhoOutOfRange, ZeroMarginalPrecondition
from .game import Game, marginal_contributions
from .solutions import require_big_boss, shapley, tau_from_marginals

__all__ = [
    "ALPHA_TOL",
    "TauDiagonal",
    "PsvResult",
    "tau_diagonal",
    "tau_diagonal_point",
    "rho_from_parts",
    "rho_v",
    "psv",
    "theorem3_gaps",
    "convexity_via_alpha",
]

ALPHA_TOL = 1e-9


@dataclass(frozen=True)
class TauDiagonal:
    e0: NDArray[np.float64]
    e1: NDArray[np.float64]
    boss: int

    @property
    def direction(self) -> NDArray[np.float64]:
        return self.e1 - self.e0

    @property
    def degenerate(self) -> bool:
        return bool(np.all(self.e0 == self.e1))


@dataclass(frozen=True)
class PsvResult:
    rho: float
    alpha: float
    allocation: NDArray[np.float64]
    clipped: bool
    gap_boss: float
    gap_weak_max: float


def _diagonal(worth: float, marg: NDArray[np.float64], boss: int) -> TauDiagonal:
    b = boss - 1
    weak = np.arange(marg.size) != b
    e0 = np.zeros(marg.size)
    e0[b] = worth
    e1 = np.where(weak, marg, 0.0)
    e1[b] = worth - marg[weak].sum()
    return TauDiagonal(e0, e1, boss)


def tau_diagonal(g: Game, boss: int | None = None) -> TauDiagonal:
    boss = require_big_boss(g, boss)
    return _diagonal(g.worth, marginal_contributions(g), boss)


def tau_diagonal_point(d: TauDiagonal, rho: float) -> NDArray[np.float64]:
    """(1 - rho) e0 + rho e1."""
    if not 0.0 <= rho <= 1.0:
        raise RhoOutOfRange(f"rho must lie in [0, 1], got {rho}")
    return (1.0 - rho) * d.e0 + rho * d.e1


def rho_from_parts(
    worth: float, marg: NDArray[np.float64], phi: NDArray[np.float64], boss: int
) -> float:
    """Unclipped projection parameter from v(N), marginals and Shapley value.

    Returns 1 when every weak marginal is zero (the diagonal is a point).
    """
    weak = np.arange(marg.size) != boss - 1
    m = marg[weak]
    total = m.sum()
    if total <= 0.0:
        return 1.0
    num = (worth - phi[boss - 1]) * total + np.dot(phi[weak], m)
    den = total * total + np.dot(m, m)
    return float(num / den)


def rho_v(g: Game, boss: int | None = None) -> float:
    boss = require_big_boss(g, boss)
    return rho_from_parts(g.worth, marginal_contributions(g), shapley(g), boss)


def _solve(g: Game, boss: int) -> PsvResult:
    marg = marginal_contributions(g)
    phi = shapley(g)
    diag = _diagonal(g.worth, marg, boss)
    rho = rho_from_parts(g.worth, marg, phi, boss)
    alpha = min(rho, 1.0)
    allocation = diag.e1.copy() if rho >= 1.0 else tau_diagonal_point(diag, alpha)
    gaps = tau_from_marginals(g.worth, marg, boss) - phi
    b = boss - 1
    weak_gaps = np.delete(gaps, b)
    return PsvResult(
        rho=rho,
        alpha=alpha,
        allocation=allocation,
        clipped=rho >= 1.0,
        gap_boss=float(gaps[b]),
        gap_weak_max=float(weak_gaps.max()) if weak_gaps.size else float("-inf"),
    )


def psv(g: Game, boss: int | None = None) -> PsvResult:
    """Diagonal point nearest the Shapley value, with the tau/Shapley gaps.

    ``rho`` is kept unclipped; ``alpha = min(rho, 1)`` indexes the allocation.
    ``clipped`` is set whenever the allocation is ``e1``, which includes the
    degenerate single-point diagonal.
    """
    return _solve(g, require_big_boss(g, boss))


def theorem3_gaps(g: Game, boss: int | None = None) -> tuple[float, float]:
    """(tau_b - phi_b, max over weak i of tau_i - phi_i)."""
    res = psv(g, boss)
    return res.gap_boss, res.gap_weak_max


def convexity_via_alpha(g: Game, boss: int | None = None, tol: float = ALPHA_TOL) -> bool:
    """Convexity test through the projection: convex iff alpha == 1/2.

    Only meaningful when every weak player has a positive marginal.
    """
    boss = require_big_boss(g, boss)
    marg = marginal_contributions(g)
    if np.any(np.delete(marg, boss - 1) <= 0.0):
        raise ZeroMarginalPrecondition("every weak player needs M_i(v) > 0")
    return abs(_solve(g, boss).alpha - 0.5) <= tol
