"""
A three-player Big Boss game
============================

Player 1 is the boss: no coalition without them earns anything.
"""

import numpy as np

from bigboss import make_game, validate_big_boss
from bigboss.psv import psv, tau_diagonal
from bigboss.solutions import core_contains, shapley, tau_bbg

g = make_game(3, [((1,), 56), ((1, 2), 111), ((1, 3), 136), ((1, 2, 3), 140)])

report = validate_big_boss(g)
print("boss:", report.boss, " marginals:", report.marginals)

# Shapley hands player 2 more than they add to the grand coalition,
# so it is not a core allocation
phi = shapley(g)
print("shapley:", phi, " in core:", core_contains(g, phi))

# the core is a box; tau sits at its centre
d = tau_diagonal(g)
print("e0:", d.e0, " e1:", d.e1, " tau:", tau_bbg(g))

res = psv(g)
print(f"rho = {res.rho:.6f}")
print("nearest diagonal point:", np.round(res.allocation, 4))
print("distance to shapley:", round(float(np.linalg.norm(res.allocation - phi)), 4))

# walk along the diagonal to see the distance bottom out at rho
for r in np.linspace(0.8, 1.0, 5):
    x = (1 - r) * d.e0 + r * d.e1
    print(f"  rho={r:.2f}  |x - phi| = {np.linalg.norm(x - phi):.4f}")
