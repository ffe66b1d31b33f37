"""
Extrapolating to larger games
=============================

Fits mu against ln(n), smooths sigma, and predicts how often the
projection still falls strictly inside the diagonal.
"""

from bigboss.stats import log_regression, moving_average_predict, predict_p_le_1

# fitted (n, mu, sigma) for n = 3..11 at large sample sizes
fits = [
    (3, -0.63945, 0.12035),
    (4, -0.36859, 0.22352),
    (5, -0.20314, 0.26217),
    (6, -0.080581, 0.24528),
    (7, 0.019859, 0.2414),
    (8, 0.095919, 0.22983),
    (9, 0.16789, 0.23043),
    (10, 0.20518, 0.21246),
    (11, 0.24039, 0.20261),
]

reg = log_regression((n, mu) for n, mu, _ in fits)
_, sigma = moving_average_predict([s for *_, s in fits], window=3)
print(f"mu = {reg.slope:.4f} ln(n) {reg.intercept:+.4f}   R^2 = {reg.r_squared:.4f}")
print(f"sigma = {sigma:.5f}")

for n in range(12, 16):
    print(f"n={n}: mu={reg(n):.5f}  P(X<=1)={predict_p_le_1(n, reg, sigma):.5f}")
