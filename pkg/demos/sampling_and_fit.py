"""
Sampling random Big Boss games and fitting rho
==============================================

Draws games for a few sizes, fits a log-normal to each rho sample and
checks the fit with a KS test. Use larger ``M`` for tighter numbers.
"""

import numpy as np

from bigboss.generator import GenConfig, run_sample
from bigboss.plotting import histogram_svg
from bigboss.stats import fitting_histogram, summarize_sample

M = 1000

for n in (3, 5, 7):
    run = run_sample(GenConfig(n=n, mu_scale=1000, rng_seed=1), M)
    row = summarize_sample(n, run.rhos)
    f = row.fit
    print(
        f"n={n}: mu={f.mu_hat:+.4f} sigma={f.sigma_hat:.4f} "
        f"P(X<=1)={f.p_le_1:.3f} observed={row.empirical_frac:.3f} "
        f"KS D={row.ks.d_stat:.3f} p={row.ks.p_value:.2g} "
        f"(draws per game {1 + run.rejected / M:.1f})"
    )

# the upper tail is long, hence the capped fit range
print("n=7 quantiles:", np.round(np.quantile(run.rhos, [0.5, 0.99, 1.0]), 3))

histogram_svg(fitting_histogram(run.rhos), row.fit, "rho_n7.svg", "n = 7")
print("wrote rho_n7.svg")
