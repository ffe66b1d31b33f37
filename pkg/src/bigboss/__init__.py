"""Stable allocations for Big Boss games and the statistics of their Shapley projection."""

from .errors import *  # noqa: F403
from .game import (
    BigBossReport,
    Game,
    Violation,
    check_prop2,
    is_convex,
    is_monotone,
    is_superadditive,
    make_game,
    marginal_contributions,
    validate_big_boss,
)
from .generator import GenConfig, SampleRun, generate_bbg, run_sample
from .psv import (
    PsvResult,
    TauDiagonal,
    convexity_via_alpha,
    psv,
    rho_v,
    tau_diagonal,
    tau_diagonal_point,
    theorem3_gaps,
)
from .solutions import core_contains, shapley, tau_bbg
from .stats import (
    Histogram,
    KsResult,
    LogNormalFit,
    RegressionFit,
    build_histogram,
    fit_lognormal_lsq,
    fit_lognormal_mle,
    ks_test,
    log_regression,
    lognormal_probability_le,
    moving_average_predict,
    predict_p_le_1,
    summarize_sample,
)

__version__ = "0.1.0"
