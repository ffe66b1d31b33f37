"""Log-normal modelling of rho samples.

Histogram fitting, a one-sample Kolmogorov-Smirnov test, closed-form
log-normal moments, and the cross-``n`` regression/smoothing used to
extrapolate the parameters to larger games.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.optimize import least_squares
from scipy.special import ndtr

from .errors import (
    DegenerateHistogram,
    EmptySample,
    InsufficientPoints,
    NoConvergence,
    NonPositiveSample,
    NonPositiveThreshold,
    WindowTooLarge,
)

__all__ = [
    "DEFAULT_BINS",
    "Histogram",
    "LogNormalFit",
    "KsResult",
    "RegressionFit",
    "normal_cdf",
    "lognormal_pdf",
    "lognormal_cdf",
    "lognormal_probability_le",
    "build_histogram",
    "fitting_histogram",
    "TAIL_QUANTILE",
    "ReportRow",
    "summarize_sample",
    "fit_lognormal_mle",
    "fit_lognormal_lsq",
    "kolmogorov_sf",
    "ks_test",
    "log_regression",
    "moving_average_predict",
    "smoothing_residual_sd",
    "predict_mu",
    "predict_p_le_1",
]

DEFAULT_BINS = 50
TAIL_QUANTILE = 0.99


def normal_cdf(z: float) -> float:
    return 0.5 * math.erfc(-z / math.sqrt(2.0))


def lognormal_pdf(x: ArrayLike, mu: float, sigma: float) -> NDArray[np.float64]:
    x = np.asarray(x, dtype=np.float64)
    out = np.zeros_like(x)
    pos = x > 0
    z = (np.log(x[pos]) - mu) / sigma
    out[pos] = np.exp(-0.5 * z * z) / (x[pos] * sigma * math.sqrt(2.0 * math.pi))
    return out


def lognormal_cdf(x: ArrayLike, mu: float, sigma: float) -> NDArray[np.float64]:
    x = np.asarray(x, dtype=np.float64)
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = ndtr((np.log(x[pos]) - mu) / sigma)
    return out


def lognormal_probability_le(mu: float, sigma: float, x: float = 1.0) -> float:
    """P(X <= x) for X ~ LogNormal(mu, sigma**2)."""
    if x <= 0:
        raise NonPositiveThreshold(f"threshold must be positive, got {x}")
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    return normal_cdf((math.log(x) - mu) / sigma)


@dataclass(frozen=True)
class Histogram:
    """Equal-width histogram.

    ``overflow`` counts samples above the last edge when the range was capped;
    densities are normalised by the full sample size, so they integrate to
    the in-range fraction.
    """

    edges: NDArray[np.float64]
    counts: NDArray[np.int64]
    overflow: int = 0

    @property
    def m(self) -> int:
        return int(self.counts.sum()) + self.overflow

    @property
    def widths(self) -> NDArray[np.float64]:
        return np.diff(self.edges)

    @property
    def centers(self) -> NDArray[np.float64]:
        return 0.5 * (self.edges[:-1] + self.edges[1:])

    @property
    def densities(self) -> NDArray[np.float64]:
        return self.counts / (self.m * self.widths)


def _positive_sample(samples: ArrayLike) -> NDArray[np.float64]:
    x = np.asarray(samples, dtype=np.float64).ravel()
    if x.size == 0:
        raise EmptySample("sample is empty")
    if np.any(~(x > 0)):
        raise NonPositiveSample("all samples must be positive")
    return x


def build_histogram(
    samples: ArrayLike, bins: int = DEFAULT_BINS, upper: float | None = None
) -> Histogram:
    """Equal-width bins over [min, max]; the maximum falls in the last bin.

    ``upper`` caps the range at [min, upper] and counts the rest as overflow.
    A constant sample gets unit-width bins with the value at the left edge of
    the last one, so every observation lands there.
    """
    x = _positive_sample(samples)
    if bins < 1:
        raise ValueError(f"bins must be >= 1, got {bins}")
    lo, hi = x.min(), x.max()
    if upper is not None:
        if upper < lo:
            raise ValueError(f"upper={upper} is below the sample minimum {lo}")
        hi = min(hi, upper)
    if lo == hi:
        edges = lo - (bins - 1) + np.arange(bins + 1, dtype=np.float64)
        counts = np.zeros(bins, dtype=np.int64)
        counts[-1] = np.count_nonzero(x == lo)
        return Histogram(edges, counts, x.size - int(counts[-1]))
    counts, edges = np.histogram(x, bins=bins, range=(lo, hi))
    counts = counts.astype(np.int64)
    return Histogram(edges, counts, x.size - int(counts.sum()))


def fitting_histogram(
    samples: ArrayLike, bins: int = DEFAULT_BINS, tail_quantile: float = TAIL_QUANTILE
) -> Histogram:
    """Histogram used for fitting: range capped at an upper sample quantile.

    rho samples are heavy-tailed (a handful of values tens of times the
    median), and equal-width bins over the full range would put nearly all
    of the mass in the first bin.
    """
    x = _positive_sample(samples)
    upper = None if tail_quantile >= 1.0 else float(np.quantile(x, tail_quantile))
    return build_histogram(x, bins, upper)


@dataclass(frozen=True)
class LogNormalFit:
    mu_hat: float
    sigma_hat: float
    method: str
    sse: float = float("nan")
    start: tuple[float, float] | None = None

    @property
    def mean_hat(self) -> float:
        return math.exp(self.mu_hat + self.sigma_hat**2 / 2)

    @property
    def var_hat(self) -> float:
        s2 = self.sigma_hat**2
        return math.expm1(s2) * math.exp(2 * self.mu_hat + s2)

    @property
    def p_le_1(self) -> float:
        return lognormal_probability_le(self.mu_hat, self.sigma_hat, 1.0)


def fit_lognormal_mle(samples: ArrayLike) -> LogNormalFit:
    logs = np.log(_positive_sample(samples))
    return LogNormalFit(float(logs.mean()), float(logs.std()), "mle")


def _binned_mle(h: Histogram) -> tuple[float, float]:
    logs = np.log(h.centers[h.counts > 0])
    w = h.counts[h.counts > 0].astype(np.float64)
    mu = float(np.average(logs, weights=w))
    sigma = float(np.sqrt(np.average((logs - mu) ** 2, weights=w)))
    return mu, sigma


def fit_lognormal_lsq(h: Histogram) -> LogNormalFit:
    """Least-squares fit of the log-normal density to the bin densities.

    Residuals are taken at bin centres. The start point is the count-weighted
    mean and standard deviation of log bin centres.
    """
    nonempty = int(np.count_nonzero(h.counts))
    if nonempty < 3:
        raise DegenerateHistogram(f"need at least 3 nonempty bins, got {nonempty}")
    if np.any(h.centers <= 0):
        raise DegenerateHistogram("bin centres must be positive")
    x, y = h.centers, h.densities
    mu0, sigma0 = _binned_mle(h)
    if not sigma0 > 0:
        raise DegenerateHistogram("zero spread in log bin centres")

    def resid(p: NDArray[np.float64]) -> NDArray[np.float64]:
        return lognormal_pdf(x, p[0], math.exp(p[1])) - y

    sol = least_squares(resid, [mu0, math.log(sigma0)], method="lm", xtol=1e-12, ftol=1e-12)
    if not sol.success or not np.all(np.isfinite(sol.x)):
        raise NoConvergence(sol.message)
    mu, sigma = float(sol.x[0]), math.exp(float(sol.x[1]))
    return LogNormalFit(mu, sigma, "lsq", float(2 * sol.cost), (mu0, sigma0))


@dataclass(frozen=True)
class KsResult:
    d_stat: float
    p_value: float
    m: int


def kolmogorov_sf(lam: float) -> float:
    """Q(lam) = 2 sum_{k>=1} (-1)^(k-1) exp(-2 k^2 lam^2).

    Below lam = 1 the alternating series is replaced by the equivalent
    theta-function form of the CDF, which converges fast there.
    """
    if lam <= 0:
        return 1.0
    if lam < 1.0:
        c = -(math.pi**2) / (8.0 * lam * lam)
        cdf, k = 0.0, 1
        while True:
            term = math.exp(c * (2 * k - 1) ** 2)
            cdf += term
            if term < 1e-16:
                break
            k += 1
        return min(1.0, max(0.0, 1.0 - math.sqrt(2.0 * math.pi) / lam * cdf))
    total, k, sign = 0.0, 1, 1.0
    while True:
        term = math.exp(-2.0 * k * k * lam * lam)
        total += sign * term
        if term < 1e-12:
            break
        sign, k = -sign, k + 1
    return min(1.0, max(0.0, 2.0 * total))


def ks_test(samples: ArrayLike, mu: float, sigma: float) -> KsResult:
    """One-sample KS test against LogNormal(mu, sigma**2).

    The p-value uses the asymptotic Kolmogorov law with the small-sample
    scaling sqrt(m) + 0.12 + 0.11 / sqrt(m).
    """
    x = np.sort(_positive_sample(samples))
    m = x.size
    cdf = lognormal_cdf(x, mu, sigma)
    i = np.arange(1, m + 1)
    d = float(max(np.max(i / m - cdf), np.max(cdf - (i - 1) / m)))
    d = min(1.0, max(0.0, d))
    rm = math.sqrt(m)
    return KsResult(d, kolmogorov_sf((rm + 0.12 + 0.11 / rm) * d), m)


@dataclass(frozen=True)
class RegressionFit:
    """y = slope * ln(n) + intercept."""

    slope: float
    intercept: float
    r_squared: float

    def __call__(self, n: float) -> float:
        return self.slope * math.log(n) + self.intercept


def log_regression(points: Iterable[tuple[int, float]]) -> RegressionFit:
    pts = list(points)
    if len(pts) < 3:
        raise InsufficientPoints(f"need at least 3 points, got {len(pts)}")
    n = np.array([p[0] for p in pts], dtype=np.float64)
    if np.unique(n).size != n.size:
        raise InsufficientPoints("player counts must be distinct")
    y = np.array([p[1] for p in pts], dtype=np.float64)
    design = np.column_stack([np.log(n), np.ones_like(n)])
    (slope, intercept), *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = y - design @ np.array([slope, intercept])
    sst = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 if sst == 0.0 else 1.0 - float(resid @ resid) / sst
    return RegressionFit(float(slope), float(intercept), min(1.0, max(0.0, r2)))


def _trailing_means(values: Sequence[float], window: int) -> NDArray[np.float64]:
    v = np.asarray(values, dtype=np.float64)
    if window < 1:
        raise ValueError(f"window must be >= 1, got {window}")
    if v.size < window:
        raise WindowTooLarge(f"window {window} longer than series of {v.size}")
    return np.convolve(v, np.full(window, 1.0 / window), mode="valid")


def moving_average_predict(values: Sequence[float], window: int = 3) -> tuple[NDArray[np.float64], float]:
    """Trailing-window means and the next-step prediction (mean of the last window)."""
    smoothed = _trailing_means(values, window)
    predicted = float(np.mean(np.asarray(values, dtype=np.float64)[-window:]))
    return smoothed, predicted


def smoothing_residual_sd(values: Sequence[float], window: int = 3) -> float:
    """Population std of value minus its trailing mean, over full windows."""
    smoothed = _trailing_means(values, window)
    resid = np.asarray(values, dtype=np.float64)[window - 1 :] - smoothed
    return float(resid.std())


def predict_mu(n: int, reg: RegressionFit) -> float:
    return reg(n)


def predict_p_le_1(n: int, reg: RegressionFit, sigma_pred: float) -> float:
    if sigma_pred <= 0:
        raise ValueError(f"sigma_pred must be positive, got {sigma_pred}")
    return normal_cdf(-reg(n) / sigma_pred)


@dataclass(frozen=True)
class ReportRow:
    n: int
    m: int
    fit: LogNormalFit
    empirical_frac: float
    ks: KsResult

    COLUMNS = ("n", "m", "mu_hat", "sigma_hat", "E", "V", "P_le_1", "empirical_frac", "ks_d", "ks_p")

    def values(self) -> tuple:
        f = self.fit
        return (
            self.n,
            self.m,
            f.mu_hat,
            f.sigma_hat,
            f.mean_hat,
            f.var_hat,
            f.p_le_1,
            self.empirical_frac,
            self.ks.d_stat,
            self.ks.p_value,
        )


def summarize_sample(
    n: int,
    rhos: ArrayLike,
    bins: int = DEFAULT_BINS,
    tail_quantile: float = TAIL_QUANTILE,
) -> ReportRow:
    """LSQ fit, KS test against that fit, and the empirical share of rho <= 1."""
    x = _positive_sample(rhos)
    fit = fit_lognormal_lsq(fitting_histogram(x, bins, tail_quantile))
    return ReportRow(
        n=n,
        m=x.size,
        fit=fit,
        empirical_frac=float(np.mean(x <= 1.0)),
        ks=ks_test(x, fit.mu_hat, fit.sigma_hat),
    )
