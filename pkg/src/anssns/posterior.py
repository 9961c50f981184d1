"""Posterior summaries and the isotropy / constant-direction tests.

Quantiles use linear interpolation of order statistics (numpy's default,
"type 7"); this convention is pinned because coverage bookkeeping shifts by
O(1/draws) across conventions. Orientation parameters are axial (mod pi):
circular point estimates and intervals double the angles, work on the full
circle, and halve back.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError
from .mcmc import PosteriorSamples

__all__ = [
    "CredibleInterval",
    "CredibleEnvelope",
    "summarize_scalar",
    "circular_median_axial",
    "circular_interval_axial",
    "circularity_test",
    "direction_test",
    "circularity_envelope",
    "erl_most_extreme_first",
    "relative_error_stats",
    "coverage_rate",
]


@dataclass(frozen=True)
class CredibleInterval:
    """Equal-tail credible interval; ``wraps`` marks an axial arc crossing 0."""

    lower: float
    upper: float
    level: float
    point_estimate: float
    wraps: bool = False

    def covers(self, value: float) -> bool:
        if not self.wraps:
            return self.lower <= value <= self.upper
        v = math.fmod(value, math.pi)
        if v < 0:
            v += math.pi
        return v >= self.lower or v <= self.upper

    @property
    def width(self) -> float:
        if not self.wraps:
            return self.upper - self.lower
        return (math.pi - self.lower) + self.upper


def summarize_scalar(draws, level: float = 0.95) -> CredibleInterval:
    """Median point estimate with an equal-tail quantile interval."""
    draws = np.asarray(draws, dtype=float)
    if draws.size < 2:
        raise ValueError(f"need at least 2 draws, got {draws.size}")
    if not 0 < level < 1:
        raise ValueError(f"level must be in (0, 1), got {level}")
    tail = 0.5 * (1.0 - level)
    lo, hi = np.quantile(draws, [tail, 1.0 - tail])
    return CredibleInterval(
        lower=float(lo), upper=float(hi), level=level,
        point_estimate=float(np.median(draws)),
    )


def _arc_distance(a, b):
    """Distance on the full circle (inputs already doubled), in [0, pi]."""
    d = np.abs(np.asarray(a)[:, None] - np.asarray(b)[None, :]) % (2.0 * math.pi)
    return np.minimum(d, 2.0 * math.pi - d)


def circular_median_axial(draws) -> float:
    """Axial circular median in [0, pi).

    Angles are doubled onto the full circle; the median is the data angle
    minimizing the mean arc distance. Ties (within 1e-12, absorbing float
    noise between symmetric candidates) break to the smallest angle.
    """
    draws = np.asarray(draws, dtype=float)
    if draws.size == 0:
        raise ValueError("no draws")
    doubled = np.mod(2.0 * draws, 2.0 * math.pi)
    cost = _arc_distance(doubled, doubled).mean(axis=1)
    best = doubled[cost <= cost.min() + 1e-12].min()
    return float(best / 2.0)


def circular_interval_axial(draws, level: float = 0.95) -> CredibleInterval:
    """Equal-tail axial interval: rotate doubled angles so the circular
    median sits at pi, take linear quantiles, rotate and halve back."""
    draws = np.asarray(draws, dtype=float)
    if draws.size == 0:
        raise ValueError("no draws")
    if not 0 < level < 1:
        raise ValueError(f"level must be in (0, 1), got {level}")
    med = circular_median_axial(draws)
    doubled = np.mod(2.0 * draws, 2.0 * math.pi)
    shift = math.pi - 2.0 * med
    rotated = np.mod(doubled + shift, 2.0 * math.pi)
    tail = 0.5 * (1.0 - level)
    lo, hi = np.quantile(rotated, [tail, 1.0 - tail])
    lo = math.fmod(lo - shift, 2.0 * math.pi) / 2.0
    hi = math.fmod(hi - shift, 2.0 * math.pi) / 2.0
    if lo < 0:
        lo += math.pi
    if hi < 0:
        hi += math.pi
    return CredibleInterval(
        lower=float(lo), upper=float(hi), level=level, point_estimate=med,
        wraps=lo > hi,
    )


def circularity_test(samples: PosteriorSamples, at=None, level: float = 0.95):
    """Credible interval for sigma_x/sigma_y; rejects isotropy when it
    excludes 1. Only valid when both sigma fields are covariate-free."""
    space = samples.space
    if space.cov_x or space.cov_y:
        raise ConfigurationError(
            "sigma fields are location-dependent; use circularity_envelope instead"
        )
    if at is None:
        at = (
            0.5 * (space.window.x_min + space.window.x_max),
            0.5 * (space.window.y_min + space.window.y_max),
        )
    ratio = samples.sigma_ratio_at(float(at[0]), float(at[1]))
    interval = summarize_scalar(ratio, level)
    return interval, not interval.covers(1.0)


def direction_test(samples: PosteriorSamples, level: float = 0.95):
    """Credible interval for the single orientation covariate coefficient;
    rejects constant cluster direction when it excludes 0."""
    if len(samples.space.cov_theta) != 1:
        raise ConfigurationError(
            f"direction test needs exactly one theta covariate, "
            f"model has {len(samples.space.cov_theta)}"
        )
    interval = summarize_scalar(samples.draws("theta_1"), level)
    return interval, not interval.covers(0.0)


@dataclass(frozen=True)
class CredibleEnvelope:
    """Global lower/upper surfaces over a regular grid in the window."""

    grid_x: np.ndarray
    grid_y: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    level: float
    central_draw_count: int

    @property
    def grid_points(self) -> np.ndarray:
        return np.column_stack([self.grid_x, self.grid_y])

    def covers_constant(self, value: float) -> bool:
        return bool(np.all((self.lower <= value) & (value <= self.upper)))

    def exit_mask(self, value: float) -> np.ndarray:
        return (value < self.lower) | (value > self.upper)


def erl_most_extreme_first(values: np.ndarray) -> np.ndarray:
    """Order draws by extreme rank length over pointwise two-sided ranks.

    ``values`` has one row per draw. Pointwise ranks are taken from below
    and from above (ties share the minimal rank); rows are compared by
    their ascending sorted vectors of two-sided ranks, lexicographically,
    lower sorting first (more extreme). Remaining ties break by draw index.
    """
    from scipy.stats import rankdata

    m = values.shape[0]
    rank_lo = rankdata(values, method="min", axis=0)
    rank_hi = rankdata(-values, method="min", axis=0)
    sorted_ranks = np.sort(np.minimum(rank_lo, rank_hi), axis=1)
    return np.array(sorted(range(m), key=lambda d: (tuple(sorted_ranks[d]), d)))


def circularity_envelope(samples: PosteriorSamples, grid_resolution: int = 32,
                         level: float = 0.95):
    """Global credible envelope for the circularity surface sigma_x/sigma_y.

    Per-draw ratio surfaces are evaluated on a regular grid of cell centers
    over the window, draws are ordered by extreme rank length, and the
    envelope is the pointwise min/max over the ceil(level*m) most central
    draws. Rejects isotropy when the constant surface 1 exits the envelope
    anywhere.
    """
    if grid_resolution < 1:
        raise ConfigurationError(f"grid resolution must be >= 1, got {grid_resolution}")
    m = samples.n_draws
    if m < 100:
        raise ConfigurationError(f"envelope needs at least 100 draws, got {m}")
    if m < 500:
        warnings.warn(
            f"envelope computed from only {m} draws; boundaries may be noisy",
            stacklevel=2,
        )
    w = samples.space.window
    xs = w.x_min + (np.arange(grid_resolution) + 0.5) * w.width / grid_resolution
    ys = w.y_min + (np.arange(grid_resolution) + 0.5) * w.height / grid_resolution
    gx, gy = (a.ravel() for a in np.meshgrid(xs, ys, indexing="xy"))
    surfaces = samples.sigma_ratio_at(gx, gy)

    order = erl_most_extreme_first(surfaces)
    n_central = math.ceil(level * m)
    central = order[m - n_central:]
    kept = surfaces[central]
    env = CredibleEnvelope(
        grid_x=gx, grid_y=gy,
        lower=kept.min(axis=0), upper=kept.max(axis=0),
        level=level, central_draw_count=n_central,
    )
    return env, not env.covers_constant(1.0)


def relative_error_stats(estimates, truth: float):
    """(relative bias, relative MSE) of point estimates against the truth."""
    if truth == 0:
        raise ValueError("relative error statistics are undefined for zero truth")
    est = np.asarray(estimates, dtype=float)
    err = est - truth
    return float(err.mean() / truth), float((err**2).mean() / truth**2)


def coverage_rate(intervals, truth: float) -> float:
    """Fraction of intervals containing the truth."""
    intervals = list(intervals)
    if not intervals:
        raise ValueError("no intervals")
    return sum(iv.covers(truth) for iv in intervals) / len(intervals)
