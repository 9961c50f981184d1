"""Model specification: parameter links, priors, and the kappa-alpha relation.

The anisotropy field maps a coefficient vector to per-location cluster
shape through exponential links for the template standard deviations and a
pi*tanh link (reduced mod pi) for the orientation:

    sigma_x(u) = exp{c0 + c1 Z1(u) + ...}
    theta(u)   = (t0 + pi * tanh(t1 Z1(u) + ...)) mod pi

kappa is never a free parameter: it is tied to alpha through the observed
point count, kappa = n / (alpha * |W|).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .covariate import Covariate
from .errors import ConfigurationError
from .geometry import CovMatrix, Window, make_sigma

__all__ = [
    "Uniform",
    "LogNormalMeanVar",
    "LogUniform",
    "OmegaParams",
    "AnisotropyField",
    "ModelSpec",
]


@dataclass(frozen=True)
class Uniform:
    """Uniform prior on [a, b]."""

    a: float
    b: float

    def __post_init__(self):
        if not self.a < self.b:
            raise ConfigurationError(f"uniform prior needs a < b, got ({self.a}, {self.b})")

    def log_pdf(self, x: float) -> float:
        if self.a <= x <= self.b:
            return -math.log(self.b - self.a)
        return -math.inf

    def sample(self, rng, size=None):
        return rng.uniform(self.a, self.b, size)

    def spec_string(self) -> str:
        return f"uniform {self.a!r} {self.b!r}"


@dataclass(frozen=True)
class LogNormalMeanVar:
    """Log-normal prior parameterized by the mean and variance of the data scale.

    The underlying normal parameters are recovered by moment matching:
    mu = log(m^2 / sqrt(v + m^2)), s^2 = log(1 + v / m^2).
    """

    mean: float
    var: float

    def __post_init__(self):
        if not (self.mean > 0 and self.var > 0):
            raise ConfigurationError(
                f"lognormal prior needs positive mean and variance, got ({self.mean}, {self.var})"
            )

    @cached_property
    def mu(self) -> float:
        return math.log(self.mean**2 / math.sqrt(self.var + self.mean**2))

    @cached_property
    def s2(self) -> float:
        return math.log(1.0 + self.var / self.mean**2)

    def log_pdf(self, x: float) -> float:
        if x <= 0:
            return -math.inf
        lx = math.log(x)
        return -lx - 0.5 * math.log(2.0 * math.pi * self.s2) - (lx - self.mu) ** 2 / (2.0 * self.s2)

    def sample(self, rng, size=None):
        return rng.lognormal(self.mu, math.sqrt(self.s2), size)

    def spec_string(self) -> str:
        return f"lognormal {self.mean!r} {self.var!r}"


@dataclass(frozen=True)
class LogUniform:
    """Prior with density proportional to 1/x on [a, b], 0 < a < b."""

    a: float
    b: float

    def __post_init__(self):
        if not 0 < self.a < self.b:
            raise ConfigurationError(f"loguniform prior needs 0 < a < b, got ({self.a}, {self.b})")

    def log_pdf(self, x: float) -> float:
        if self.a <= x <= self.b:
            return -math.log(x) - math.log(math.log(self.b / self.a))
        return -math.inf

    def sample(self, rng, size=None):
        return np.exp(rng.uniform(math.log(self.a), math.log(self.b), size))

    def spec_string(self) -> str:
        return f"loguniform {self.a!r} {self.b!r}"


@dataclass(frozen=True)
class OmegaParams:
    """Coefficient vectors for the sigma_x, sigma_y, and theta links."""

    sigma_x_coefs: tuple
    sigma_y_coefs: tuple
    theta_coefs: tuple

    def __post_init__(self):
        for attr in ("sigma_x_coefs", "sigma_y_coefs", "theta_coefs"):
            object.__setattr__(self, attr, tuple(float(v) for v in getattr(self, attr)))
            if len(getattr(self, attr)) < 1:
                raise ConfigurationError(f"{attr} needs at least an intercept")


def _exp_link(coefs, covs, x, y):
    acc = np.full(np.broadcast(np.asarray(x), np.asarray(y)).shape, coefs[0], dtype=float)
    for c, cov in zip(coefs[1:], covs):
        acc += c * cov.values(x, y)
    return np.exp(acc)


class AnisotropyField:
    """Evaluates sigma_x(u), sigma_y(u), theta(u), and Sigma(u) for one omega."""

    def __init__(self, omega: OmegaParams, cov_x=(), cov_y=(), cov_theta=()):
        self.omega = omega
        self.cov_x = tuple(cov_x)
        self.cov_y = tuple(cov_y)
        self.cov_theta = tuple(cov_theta)
        if len(omega.sigma_x_coefs) != len(self.cov_x) + 1:
            raise ConfigurationError(
                f"sigma_x has {len(omega.sigma_x_coefs)} coefficients for "
                f"{len(self.cov_x)} covariates"
            )
        if len(omega.sigma_y_coefs) != len(self.cov_y) + 1:
            raise ConfigurationError(
                f"sigma_y has {len(omega.sigma_y_coefs)} coefficients for "
                f"{len(self.cov_y)} covariates"
            )
        if len(omega.theta_coefs) != len(self.cov_theta) + 1:
            raise ConfigurationError(
                f"theta has {len(omega.theta_coefs)} coefficients for "
                f"{len(self.cov_theta)} covariates"
            )

    def sigma_x_at(self, x, y):
        return _exp_link(self.omega.sigma_x_coefs, self.cov_x, x, y)

    def sigma_y_at(self, x, y):
        return _exp_link(self.omega.sigma_y_coefs, self.cov_y, x, y)

    def theta_at(self, x, y):
        """Orientation in [0, pi); the intercept sits outside the tanh."""
        t = self.omega.theta_coefs
        acc = np.zeros(np.broadcast(np.asarray(x), np.asarray(y)).shape, dtype=float)
        for c, cov in zip(t[1:], self.cov_theta):
            acc += c * cov.values(x, y)
        return np.mod(t[0] + math.pi * np.tanh(acc), math.pi)

    def params_at(self, x, y):
        return self.sigma_x_at(x, y), self.sigma_y_at(x, y), self.theta_at(x, y)

    def sigma_at(self, x, y) -> CovMatrix:
        sx, sy, th = (float(v) for v in self.params_at(x, y))
        return make_sigma(sx, sy, th)

    def sigma_entries_at(self, x, y):
        """Batched covariance entries (a11, a12, a22) at array locations."""
        sx, sy, th = self.params_at(x, y)
        vx, vy = sx * sx, sy * sy
        c, s = np.cos(th), np.sin(th)
        return (
            vx * c * c + vy * s * s,
            (vx - vy) * s * c,
            vx * s * s + vy * c * c,
        )

    def covariates(self):
        return self.cov_x + self.cov_y + self.cov_theta

    def is_sigma_constant(self) -> bool:
        return not self.cov_x and not self.cov_y


@dataclass(frozen=True)
class ModelSpec:
    """Generative model: windows, mean cluster size, anisotropy field.

    ``n_observed`` carries the observed point count that ties kappa to alpha.
    """

    window: Window
    window_ext: Window
    alpha: float
    field: AnisotropyField
    n_observed: int = 0

    def __post_init__(self):
        if not self.window_ext.contains_window(self.window):
            raise ConfigurationError("window_ext must contain window")
        if not self.alpha > 0:
            raise ConfigurationError(f"alpha must be positive, got {self.alpha}")
        for cov in self.field.covariates():
            if not cov.covers(self.window_ext):
                raise ConfigurationError(
                    f"covariate '{cov.name}' does not cover the extended window"
                )

    def kappa_from_alpha(self, alpha: float) -> float:
        """Parent intensity implied by the observed count: n / (alpha |W|)."""
        if not alpha > 0:
            raise ValueError(f"alpha must be positive, got {alpha}")
        return self.n_observed / (alpha * self.window.area)
