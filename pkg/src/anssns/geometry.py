"""Rectangular windows, rotations, and covariances built from a diagonal template.

Covariances are stored as three reals (symmetric 2x2) and decomposed on
demand; angle normalization is deliberately NOT done here, so that mod-pi
reduction has a single point of truth in the model layer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = ["Window", "CovMatrix", "rotation_matrix", "make_sigma", "gaussian_density"]


@dataclass(frozen=True)
class Window:
    """Axis-aligned rectangle [x_min, x_max] x [y_min, y_max]."""

    x_min: float
    x_max: float
    y_min: float
    y_max: float

    def __post_init__(self):
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise ValueError(
                f"degenerate window [{self.x_min}, {self.x_max}] x "
                f"[{self.y_min}, {self.y_max}]"
            )

    @property
    def area(self) -> float:
        return (self.x_max - self.x_min) * (self.y_max - self.y_min)

    @property
    def width(self) -> float:
        return self.x_max - self.x_min

    @property
    def height(self) -> float:
        return self.y_max - self.y_min

    def contains(self, x, y):
        """Boundary-inclusive membership; broadcasts over arrays."""
        return (
            (x >= self.x_min) & (x <= self.x_max) & (y >= self.y_min) & (y <= self.y_max)
        )

    def contains_window(self, other: "Window") -> bool:
        return (
            self.x_min <= other.x_min
            and other.x_max <= self.x_max
            and self.y_min <= other.y_min
            and other.y_max <= self.y_max
        )

    def expanded(self, margin: float) -> "Window":
        return Window(
            self.x_min - margin, self.x_max + margin, self.y_min - margin, self.y_max + margin
        )


@dataclass(frozen=True)
class CovMatrix:
    """Symmetric positive-definite 2x2 covariance, stored as (a11, a12, a22)."""

    a11: float
    a12: float
    a22: float

    def __post_init__(self):
        if not (self.a11 > 0.0 and self.det > 0.0):
            raise ValueError(f"covariance not positive definite: {self}")

    @property
    def det(self) -> float:
        return self.a11 * self.a22 - self.a12 * self.a12

    def as_array(self) -> np.ndarray:
        return np.array([[self.a11, self.a12], [self.a12, self.a22]])

    def cholesky(self) -> tuple[float, float, float]:
        """Lower-triangular factor (l11, l21, l22) with L L^T = Sigma."""
        l11 = math.sqrt(self.a11)
        l21 = self.a12 / l11
        l22 = math.sqrt(self.a22 - l21 * l21)
        return l11, l21, l22

    def inverse_entries(self) -> tuple[float, float, float]:
        d = self.det
        return self.a22 / d, -self.a12 / d, self.a11 / d


def rotation_matrix(theta: float) -> np.ndarray:
    """Counterclockwise rotation by ``theta`` radians."""
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def make_sigma(sigma_x: float, sigma_y: float, theta: float) -> CovMatrix:
    """Rotate the template diag(sigma_x^2, sigma_y^2) by ``theta``.

    Returns R diag(sx^2, sy^2) R^T as a :class:`CovMatrix`.
    """
    if not (sigma_x > 0.0 and sigma_y > 0.0):
        raise ValueError(f"standard deviations must be positive, got ({sigma_x}, {sigma_y})")
    c, s = math.cos(theta), math.sin(theta)
    vx, vy = sigma_x * sigma_x, sigma_y * sigma_y
    return CovMatrix(
        a11=vx * c * c + vy * s * s,
        a12=(vx - vy) * s * c,
        a22=vx * s * s + vy * c * c,
    )


def gaussian_density(u, center, sigma: CovMatrix) -> float:
    """Bivariate normal density of ``u`` around ``center`` with covariance ``sigma``."""
    dx = u[0] - center[0]
    dy = u[1] - center[1]
    i11, i12, i22 = sigma.inverse_entries()
    q = i11 * dx * dx + 2.0 * i12 * dx * dy + i22 * dy * dy
    return math.exp(-0.5 * q) / (2.0 * math.pi * math.sqrt(sigma.det))
