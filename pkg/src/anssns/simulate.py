"""Simulation of (an)isotropic, (non-)stationary Neyman-Scott processes.

Parents are Poisson on the extended window; each parent spawns a
Poisson(alpha) cluster displaced by the Gaussian kernel evaluated at the
parent location. Offspring outside the observation window are dropped from
the pattern but preserved in the ground-truth manifest.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from . import streams
from .errors import ConfigurationError
from .geometry import CovMatrix, Window
from .model import ModelSpec

__all__ = [
    "PointPattern",
    "SimTruth",
    "simulate",
    "sample_offspring",
    "save_pattern_csv",
    "load_pattern_csv",
    "save_truth",
]


@dataclass(frozen=True)
class PointPattern:
    """Observed points inside a rectangular window."""

    points: np.ndarray
    window: Window

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float).reshape(-1, 2)
        object.__setattr__(self, "points", pts)
        if pts.size and not np.all(self.window.contains(pts[:, 0], pts[:, 1])):
            raise ValueError("pattern contains points outside its window")

    @property
    def n(self) -> int:
        return self.points.shape[0]


@dataclass(frozen=True)
class SimTruth:
    """Ground truth of one simulated realization."""

    centers: np.ndarray
    counts: np.ndarray
    kappa: float
    seed: int
    spec: ModelSpec

    @property
    def n_offspring_total(self) -> int:
        return int(self.counts.sum())


def sample_offspring(center, sigma: CovMatrix, count: int, rng) -> np.ndarray:
    """``count`` i.i.d. draws center + L z with L the Cholesky factor of sigma."""
    l11, l21, l22 = sigma.cholesky()
    z = rng.standard_normal((count, 2))
    out = np.empty((count, 2))
    out[:, 0] = center[0] + l11 * z[:, 0]
    out[:, 1] = center[1] + l21 * z[:, 0] + l22 * z[:, 1]
    return out


def simulate(spec: ModelSpec, kappa: float, seed: int) -> tuple[PointPattern, SimTruth]:
    """One realization; deterministic given ``seed``.

    Each cluster consumes its own random stream keyed by (seed, parent
    index), so the output does not depend on evaluation order.
    """
    if not kappa > 0:
        raise ConfigurationError(f"kappa must be positive, got {kappa}")
    w, w_ext = spec.window, spec.window_ext
    for cov in spec.field.covariates():
        if not cov.covers(w_ext):
            raise ConfigurationError(f"covariate '{cov.name}' does not cover the extended window")

    rng_parents = streams.stream(seed, streams.PARENTS)
    n_parents = rng_parents.poisson(kappa * w_ext.area)
    centers = np.column_stack(
        [
            rng_parents.uniform(w_ext.x_min, w_ext.x_max, n_parents),
            rng_parents.uniform(w_ext.y_min, w_ext.y_max, n_parents),
        ]
    )

    counts = np.zeros(n_parents, dtype=int)
    kept: list[np.ndarray] = []
    for i in range(n_parents):
        rng_c = streams.stream(seed, streams.CLUSTER, i)
        counts[i] = rng_c.poisson(spec.alpha)
        if counts[i] == 0:
            continue
        sigma = spec.field.sigma_at(centers[i, 0], centers[i, 1])
        pts = sample_offspring(centers[i], sigma, counts[i], rng_c)
        inside = w.contains(pts[:, 0], pts[:, 1])
        if np.any(inside):
            kept.append(pts[inside])

    points = np.concatenate(kept) if kept else np.empty((0, 2))
    pattern = PointPattern(points=points, window=w)
    truth = SimTruth(centers=centers, counts=counts, kappa=float(kappa), seed=int(seed), spec=spec)
    return pattern, truth


def save_pattern_csv(pattern: PointPattern, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "y"])
        for x, y in pattern.points:
            writer.writerow([repr(float(x)), repr(float(y))])


def load_pattern_csv(path, window: Window) -> PointPattern:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header[:2]] != ["x", "y"]:
            raise ConfigurationError(f"{path}: expected 'x,y' header")
        try:
            pts = [(float(row[0]), float(row[1])) for row in reader if row]
        except (ValueError, IndexError) as exc:
            raise ConfigurationError(f"{path}: malformed point row: {exc}") from exc
    return PointPattern(points=np.array(pts, dtype=float).reshape(-1, 2), window=window)


def save_truth(truth: SimTruth, n_observed: int, path) -> None:
    """Write the ground-truth manifest sidecar (plain structured text)."""
    with open(path, "w") as fh:
        fh.write("# simulation truth\n")
        fh.write(f"seed = {truth.seed}\n")
        fh.write(f"kappa = {truth.kappa!r}\n")
        fh.write(f"alpha = {truth.spec.alpha!r}\n")
        fh.write(f"n_parents = {len(truth.counts)}\n")
        fh.write(f"n_offspring_total = {truth.n_offspring_total}\n")
        fh.write(f"n_observed = {n_observed}\n")
        fh.write("# centers: x y count\n")
        for (x, y), c in zip(truth.centers, truth.counts):
            fh.write(f"{float(x)!r} {float(y)!r} {int(c)}\n")
