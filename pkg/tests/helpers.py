"""Shared fixtures and independent oracle implementations.

The oracles here deliberately avoid the package's cached/incremental code
paths: densities are summed directly per point and per center, and window
masses come from scipy's adaptive dblquad.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.integrate import dblquad

from anssns.geometry import Window, gaussian_density
from anssns.mcmc import McmcConfig, ParamSpace, ScalarParam
from anssns.model import AnisotropyField, ModelSpec, OmegaParams, Uniform


def constant_field(sigma_x, sigma_y, theta):
    return AnisotropyField(
        OmegaParams((math.log(sigma_x),), (math.log(sigma_y),), (theta,))
    )


def unit_spec(alpha=10.0, sigma_x=0.04, sigma_y=0.01, theta=math.pi / 4, n_observed=0):
    return ModelSpec(
        window=Window(0, 1, 0, 1),
        window_ext=Window(-0.2, 1.2, -0.2, 1.2),
        alpha=alpha,
        field=constant_field(sigma_x, sigma_y, theta),
        n_observed=n_observed,
    )


def experiment1_space(window=None, window_ext=None, proposal_sds=None):
    """Stationary anisotropic fit model with the broad uniform priors."""
    sds = {"alpha": 4.0, "sigma_x": 0.01, "sigma_y": 0.005, "theta_0": 0.2}
    if proposal_sds:
        sds.update(proposal_sds)
    return ParamSpace(
        window=window or Window(0, 1, 0, 1),
        window_ext=window_ext or Window(-0.2, 1.2, -0.2, 1.2),
        params=(
            ScalarParam("alpha", "alpha", 0, Uniform(1, 30), sds["alpha"], 7.0),
            ScalarParam("sigma_x", "sigma_x", 0, Uniform(0.002, 0.2), sds["sigma_x"],
                        0.05, scale="sd"),
            ScalarParam("sigma_y", "sigma_y", 0, Uniform(0.002, 0.2), sds["sigma_y"],
                        0.01, scale="sd"),
            ScalarParam("theta_0", "theta", 0, Uniform(0, math.pi / 2), sds["theta_0"],
                        math.pi / 3),
        ),
    )


def small_mcmc(seed=0, **kw):
    defaults = dict(n_steps=400, burn_in=200, thin=10, seed=seed)
    defaults.update(kw)
    return McmcConfig(**defaults)


def naive_log_p_x(points, centers, field, alpha, window: Window) -> float:
    """Direct, cache-free reimplementation of the data log-density.

    Per-center window masses come from scipy's adaptive dblquad; intensity
    sums use the scalar density with no truncation.
    """
    centers = np.asarray(centers, dtype=float).reshape(-1, 2)
    points = np.asarray(points, dtype=float).reshape(-1, 2)
    if centers.shape[0] == 0:
        return window.area if points.shape[0] == 0 else -math.inf

    sigmas = [field.sigma_at(c[0], c[1]) for c in centers]
    total_mass = 0.0
    for c, sig in zip(centers, sigmas):
        mass, _ = dblquad(
            lambda y, x: gaussian_density((x, y), c, sig),
            window.x_min, window.x_max, window.y_min, window.y_max,
            epsabs=1e-13, epsrel=1e-13,
        )
        total_mass += mass

    out = window.area - alpha * total_mass
    for p in points:
        lam = sum(
            alpha * gaussian_density(p, c, sig) for c, sig in zip(centers, sigmas)
        )
        if lam == 0.0:
            return -math.inf
        out += math.log(lam)
    return out
