"""scikit-learn style estimator wrapping the cluster-process sampler.

The estimator takes an (n, 2) array of point coordinates, runs the full
birth-death-move + Metropolis-Hastings chain, and exposes posterior
summaries and the isotropy / constant-direction tests. It follows the
sklearn conventions (constructor stores parameters untouched, validation
happens in ``fit``, ``get_params``/``set_params``/``clone`` work), so it
composes with that ecosystem's tooling.
"""

from __future__ import annotations

import math

from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from .covariate import Covariate, parse_covariate
from .errors import ConfigurationError
from .geometry import Window
from .mcmc import McmcConfig, build_param_space, param_names, run_chain
from .model import Uniform
from .posterior import (
    circular_interval_axial,
    circularity_envelope,
    circularity_test,
    direction_test,
    summarize_scalar,
)
from .simulate import PointPattern

__all__ = ["NeymanScottMCMC"]


class NeymanScottMCMC(BaseEstimator):
    """Bayesian MCMC for Neyman-Scott processes with anisotropic clusters.

    Parameters
    ----------
    window : tuple (x_min, x_max, y_min, y_max)
        Observation window the data lives in.
    window_ext : tuple or None
        Extended window holding latent cluster centers; defaults to the
        observation window grown by ``ext_margin`` on every side.
    ext_margin : float
        Margin used when ``window_ext`` is None.
    sigma_x_covariates, sigma_y_covariates, theta_covariates : sequences
        Covariates attached to the respective link, as ``Covariate``
        objects or spec strings (``x``, ``y``, ``const:<v>``,
        ``raster:<path>``).
    sigma_scale : {'sd', 'coef'}
        Whether covariate-free cluster spreads are proposed as standard
        deviations or all link coefficients are proposed directly.
    priors, proposal_sds, initial : dict or None
        Per-coordinate overrides keyed by coordinate name; unspecified
        entries use defaults sized for unit-window data.
    n_steps, burn_in, thin, center_updates, move_sd, bdm_probs,
    init_center_scale, seed
        Chain schedule, forwarded to the sampler.

    Attributes
    ----------
    samples_ : PosteriorSamples
        Thinned post-burn-in draws with metadata.
    acceptance_rates_ : dict
        Per-update-type acceptance rates.
    """

    def __init__(self, window=(0.0, 1.0, 0.0, 1.0), window_ext=None, ext_margin=0.2,
                 sigma_x_covariates=(), sigma_y_covariates=(), theta_covariates=(),
                 sigma_scale="sd", priors=None, proposal_sds=None, initial=None,
                 n_steps=20_000, burn_in=10_000, thin=100, center_updates=1,
                 move_sd=0.025, bdm_probs=(1 / 3, 1 / 3, 1 / 3),
                 init_center_scale=None, seed=0):
        self.window = window
        self.window_ext = window_ext
        self.ext_margin = ext_margin
        self.sigma_x_covariates = sigma_x_covariates
        self.sigma_y_covariates = sigma_y_covariates
        self.theta_covariates = theta_covariates
        self.sigma_scale = sigma_scale
        self.priors = priors
        self.proposal_sds = proposal_sds
        self.initial = initial
        self.n_steps = n_steps
        self.burn_in = burn_in
        self.thin = thin
        self.center_updates = center_updates
        self.move_sd = move_sd
        self.bdm_probs = bdm_probs
        self.init_center_scale = init_center_scale
        self.seed = seed

    def _covariates(self, specs):
        out = []
        for c in specs:
            out.append(c if isinstance(c, Covariate) else parse_covariate(str(c)))
        return tuple(out)

    def _defaults(self, names):
        priors, sds, init = {}, {}, {}
        for name in names:
            if name == "alpha":
                priors[name], sds[name], init[name] = Uniform(1, 30), 4.0, 7.0
            elif name in ("sigma_x", "sigma_y"):
                priors[name], sds[name] = Uniform(0.002, 0.2), 0.01
                init[name] = 0.05 if name == "sigma_x" else 0.01
            elif name.startswith("sigma") and name.endswith("_0"):
                priors[name] = Uniform(math.log(0.002), math.log(0.2))
                sds[name], init[name] = 0.1, math.log(0.015)
            elif name.startswith("sigma"):
                priors[name], sds[name], init[name] = Uniform(-5, 5), 0.1, 0.0
            elif name == "theta_0":
                priors[name], sds[name], init[name] = Uniform(0, math.pi / 2), 0.1, 0.5
            else:
                priors[name], sds[name], init[name] = Uniform(-1, 2), 0.1, 0.0
        return priors, sds, init

    def _build_space(self):
        try:
            window = Window(*self.window)
        except TypeError as exc:
            raise ConfigurationError(f"bad window {self.window!r}") from exc
        window_ext = (
            Window(*self.window_ext) if self.window_ext is not None
            else window.expanded(self.ext_margin)
        )
        cov_x = self._covariates(self.sigma_x_covariates)
        cov_y = self._covariates(self.sigma_y_covariates)
        cov_theta = self._covariates(self.theta_covariates)
        names = param_names(len(cov_x), len(cov_y), len(cov_theta), self.sigma_scale)
        priors, sds, init = self._defaults(names)
        for dst, src in ((priors, self.priors), (sds, self.proposal_sds),
                         (init, self.initial)):
            if src:
                unknown = set(src) - set(names)
                if unknown:
                    raise ConfigurationError(
                        f"unknown parameter names {sorted(unknown)}; "
                        f"expected a subset of {list(names)}"
                    )
                dst.update(src)
        return build_param_space(
            window, window_ext, cov_x, cov_y, cov_theta, self.sigma_scale,
            priors=priors, proposal_sds=sds, initial=init,
        )

    def fit(self, X, y=None):
        """Run the sampler against an (n, 2) array of point coordinates."""
        X = check_array(X, dtype=float, ensure_2d=True)
        if X.shape[1] != 2:
            raise ValueError(f"expected 2 coordinate columns, got {X.shape[1]}")
        space = self._build_space()
        pattern = PointPattern(points=X, window=space.window)
        cfg = McmcConfig(
            n_steps=self.n_steps, burn_in=self.burn_in, thin=self.thin,
            seed=self.seed, center_updates=self.center_updates,
            move_sd=self.move_sd, bdm_probs=tuple(self.bdm_probs),
            init_center_scale=self.init_center_scale,
        )
        self.samples_ = run_chain(pattern, space, cfg)
        self.acceptance_rates_ = self.samples_.acceptance_rates()
        self.n_features_in_ = 2
        return self

    def summary(self, level=0.95) -> dict:
        """Per-parameter credible intervals (circular for theta_0)."""
        check_is_fitted(self, "samples_")
        out = {}
        for name in self.samples_.space.names:
            draws = self.samples_.draws(name)
            if name == "theta_0":
                out[name] = circular_interval_axial(draws, level)
            else:
                out[name] = summarize_scalar(draws, level)
        return out

    def isotropy_test(self, level=0.95):
        """Credible interval for sigma_x/sigma_y and the rejection flag."""
        check_is_fitted(self, "samples_")
        return circularity_test(self.samples_, level=level)

    def constant_direction_test(self, level=0.95):
        """Credible interval for the orientation covariate coefficient."""
        check_is_fitted(self, "samples_")
        return direction_test(self.samples_, level=level)

    def isotropy_envelope(self, grid_resolution=32, level=0.95):
        """Global credible envelope for the circularity surface."""
        check_is_fitted(self, "samples_")
        return circularity_envelope(self.samples_, grid_resolution, level)
