"""Birth-death-move sampler for latent centers with Metropolis-Hastings
parameter updates under the kappa-alpha link.

One iteration performs a configurable number of center updates (birth,
death, or move, chosen at random) followed by one Metropolis-Hastings
update per scalar parameter. kappa is never a chain coordinate: it is
recomputed from alpha and the observed count after every alpha update, and
the alpha acceptance ratio carries the resulting change of the
center-process density.

Chain coordinates live on each parameter's working scale: ``direct``
coordinates feed the link coefficients as-is, while an ``sd`` coordinate is
a plain standard deviation whose log becomes the (covariate-free) link
intercept. Proposals are symmetric normals on the working scale, so
bounded priors are enforced purely through the prior density.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field as dataclass_field

import numpy as np

from . import streams
from .errors import ConfigurationError, NumericalError
from .geometry import Window
from .likelihood import CenterConfig, log_p_centers, log_p_x
from .model import AnisotropyField, OmegaParams
from .simulate import PointPattern

__all__ = [
    "ScalarParam",
    "ParamSpace",
    "param_names",
    "build_param_space",
    "McmcConfig",
    "ChainState",
    "PosteriorSamples",
    "init_centers",
    "log_posterior_ratio",
    "bdm_step",
    "mh_scalar_step",
    "run_chain",
    "detect_label_switch",
    "axial_distance",
]

ROLES = ("alpha", "sigma_x", "sigma_y", "theta")


@dataclass(frozen=True)
class ScalarParam:
    """One chain coordinate: prior, proposal width, initial value.

    ``role``/``index`` place the coordinate in the link coefficient vectors;
    ``scale`` is ``direct`` (coordinate is the coefficient) or ``sd`` (the
    coordinate is a standard deviation; the intercept becomes its log).
    """

    name: str
    role: str
    index: int
    prior: object
    proposal_sd: float
    initial: float
    scale: str = "direct"

    def __post_init__(self):
        if self.role not in ROLES:
            raise ConfigurationError(f"unknown parameter role {self.role!r}")
        if self.scale not in ("direct", "sd"):
            raise ConfigurationError(f"unknown parameter scale {self.scale!r}")
        if self.scale == "sd" and (self.role not in ("sigma_x", "sigma_y") or self.index != 0):
            raise ConfigurationError(
                f"parameter {self.name!r}: 'sd' scale applies only to covariate-free "
                "sigma intercepts"
            )
        if not self.proposal_sd > 0:
            raise ConfigurationError(f"parameter {self.name!r}: proposal sd must be positive")
        if self.prior.log_pdf(self.initial) == -math.inf:
            raise ConfigurationError(
                f"parameter {self.name!r}: initial value {self.initial} has zero prior density"
            )

    def coefficient(self, value: float) -> float:
        return math.log(value) if self.scale == "sd" else value


@dataclass(frozen=True)
class ParamSpace:
    """Windows, covariates, and the ordered chain coordinates of one model."""

    window: Window
    window_ext: Window
    params: tuple
    cov_x: tuple = ()
    cov_y: tuple = ()
    cov_theta: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "params", tuple(self.params))
        for attr in ("cov_x", "cov_y", "cov_theta"):
            object.__setattr__(self, attr, tuple(getattr(self, attr)))
        if not self.window_ext.contains_window(self.window):
            raise ConfigurationError("window_ext must contain window")
        alphas = [p for p in self.params if p.role == "alpha"]
        if len(alphas) != 1:
            raise ConfigurationError(f"need exactly one alpha parameter, got {len(alphas)}")
        counts = {"sigma_x": len(self.cov_x), "sigma_y": len(self.cov_y),
                  "theta": len(self.cov_theta)}
        for role, ncov in counts.items():
            idx = sorted(p.index for p in self.params if p.role == role)
            if idx != list(range(ncov + 1)):
                raise ConfigurationError(
                    f"role {role}: need coefficients 0..{ncov}, got indices {idx}"
                )
            if ncov > 0 and any(
                p.scale == "sd" for p in self.params if p.role == role
            ):
                raise ConfigurationError(
                    f"role {role}: 'sd' scale is not valid with covariates attached"
                )
        names = [p.name for p in self.params]
        if len(set(names)) != len(names):
            raise ConfigurationError(f"duplicate parameter names in {names}")
        for cov in self.cov_x + self.cov_y + self.cov_theta:
            if not cov.covers(self.window_ext):
                raise ConfigurationError(
                    f"covariate '{cov.name}' does not cover the extended window"
                )

    @property
    def names(self):
        return tuple(p.name for p in self.params)

    @property
    def alpha_pos(self) -> int:
        return next(i for i, p in enumerate(self.params) if p.role == "alpha")

    def omega_from(self, values) -> OmegaParams:
        coefs = {"sigma_x": {}, "sigma_y": {}, "theta": {}}
        for p, v in zip(self.params, values):
            if p.role != "alpha":
                coefs[p.role][p.index] = p.coefficient(float(v))
        return OmegaParams(
            sigma_x_coefs=tuple(coefs["sigma_x"][i] for i in range(len(self.cov_x) + 1)),
            sigma_y_coefs=tuple(coefs["sigma_y"][i] for i in range(len(self.cov_y) + 1)),
            theta_coefs=tuple(coefs["theta"][i] for i in range(len(self.cov_theta) + 1)),
        )

    def field_from(self, values) -> AnisotropyField:
        return AnisotropyField(
            self.omega_from(values), self.cov_x, self.cov_y, self.cov_theta
        )

    def initial_values(self) -> np.ndarray:
        return np.array([p.initial for p in self.params])


def param_names(n_cov_x: int, n_cov_y: int, n_cov_theta: int,
                sigma_scale: str = "sd") -> tuple:
    """Chain coordinate names implied by the covariate structure.

    ``sd`` sigma scale (covariate-free sigmas proposed as standard
    deviations) yields sigma_x/sigma_y; ``coef`` yields one name per link
    coefficient (sigma_x_0..k etc). Orientation coefficients are always
    theta_0..k.
    """
    if sigma_scale not in ("sd", "coef"):
        raise ConfigurationError(f"unknown sigma scale {sigma_scale!r}")
    if sigma_scale == "sd":
        if n_cov_x or n_cov_y:
            raise ConfigurationError(
                "'sd' sigma scale requires covariate-free sigma fields; "
                "use sigma_scale = coef"
            )
        sig = ["sigma_x", "sigma_y"]
    else:
        sig = [f"sigma_x_{i}" for i in range(n_cov_x + 1)]
        sig += [f"sigma_y_{i}" for i in range(n_cov_y + 1)]
    return tuple(["alpha", *sig, *[f"theta_{i}" for i in range(n_cov_theta + 1)]])


def build_param_space(window: Window, window_ext: Window, cov_x=(), cov_y=(),
                      cov_theta=(), sigma_scale: str = "sd", priors=None,
                      proposal_sds=None, initial=None) -> ParamSpace:
    """Assemble a :class:`ParamSpace` from per-name dicts.

    ``priors``, ``proposal_sds`` and ``initial`` must each supply exactly
    the names returned by :func:`param_names`; anything unknown or missing
    is a configuration error.
    """
    names = param_names(len(cov_x), len(cov_y), len(cov_theta), sigma_scale)
    for label, d in (("priors", priors), ("proposal_sds", proposal_sds),
                     ("initial", initial)):
        if d is None:
            raise ConfigurationError(f"{label} must be provided for {names}")
        unknown = set(d) - set(names)
        missing = set(names) - set(d)
        if unknown:
            raise ConfigurationError(f"unknown {label} entries: {sorted(unknown)}")
        if missing:
            raise ConfigurationError(f"missing {label} entries: {sorted(missing)}")

    params = []
    for name in names:
        if name == "alpha":
            role, index, scale = "alpha", 0, "direct"
        elif name in ("sigma_x", "sigma_y"):
            role, index, scale = name, 0, "sd"
        else:
            role, _, idx = name.rpartition("_")
            index, scale = int(idx), "direct"
        params.append(ScalarParam(
            name=name, role=role, index=index, prior=priors[name],
            proposal_sd=float(proposal_sds[name]), initial=float(initial[name]),
            scale=scale,
        ))
    return ParamSpace(window=window, window_ext=window_ext, params=tuple(params),
                      cov_x=tuple(cov_x), cov_y=tuple(cov_y), cov_theta=tuple(cov_theta))


@dataclass(frozen=True)
class McmcConfig:
    """Chain schedule, proposal widths for center moves, and the seed."""

    n_steps: int
    burn_in: int
    thin: int
    seed: int = 0
    center_updates: int = 1
    move_sd: float = 0.025
    bdm_probs: tuple = (1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0)
    init_center_scale: float | None = None
    init_bandwidth: float | None = None
    prior_only: bool = False
    audit_every: int = 0

    def __post_init__(self):
        if self.thin < 1:
            raise ConfigurationError(f"thin must be >= 1, got {self.thin}")
        if not 0 <= self.burn_in < self.n_steps:
            raise ConfigurationError(
                f"need 0 <= burn_in < n_steps, got {self.burn_in}, {self.n_steps}"
            )
        if not self.move_sd > 0:
            raise ConfigurationError("move_sd must be positive")
        probs = tuple(float(p) for p in self.bdm_probs)
        object.__setattr__(self, "bdm_probs", probs)
        if len(probs) != 3 or min(probs) < 0 or abs(sum(probs) - 1.0) > 1e-12:
            raise ConfigurationError(
                f"birth/death/move probabilities must be nonnegative and sum to 1, got {probs}"
            )
        if self.center_updates < 0:
            raise ConfigurationError("center_updates must be >= 0")

    @property
    def n_recorded(self) -> int:
        return (self.n_steps - self.burn_in) // self.thin


@dataclass
class ChainState:
    """Current chain position; kappa always equals n / (alpha |W|)."""

    config: CenterConfig
    values: np.ndarray
    alpha: float
    kappa: float
    log_priors: np.ndarray

    def log_kernel(self, space: ParamSpace, prior_only: bool = False) -> float:
        lp = float(self.log_priors.sum())
        if prior_only:
            return lp
        return (
            log_p_x(self.config, self.alpha)
            + log_p_centers(self.config.n_centers, self.kappa, space.window_ext)
            + lp
        )


def init_centers(pattern: PointPattern, w_ext: Window, rng, scale: float,
                 bandwidth: float | None = None) -> np.ndarray:
    """Initial centers from a Poisson process whose intensity is ``scale``
    times the Gaussian kernel estimate of the pattern intensity.

    Implemented by the mixture representation: each data point contributes
    an independent Poisson(scale) number of kernel-displaced candidates,
    and candidates falling outside the extended window are dropped.
    """
    if pattern.n == 0:
        raise ConfigurationError("cannot initialize centers from an empty pattern")
    if scale < 0:
        raise ConfigurationError(f"init center scale must be nonnegative, got {scale}")
    pts = pattern.points
    if bandwidth is None:
        # Scott's rule with a pooled per-axis spread.
        spread = math.sqrt(0.5 * (pts[:, 0].var() + pts[:, 1].var()))
        bandwidth = max(spread * pattern.n ** (-1.0 / 6.0), 1e-12)
    counts = rng.poisson(scale, pattern.n)
    total = int(counts.sum())
    if total == 0:
        return np.empty((0, 2))
    base = np.repeat(pts, counts, axis=0)
    cand = base + rng.normal(0.0, bandwidth, (total, 2))
    inside = w_ext.contains(cand[:, 0], cand[:, 1])
    return cand[inside]


def log_posterior_ratio(old: ChainState, new: ChainState, space: ParamSpace,
                        prior_only: bool = False) -> float:
    """Difference of log posterior kernels, assembled from cached terms.

    The incremental character comes from the states' cached center
    configurations: single-center and single-scalar changes only refresh
    the affected caches, and the kernel is an O(1) assembly on top.
    Proposals with zero prior density give -inf; a candidate with zero data
    density against a positive-density state gives -inf as well.
    """
    d_prior = float(new.log_priors.sum()) - float(old.log_priors.sum())
    if d_prior == -math.inf:
        return -math.inf
    if prior_only:
        return d_prior
    d_centers = log_p_centers(new.config.n_centers, new.kappa, space.window_ext) - \
        log_p_centers(old.config.n_centers, old.kappa, space.window_ext)
    new_lx = log_p_x(new.config, new.alpha)
    old_lx = log_p_x(old.config, old.alpha)
    if new_lx == -math.inf:
        return -math.inf
    if old_lx == -math.inf:
        return math.inf
    return new_lx - old_lx + d_centers + d_prior


def _accept(rng, log_r: float) -> bool:
    return math.log(rng.random()) < log_r


def bdm_step(state: ChainState, space: ParamSpace, cfg: McmcConfig, rng):
    """One birth/death/move update of the center configuration.

    Returns (state, kind, accepted). Birth proposes uniformly on the
    extended window; death picks a center uniformly; move perturbs one
    center by an isotropic normal and rejects proposals leaving the
    extended window outright.

    While any data point has zero intensity (possible only right after
    initialization with a sparse or empty center set), the data density is
    identically zero and Metropolis ratios are 0/0; in that bootstrap phase
    a proposal is accepted exactly when it reduces the number of
    zero-intensity points. Positive-density states never transition back
    into that set, so the rule cannot affect the stationary distribution.
    """
    w_ext = space.window_ext
    pb, pd, _ = cfg.bdm_probs
    u = rng.random()
    m = state.config.n_centers

    if u < pb:
        kind = "birth"
        x = rng.uniform(w_ext.x_min, w_ext.x_max)
        y = rng.uniform(w_ext.y_min, w_ext.y_max)
        cand_config = state.config.with_added(x, y)
        correction = math.log(pd * w_ext.area / (pb * (m + 1)))
    elif u < pb + pd:
        kind = "death"
        if m == 0:
            return state, kind, False
        j = int(rng.integers(m))
        cand_config = state.config.with_removed(j)
        correction = math.log(pb * m / (pd * w_ext.area))
    else:
        kind = "move"
        if m == 0:
            return state, kind, False
        j = int(rng.integers(m))
        dx, dy = rng.normal(0.0, cfg.move_sd, 2)
        x = state.config.centers[j, 0] + dx
        y = state.config.centers[j, 1] + dy
        if not (w_ext.x_min <= x <= w_ext.x_max and w_ext.y_min <= y <= w_ext.y_max):
            return state, kind, False
        cand_config = state.config.with_moved(j, x, y)
        correction = 0.0

    if state.config.n_uncovered > 0:
        if cand_config.n_uncovered < state.config.n_uncovered:
            state.config = cand_config
            return state, kind, True
        return state, kind, False

    cand = ChainState(config=cand_config, values=state.values, alpha=state.alpha,
                      kappa=state.kappa, log_priors=state.log_priors)
    if _accept(rng, log_posterior_ratio(state, cand, space) + correction):
        state.config = cand_config
        return state, kind, True
    return state, kind, False


def mh_scalar_step(state: ChainState, which: int, space: ParamSpace,
                   cfg: McmcConfig, rng):
    """Symmetric normal proposal on the working scale of one coordinate."""
    par = space.params[which]
    v_new = float(state.values[which]) + rng.normal(0.0, par.proposal_sd)
    lp_new = par.prior.log_pdf(v_new)
    if lp_new == -math.inf:
        return state, False

    values_new = state.values.copy()
    values_new[which] = v_new
    log_priors_new = state.log_priors.copy()
    log_priors_new[which] = lp_new

    if par.role == "alpha":
        n = state.config.data.shape[0]
        kappa_new = (
            n / (v_new * space.window.area) if not cfg.prior_only else state.kappa
        )
        cand = ChainState(config=state.config, values=values_new, alpha=v_new,
                          kappa=kappa_new, log_priors=log_priors_new)
    elif cfg.prior_only:
        cand = ChainState(config=state.config, values=values_new, alpha=state.alpha,
                          kappa=state.kappa, log_priors=log_priors_new)
    else:
        cand_config = state.config.with_field(space.field_from(values_new))
        cand = ChainState(config=cand_config, values=values_new, alpha=state.alpha,
                          kappa=state.kappa, log_priors=log_priors_new)

    if _accept(rng, log_posterior_ratio(state, cand, space, cfg.prior_only)):
        return cand, True
    return state, False


@dataclass
class PosteriorSamples:
    """Thinned post-burn-in draws plus chain metadata."""

    space: ParamSpace
    mcmc: McmcConfig
    steps: np.ndarray
    values: np.ndarray
    n_centers: np.ndarray
    log_kernel: np.ndarray
    acceptance: dict = dataclass_field(default_factory=dict)

    @property
    def n_draws(self) -> int:
        return self.values.shape[0]

    def draws(self, name: str) -> np.ndarray:
        try:
            i = self.space.names.index(name)
        except ValueError as exc:
            raise KeyError(f"no parameter named {name!r}") from exc
        return self.values[:, i]

    def acceptance_rates(self) -> dict:
        return {
            k: (acc / prop if prop else 0.0) for k, (acc, prop) in self.acceptance.items()
        }

    def coef_matrix(self, role: str) -> np.ndarray:
        """Per-draw link coefficient vectors for one role, shape (d, k+1)."""
        cols = sorted(
            (p.index, i) for i, p in enumerate(self.space.params) if p.role == role
        )
        out = np.empty((self.n_draws, len(cols)))
        for j, (_, i) in enumerate(cols):
            par = self.space.params[i]
            col = self.values[:, i]
            out[:, j] = np.log(col) if par.scale == "sd" else col
        return out

    def _design(self, covs, x, y):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        y = np.atleast_1d(np.asarray(y, dtype=float))
        cols = [np.ones(x.shape)]
        cols.extend(np.broadcast_to(c.values(x, y), x.shape) for c in covs)
        return np.column_stack(cols)

    def sigma_ratio_at(self, x, y) -> np.ndarray:
        """Per-draw circularity sigma_x(u)/sigma_y(u); (d,) for scalar u,
        else (d, n_points)."""
        zx = self._design(self.space.cov_x, x, y)
        zy = self._design(self.space.cov_y, x, y)
        log_ratio = self.coef_matrix("sigma_x") @ zx.T - self.coef_matrix("sigma_y") @ zy.T
        out = np.exp(log_ratio)
        return out[:, 0] if np.ndim(x) == 0 else out

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["draw", "alpha", *
                             [n for n in self.space.names
                              if n != self.space.names[self.space.alpha_pos]],
                             "n_centers", "log_kernel"])
            apos = self.space.alpha_pos
            rest = [i for i in range(len(self.space.params)) if i != apos]
            for r in range(self.n_draws):
                row = [int(self.steps[r]), repr(float(self.values[r, apos]))]
                row.extend(repr(float(self.values[r, i])) for i in rest)
                row.append(int(self.n_centers[r]))
                row.append(repr(float(self.log_kernel[r])))
                writer.writerow(row)

    @classmethod
    def from_csv(cls, path, space: ParamSpace, mcmc: McmcConfig | None = None):
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None:
                raise ConfigurationError(f"{path}: empty samples file")
            rows = [row for row in reader if row]
        apos = space.alpha_pos
        rest = [n for i, n in enumerate(space.names) if i != apos]
        expected = ["draw", "alpha", *rest, "n_centers", "log_kernel"]
        if header != expected:
            raise ConfigurationError(
                f"{path}: header {header} does not match the configured model "
                f"(expected {expected})"
            )
        data = np.array([[float(v) for v in row] for row in rows])
        data = data.reshape(-1, len(expected))
        values = np.empty((data.shape[0], len(space.params)))
        values[:, apos] = data[:, 1]
        for j, i in enumerate(i for i in range(len(space.params)) if i != apos):
            values[:, i] = data[:, 2 + j]
        if mcmc is None:
            mcmc = McmcConfig(n_steps=max(int(data[-1, 0]), 1) if len(data) else 1,
                              burn_in=0, thin=1)
        return cls(
            space=space,
            mcmc=mcmc,
            steps=data[:, 0].astype(int),
            values=values,
            n_centers=data[:, -2].astype(int),
            log_kernel=data[:, -1],
        )


def run_chain(pattern: PointPattern, space: ParamSpace, cfg: McmcConfig) -> PosteriorSamples:
    """Run the full sampler; deterministic given ``cfg.seed``."""
    if (pattern.window.x_min, pattern.window.x_max, pattern.window.y_min,
            pattern.window.y_max) != (space.window.x_min, space.window.x_max,
                                      space.window.y_min, space.window.y_max):
        raise ConfigurationError("pattern window does not match the model window")
    if pattern.n == 0 and not cfg.prior_only:
        raise ConfigurationError("cannot fit an empty pattern")

    rng = streams.stream(cfg.seed, streams.CHAIN)
    values = space.initial_values()
    alpha0 = float(values[space.alpha_pos])
    field = space.field_from(values)

    if cfg.prior_only:
        centers0 = np.empty((0, 2))
    else:
        scale = cfg.init_center_scale if cfg.init_center_scale is not None else 1.0 / alpha0
        rng_init = streams.stream(cfg.seed, streams.INIT)
        centers0 = init_centers(pattern, space.window_ext, rng_init, scale,
                                cfg.init_bandwidth)

    config = CenterConfig.build(centers0, field, space.window, pattern.points)
    log_priors = np.array([p.prior.log_pdf(v) for p, v in zip(space.params, values)])
    kappa = pattern.n / (alpha0 * space.window.area) if pattern.n else 1.0
    state = ChainState(config=config, values=values, alpha=alpha0, kappa=kappa,
                       log_priors=log_priors)

    n_par = len(space.params)
    counters = {k: [0, 0] for k in ("birth", "death", "move", *space.names)}
    n_rec = cfg.n_recorded
    rec_steps = np.empty(n_rec, dtype=int)
    rec_values = np.empty((n_rec, n_par))
    rec_centers = np.empty(n_rec, dtype=int)
    rec_kernel = np.empty(n_rec)
    r = 0

    for step in range(1, cfg.n_steps + 1):
        if not cfg.prior_only:
            for _ in range(cfg.center_updates):
                state, kind, ok = bdm_step(state, space, cfg, rng)
                counters[kind][1] += 1
                counters[kind][0] += ok
        for i in range(n_par):
            state, ok = mh_scalar_step(state, i, space, cfg, rng)
            counters[space.names[i]][1] += 1
            counters[space.names[i]][0] += ok
        if cfg.audit_every and step % cfg.audit_every == 0 and not cfg.prior_only:
            _audit(state, space)
        if step > cfg.burn_in and (step - cfg.burn_in) % cfg.thin == 0:
            rec_steps[r] = step
            rec_values[r] = state.values
            rec_centers[r] = state.config.n_centers
            rec_kernel[r] = state.log_kernel(space, cfg.prior_only)
            r += 1

    return PosteriorSamples(
        space=space,
        mcmc=cfg,
        steps=rec_steps,
        values=rec_values,
        n_centers=rec_centers,
        log_kernel=rec_kernel,
        acceptance={k: tuple(v) for k, v in counters.items()},
    )


def _audit(state: ChainState, space: ParamSpace, rtol: float = 1e-9) -> None:
    rebuilt = CenterConfig.build(
        state.config.centers, state.config.field, space.window, state.config.data
    )
    for attr in ("total_mass", "sum_log_s"):
        a, b = getattr(state.config, attr), getattr(rebuilt, attr)
        if a == b:
            continue
        if abs(a - b) > rtol * max(abs(a), abs(b), 1.0):
            raise NumericalError(
                f"incremental cache drift in {attr}: cached {a!r} vs rebuilt {b!r}"
            )


def axial_distance(a, b):
    """Distance between orientations identified mod pi, in [0, pi/2]."""
    return np.abs(np.mod(np.asarray(a) - np.asarray(b) + math.pi / 2.0, math.pi) - math.pi / 2.0)


def detect_label_switch(samples: PosteriorSamples) -> list[int]:
    """Indices of draws where the orientation jumps by more than pi/4
    (axially) while the sigma_x/sigma_y ratio crosses 1.

    Returns an empty list when the model has no orientation intercept.
    """
    if samples.n_draws == 0:
        raise ValueError("no draws to scan")
    try:
        theta = samples.draws("theta_0")
    except KeyError:
        return []
    cx = 0.5 * (samples.space.window.x_min + samples.space.window.x_max)
    cy = 0.5 * (samples.space.window.y_min + samples.space.window.y_max)
    ratio = samples.sigma_ratio_at(cx, cy)
    jumps = axial_distance(theta[1:], theta[:-1]) > math.pi / 4.0
    crossings = (ratio[1:] - 1.0) * (ratio[:-1] - 1.0) < 0.0
    return [int(i) + 1 for i in np.nonzero(jumps & crossings)[0]]
