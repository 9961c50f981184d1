"""Config-file schema: one structured text document per model.

Sections: [model] (windows, covariate attachments, sigma scale),
[covariates] (named definitions), [priors], [proposals], [initial]
(one entry per chain coordinate; [proposals] also holds the center move
sd), [schedule], [seeds], and optionally [truth] (generating parameter
values for `simulate`). Unknown sections or keys are errors: silent typos
in prior names would invalidate experiments.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass

from .covariate import Covariate, parse_covariate
from .errors import ConfigurationError
from .geometry import Window
from .mcmc import McmcConfig, ParamSpace, build_param_space, param_names
from .model import (
    AnisotropyField,
    LogNormalMeanVar,
    LogUniform,
    ModelSpec,
    OmegaParams,
    Uniform,
)

__all__ = ["RunConfig", "TruthSpec", "load_config", "parse_prior", "emit_config"]

_SECTIONS = ("model", "covariates", "priors", "proposals", "initial",
             "schedule", "seeds", "truth")
_MODEL_KEYS = ("window", "window_ext", "sigma_x_covariates", "sigma_y_covariates",
               "theta_covariates", "sigma_scale")
_SCHEDULE_KEYS = ("steps", "burn_in", "thin", "center_updates", "bdm_probs",
                  "init_center_scale")


def parse_prior(text: str):
    parts = text.split()
    if len(parts) != 3:
        raise ConfigurationError(
            f"bad prior {text!r}: expected '<family> <a> <b>' with family "
            "uniform | lognormal | loguniform"
        )
    family, a, b = parts[0].lower(), float(parts[1]), float(parts[2])
    if family == "uniform":
        return Uniform(a, b)
    if family == "lognormal":
        return LogNormalMeanVar(a, b)
    if family == "loguniform":
        return LogUniform(a, b)
    raise ConfigurationError(f"unknown prior family {family!r}")


def prior_spec_string(prior) -> str:
    return prior.spec_string()


@dataclass(frozen=True)
class TruthSpec:
    """Generating parameter values (same coordinate naming as the fit)."""

    alpha: float
    kappa: float
    values: dict
    field: AnisotropyField

    def model_spec(self, window: Window, window_ext: Window,
                   n_observed: int = 0) -> ModelSpec:
        return ModelSpec(window=window, window_ext=window_ext, alpha=self.alpha,
                         field=self.field, n_observed=n_observed)


@dataclass(frozen=True)
class RunConfig:
    """Everything a simulate/fit/test invocation needs."""

    space: ParamSpace
    move_sd: float
    steps: int
    burn_in: int
    thin: int
    center_updates: int
    bdm_probs: tuple
    init_center_scale: float | None
    seed: int
    truth: TruthSpec | None

    def mcmc(self, seed: int | None = None, **overrides) -> McmcConfig:
        return McmcConfig(
            n_steps=self.steps, burn_in=self.burn_in, thin=self.thin,
            seed=self.seed if seed is None else seed,
            center_updates=self.center_updates, move_sd=self.move_sd,
            bdm_probs=self.bdm_probs, init_center_scale=self.init_center_scale,
            **overrides,
        )


def _window_from(text: str, label: str) -> Window:
    parts = text.split()
    if len(parts) != 4:
        raise ConfigurationError(f"{label} must be 'x_min x_max y_min y_max', got {text!r}")
    return Window(*(float(v) for v in parts))


def _check_keys(section: str, present, allowed) -> None:
    unknown = set(present) - set(allowed)
    if unknown:
        raise ConfigurationError(
            f"unknown keys in [{section}]: {sorted(unknown)} (allowed: {sorted(allowed)})"
        )


def omega_from_named_values(values: dict, n_cov_x: int, n_cov_y: int,
                            n_cov_theta: int, sigma_scale: str) -> OmegaParams:
    names = [n for n in param_names(n_cov_x, n_cov_y, n_cov_theta, sigma_scale)
             if n != "alpha"]
    missing = set(names) - set(values)
    if missing:
        raise ConfigurationError(f"missing truth values: {sorted(missing)}")
    if sigma_scale == "sd":
        sx = (math.log(float(values["sigma_x"])),)
        sy = (math.log(float(values["sigma_y"])),)
    else:
        sx = tuple(float(values[f"sigma_x_{i}"]) for i in range(n_cov_x + 1))
        sy = tuple(float(values[f"sigma_y_{i}"]) for i in range(n_cov_y + 1))
    th = tuple(float(values[f"theta_{i}"]) for i in range(n_cov_theta + 1))
    return OmegaParams(sigma_x_coefs=sx, sigma_y_coefs=sy, theta_coefs=th)


def load_config(path) -> RunConfig:
    cp = configparser.ConfigParser(inline_comment_prefixes=("#",), strict=True)
    cp.optionxform = str
    read = cp.read(path)
    if not read:
        raise ConfigurationError(f"cannot read config file {path}")
    unknown = set(cp.sections()) - set(_SECTIONS)
    if unknown:
        raise ConfigurationError(f"unknown config sections: {sorted(unknown)}")
    for required in ("model", "priors", "proposals", "initial", "schedule", "seeds"):
        if required not in cp:
            raise ConfigurationError(f"missing [{required}] section")

    model = cp["model"]
    _check_keys("model", model.keys(), _MODEL_KEYS)
    for key in ("window", "window_ext"):
        if key not in model:
            raise ConfigurationError(f"[model] needs {key}")
    window = _window_from(model["window"], "window")
    window_ext = _window_from(model["window_ext"], "window_ext")
    sigma_scale = model.get("sigma_scale", "sd").strip()

    named: dict[str, Covariate] = {}
    if "covariates" in cp:
        for name, spec in cp["covariates"].items():
            named[name] = parse_covariate(spec.strip(), name=name)

    def cov_list(key: str):
        out = []
        for ref in model.get(key, "").split():
            if ref in named:
                out.append(named[ref])
            else:
                out.append(parse_covariate(ref, name=ref))
        return tuple(out)

    cov_x = cov_list("sigma_x_covariates")
    cov_y = cov_list("sigma_y_covariates")
    cov_theta = cov_list("theta_covariates")
    names = param_names(len(cov_x), len(cov_y), len(cov_theta), sigma_scale)

    _check_keys("priors", cp["priors"].keys(), names)
    priors = {k: parse_prior(v) for k, v in cp["priors"].items()}
    _check_keys("proposals", cp["proposals"].keys(), (*names, "move"))
    if "move" not in cp["proposals"]:
        raise ConfigurationError("[proposals] needs a 'move' entry for center updates")
    proposal_sds = {k: float(v) for k, v in cp["proposals"].items() if k != "move"}
    move_sd = float(cp["proposals"]["move"])
    _check_keys("initial", cp["initial"].keys(), names)
    initial = {k: float(v) for k, v in cp["initial"].items()}

    space = build_param_space(window, window_ext, cov_x, cov_y, cov_theta,
                              sigma_scale, priors, proposal_sds, initial)

    sched = cp["schedule"]
    _check_keys("schedule", sched.keys(), _SCHEDULE_KEYS)
    for key in ("steps", "burn_in", "thin"):
        if key not in sched:
            raise ConfigurationError(f"[schedule] needs {key}")
    bdm = tuple(float(v) for v in sched.get(
        "bdm_probs", "0.3333333333333333 0.3333333333333333 0.3333333333333334"
    ).split())
    init_scale = sched.get("init_center_scale", "").strip()

    _check_keys("seeds", cp["seeds"].keys(), ("seed",))
    seed = int(cp["seeds"].get("seed", "0"))

    truth = None
    if "truth" in cp:
        tkeys = set(cp["truth"].keys())
        value_names = {n for n in names if n != "alpha"}
        _check_keys("truth", tkeys, ("alpha", "kappa", "lambda", *value_names))
        if "alpha" not in tkeys:
            raise ConfigurationError("[truth] needs alpha")
        t_alpha = float(cp["truth"]["alpha"])
        if ("kappa" in tkeys) == ("lambda" in tkeys):
            raise ConfigurationError("[truth] needs exactly one of kappa or lambda")
        if "kappa" in tkeys:
            t_kappa = float(cp["truth"]["kappa"])
        else:
            t_kappa = float(cp["truth"]["lambda"]) / t_alpha / window.area
        values = {k: float(v) for k, v in cp["truth"].items()
                  if k not in ("alpha", "kappa", "lambda")}
        omega = omega_from_named_values(values, len(cov_x), len(cov_y),
                                        len(cov_theta), sigma_scale)
        truth = TruthSpec(
            alpha=t_alpha, kappa=t_kappa, values=values,
            field=AnisotropyField(omega, cov_x, cov_y, cov_theta),
        )

    return RunConfig(
        space=space, move_sd=move_sd,
        steps=int(sched["steps"]), burn_in=int(sched["burn_in"]),
        thin=int(sched["thin"]),
        center_updates=int(sched.get("center_updates", "1")),
        bdm_probs=bdm,
        init_center_scale=float(init_scale) if init_scale else None,
        seed=seed, truth=truth,
    )


def emit_config(space: ParamSpace, move_sd: float, steps: int, burn_in: int,
                thin: int, seed: int, center_updates: int = 1,
                truth: TruthSpec | None = None) -> str:
    """Deterministic config-file text for one model (byte-stable)."""
    lines = ["[model]"]
    w, we = space.window, space.window_ext
    lines.append(f"window = {w.x_min!r} {w.x_max!r} {w.y_min!r} {w.y_max!r}")
    lines.append(f"window_ext = {we.x_min!r} {we.x_max!r} {we.y_min!r} {we.y_max!r}")

    def refs(covs):
        return " ".join(c.spec_string() for c in covs)

    lines.append(f"sigma_x_covariates = {refs(space.cov_x)}".rstrip())
    lines.append(f"sigma_y_covariates = {refs(space.cov_y)}".rstrip())
    lines.append(f"theta_covariates = {refs(space.cov_theta)}".rstrip())
    sigma_scale = "sd" if any(p.scale == "sd" for p in space.params) else "coef"
    lines.append(f"sigma_scale = {sigma_scale}")

    lines.append("")
    lines.append("[priors]")
    for p in space.params:
        lines.append(f"{p.name} = {prior_spec_string(p.prior)}")
    lines.append("")
    lines.append("[proposals]")
    for p in space.params:
        lines.append(f"{p.name} = {p.proposal_sd!r}")
    lines.append(f"move = {move_sd!r}")
    lines.append("")
    lines.append("[initial]")
    for p in space.params:
        lines.append(f"{p.name} = {p.initial!r}")
    lines.append("")
    lines.append("[schedule]")
    lines.append(f"steps = {steps}")
    lines.append(f"burn_in = {burn_in}")
    lines.append(f"thin = {thin}")
    lines.append(f"center_updates = {center_updates}")
    lines.append("")
    lines.append("[seeds]")
    lines.append(f"seed = {seed}")
    if truth is not None:
        lines.append("")
        lines.append("[truth]")
        lines.append(f"alpha = {truth.alpha!r}")
        lines.append(f"kappa = {truth.kappa!r}")
        for name in sorted(truth.values):
            lines.append(f"{name} = {truth.values[name]!r}")
    return "\n".join(lines) + "\n"
