"""Experiment replication: model grids, per-replicate pipeline, reports.

Four built-in experiments cover the stationary/non-stationary x
isotropic/anisotropic combinations. Desk scale (default) runs 5 replicates
with a 20k-step chain; paper scale runs 20 replicates with the full
50k/25k/100 schedule. Each replicate simulates a pattern, fits it, and
applies the applicable tests; a replicate whose traceplots trip the
label-switch detector is rerun once with a fresh seed and the rerun is
always logged.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field as dataclass_field
from pathlib import Path

import numpy as np

from .config import TruthSpec, emit_config
from .covariate import CoordinateX
from .errors import ConfigurationError
from .geometry import Window
from .mcmc import (
    McmcConfig,
    ParamSpace,
    build_param_space,
    detect_label_switch,
    run_chain,
)
from .model import AnisotropyField, LogNormalMeanVar, ModelSpec, OmegaParams, Uniform
from .posterior import (
    circular_interval_axial,
    circular_median_axial,
    circularity_envelope,
    circularity_test,
    coverage_rate,
    direction_test,
    relative_error_stats,
    summarize_scalar,
)
from .simulate import save_pattern_csv, save_truth, simulate
from .streams import child_seed

__all__ = [
    "ModelRow",
    "ExperimentSpec",
    "ReplicateResult",
    "ExperimentReport",
    "experiment_spec",
    "run_experiment",
    "coverage_table",
    "emit_experiment_configs",
]

WINDOW = Window(0.0, 1.0, 0.0, 1.0)
WINDOW_EXT = Window(-0.2, 1.2, -0.2, 1.2)

DESK_REPLICATES, DESK_STEPS, DESK_BURN_IN = 5, 20_000, 10_000
PAPER_REPLICATES, PAPER_STEPS, PAPER_BURN_IN = 20, 50_000, 25_000
THIN = 100

# total intensity, mean cluster size, template spread; eight rows shared by
# the stationary experiments
_STATIONARY_GRID = (
    (100.0, 5.0, 0.02), (200.0, 5.0, 0.02), (100.0, 10.0, 0.02), (200.0, 10.0, 0.02),
    (100.0, 5.0, 0.04), (200.0, 5.0, 0.04), (100.0, 10.0, 0.04), (200.0, 10.0, 0.04),
)
# lambda, alpha, sigma, theta_1 truth
_EXP3_GRID = (
    (200.0, 5.0, 0.02, 0.5), (200.0, 10.0, 0.02, 0.5),
    (200.0, 5.0, 0.02, 1.0), (200.0, 10.0, 0.02, 1.0),
)
# lambda, alpha, sigma intercept (log scale), slope truth
_EXP4_GRID = (
    (200.0, 5.0, math.log(0.01), 1.0), (200.0, 10.0, math.log(0.01), 1.0),
    (200.0, 5.0, math.log(0.01), 1.5), (200.0, 10.0, math.log(0.01), 1.5),
)

_UNIFORM_PRIORS = {
    "alpha": Uniform(1, 30),
    "sigma_x": Uniform(0.002, 0.2),
    "sigma_y": Uniform(0.002, 0.2),
    "theta_0": Uniform(0, math.pi / 2),
}
_EXP1_INITIAL = {"alpha": 7.0, "sigma_x": 0.05, "sigma_y": 0.01,
                 "theta_0": math.pi / 3}


@dataclass(frozen=True)
class ModelRow:
    """One fully-specified (truth model, fit model) pair."""

    index: int
    lam: float
    alpha: float
    truth: TruthSpec
    space: ParamSpace
    move_sd: float
    reported: tuple
    truth_targets: dict

    @property
    def kappa(self) -> float:
        return self.lam / (self.alpha * WINDOW.area)


@dataclass(frozen=True)
class ExperimentSpec:
    experiment: int
    label: str
    models: tuple
    replicates: int
    steps: int
    burn_in: int
    thin: int
    priors: str
    master_seed: int
    test: str  # "circularity" | "circularity+direction" | "envelope"
    envelope_resolution: int = 32

    def schedule(self, seed: int, **overrides) -> McmcConfig:
        return McmcConfig(n_steps=self.steps, burn_in=self.burn_in, thin=self.thin,
                          seed=seed, **overrides)


def _stationary_row(index, lam, alpha, sigma, anisotropic, priors):
    factor = 0.7
    if anisotropic:
        sx, sy, th0 = sigma / factor, factor * sigma, math.pi / 4
    else:
        sx, sy, th0 = sigma, sigma, 0.0
    omega = OmegaParams((math.log(sx),), (math.log(sy),), (th0,))
    truth_values = {"sigma_x": sx, "sigma_y": sy, "theta_0": th0}
    truth = TruthSpec(alpha=alpha, kappa=lam / alpha, values=truth_values,
                      field=AnisotropyField(omega))

    prior_map = dict(_UNIFORM_PRIORS)
    if priors == "informative":
        if sigma == 0.02:
            prior_map["sigma_x"] = LogNormalMeanVar(0.03, 4e-5)
            prior_map["sigma_y"] = LogNormalMeanVar(0.01, 4e-5)
        else:
            prior_map["sigma_x"] = LogNormalMeanVar(0.06, 8e-5)
            prior_map["sigma_y"] = LogNormalMeanVar(0.03, 8e-5)
    strong = sigma == 0.02
    sds = {"alpha": 4.0, "sigma_x": 0.01 if strong else 0.02,
           "sigma_y": 0.005 if strong else 0.010, "theta_0": 0.2}
    space = build_param_space(WINDOW, WINDOW_EXT, sigma_scale="sd",
                              priors=prior_map, proposal_sds=sds,
                              initial=dict(_EXP1_INITIAL))
    if anisotropic:
        reported = ("alpha", "sigma_x", "sigma_y", "theta_0", "ratio")
        targets = {"alpha": alpha, "sigma_x": sx, "sigma_y": sy, "theta_0": th0,
                   "ratio": sx / sy}
    else:
        reported = ("alpha", "sigma_x", "sigma_y", "ratio")
        targets = {"alpha": alpha, "sigma_x": sx, "sigma_y": sy, "ratio": 1.0}
    return ModelRow(index=index, lam=lam, alpha=alpha, truth=truth, space=space,
                    move_sd=0.025, reported=reported, truth_targets=targets)


def _exp3_row(index, lam, alpha, sigma, theta1):
    factor = 0.5
    sx, sy, th0 = sigma / factor, factor * sigma, math.pi / 4
    cov = (CoordinateX(),)
    omega = OmegaParams((math.log(sx),), (math.log(sy),), (th0, theta1))
    truth = TruthSpec(
        alpha=alpha, kappa=lam / alpha,
        values={"sigma_x": sx, "sigma_y": sy, "theta_0": th0, "theta_1": theta1},
        field=AnisotropyField(omega, cov_theta=cov),
    )
    priors = dict(_UNIFORM_PRIORS)
    priors["theta_1"] = Uniform(-1, 2)
    sds = {"alpha": 3.0, "sigma_x": 0.01, "sigma_y": 0.002, "theta_0": 0.1,
           "theta_1": 0.1}
    initial = dict(_EXP1_INITIAL)
    initial["theta_1"] = 0.75
    space = build_param_space(WINDOW, WINDOW_EXT, cov_theta=cov, sigma_scale="sd",
                              priors=priors, proposal_sds=sds, initial=initial)
    return ModelRow(
        index=index, lam=lam, alpha=alpha, truth=truth, space=space, move_sd=0.25,
        reported=("alpha", "sigma_x", "sigma_y", "theta_0", "theta_1", "ratio"),
        truth_targets={"alpha": alpha, "sigma_x": sx, "sigma_y": sy, "theta_0": th0,
                       "theta_1": theta1, "ratio": sx / sy},
    )


def _exp4_row(index, lam, alpha, s0, s1):
    cov = (CoordinateX(),)
    omega = OmegaParams((s0, s1), (s0, s1), (0.0,))
    truth = TruthSpec(
        alpha=alpha, kappa=lam / alpha,
        values={"sigma_x_0": s0, "sigma_x_1": s1, "sigma_y_0": s0, "sigma_y_1": s1,
                "theta_0": 0.0},
        field=AnisotropyField(omega, cov_x=cov, cov_y=cov),
    )
    log_range = Uniform(math.log(0.002), math.log(0.2))
    priors = {"alpha": Uniform(1, 30), "sigma_x_0": log_range,
              "sigma_x_1": Uniform(-5, 5), "sigma_y_0": log_range,
              "sigma_y_1": Uniform(-5, 5), "theta_0": Uniform(0, math.pi / 2)}
    sds = {"alpha": 3.0, "sigma_x_0": 0.1, "sigma_x_1": 0.1, "sigma_y_0": 0.1,
           "sigma_y_1": 0.1, "theta_0": 0.1}
    initial = {"alpha": 7.0, "sigma_x_0": math.log(0.015), "sigma_x_1": 1.25,
               "sigma_y_0": math.log(0.015), "sigma_y_1": 1.25, "theta_0": 0.0}
    space = build_param_space(WINDOW, WINDOW_EXT, cov_x=cov, cov_y=cov,
                              sigma_scale="coef", priors=priors, proposal_sds=sds,
                              initial=initial)
    return ModelRow(
        index=index, lam=lam, alpha=alpha, truth=truth, space=space, move_sd=0.25,
        reported=("alpha", "sigma_x_0", "sigma_x_1", "sigma_y_0", "sigma_y_1"),
        truth_targets={"alpha": alpha, "sigma_x_0": s0, "sigma_x_1": s1,
                       "sigma_y_0": s0, "sigma_y_1": s1},
    )


def experiment_spec(experiment: int, paper: bool = False, priors: str = "uniform",
                    models=None, master_seed: int = 0) -> ExperimentSpec:
    """Build one of the four experiment specifications.

    ``models`` restricts to a subset of rows (1-based indices); ``paper``
    switches to the full replicate count and chain schedule.
    """
    if priors not in ("uniform", "informative"):
        raise ConfigurationError(f"unknown prior set {priors!r}")
    if priors == "informative" and experiment != 1:
        raise ConfigurationError("informative priors are defined for experiment 1 only")
    if experiment == 1:
        rows = [_stationary_row(i + 1, *g, anisotropic=True, priors=priors)
                for i, g in enumerate(_STATIONARY_GRID)]
        label, test = "stationary anisotropic", "circularity"
    elif experiment == 2:
        rows = [_stationary_row(i + 1, *g, anisotropic=False, priors=priors)
                for i, g in enumerate(_STATIONARY_GRID)]
        label, test = "stationary isotropic", "circularity"
    elif experiment == 3:
        rows = [_exp3_row(i + 1, *g) for i, g in enumerate(_EXP3_GRID)]
        label, test = "non-stationary anisotropic", "circularity+direction"
    elif experiment == 4:
        rows = [_exp4_row(i + 1, *g) for i, g in enumerate(_EXP4_GRID)]
        label, test = "non-stationary isotropic", "envelope"
    else:
        raise ConfigurationError(f"experiment must be 1..4, got {experiment}")
    if models:
        wanted = set(int(m) for m in models)
        unknown = wanted - {r.index for r in rows}
        if unknown:
            raise ConfigurationError(f"no such model rows: {sorted(unknown)}")
        rows = [r for r in rows if r.index in wanted]
    return ExperimentSpec(
        experiment=experiment, label=label, models=tuple(rows),
        replicates=PAPER_REPLICATES if paper else DESK_REPLICATES,
        steps=PAPER_STEPS if paper else DESK_STEPS,
        burn_in=PAPER_BURN_IN if paper else DESK_BURN_IN,
        thin=THIN, priors=priors, master_seed=master_seed, test=test,
    )


@dataclass
class ReplicateResult:
    model: int
    replicate: int
    sim_seed: int
    fit_seed: int
    n_points: int = 0
    reruns: tuple = ()
    estimates: dict = dataclass_field(default_factory=dict)
    intervals: dict = dataclass_field(default_factory=dict)
    test_reject: bool | None = None
    direction_reject: bool | None = None
    acceptance: dict = dataclass_field(default_factory=dict)
    flagged: tuple = ()
    error: str | None = None


def _summaries(samples, row: ModelRow):
    estimates, intervals = {}, {}
    for name in row.reported:
        if name == "ratio":
            continue
        draws = samples.draws(name)
        if name == "theta_0":
            interval = circular_interval_axial(draws)
            estimates[name] = circular_median_axial(draws)
        else:
            interval = summarize_scalar(draws)
            estimates[name] = interval.point_estimate
        intervals[name] = interval
    return estimates, intervals


def run_replicate(spec: ExperimentSpec, row: ModelRow, replicate: int,
                  out_dir=None) -> ReplicateResult:
    """Simulate one realization, fit it, rerun once on a label-switch flag,
    and summarize."""
    sim_seed = child_seed(spec.master_seed, spec.experiment, row.index, replicate, 0)
    fit_seed = child_seed(spec.master_seed, spec.experiment, row.index, replicate, 1)
    result = ReplicateResult(model=row.index, replicate=replicate,
                             sim_seed=sim_seed, fit_seed=fit_seed)
    try:
        model = ModelSpec(window=WINDOW, window_ext=WINDOW_EXT, alpha=row.alpha,
                          field=row.truth.field)
        pattern, truth = simulate(model, row.kappa, sim_seed)
        result.n_points = pattern.n

        samples = run_chain(pattern, row.space,
                            spec.schedule(fit_seed, move_sd=row.move_sd))
        flagged = detect_label_switch(samples)
        reruns = []
        if flagged:
            new_seed = child_seed(spec.master_seed, spec.experiment, row.index,
                                  replicate, 2)
            samples = run_chain(pattern, row.space,
                                spec.schedule(new_seed, move_sd=row.move_sd))
            still = detect_label_switch(samples)
            reruns.append((new_seed, bool(still)))
            flagged = still
        result.reruns = tuple(reruns)
        result.flagged = tuple(flagged)

        result.estimates, result.intervals = _summaries(samples, row)
        if spec.test == "envelope":
            import warnings

            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                envelope, reject = circularity_envelope(
                    samples, spec.envelope_resolution)
            result.test_reject = reject
        else:
            interval, reject = circularity_test(samples)
            result.intervals["ratio"] = interval
            result.estimates["ratio"] = interval.point_estimate
            result.test_reject = reject
            if spec.test == "circularity+direction":
                _, dir_reject = direction_test(samples)
                result.direction_reject = dir_reject
        result.acceptance = samples.acceptance_rates()

        if out_dir is not None:
            rep_dir = Path(out_dir) / f"model{row.index}" / f"rep{replicate}"
            rep_dir.mkdir(parents=True, exist_ok=True)
            save_pattern_csv(pattern, rep_dir / "pattern.csv")
            save_truth(truth, pattern.n, rep_dir / "truth.txt")
            samples.to_csv(rep_dir / "samples.csv")
    except Exception as exc:  # collected, never aborts the experiment
        if isinstance(exc, (KeyboardInterrupt, SystemExit)):
            raise
        result.error = f"{type(exc).__name__}: {exc}"
    return result


def _replicate_task(args):
    spec, row, replicate, out_dir = args
    return run_replicate(spec, row, replicate, out_dir)


@dataclass
class ExperimentReport:
    spec: ExperimentSpec
    results: tuple

    def _ok(self, model: int):
        return [r for r in self.results if r.model == model and r.error is None]

    def failures(self):
        return [r for r in self.results if r.error is not None]

    def coverage(self, model: int) -> dict:
        rows = self._ok(model)
        row = next(m for m in self.spec.models if m.index == model)
        out = {}
        for name, truth in row.truth_targets.items():
            ivs = [r.intervals[name] for r in rows if name in r.intervals]
            if ivs:
                out[name] = coverage_rate(ivs, truth)
        return out

    def error_stats(self, model: int) -> dict:
        rows = self._ok(model)
        row = next(m for m in self.spec.models if m.index == model)
        out = {}
        for name, truth in row.truth_targets.items():
            if name == "ratio" or truth == 0:
                continue
            est = [r.estimates[name] for r in rows if name in r.estimates]
            if est:
                out[name] = relative_error_stats(np.asarray(est), truth)
        return out

    def rejection_fraction(self, model: int, which: str = "test") -> float:
        rows = self._ok(model)
        attr = "test_reject" if which == "test" else "direction_reject"
        flags = [getattr(r, attr) for r in rows if getattr(r, attr) is not None]
        if not flags:
            raise ConfigurationError(f"no completed replicates for model {model}")
        return sum(flags) / len(flags)

    def rerun_log(self):
        out = []
        for r in self.results:
            for seed, still in r.reruns:
                out.append((r.model, r.replicate, seed, still))
        return out

    def acceptance_summary(self, model: int) -> dict:
        rows = self._ok(model)
        if not rows:
            return {}
        keys = rows[0].acceptance.keys()
        return {k: float(np.mean([r.acceptance[k] for r in rows])) for k in keys}

    def render_text(self) -> str:
        s = self.spec
        lines = [
            f"experiment {s.experiment} ({s.label}), priors={s.priors}, "
            f"replicates={s.replicates}, steps={s.steps}, burn_in={s.burn_in}, "
            f"thin={s.thin}, master_seed={s.master_seed}",
        ]
        for row in s.models:
            lines.append(f"model {row.index}: lambda={row.lam:g} alpha={row.alpha:g} "
                         f"kappa={row.kappa:g}")
            cov = self.coverage(row.index)
            lines.append("  coverage: " + " ".join(
                f"{k}={v:.2f}" for k, v in cov.items()))
            stats = self.error_stats(row.index)
            lines.append("  rel_bias: " + " ".join(
                f"{k}={v[0]:+.3f}" for k, v in stats.items()))
            lines.append("  rel_mse:  " + " ".join(
                f"{k}={v[1]:.3f}" for k, v in stats.items()))
            frac = self.rejection_fraction(row.index)
            name = "envelope" if s.test == "envelope" else "circularity"
            lines.append(f"  {name} rejection fraction: {frac:.2f} "
                         f"(non-rejection {1 - frac:.2f})")
            if s.test == "circularity+direction":
                dfrac = self.rejection_fraction(row.index, "direction")
                lines.append(f"  direction rejection fraction: {dfrac:.2f}")
            acc = self.acceptance_summary(row.index)
            lines.append("  acceptance: " + " ".join(
                f"{k}={v:.2f}" for k, v in acc.items()))
            tuning = {k: v for k, v in acc.items()
                      if k not in ("birth", "death", "move")
                      and not 0.1 <= v <= 0.7}
            if tuning:
                lines.append("  tuning note: scalar acceptance outside [0.1, 0.7]: "
                             + " ".join(f"{k}={v:.2f}" for k, v in tuning.items()))
        log = self.rerun_log()
        if log:
            lines.append("reruns:")
            for model, rep, seed, still in log:
                status = "still flagged" if still else "clean"
                lines.append(f"  model {model} rep {rep}: new seed {seed} [{status}]")
        fails = self.failures()
        if fails:
            lines.append("failures:")
            for r in fails:
                lines.append(f"  model {r.model} rep {r.replicate}: {r.error}")
        return "\n".join(lines) + "\n"


def coverage_table(report: ExperimentReport):
    """One row per model: per-parameter coverage fractions."""
    if not report.results:
        raise ConfigurationError("empty report")
    rows = []
    for model in report.spec.models:
        if not report._ok(model.index):
            raise ConfigurationError(f"no completed replicates for model {model.index}")
        row = {"model": model.index, "lambda": model.lam, "alpha": model.alpha}
        row.update(report.coverage(model.index))
        rows.append(row)
    return rows


def run_experiment(spec: ExperimentSpec, out_dir=None, workers: int = 1) -> ExperimentReport:
    """Run every (model row, replicate) task and aggregate the report.

    Tasks are independent and deterministically seeded, so the report is
    identical for any worker count; results reduce in (model, replicate)
    order.
    """
    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
    tasks = [(spec, row, rep, str(out_dir) if out_dir else None)
             for row in spec.models for rep in range(spec.replicates)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_replicate_task, tasks))
    else:
        results = [_replicate_task(t) for t in tasks]
    results.sort(key=lambda r: (r.model, r.replicate))
    report = ExperimentReport(spec=spec, results=tuple(results))
    if out_dir is not None:
        (out_dir / "report.txt").write_text(report.render_text())
        _write_coverage_csv(report, out_dir / "coverage.csv")
        emit_experiment_configs(spec, out_dir)
    return report


def _write_coverage_csv(report: ExperimentReport, path) -> None:
    rows = coverage_table(report)
    names = sorted({k for row in rows for k in row} - {"model", "lambda", "alpha"})
    with open(path, "w") as fh:
        fh.write(",".join(["model", "lambda", "alpha", *names]) + "\n")
        for row in rows:
            cells = [str(row["model"]), repr(float(row["lambda"])),
                     repr(float(row["alpha"]))]
            cells += [f"{row[n]:.4f}" if n in row else "" for n in names]
            fh.write(",".join(cells) + "\n")


def emit_experiment_configs(spec: ExperimentSpec, out_dir) -> list:
    """Write one byte-stable config file per model row."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for row in spec.models:
        text = emit_config(
            row.space, row.move_sd, spec.steps, spec.burn_in, spec.thin,
            seed=spec.master_seed, truth=row.truth,
        )
        path = out_dir / f"exp{spec.experiment}_model{row.index}.cfg"
        path.write_text(text)
        paths.append(path)
    return paths
