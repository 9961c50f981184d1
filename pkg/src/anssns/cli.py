"""Command-line interface: simulate | fit | test | experiment | diag.

Exit codes: 0 on success, 2 on configuration/usage errors, 3 on numerical
failures.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import load_config
from .errors import ConfigurationError, NumericalError
from .harness import experiment_spec, run_experiment
from .mcmc import PosteriorSamples, detect_label_switch, run_chain
from .posterior import circularity_envelope, circularity_test, direction_test
from .plots import emit_envelope_heatmap, emit_traceplot
from .simulate import load_pattern_csv, save_pattern_csv, save_truth, simulate


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="anssns",
        description="Simulation and Bayesian MCMC inference for Neyman-Scott "
                    "point processes with covariate-dependent anisotropic clusters.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="simulate one realization from [truth]")
    sim.add_argument("--config", required=True)
    sim.add_argument("--seed", type=int, default=None)
    sim.add_argument("--out", required=True)

    fit = sub.add_parser("fit", help="run the MCMC sampler on a pattern CSV")
    fit.add_argument("--pattern", required=True)
    fit.add_argument("--config", required=True)
    fit.add_argument("--seed", type=int, default=None)
    fit.add_argument("--out", required=True)

    tst = sub.add_parser("test", help="isotropy/constant-direction tests on samples")
    tst.add_argument("--samples", required=True)
    tst.add_argument("--config", required=True)
    tst.add_argument("--out", required=True)
    tst.add_argument("--level", type=float, default=0.95)
    tst.add_argument("--grid-resolution", type=int, default=32)
    tst.add_argument("--plots", action="store_true",
                     help="emit SVG heatmaps of the envelope surfaces")

    exp = sub.add_parser("experiment", help="replicate one of the four experiments")
    exp.add_argument("--id", type=int, required=True, choices=(1, 2, 3, 4))
    exp.add_argument("--model", type=int, action="append", default=None,
                     help="restrict to a model row (repeatable)")
    exp.add_argument("--paper", action="store_true",
                     help="full x4-scale protocol: 20 replicates, 50k steps")
    exp.add_argument("--priors", choices=("uniform", "informative"),
                     default="uniform")
    exp.add_argument("--seed", type=int, default=0, help="master seed")
    exp.add_argument("--workers", type=int, default=1)
    exp.add_argument("--out", required=True)

    diag = sub.add_parser("diag", help="traceplots and label-switch scan")
    diag.add_argument("--samples", required=True)
    diag.add_argument("--config", required=True)
    diag.add_argument("--out", required=True)
    return parser


def _cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    if cfg.truth is None:
        raise ConfigurationError("simulate needs a [truth] section in the config")
    seed = cfg.seed if args.seed is None else args.seed
    spec = cfg.truth.model_spec(cfg.space.window, cfg.space.window_ext)
    pattern, truth = simulate(spec, cfg.truth.kappa, seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    save_pattern_csv(pattern, out / "pattern.csv")
    save_truth(truth, pattern.n, out / "truth.txt")
    print(f"simulated {pattern.n} points ({len(truth.counts)} parents) "
          f"-> {out / 'pattern.csv'}")
    return 0


def _cmd_fit(args) -> int:
    cfg = load_config(args.config)
    pattern = load_pattern_csv(args.pattern, cfg.space.window)
    samples = run_chain(pattern, cfg.space, cfg.mcmc(seed=args.seed))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    samples.to_csv(out / "samples.csv")
    with open(out / "acceptance.txt", "w") as fh:
        for name, rate in sorted(samples.acceptance_rates().items()):
            acc, prop = samples.acceptance[name]
            fh.write(f"{name} = {rate:.4f} ({acc}/{prop})\n")
    print(f"recorded {samples.n_draws} draws -> {out / 'samples.csv'}")
    return 0


def _cmd_test(args) -> int:
    cfg = load_config(args.config)
    samples = PosteriorSamples.from_csv(args.samples, cfg.space)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    lines = []

    def report(name, interval, reject):
        lines.append(f"test = {name}")
        lines.append(f"level = {args.level!r}")
        if interval is not None:
            kind = "arc" if interval.wraps else "interval"
            lines.append(f"{kind} = {interval.lower!r} {interval.upper!r}")
            lines.append(f"point_estimate = {interval.point_estimate!r}")
        lines.append(f"decision = {'reject' if reject else 'do not reject'}")
        lines.append("")

    sigma_constant = not samples.space.cov_x and not samples.space.cov_y
    if sigma_constant:
        interval, reject = circularity_test(samples, level=args.level)
        report("circularity", interval, reject)
    else:
        import warnings

        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            envelope, reject = circularity_envelope(
                samples, args.grid_resolution, args.level)
        report("circularity-envelope", None, reject)
        with open(out / "envelope.csv", "w") as fh:
            fh.write("x,y,lower,upper\n")
            for x, y, lo, hi in zip(envelope.grid_x, envelope.grid_y,
                                    envelope.lower, envelope.upper):
                fh.write(f"{float(x)!r},{float(y)!r},{float(lo)!r},{float(hi)!r}\n")
        if args.plots:
            emit_envelope_heatmap(envelope, "lower", out / "envelope_lower.svg")
            emit_envelope_heatmap(envelope, "upper", out / "envelope_upper.svg")
    if len(samples.space.cov_theta) == 1:
        interval, reject = direction_test(samples, level=args.level)
        report("constant-direction", interval, reject)

    (out / "tests.txt").write_text("\n".join(lines))
    print((out / "tests.txt").read_text(), end="")
    return 0


def _cmd_experiment(args) -> int:
    spec = experiment_spec(args.id, paper=args.paper, priors=args.priors,
                           models=args.model, master_seed=args.seed)
    out = Path(args.out)
    report = run_experiment(spec, out_dir=out, workers=args.workers)
    print(report.render_text(), end="")
    if report.failures():
        print(f"note: {len(report.failures())} replicate(s) failed; see report.txt",
              file=sys.stderr)
    return 0


def _cmd_diag(args) -> int:
    cfg = load_config(args.config)
    samples = PosteriorSamples.from_csv(args.samples, cfg.space)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name in samples.space.names:
        emit_traceplot(samples, name, out / f"trace_{name}.svg")
    flags = detect_label_switch(samples)
    with open(out / "diag.txt", "w") as fh:
        fh.write(f"draws = {samples.n_draws}\n")
        fh.write(f"label_switch_flags = {len(flags)}\n")
        if flags:
            fh.write("flagged_draws = " + " ".join(str(f) for f in flags) + "\n")
    status = f"{len(flags)} label-switch flag(s)" if flags else "no label-switch flags"
    print(f"{status}; traceplots -> {out}")
    return 0


_COMMANDS = {
    "simulate": _cmd_simulate,
    "fit": _cmd_fit,
    "test": _cmd_test,
    "experiment": _cmd_experiment,
    "diag": _cmd_diag,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
