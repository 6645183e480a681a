"""Command-line harness: simulate, estimate, reproduce, classify.

All commands are driven by a flat key-value configuration file (see
:mod:`qubitid.config`) and write into an output directory resolved from
``--out``, the ``QUBITID_OUT`` environment variable, or ``./qubitid_out``.

Exit codes: 0 success, 2 usage/configuration/input errors, 3 when a
parameter fit was requested for a design that cannot identify anything,
and 1 for failed reproduction checks.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import __version__
from .bayes import bayes_surface
from .campaigns import CAMPAIGNS, run_campaign
from .config import ConfigError, parse_config, write_manifest
from .design import Verdict, classify, visibility
from .fourier import fourier_estimate, periodogram
from .simulate import (
    NOISELESS,
    SamplingPlan,
    load_trace_csv,
    multi_trace,
    simulate_trace,
    write_trace_csv,
)
from .timeseries import EstimationError, gamma_least_squares, truncation_time

ENV_OUT = "QUBITID_OUT"


def _resolve_out(arg: str | None) -> Path:
    out = Path(arg or os.environ.get(ENV_OUT) or "qubitid_out")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_report(path: Path, items: list[tuple[str, object]]) -> None:
    with open(path, "w") as fh:
        for key, value in items:
            if isinstance(value, float):
                fh.write(f"{key} = {value:.17g}\n")
            else:
                fh.write(f"{key} = {value}\n")


def cmd_simulate(args) -> int:
    config = parse_config(args.config)
    if args.seed is not None:
        config.seed = args.seed
    out = _resolve_out(args.out)
    design = config.experiment_design()
    params = config.system_params()
    times = config.times()

    noiseless = SamplingPlan(times, NOISELESS, "gaussian", seed=config.seed)
    write_trace_csv(simulate_trace(design, params, noiseless), out / "noiseless.csv")
    plan = SamplingPlan(times, config.n_e, config.noise_model, seed=config.seed)
    if args.jobs > 1:
        # Series streams are independent, so parallel generation is safe
        # and gives the same traces as the sequential path.
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            traces = list(
                pool.map(lambda s: simulate_trace(design, params, plan, series=s),
                         range(config.n_series))
            )
    else:
        traces = multi_trace(design, params, plan, config.n_series)
    for k, trace in enumerate(traces):
        write_trace_csv(trace, out / f"trace_{k:03d}.csv")
    write_manifest(config, out / "manifest.txt", __version__, "simulate")
    print(f"wrote {config.n_series} trace(s) + noiseless reference + manifest to {out}")
    return 0


def cmd_estimate(args) -> int:
    config = parse_config(args.config)
    out = _resolve_out(args.out)
    axis = config.drive_axis()
    design = config.experiment_design()
    verdict = classify(design, config.system_params())

    report: list[tuple[str, object]] = [
        ("model", config.model),
        ("verdict", verdict.verdict.value),
        ("reason", verdict.reason),
        ("visibility", visibility(design)),
    ]
    if verdict.warning:
        report.append(("warning", verdict.warning))

    estimators = config.estimator_list()
    if verdict.verdict is Verdict.NONE and estimators:
        _write_report(out / "report.txt", report)
        print(
            f"error: design cannot identify any parameter (reason: {verdict.reason}); "
            f"refusing to fit",
            file=sys.stderr,
        )
        return 3

    traces = [load_trace_csv(p) for p in args.traces]
    for p, trace in zip(args.traces, traces):
        if trace.times.size != config.n_points:
            print(
                f"error: {p}: {trace.times.size} samples but config n_points = {config.n_points}",
                file=sys.stderr,
            )
            return 2

    if "fourier" in estimators:
        spec = periodogram(traces[0], zero_pad_factor=config.zero_pad_factor)
        with open(out / "spectrum.csv", "w") as fh:
            fh.write("omega,magnitude\n")
            for w, m in zip(spec.frequencies, spec.magnitude):
                fh.write(f"{w:.17g},{m:.17g}\n")
        try:
            est = fourier_estimate(spec)
            report += [
                ("fourier.omega_star", est.omega_star),
                ("fourier.peak_height", est.peak_height),
                ("fourier.halfwidth", "" if est.halfwidth is None else est.halfwidth),
                ("fourier.gamma_from_height", est.gamma_from_height),
                ("fourier.gamma_from_width", "" if est.gamma_from_width is None else est.gamma_from_width),
                ("fourier.omega0", est.omega0),
            ]
        except ValueError as exc:
            report.append(("fourier.error", str(exc)))

    if "timeseries" in estimators:
        t_max = None
        if config.truncation_floor > 0 and config.gamma > 0:
            t_max = truncation_time(config.system_params(), config.truncation_floor)
        try:
            est = gamma_least_squares(
                traces, design, config.omega,
                mask_tol=config.mask_tol, t_max=t_max,
                stop_window=config.stop_window, stop_tol=config.stop_tol,
            )
            report += [
                ("timeseries.gamma_mean", est.mean),
                ("timeseries.gamma_std", est.std),
                ("timeseries.n_series", est.n_series),
                ("timeseries.stopped_at", "" if est.stopped_at is None else est.stopped_at),
            ]
        except (EstimationError, ValueError) as exc:
            report.append(("timeseries.error", str(exc)))

    if "bayes" in estimators:
        surf = bayes_surface(
            traces[0], axis, config.omega_grid(), config.gamma_grid(), refine=True
        )
        surf.write_csv(out / "surface.csv")
        report += [
            ("bayes.omega_hat", surf.best.omega),
            ("bayes.gamma_hat", surf.best.gamma),
            ("bayes.alpha1", surf.best.alpha1),
            ("bayes.alpha2", surf.best.alpha2),
            ("bayes.u1", surf.coeff_uncertainty[0]),
            ("bayes.u2", surf.coeff_uncertainty[1]),
        ]
        if surf.param_uncertainty is not None:
            report += [
                ("bayes.sigma_omega", surf.param_uncertainty[0]),
                ("bayes.sigma_gamma", surf.param_uncertainty[1]),
            ]

    _write_report(out / "report.txt", report)
    print(f"wrote report to {out / 'report.txt'}")
    return 0


def cmd_reproduce(args) -> int:
    if args.figure_id not in CAMPAIGNS:
        print(
            f"error: unknown figure id {args.figure_id!r}; valid ids: "
            + ", ".join(sorted(CAMPAIGNS)),
            file=sys.stderr,
        )
        return 2
    out = _resolve_out(args.out) / args.figure_id
    result = run_campaign(args.figure_id, out, seed=args.seed, jobs=args.jobs)
    print("\n".join(result.summary_lines()))
    return 0 if result.passed else 1


def cmd_classify(args) -> int:
    config = parse_config(args.config)
    design = config.experiment_design()
    verdict = classify(design, config.system_params())
    print(f"verdict = {verdict.verdict.value}")
    print(f"reason = {verdict.reason}")
    print(f"visibility = {visibility(design):.6g}")
    if verdict.warning:
        print(f"warning = {verdict.warning}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qubitid",
        description="Simulated measurement campaigns and parameter identification "
        "for a dephasing two-level system.",
    )
    parser.add_argument("--version", action="version", version=f"qubitid {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help=f"output directory (default: ${ENV_OUT} or ./qubitid_out)")
    common.add_argument("--seed", type=int, help="override the configured master seed")
    common.add_argument("--jobs", type=int, default=1, help="worker threads for fan-out")

    p = sub.add_parser("simulate", parents=[common], help="generate noiseless and noisy traces")
    p.add_argument("--config", required=True, help="campaign configuration file")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("estimate", parents=[common], help="run estimators on saved traces")
    p.add_argument("--config", required=True, help="campaign configuration file")
    p.add_argument("traces", nargs="+", help="trace CSV file(s) from 'simulate'")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("reproduce", parents=[common], help="run a canned reference campaign")
    p.add_argument("figure_id", help="one of: " + ", ".join(sorted(CAMPAIGNS)))
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("classify", parents=[common], help="identifiability of a design")
    p.add_argument("--config", required=True, help="campaign configuration file")
    p.set_defaults(func=cmd_classify)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc.strerror}: {exc.filename}", file=sys.stderr)
        return 2
    except (ValueError, EstimationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
