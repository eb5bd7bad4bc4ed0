"""Command-line front end.

Exit codes: 0 success, 1 runtime failure, 2 usage error.
"""

import argparse
import json
import os
import sys
from dataclasses import replace

from rss_locate import __version__
from rss_locate.errors import ConfigError
from rss_locate.experiment import (
    METHODS,
    PF,
    SWEEP_METRICS,
    TRI,
    EpochRecord,
    ExperimentConfig,
    SweepSummary,
    config_metadata,
    final_epoch_means,
    run_epoch_experiment,
    run_noise_sweep,
    write_csv,
)
from rss_locate.particle_filter import RESAMPLERS, PfConfig
from rss_locate.rng import MAX_SEED
from rss_locate.scenario import bad_geometry, good_geometry, load_scenario, save_scenario
from rss_locate.signal_model import PathLossParams
from rss_locate.trilateration import AVERAGING_DOMAINS, INITIAL_GUESS_POLICIES, TrilaterationConfig

SEED_ENV = "RSS_LOCATE_SEED"
METHOD_ALIASES = {"pf": PF, "tri": TRI, PF: PF, TRI: TRI}
ART = "(artifact default)"


class UsageError(Exception):
    pass


def _float_list(text):
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("--sigmas needs at least one value")
    return values


def _methods(text):
    names = [v.strip() for v in text.split(",") if v.strip()]
    bad = [n for n in names if n not in METHOD_ALIASES]
    if bad or not names:
        raise argparse.ArgumentTypeError(f"methods must be a subset of pf,tri; got {text!r}")
    out = []
    for n in names:
        if METHOD_ALIASES[n] not in out:
            out.append(METHOD_ALIASES[n])
    return tuple(m for m in METHODS if m in out)


def _geometry(text):
    if text in ("good", "bad") or (text.startswith("file:") and len(text) > 5):
        return text
    raise argparse.ArgumentTypeError(f"geometry must be good, bad or file:PATH, got {text!r}")


def _placement_flags(p, geometry_help):
    p.add_argument("--geometry", type=_geometry, default="bad", help=geometry_help)
    p.add_argument("--sensors", type=int, help=f"number of sensors M [4 {ART}]")
    p.add_argument("--radius", type=float, help=f"sensor distance from target, m [40 {ART}]")
    p.add_argument("--arc", type=float, help=f"bad-geometry arc, degrees [60 {ART}]")


def _experiment_flags(p):
    _placement_flags(p, "good, bad or file:PATH [bad]")
    p.add_argument("--epochs", type=int, default=100, help="epochs per trial [100]")
    p.add_argument("--trials", type=int, default=50, help=f"Monte Carlo trials [50 {ART}]")
    p.add_argument("--seed", type=int, help=f"base seed; falls back to ${SEED_ENV}, then 0")
    p.add_argument("--methods", type=_methods, default=METHODS, help="subset of pf,tri [pf,tri]")
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument("--particles", type=int, default=1000, help=f"particle count N [1000 {ART}]")
    p.add_argument("--rho", type=float, default=0.9, help="resampling ratio [0.9]")
    p.add_argument("--p0", type=float, default=-30.0, help="reference RSS at 1 m, dB [-30]")
    p.add_argument("--beta", type=float, default=2.5, help="path-loss exponent [2.5]")
    p.add_argument("--resampler", choices=RESAMPLERS, default=PfConfig.resampler,
                   help=f"particle selection scheme [{PfConfig.resampler} {ART}]")
    p.add_argument("--jitter", type=float, default=0.0, help="Gaussian jitter after resampling, m [0]")
    p.add_argument("--sigma-weight", type=float, help="noise sigma used in the PF likelihood [simulation sigma]")
    p.add_argument("--average", choices=AVERAGING_DOMAINS, default=TrilaterationConfig.average,
                   help=f"trilateration epoch averaging domain [{TrilaterationConfig.average} {ART}]")
    p.add_argument("--no-accumulate", action="store_true", help="trilaterate each epoch on its own")
    p.add_argument("--initial-guess", choices=INITIAL_GUESS_POLICIES[:2], default="sensor_centroid",
                   help=f"trilateration starting point [sensor_centroid {ART}]")
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                   help="parallel workers [number of logical cores]")


def build_parser():
    parser = argparse.ArgumentParser(prog="rss-locate", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="error-vs-epoch experiment, writes epoch CSV")
    _experiment_flags(run)
    run.add_argument("--sigma", type=float, default=5.0, help="RSS noise std, dB [5]")

    sweep = sub.add_parser("sweep", help="noise sweep, writes summary CSV")
    _experiment_flags(sweep)
    sweep.add_argument("--sigmas", type=_float_list, default=[float(s) for s in range(1, 11)],
                       help="comma-separated noise levels, dB [1,...,10]")
    sweep.add_argument("--metric", choices=SWEEP_METRICS, default="mean",
                       help="per-trial score: mean over epochs or final epoch [mean]")
    sweep.add_argument("--epoch-out", help="also write the raw epoch records here")

    scen = sub.add_parser("scenario", help="write a scenario file")
    _placement_flags(scen, "good or bad [bad]")
    scen.add_argument("--out", required=True, help="output scenario path")

    sub.add_parser("version", help="print the version")
    return parser


def _scenario(args):
    if args.geometry.startswith("file:"):
        given = [f"--{n}" for n in ("sensors", "radius", "arc") if getattr(args, n) is not None]
        if given:
            raise UsageError(f"{', '.join(given)} cannot be combined with --geometry file:PATH")
        return load_scenario(args.geometry[5:])
    m = 4 if args.sensors is None else args.sensors
    radius = 40.0 if args.radius is None else args.radius
    try:
        if args.geometry == "good":
            if args.arc is not None:
                raise UsageError("--arc only applies to --geometry bad")
            return good_geometry(m, radius)
        return bad_geometry(m, radius, 60.0 if args.arc is None else args.arc)
    except ConfigError as exc:
        raise UsageError(str(exc)) from None


def _seed(args):
    if args.seed is not None:
        seed = args.seed
    elif os.environ.get(SEED_ENV, "").strip():
        try:
            seed = int(os.environ[SEED_ENV])
        except ValueError:
            raise UsageError(f"${SEED_ENV} must be an integer") from None
    else:
        seed = 0
    if not 0 <= seed <= MAX_SEED:
        raise UsageError("seed must be an unsigned 64-bit integer")
    return seed


def _config(args, sigma):
    if sigma < 0:
        raise UsageError("sigma must be ≥ 0")
    if args.threads < 1:
        raise UsageError("threads must be ≥ 1")
    scenario = _scenario(args)
    try:
        return ExperimentConfig(
            scenario=scenario,
            params=PathLossParams(args.p0, args.beta, sigma),
            pf=PfConfig(n_particles=args.particles, rho=args.rho, area=scenario.area,
                        resampler=args.resampler, jitter_std_m=args.jitter,
                        sigma_weight_db=args.sigma_weight),
            tri=TrilaterationConfig(accumulate=not args.no_accumulate, average=args.average,
                                    initial_guess_policy=args.initial_guess),
            epochs=args.epochs,
            trials=args.trials,
            seed=_seed(args),
            methods=args.methods,
        )
    except ConfigError as exc:
        raise UsageError(str(exc)) from None


def _report_config(meta, threads):
    print(json.dumps({**meta, "threads": threads}, sort_keys=True), file=sys.stderr)


def cmd_run(args):
    config = _config(args, args.sigma)
    meta = config_metadata(config)
    _report_config(meta, args.threads)
    records = run_epoch_experiment(config, workers=args.threads)
    write_csv(records, args.out, EpochRecord, meta)
    for method, err in final_epoch_means(records).items():
        print(f"{method}: mean error at epoch {config.epochs} = {err:.3f} m ({config.trials} trials)")
    return 0


def cmd_sweep(args):
    if any(s < 0 for s in args.sigmas):
        raise UsageError("sigma must be ≥ 0")
    if len(set(args.sigmas)) != len(args.sigmas):
        raise UsageError("--sigmas must not repeat")
    config = _config(args, args.sigmas[0])
    meta = config_metadata(config, sigmas=args.sigmas, metric=args.metric)
    del meta["params"]["sigma_db"]
    _report_config(meta, args.threads)
    summaries, records = run_noise_sweep(config, args.sigmas, workers=args.threads,
                                         metric=args.metric, return_records=True)
    write_csv(summaries, args.out, SweepSummary, meta)
    if args.epoch_out:
        write_csv(records, args.epoch_out, EpochRecord, meta)
    for s in summaries:
        print(f"sigma={s.sigma_db:g} dB {s.method}: {s.mean_error_m:.3f} ± {s.std_error_m:.3f} m")
    return 0


def cmd_scenario(args):
    if args.geometry.startswith("file:"):
        raise UsageError("scenario generation needs --geometry good or bad")
    scen = _scenario(args)
    save_scenario(scen, args.out)
    print(json.dumps(scen.to_dict(), sort_keys=True), file=sys.stderr)
    return 0


COMMANDS = {"run": cmd_run, "sweep": cmd_sweep, "scenario": cmd_scenario}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "version":
        print(f"rss-locate {__version__}")
        return 0
    sub = parser._subparsers._group_actions[0].choices[args.command]
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        sub.print_usage(sys.stderr)
        print(f"rss-locate {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (ConfigError, OSError, ArithmeticError) as exc:
        print(f"rss-locate: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
