"""Command line entry point: ``crossgram generate|run|sweep|plot``.

Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 I/O failure.
"""

import argparse
import logging
import sys
import warnings
from pathlib import Path

from . import experiment
from .benchmark import GeneratedSystem, inverse_sylvester_procedure
from .errors import ConfigError, NumericalError
from .metrics import ErrorReport
from .system import TimeGrid

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4

log = logging.getLogger("crossgram")


def _gramian_list(values):
    if not values:
        return None
    out = []
    for v in values:
        out.extend(s.strip() for s in v.split(",") if s.strip())
    return tuple(out)


def _add_common(p):
    p.add_argument("--config", help="JSON configuration file")
    p.add_argument("--order-dim", dest="N", type=int, help="state dimension N")
    p.add_argument("--inputs", dest="M", type=int, help="number of inputs/outputs M")
    p.add_argument("--seed", type=int, help="system seed")
    p.add_argument("--a", type=float, help="lower spectrum bound")
    p.add_argument("--b", type=float, help="upper spectrum bound")
    p.add_argument("--out", help="output directory")


def _add_experiment(p):
    p.add_argument("--noise-seed", type=int, help="seed of the test input")
    p.add_argument("--tmax", type=float, help="time horizon T")
    p.add_argument("--dt", type=float, help="time step h")
    p.add_argument("--gramian", action="append",
                   help="Gramian variant (repeatable or comma separated)")
    p.add_argument("--projection", help="projection kind")
    p.add_argument("--orders", help='reduced orders, e.g. "1..100" or "2,4,8"')
    p.add_argument("--substeps", type=int, help="RK4 sub-steps per grid step (0: automatic)")
    p.add_argument("--centering", choices=("mean", "none"),
                   help="trajectory centering of the empirical variant (default mean)")


def build_parser():
    parser = argparse.ArgumentParser(prog="crossgram", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write an inverse-Sylvester benchmark system")
    _add_common(p)

    p = sub.add_parser("run", help="generate, compute Gramians and sweep orders")
    _add_common(p)
    _add_experiment(p)

    p = sub.add_parser("sweep", help="sweep orders for a previously generated system")
    p.add_argument("system", help="directory written by 'generate'")
    _add_common(p)
    _add_experiment(p)

    p = sub.add_parser("plot", help="plot data from report_*.csv files in a directory")
    p.add_argument("reports", help="directory containing report_<variant>.csv files")
    p.add_argument("--out", help="output directory (default: the reports directory)")
    p.add_argument("--no-svg", action="store_true", help="write only the .dat tables")
    return parser


def config_from_args(args):
    """Configuration file (if any) with command line overrides applied."""
    cfg = (experiment.ExperimentConfig.from_json(args.config) if args.config
           else experiment.ExperimentConfig())
    kw = {k: getattr(args, k, None) for k in ("N", "M", "seed", "a", "b", "noise_seed",
                                               "projection", "orders", "substeps",
                                               "centering")}
    kw["output_dir"] = args.out
    kw["gramians"] = _gramian_list(getattr(args, "gramian", None))
    tmax, dt = getattr(args, "tmax", None), getattr(args, "dt", None)
    if tmax is not None or dt is not None:
        step = dt if dt is not None else cfg.grid.step
        horizon = tmax if tmax is not None else cfg.grid.horizon
        try:
            kw["grid"] = TimeGrid.from_horizon(horizon, step)
        except ValueError as exc:
            raise ConfigError(f"invalid time grid: {exc}") from exc
    return experiment.with_overrides(cfg, **kw)


def _generate(args):
    cfg = config_from_args(args)
    gen = inverse_sylvester_procedure(cfg.spec)
    gen.save(cfg.output_dir)
    print(f"wrote N={gen.sys.N}, M={gen.sys.M} system to {cfg.output_dir}")


def _summarize(result):
    for method, rep in result.reports.items():
        l2 = rep.column("l2_rel")
        print(f"{method}: orders {rep.orders[0]}..{rep.orders[-1]}, "
              f"min L2 rel error {l2.min():.3e}")


def _run(args):
    cfg = config_from_args(args)
    _summarize(experiment.run_experiment(cfg))
    print(f"artifacts in {cfg.output_dir}")


def _sweep(args):
    cfg = config_from_args(args)
    with experiment._stage("load system"):
        gen = GeneratedSystem.load(args.system)
    cfg = experiment.with_overrides(cfg, spec=gen.spec)
    _summarize(experiment.run_experiment(cfg, system=gen))
    print(f"artifacts in {cfg.output_dir}")


def _plot(args):
    src = Path(args.reports)
    if not src.is_dir():
        raise ConfigError(f"{src} is not a directory")
    reports = {}
    for path in sorted(src.glob("report_*.csv")):
        method = path.stem[len("report_"):]
        reports[method] = ErrorReport.from_csv(path, method)
    written = experiment.emit_plot_data(reports, args.out or src, svg=not args.no_svg)
    for path in written:
        print(path)


COMMANDS = {"generate": _generate, "run": _run, "sweep": _sweep, "plot": _plot}


def _exit_code(exc):
    cause = exc.__cause__ if isinstance(exc, experiment.StageError) else exc
    if isinstance(cause, ConfigError):
        return EXIT_CONFIG
    if isinstance(cause, NumericalError):
        return EXIT_NUMERIC
    if isinstance(cause, OSError):
        return EXIT_IO
    if isinstance(cause, ValueError):
        return EXIT_CONFIG
    return None


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    warnings.simplefilter("default")
    try:
        COMMANDS[args.command](args)
    except Exception as exc:
        code = _exit_code(exc)
        if code is None:
            raise
        print(f"crossgram {args.command}: error: {exc}", file=sys.stderr)
        return code
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
