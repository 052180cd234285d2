"""Command-line interface.

Subcommands::

    nonlocal-claw run CONFIG [--out DIR]
    nonlocal-claw experiment {1..5} [key=value ...] [--flux NAME] [--out DIR]
    nonlocal-claw convergence CONFIG [--out FILE]
    nonlocal-claw weights CONFIG [--n N]
    nonlocal-claw fluxcheck [--alpha A] FLUX RANGE

Exit codes: 0 success, 2 configuration error, 3 numerical blow-up,
4 CFL abort (``cfl = enforce``).
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import __version__, output
from .config import ConfigError, ExperimentConfig, parse_config, parse_overrides, parse_range
from .experiments import EXPERIMENTS, convergence_study, run_experiment, simulate
from .fluxes import (FluxSpec, Numerical, cfl_coefficient, is_consistent, lipschitz_bound,
                     monotonicity_violations, parse_flux, riemann_stationary, rusanov_alpha)
from .kernels import KernelError
from .stepping import BlowUpError, CFLViolation

EXIT_OK, EXIT_CONFIG, EXIT_BLOWUP, EXIT_CFL = 0, 2, 3, 4

log = logging.getLogger("nonlocal_claw")


def _load(path: str) -> ExperimentConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    return parse_config(text)


def _emit(text: str, path):
    if path is None:
        sys.stdout.write(text)
    else:
        output.write_text(path, text)


# {{{ subcommands

def cmd_run(args) -> int:
    cfg = _load(args.config)
    report = simulate(cfg, audit=args.audit)
    out = Path(args.out)
    output.write_text(out / "series.csv", output.series_csv(report))
    output.write_text(out / "final.dat", output.snapshot_text(report.final))
    for t, snap in sorted(report.snapshots.items()):
        output.write_text(out / f"snapshot_t{t:g}.dat", output.snapshot_text(snap))
    last = report.series[-1]
    print(f"{report.steps} steps to t={last.time:g}; lambda*B = {report.cfl_number:.4g} "
          f"(sufficient bound {report.cfl_limit:.4g}); TV {last.tv:.6e}; "
          f"range [{last.min:.6e}, {last.max:.6e}]; mass {last.mass:.6e}")
    print(f"largest L1 rate {report.max_l1_rate:.4g} "
          f"(continuity bound {report.l1_continuity_bound:.4g})")
    if args.audit:
        print(f"incremental-form audit: {'passed' if report.audits_passed else 'FAILED'} "
              f"(worst TV margin {min(a.tv_margin for a in report.audits):.3e}, "
              f"worst max-principle margin {min(a.linf_margin for a in report.audits):.3e})"
              if report.audits else "incremental-form audit: no steps")
    return EXIT_OK


def cmd_experiment(args) -> int:
    overrides = parse_overrides(args.overrides)
    fluxes = [Numerical(args.flux)] if args.flux else None
    result = run_experiment(args.id, overrides, Path(args.out), args.workers, fluxes)
    for line in result.summary:
        print(line)
    print(f"wrote {len(result.files)} files to {args.out}")
    for failure in result.failures:
        print(f"error: {failure}", file=sys.stderr)
    return EXIT_BLOWUP if result.failures else EXIT_OK


def cmd_convergence(args) -> int:
    cfg = _load(args.config)
    table = convergence_study(cfg, workers=args.workers)
    _emit(output.table_csv(table), args.out)
    if not table.complete:
        print(f"error: table incomplete: {table.failure}", file=sys.stderr)
        return EXIT_BLOWUP
    return EXIT_OK


def cmd_weights(args) -> int:
    cfg = _load(args.config)
    table = cfg.weights(args.n)
    rows = [(str(k), output.number(w)) for k, w in table.rows()]
    sys.stdout.write(output.csv_text(("k", "W_k"), rows))
    return EXIT_OK


def cmd_fluxcheck(args) -> int:
    try:
        interval = parse_range(args.range)
    except ValueError as exc:
        raise ConfigError(str(exc), key="range") from None
    alpha = args.alpha
    if alpha is None and args.flux == Numerical.LAX_FRIEDRICHS.value:
        alpha = rusanov_alpha(FluxSpec(), interval)
    try:
        spec = parse_flux(args.flux, alpha)
    except ValueError as exc:
        raise ConfigError(str(exc), key="flux") from None
    m, M = interval
    suffix = "" if spec.alpha is None else f" (alpha={spec.alpha:g})"
    print(f"flux: {spec.numerical.value}{suffix}")
    print(f"range: [{m:g}, {M:g}]")
    print(f"consistent: {is_consistent(spec, interval)}")
    print(f"monotonicity violations: {monotonicity_violations(spec, interval)}")
    print(f"cfl coefficient B: {cfl_coefficient(spec, interval):.6g}")
    print(f"lipschitz bound: {lipschitz_bound(spec, interval):.6g}")
    print(f"stationary step (1 | -1): {riemann_stationary(spec, 1.0, -1.0)}")
    return EXIT_OK

# }}}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nonlocal-claw",
        description="Finite-volume solvers for the nonlocal pair-interaction conservation law.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0,
                        help="more log output (repeatable)")
    parser.add_argument("-q", "--quiet", action="store_true", help="only log errors")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run one configuration")
    p.add_argument("config")
    p.add_argument("--out", default="out", help="output directory (default: out)")
    p.add_argument("--audit", action="store_true",
                   help="check the incremental-form coefficients at every forward Euler stage")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("experiment", help="run one of the built-in experiments")
    p.add_argument("id", type=int, choices=EXPERIMENTS)
    p.add_argument("overrides", nargs="*", metavar="key=value",
                   help="override preset keys, e.g. p=0 n_list=16,32")
    p.add_argument("--flux", choices=[k.value for k in Numerical],
                   help="restrict experiment 4 to one flux, or set the flux elsewhere")
    p.add_argument("--out", default="out", help="output directory (default: out)")
    p.add_argument("--workers", type=int, default=None, help="parallel runs per study")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("convergence", help="error table against a fine-grid reference")
    p.add_argument("config")
    p.add_argument("--out", default=None, help="CSV file (default: stdout)")
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=cmd_convergence)

    p = sub.add_parser("weights", help="print the quadrature weights as CSV")
    p.add_argument("config")
    p.add_argument("--n", type=int, default=None, help="cell count (default: config n)")
    p.set_defaults(func=cmd_weights)

    p = sub.add_parser(
        "fluxcheck", help="probe a numerical flux on a state range",
        description="Probe a numerical flux on a state range given as m,M or m:M or [m,M]. "
                    "A range starting with a minus sign must follow '--', after all options: "
                    "fluxcheck --alpha 1 lax-friedrichs -- -1,1")
    p.add_argument("flux")
    p.add_argument("range")
    p.add_argument("--alpha", type=float, default=None,
                   help="Lax-Friedrichs dissipation (default: max |f'| on the range)")
    p.set_defaults(func=cmd_fluxcheck)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args, extra = parser.parse_known_args(argv)
    if extra:
        # overrides may follow options such as --out
        if args.command == "experiment" and all("=" in e and not e.startswith("-") for e in extra):
            args.overrides = list(args.overrides) + extra
        else:
            parser.error(f"unrecognized arguments: {' '.join(extra)}")
    level = logging.ERROR if args.quiet else [logging.WARNING, logging.INFO, logging.DEBUG][
        min(args.verbose, 2)]
    logging.basicConfig(level=level, format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, KernelError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except BlowUpError as exc:
        print(f"blow-up: {exc}", file=sys.stderr)
        return EXIT_BLOWUP
    except CFLViolation as exc:
        print(f"CFL abort: {exc}", file=sys.stderr)
        return EXIT_CFL


if __name__ == "__main__":
    sys.exit(main())
