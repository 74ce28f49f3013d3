"""Command-line front end.

Subcommands:

* ``bounds``      settling-bound calculator for a parameter set and a
                  given algebraic connectivity;
* ``simulate``    run one scenario config, writing CSV, figure, report;
* ``reproduce``   run a bundled four-scenario example set;
* ``al-ode``      integrate the scalar attracting law and compare the
                  measured settling times against the closed-form bounds.

Exit codes: 0 success, 1 usage/configuration errors, 2 numerical
failures (derivative guard, divergence, bound containment).
"""

from __future__ import annotations

import argparse
import sys

from .attracting_law import (
    ALParams,
    oracle_base_step,
    scalar_settling_time,
    settling_bounds_state_dependent,
    settling_bounds_state_independent,
)
from .config import ConfigError, load_config
from .report import (
    EXAMPLE_SETS,
    bounds_table,
    format_report,
    format_summary_table,
    reproduce_example,
    run_config,
)
from .scales import ScaleDerivativeError
from .simulator import SimulationDivergedError

__all__ = ["main"]

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERIC = 2


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; this tool reserves 2 for
    # numerical failures
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _ratio_arg(text: str) -> tuple[int, int]:
    try:
        num, den = text.split("/")
        return int(num), int(den)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected an integer ratio like 1/3, got {text!r}"
        ) from None


def _parse_params(args) -> ALParams:
    return ALParams(
        rho=args.rho,
        kappa1=args.kappa1,
        kappa2=args.kappa2,
        gamma1=args.gamma1,
        gamma2=args.gamma2,
    )


def _add_param_args(sub, default_rho):
    sub.add_argument("--rho", type=float, default=default_rho,
                     help="proportional gain (0 selects the two-term law)")
    sub.add_argument("--kappa1", type=float, required=True,
                     help="finite-time term gain")
    sub.add_argument("--kappa2", type=float, required=True,
                     help="finite-duration term gain")
    sub.add_argument("--gamma1", type=_ratio_arg, required=True,
                     metavar="Q/P", help="exponent below 1, odd integers")
    sub.add_argument("--gamma2", type=_ratio_arg, required=True,
                     metavar="M/N", help="exponent above 1, odd integers")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="scaled-consensus",
        description="Finite/fixed-time scaled consensus toolkit",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    bounds = subs.add_parser(
        "bounds", help="settling-bound calculator for a connected network"
    )
    _add_param_args(bounds, default_rho=0.0)
    bounds.add_argument("--lambda2", type=float, required=True,
                        help="algebraic connectivity of the topology")
    bounds.add_argument("--agents", type=int, required=True,
                        help="number of agents")

    sim = subs.add_parser("simulate", help="run one scenario config file")
    sim.add_argument("config", help="path to a scenario JSON document")
    sim.add_argument("--out", default="runs", help="output directory")
    sim.add_argument("--epsilon", type=float, help="consensus band override")
    sim.add_argument("--step", type=float, help="integrator step override")
    sim.add_argument("--horizon", type=float, help="final time override")
    sim.add_argument("--csv-only", action="store_true",
                     help="skip the vector-graphics figure")

    rep = subs.add_parser(
        "reproduce", help="run a bundled example set end to end"
    )
    rep.add_argument("which", choices=sorted(EXAMPLE_SETS))
    rep.add_argument("--out", default="runs", help="output directory")
    rep.add_argument("--epsilon", type=float, help="consensus band override")
    rep.add_argument("--step", type=float, help="integrator step override")
    rep.add_argument("--horizon", type=float, help="final time override")
    rep.add_argument("--csv-only", action="store_true",
                     help="skip the vector-graphics figures")

    ode = subs.add_parser(
        "al-ode",
        help="integrate the scalar attracting law against its bounds",
    )
    _add_param_args(ode, default_rho=0.0)
    ode.add_argument("--x0", type=float, nargs="+", required=True,
                     help="initial states to integrate from")
    ode.add_argument("--band", type=float, default=1e-9,
                     help="settled band on |x|")
    return parser


def _cmd_bounds(args) -> int:
    params = _parse_params(args)
    table = bounds_table(params, args.lambda2, args.agents)
    t = table["transformed"]
    print(f"lambda2: {args.lambda2:.6f}   agents: {args.agents}")
    print(
        f"transformed: rho'={t.rho:.4f} kappa1'={t.kappa1:.4f} "
        f"kappa2'={t.kappa2:.4f}"
    )
    gal_lo, gal_up = table["gal"]
    dp_lo, dp_up = table["double_power"]
    print(f"three-term law   : lower {gal_lo:.4f} s, upper {gal_up:.4f} s")
    print(f"double-power law : lower {dp_lo:.4f} s, upper {dp_up:.4f} s")
    return EXIT_OK


def _cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    overrides = {
        key: getattr(args, key)
        for key in ("epsilon", "step", "horizon")
        if getattr(args, key) is not None
    }
    _, report = run_config(
        cfg,
        out_dir=args.out,
        write_figure=not args.csv_only,
        overrides=overrides,
    )
    print(format_report(report))
    return EXIT_OK if report.verdict == "PASS" else EXIT_NUMERIC


def _cmd_reproduce(args) -> int:
    overrides = {
        key: getattr(args, key)
        for key in ("epsilon", "step", "horizon")
        if getattr(args, key) is not None
    }
    results = reproduce_example(
        args.which,
        out_dir=args.out,
        write_figure=not args.csv_only,
        overrides=overrides,
    )
    reports = [rep for _, rep in results]
    print(format_summary_table(reports))
    if any(rep.verdict != "PASS" for rep in reports):
        return EXIT_NUMERIC
    return EXIT_OK


def _cmd_al_ode(args) -> int:
    params = _parse_params(args)
    independent = settling_bounds_state_independent(params)
    print(
        f"state-independent bounds: lower {independent.lower:.4f} s, "
        f"upper {independent.upper:.4f} s"
    )
    header = f"{'x0':>12} {'measured':>10} {'lower':>10} {'upper':>10} {'in range':>9}"
    print(header)
    print("-" * len(header))
    worst = EXIT_OK
    slack = 2.0 * oracle_base_step(params)
    for x0 in args.x0:
        measured = scalar_settling_time(params, x0, band=args.band)
        bounds = settling_bounds_state_dependent(params, x0)
        inside = bounds.lower - slack <= measured <= bounds.upper + slack
        if not inside:
            worst = EXIT_NUMERIC
        print(
            f"{x0:>12g} {measured:>10.4f} {bounds.lower:>10.4f} "
            f"{bounds.upper:>10.4f} {'yes' if inside else 'NO':>9}"
        )
    return worst


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "bounds": _cmd_bounds,
        "simulate": _cmd_simulate,
        "reproduce": _cmd_reproduce,
        "al-ode": _cmd_al_ode,
    }
    try:
        return handlers[args.command](args)
    except ConfigError as err:
        print(f"configuration error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as err:
        print(f"cannot read {err.filename}", file=sys.stderr)
        return EXIT_USAGE
    except (TypeError, ValueError) as err:
        print(f"invalid input: {err}", file=sys.stderr)
        return EXIT_USAGE
    except (ScaleDerivativeError, SimulationDivergedError, ArithmeticError) as err:
        print(f"numerical failure: {err}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
