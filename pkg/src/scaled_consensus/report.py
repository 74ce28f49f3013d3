"""Run execution and reporting.

Executing a scenario produces a Trajectory on disk (CSV, plus a vector
figure unless suppressed) and a RunReport comparing the measured
settling time against the theoretical upper bound derived from the
transformed scalar parameters. The verdict is PASS when the measured
time stays within the upper bound plus one record stride; the lower
bound is reported for context only, since the network may settle
earlier than the scalar estimate.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .attracting_law import ALParams, settling_bounds_state_independent
from .config import (
    NetworkDerivation,
    ScenarioConfig,
    build_scenario,
    load_bundled_config,
)
from .simulator import Scenario, Trajectory, simulate, write_trajectory_csv

__all__ = [
    "RunReport",
    "bounds_table",
    "execute_scenario",
    "run_config",
    "reproduce_example",
    "EXAMPLE_SETS",
    "format_report",
    "format_summary_table",
]

EXAMPLE_SETS = {
    "example1": (
        "example1_c1_gal",
        "example1_c1_dp",
        "example1_c2_gal",
        "example1_c2_dp",
    ),
    "example2": (
        "example2_c3_gal",
        "example2_c3_dp",
        "example2_c4_gal",
        "example2_c4_dp",
    ),
}


@dataclass(frozen=True)
class RunReport:
    """Outcome of one scenario run."""

    name: str
    lambda2: float
    balance: tuple[float, ...] | None
    transformed: ALParams
    lower: float
    upper: float
    measured: float | None
    epsilon: float
    verdict: str  # "PASS" | "FAIL"
    csv_path: str | None
    figure_path: str | None
    reference: dict


def bounds_table(params: ALParams, lambda2: float, n_agents: int) -> dict:
    """Transformed parameters and settling bounds for both law variants.

    Returns a dict with the transformed three-term parameters and the
    state-independent (lower, upper) pairs for the three-term law and
    its rho = 0 reduction.
    """
    from .attracting_law import transformed_params

    scaled = transformed_params(params, lambda2, n_agents)
    gal = settling_bounds_state_independent(scaled)
    dp = settling_bounds_state_independent(scaled.without_proportional_term())
    return {
        "transformed": scaled,
        "gal": (gal.lower, gal.upper),
        "double_power": (dp.lower, dp.upper),
    }


def execute_scenario(
    scenario: Scenario,
    derivation: NetworkDerivation,
    out_dir=None,
    write_figure: bool = True,
    reference: dict | None = None,
) -> tuple[Trajectory, RunReport]:
    """Simulate, export, and judge one scenario."""
    traj = simulate(scenario)
    csv_path = figure_path = None
    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        csv_path = str(out_dir / f"{scenario.name}.csv")
        write_trajectory_csv(traj, csv_path)
        if write_figure:
            from .plots import render_scaled_states

            figure_path = str(out_dir / f"{scenario.name}.svg")
            render_scaled_states(traj, figure_path, title=scenario.name)
    measured = traj.settling_time
    slack = scenario.record_stride
    verdict = (
        "PASS"
        if measured is not None and measured <= derivation.bounds.upper + slack
        else "FAIL"
    )
    report = RunReport(
        name=scenario.name,
        lambda2=derivation.lambda2,
        balance=derivation.balance,
        transformed=derivation.transformed,
        lower=derivation.bounds.lower,
        upper=derivation.bounds.upper,
        measured=measured,
        epsilon=scenario.epsilon,
        verdict=verdict,
        csv_path=csv_path,
        figure_path=figure_path,
        reference=dict(reference or {}),
    )
    return traj, report


def run_config(
    cfg: ScenarioConfig,
    out_dir=None,
    write_figure: bool = True,
    overrides: dict | None = None,
) -> tuple[Trajectory, RunReport]:
    """Build and execute a scenario config; ``overrides`` may replace
    run-block values (step, horizon, epsilon)."""
    if overrides:
        from dataclasses import replace

        cfg = replace(cfg, **overrides)
    scenario, derivation = build_scenario(cfg)
    return execute_scenario(
        scenario,
        derivation,
        out_dir=out_dir,
        write_figure=write_figure,
        reference=cfg.reference,
    )


def reproduce_example(
    which: str,
    out_dir=None,
    write_figure: bool = True,
    overrides: dict | None = None,
) -> list[tuple[Trajectory, RunReport]]:
    """Run all bundled scenarios of one example, in name order."""
    if which not in EXAMPLE_SETS:
        raise ValueError(
            f"unknown example {which!r}; choose from {sorted(EXAMPLE_SETS)}"
        )
    results = []
    for name in EXAMPLE_SETS[which]:
        cfg = load_bundled_config(name)
        results.append(
            run_config(
                cfg, out_dir=out_dir, write_figure=write_figure,
                overrides=overrides,
            )
        )
    return results


def _fmt(value, digits=4) -> str:
    if value is None:
        return "not settled"
    return f"{value:.{digits}f}"


def format_report(report: RunReport) -> str:
    """Key-value text form of a run report."""
    lines = [f"scenario: {report.name}"]
    ref = report.reference
    lam_ref = f"  (reference {ref['lambda2']})" if "lambda2" in ref else ""
    lines.append(f"lambda2: {report.lambda2:.6f}{lam_ref}")
    if report.balance is not None:
        vec = ", ".join(f"{v:g}" for v in report.balance)
        lines.append(f"detail_balance_p: [{vec}]")
    t = report.transformed
    lines.append(
        f"transformed_params: rho'={t.rho:.6f} kappa1'={t.kappa1:.6f} "
        f"kappa2'={t.kappa2:.6f} gamma1={t.gamma1} gamma2={t.gamma2}"
    )
    low_ref = f"  (reference {ref['lower']})" if "lower" in ref else ""
    up_ref = f"  (reference {ref['upper']})" if "upper" in ref else ""
    lines.append(f"bound_lower_s: {report.lower:.4f}{low_ref}")
    lines.append(f"bound_upper_s: {report.upper:.4f}{up_ref}")
    lines.append(f"measured_settling_s: {_fmt(report.measured)}")
    lines.append(f"epsilon: {report.epsilon:g}")
    lines.append(
        f"verdict: {report.verdict} (measured <= upper + one record stride)"
    )
    if report.csv_path:
        lines.append(f"csv: {report.csv_path}")
    if report.figure_path:
        lines.append(f"figure: {report.figure_path}")
    return "\n".join(lines)


def format_summary_table(reports: list[RunReport]) -> str:
    """Aligned table over several runs."""
    header = (
        f"{'scenario':<18} {'lambda2':>9} {'lower':>8} {'upper':>8} "
        f"{'measured':>11} {'verdict':>8}"
    )
    rows = [header, "-" * len(header)]
    for r in reports:
        rows.append(
            f"{r.name:<18} {r.lambda2:>9.4f} {r.lower:>8.4f} "
            f"{r.upper:>8.4f} {_fmt(r.measured):>11} {r.verdict:>8}"
        )
    return "\n".join(rows)
