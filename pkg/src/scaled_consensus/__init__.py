"""Finite/fixed-time scaled consensus of first-order multi-agent systems.

A deterministic simulator and numerics library: scalar attracting-law
dynamics with closed-form settling-time bounds, spectral graph analysis
(algebraic connectivity, detail balance, mirror construction), the
distributed scaled-consensus control laws, and a fixed-step closed-loop
integrator with trajectory export. The ``scaled-consensus`` command
exposes bound calculators, scenario runs, and bundled example sets.
"""

from .attracting_law import (
    ALParams,
    PowerRatio,
    SettlingBounds,
    al_rhs,
    corollary_compare,
    oracle_base_step,
    scalar_settling_time,
    settling_bounds_state_dependent,
    settling_bounds_state_independent,
    signed_power,
    transformed_params,
)
from .config import (
    ConfigError,
    NetworkDerivation,
    ScenarioConfig,
    build_scenario,
    bundled_config_names,
    config_to_dict,
    load_bundled_config,
    load_config,
    parse_config,
)
from .graph import (
    DetailBalance,
    LaplacianAnalysis,
    WeightedGraph,
    algebraic_connectivity,
    analyze,
    find_detail_balance,
    integer_balance,
    is_connected,
    jacobi_eigenvalues,
    laplacian,
    mirror_adjacency,
    mirror_laplacian,
)
from .protocol import (
    DERIVATIVE_GUARD,
    PROTOCOL_KINDS,
    ProtocolSpec,
    control,
    disagreement,
)
from .report import (
    EXAMPLE_SETS,
    RunReport,
    bounds_table,
    execute_scenario,
    reproduce_example,
    run_config,
)
from .scales import (
    BUILTIN_SETTINGS,
    ScaleDerivativeError,
    ScaleFunction,
    ScaleParseError,
    builtin_scales,
    builtin_setting,
    identity_scale,
    parse_scale,
    scale_from_source,
)
from .simulator import (
    LyapunovSeries,
    Scenario,
    SimulationDivergedError,
    Trajectory,
    lyapunov_series,
    measure_settling,
    simulate,
    write_trajectory_csv,
)

__version__ = "0.1.0"

__all__ = [
    "ALParams",
    "PowerRatio",
    "SettlingBounds",
    "al_rhs",
    "corollary_compare",
    "oracle_base_step",
    "scalar_settling_time",
    "settling_bounds_state_dependent",
    "settling_bounds_state_independent",
    "signed_power",
    "transformed_params",
    "ConfigError",
    "NetworkDerivation",
    "ScenarioConfig",
    "build_scenario",
    "bundled_config_names",
    "config_to_dict",
    "load_bundled_config",
    "load_config",
    "parse_config",
    "DetailBalance",
    "LaplacianAnalysis",
    "WeightedGraph",
    "algebraic_connectivity",
    "analyze",
    "find_detail_balance",
    "integer_balance",
    "is_connected",
    "jacobi_eigenvalues",
    "laplacian",
    "mirror_adjacency",
    "mirror_laplacian",
    "DERIVATIVE_GUARD",
    "PROTOCOL_KINDS",
    "ProtocolSpec",
    "control",
    "disagreement",
    "EXAMPLE_SETS",
    "RunReport",
    "bounds_table",
    "execute_scenario",
    "reproduce_example",
    "run_config",
    "BUILTIN_SETTINGS",
    "ScaleDerivativeError",
    "ScaleFunction",
    "ScaleParseError",
    "builtin_scales",
    "builtin_setting",
    "identity_scale",
    "parse_scale",
    "scale_from_source",
    "LyapunovSeries",
    "Scenario",
    "SimulationDivergedError",
    "Trajectory",
    "lyapunov_series",
    "measure_settling",
    "simulate",
    "write_trajectory_csv",
    "__version__",
]
