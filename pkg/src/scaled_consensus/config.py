"""Scenario configuration documents.

A scenario is a JSON document with four blocks:

    {
      "name": "my_run",
      "graph":    {"directed": false, "weights": [[0,1],[1,0]]},
      "protocol": {"kind": "gal", "rho": 2.0, "kappa1": 1.0,
                   "kappa2": 1.0, "gamma1": [1,3], "gamma2": [5,3]},
      "scales":   {"setting": "C1"}          // or {"expressions": [...]}
      "run":      {"x0": [...], "horizon": 5.0, "step": 1e-4,
                   "epsilon": 1e-3, "record_stride": 1e-3},
      "reference": {"lambda2": 1.0, "lower": 0.82, "upper": 1.96}  // optional
    }

``scales.expressions`` uses the grammar of :func:`scales.parse_scale`,
one expression per agent. The optional ``reference`` block carries
previously published values that reports print next to the computed
ones. Validation errors name the offending field path; JSON syntax
errors carry line and column.

Building a scenario resolves the network side: connectivity, algebraic
connectivity of the (mirrored, for directed graphs) Laplacian, the
transformed scalar parameters, and the settling-time bounds.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import graph as graphs
from .attracting_law import (
    ALParams,
    SettlingBounds,
    settling_bounds_state_independent,
    transformed_params,
)
from .protocol import ProtocolSpec
from .scales import ScaleFunction, builtin_scales, scale_from_source
from .simulator import Scenario

__all__ = [
    "ConfigError",
    "ScenarioConfig",
    "NetworkDerivation",
    "parse_config",
    "load_config",
    "config_to_dict",
    "build_scenario",
    "bundled_config_names",
    "load_bundled_config",
]

_PROTOCOL_KEYS = {"kind", "rho", "kappa1", "kappa2", "gamma1", "gamma2"}
_RUN_KEYS = {"x0", "horizon", "step", "epsilon", "record_stride"}


class ConfigError(ValueError):
    """Configuration rejected; ``where`` is the field path or location."""

    def __init__(self, where: str, message: str):
        self.where = where
        super().__init__(f"{where}: {message}")


@dataclass(frozen=True)
class ScenarioConfig:
    """Validated declarative scenario description."""

    name: str
    weights: tuple[tuple[float, ...], ...]
    directed: bool
    kind: str
    rho: float
    kappa1: float
    kappa2: float
    gamma1: tuple[int, int]
    gamma2: tuple[int, int]
    scale_setting: str | None
    scale_expressions: tuple[str, ...] | None
    x0: tuple[float, ...]
    horizon: float
    step: float
    epsilon: float
    record_stride: float
    reference: dict = field(default_factory=dict)


@dataclass(frozen=True)
class NetworkDerivation:
    """Network quantities resolved while building a scenario."""

    lambda2: float
    balance: tuple[float, ...] | None
    effective_weights: np.ndarray
    transformed: ALParams
    bounds: SettlingBounds


def _need(mapping, key, where, kind):
    if not isinstance(mapping, dict):
        raise ConfigError(where, f"expected an object, got {type(mapping).__name__}")
    if key not in mapping:
        raise ConfigError(f"{where}.{key}", "missing required field")
    value = mapping[key]
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{where}.{key}", f"expected a number, got {value!r}")
        return float(value)
    if kind is bool:
        if not isinstance(value, bool):
            raise ConfigError(f"{where}.{key}", f"expected true/false, got {value!r}")
        return value
    if kind is str:
        if not isinstance(value, str):
            raise ConfigError(f"{where}.{key}", f"expected a string, got {value!r}")
        return value
    if kind is list:
        if not isinstance(value, list):
            raise ConfigError(f"{where}.{key}", f"expected an array, got {value!r}")
        return value
    raise AssertionError(kind)


def _ratio(value, where) -> tuple[int, int]:
    if (
        not isinstance(value, list)
        or len(value) != 2
        or not all(isinstance(v, int) and not isinstance(v, bool) for v in value)
    ):
        raise ConfigError(where, f"expected [numerator, denominator], got {value!r}")
    return int(value[0]), int(value[1])


def parse_config(document: dict | str, source: str = "<config>") -> ScenarioConfig:
    """Validate a scenario document (dict or JSON text)."""
    if isinstance(document, str):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as err:
            raise ConfigError(
                f"{source}:{err.lineno}:{err.colno}", err.msg
            ) from None
    if not isinstance(document, dict):
        raise ConfigError(source, "top level must be an object")

    name = _need(document, "name", source, str)

    graph_block = document.get("graph")
    if graph_block is None:
        raise ConfigError(f"{source}.graph", "missing required field")
    rows = _need(graph_block, "weights", f"{source}.graph", list)
    weights = []
    for i, row in enumerate(rows):
        if not isinstance(row, list) or not all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in row
        ):
            raise ConfigError(
                f"{source}.graph.weights[{i}]", "expected an array of numbers"
            )
        weights.append(tuple(float(v) for v in row))
    directed = _need(graph_block, "directed", f"{source}.graph", bool)

    proto = document.get("protocol")
    if proto is None:
        raise ConfigError(f"{source}.protocol", "missing required field")
    unknown = set(proto) - _PROTOCOL_KEYS
    if unknown:
        raise ConfigError(
            f"{source}.protocol.{sorted(unknown)[0]}", "unknown field"
        )
    kind = _need(proto, "kind", f"{source}.protocol", str)
    rho = float(proto.get("rho", 0.0))
    kappa1 = _need(proto, "kappa1", f"{source}.protocol", float)
    kappa2 = _need(proto, "kappa2", f"{source}.protocol", float)
    gamma1 = _ratio(proto.get("gamma1"), f"{source}.protocol.gamma1")
    gamma2 = _ratio(proto.get("gamma2"), f"{source}.protocol.gamma2")

    scales_block = document.get("scales")
    if scales_block is None:
        raise ConfigError(f"{source}.scales", "missing required field")
    setting = scales_block.get("setting")
    expressions = scales_block.get("expressions")
    if (setting is None) == (expressions is None):
        raise ConfigError(
            f"{source}.scales",
            "provide exactly one of 'setting' or 'expressions'",
        )
    if expressions is not None:
        if not isinstance(expressions, list) or not all(
            isinstance(e, str) for e in expressions
        ):
            raise ConfigError(
                f"{source}.scales.expressions", "expected an array of strings"
            )
        expressions = tuple(expressions)

    run = document.get("run")
    if run is None:
        raise ConfigError(f"{source}.run", "missing required field")
    unknown = set(run) - _RUN_KEYS
    if unknown:
        raise ConfigError(f"{source}.run.{sorted(unknown)[0]}", "unknown field")
    x0_raw = _need(run, "x0", f"{source}.run", list)
    if not all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in x0_raw
    ):
        raise ConfigError(f"{source}.run.x0", "expected an array of numbers")

    reference = document.get("reference", {})
    if not isinstance(reference, dict):
        raise ConfigError(f"{source}.reference", "expected an object")

    return ScenarioConfig(
        name=name,
        weights=tuple(weights),
        directed=directed,
        kind=kind,
        rho=rho,
        kappa1=kappa1,
        kappa2=kappa2,
        gamma1=gamma1,
        gamma2=gamma2,
        scale_setting=setting,
        scale_expressions=expressions,
        x0=tuple(float(v) for v in x0_raw),
        horizon=_need(run, "horizon", f"{source}.run", float),
        step=float(run.get("step", 1e-4)),
        epsilon=float(run.get("epsilon", 1e-3)),
        record_stride=float(run.get("record_stride", 1e-3)),
        reference=dict(reference),
    )


def load_config(path) -> ScenarioConfig:
    """Parse a scenario config file."""
    path = Path(path)
    return parse_config(path.read_text(encoding="utf-8"), source=str(path))


def config_to_dict(cfg: ScenarioConfig) -> dict:
    """Serialize back to the document form accepted by parse_config."""
    scales_block = (
        {"setting": cfg.scale_setting}
        if cfg.scale_setting is not None
        else {"expressions": list(cfg.scale_expressions)}
    )
    doc = {
        "name": cfg.name,
        "graph": {
            "directed": cfg.directed,
            "weights": [list(row) for row in cfg.weights],
        },
        "protocol": {
            "kind": cfg.kind,
            "rho": cfg.rho,
            "kappa1": cfg.kappa1,
            "kappa2": cfg.kappa2,
            "gamma1": list(cfg.gamma1),
            "gamma2": list(cfg.gamma2),
        },
        "scales": scales_block,
        "run": {
            "x0": list(cfg.x0),
            "horizon": cfg.horizon,
            "step": cfg.step,
            "epsilon": cfg.epsilon,
            "record_stride": cfg.record_stride,
        },
    }
    if cfg.reference:
        doc["reference"] = dict(cfg.reference)
    return doc


def _resolve_scales(cfg: ScenarioConfig, n: int) -> tuple[ScaleFunction, ...]:
    if cfg.scale_setting is not None:
        try:
            scales = builtin_scales(cfg.scale_setting)
        except ValueError as err:
            raise ConfigError("scales.setting", str(err)) from None
        if len(scales) != n:
            raise ConfigError(
                "scales.setting",
                f"setting {cfg.scale_setting} defines {len(scales)} agents, "
                f"graph has {n}",
            )
        return scales
    if len(cfg.scale_expressions) != n:
        raise ConfigError(
            "scales.expressions",
            f"expected {n} expressions, got {len(cfg.scale_expressions)}",
        )
    out = []
    for i, source in enumerate(cfg.scale_expressions):
        try:
            out.append(scale_from_source(source))
        except ValueError as err:
            raise ConfigError(f"scales.expressions[{i}]", str(err)) from None
    return tuple(out)


def build_scenario(cfg: ScenarioConfig) -> tuple[Scenario, NetworkDerivation]:
    """Resolve a config into a runnable Scenario plus network quantities.

    Directed graphs must be strongly connected and detail-balanced; the
    mirrored weights (scaled to the smallest integer balance vector when
    one exists) become the effective couplings.
    """
    try:
        params = ALParams(
            rho=cfg.rho,
            kappa1=cfg.kappa1,
            kappa2=cfg.kappa2,
            gamma1=cfg.gamma1,
            gamma2=cfg.gamma2,
        )
    except (TypeError, ValueError) as err:
        raise ConfigError("protocol", str(err)) from None

    weights = np.array(cfg.weights, dtype=float)
    signed = cfg.kind == "signed_gal"
    try:
        g = graphs.WeightedGraph(
            np.abs(weights) if signed else weights, directed=cfg.directed
        )
    except ValueError as err:
        raise ConfigError("graph.weights", str(err)) from None

    if not graphs.is_connected(g):
        raise ConfigError(
            "graph.weights",
            "graph is not connected"
            if not cfg.directed
            else "directed graph is not strongly connected",
        )

    balance = None
    if cfg.directed:
        if signed:
            raise ConfigError(
                "protocol.kind",
                "signed couplings are supported on undirected topologies only",
            )
        db = graphs.find_detail_balance(g)
        if not db.valid:
            raise ConfigError(
                "graph.weights",
                "directed graph is not detail-balanced (no positive p with "
                "p_i*a_ij = p_j*a_ji); this protocol family requires it",
            )
        balance = graphs.integer_balance(db) or db.p
        effective = graphs.mirror_adjacency(g, balance)
        lap = graphs.mirror_laplacian(g, balance)
    else:
        # signed couplings keep their signs; |a_ij| enters only the
        # connectivity check and the spectral analysis
        effective = weights
        lap = graphs.laplacian(g)

    lambda2 = graphs.algebraic_connectivity(lap)
    scaled_params = transformed_params(params, lambda2, g.n)
    bounds = settling_bounds_state_independent(scaled_params)

    try:
        spec = ProtocolSpec(kind=cfg.kind, params=params, weights=effective)
    except ValueError as err:
        raise ConfigError("protocol", str(err)) from None

    scales = _resolve_scales(cfg, g.n)
    try:
        scenario = Scenario(
            name=cfg.name,
            graph=g,
            protocol=spec,
            scales=scales,
            x0=cfg.x0,
            horizon=cfg.horizon,
            step=cfg.step,
            epsilon=cfg.epsilon,
            record_stride=cfg.record_stride,
        )
    except ValueError as err:
        raise ConfigError("run", str(err)) from None
    derivation = NetworkDerivation(
        lambda2=lambda2,
        balance=tuple(balance) if balance is not None else None,
        effective_weights=effective,
        transformed=scaled_params,
        bounds=bounds,
    )
    return scenario, derivation


def bundled_config_names() -> tuple[str, ...]:
    """Names of the scenario configs shipped with the package."""
    from importlib.resources import files

    folder = files("scaled_consensus") / "configs"
    return tuple(
        sorted(p.name[: -len(".json")] for p in folder.iterdir()
               if p.name.endswith(".json"))
    )


def load_bundled_config(name: str) -> ScenarioConfig:
    """Load one of the shipped scenario configs by name."""
    from importlib.resources import files

    resource = files("scaled_consensus") / "configs" / f"{name}.json"
    try:
        text = resource.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ConfigError(
            "name",
            f"no bundled config {name!r}; available: "
            f"{', '.join(bundled_config_names())}",
        ) from None
    return parse_config(text, source=f"bundled:{name}")
