"""Scalar attracting-law dynamics and settling-time bounds.

The attracting law is the desired scalar model

    dx/dt = -rho*x - kappa1*|x|^gamma1*sgn(x) - kappa2*|x|^gamma2*sgn(x)

with gamma1 = q/p in (0, 1) and gamma2 = m/n > 1 built from odd
integers. With rho > 0 it combines a proportional term, a finite-time
term, and a finite-duration term; rho = 0 is the two-term double-power
form common in finite-time designs. Both are finite-time stable with
closed-form lower/upper settling-time bounds, and the bound on the
duration stays finite no matter how large the initial state is.

This module evaluates those bounds, maps network quantities (algebraic
connectivity, agent count) onto equivalent scalar parameters, and
integrates the scalar law itself as a numerical oracle for the bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

__all__ = [
    "PowerRatio",
    "ALParams",
    "SettlingBounds",
    "signed_power",
    "al_rhs",
    "settling_bounds_state_dependent",
    "settling_bounds_state_independent",
    "transformed_params",
    "corollary_compare",
    "oracle_base_step",
    "scalar_settling_time",
]


@dataclass(frozen=True)
class PowerRatio:
    """Exact rational exponent num/den with positive odd integers.

    Odd integers keep x^gamma an odd function of x, so the signed power
    sgn(x)*|x|^gamma coincides with the real odd root.
    """

    num: int
    den: int

    def __post_init__(self):
        for part, label in ((self.num, "numerator"), (self.den, "denominator")):
            if not isinstance(part, int) or isinstance(part, bool):
                raise TypeError(f"{label} must be an integer, got {part!r}")
            if part <= 0:
                raise ValueError(f"{label} must be positive, got {part}")
            if part % 2 == 0:
                raise ValueError(
                    f"{label} must be odd, got {part}; the exponents are "
                    f"ratios of odd numbers"
                )

    @property
    def value(self) -> float:
        return self.num / self.den

    def __str__(self):
        return f"{self.num}/{self.den}"


def _as_ratio(value) -> PowerRatio:
    if isinstance(value, PowerRatio):
        return value
    num, den = value
    return PowerRatio(int(num), int(den))


@dataclass(frozen=True)
class ALParams:
    """Attracting-law parameter bundle.

    rho = 0 selects the double-power law; rho > 0 the three-term law.
    gamma1 must be below one and gamma2 above one.
    """

    rho: float
    kappa1: float
    kappa2: float
    gamma1: PowerRatio
    gamma2: PowerRatio

    def __post_init__(self):
        object.__setattr__(self, "gamma1", _as_ratio(self.gamma1))
        object.__setattr__(self, "gamma2", _as_ratio(self.gamma2))
        if not (math.isfinite(self.rho) and self.rho >= 0.0):
            raise ValueError(f"rho must be finite and >= 0, got {self.rho}")
        for kappa, label in ((self.kappa1, "kappa1"), (self.kappa2, "kappa2")):
            if not (math.isfinite(kappa) and kappa > 0.0):
                raise ValueError(f"{label} must be finite and > 0, got {kappa}")
        if self.gamma1.num >= self.gamma1.den:
            raise ValueError(
                f"gamma1 = {self.gamma1} must be below 1 (finite-time term)"
            )
        if self.gamma2.num <= self.gamma2.den:
            raise ValueError(
                f"gamma2 = {self.gamma2} must be above 1 (finite-duration term)"
            )

    def without_proportional_term(self) -> "ALParams":
        return replace(self, rho=0.0)


@dataclass(frozen=True)
class SettlingBounds:
    """Closed-form lower/upper settling-time estimates, in seconds."""

    lower: float
    upper: float
    regime: str  # "x0>=1" | "x0<1" | "state-independent"


def signed_power(x: float, gamma: float) -> float:
    """sgn(x) * |x|^gamma, with 0 at x = 0 (real odd-ratio power)."""
    if x == 0.0:
        return 0.0
    return math.copysign(abs(x) ** gamma, x)


def al_rhs(params: ALParams, x: float) -> float:
    """Right-hand side of the attracting law at state x."""
    return (
        -params.rho * x
        - params.kappa1 * signed_power(x, params.gamma1.value)
        - params.kappa2 * signed_power(x, params.gamma2.value)
    )


def settling_bounds_state_dependent(
    params: ALParams, x0: float
) -> SettlingBounds:
    """Lower/upper settling-time bounds for a given initial state.

    Two-phase estimates: separate expressions apply for |x0| >= 1 and
    |x0| < 1, and for the three-term law versus the double-power law.
    At x0 = 0 both bounds collapse to zero.
    """
    rho, k1, k2 = params.rho, params.kappa1, params.kappa2
    g1, g2 = params.gamma1.value, params.gamma2.value
    a = abs(x0)
    if rho > 0.0:
        if a >= 1.0:
            lower = math.log(
                (1.0 + k2 / (rho + k1)) / (a ** (1.0 - g2) + k2 / (rho + k1))
            ) / ((rho + k1) * (g2 - 1.0)) + math.log(
                1.0 + (rho + k2) / k1
            ) / ((rho + k2) * (1.0 - g1))
            upper = math.log(1.0 + rho / k1) / (rho * (1.0 - g1)) + math.log(
                (1.0 + k2 / rho) / (a ** (1.0 - g2) + k2 / rho)
            ) / (rho * (g2 - 1.0))
            return SettlingBounds(lower, upper, "x0>=1")
        lower = math.log(1.0 + (rho + k2) * a ** (1.0 - g1) / k1) / (
            (rho + k2) * (1.0 - g1)
        )
        upper = math.log(1.0 + (rho / k1) * a ** (1.0 - g1)) / (
            rho * (1.0 - g1)
        )
        return SettlingBounds(lower, upper, "x0<1")
    if a >= 1.0:
        lower = math.log(
            (1.0 + k2 / k1) / (a ** (1.0 - g2) + k2 / k1)
        ) / (k1 * (g2 - 1.0)) + math.log(1.0 + k2 / k1) / (k2 * (1.0 - g1))
        upper = 1.0 / (k1 * (1.0 - g1)) + (1.0 - a ** (1.0 - g2)) / (
            k2 * (g2 - 1.0)
        )
        return SettlingBounds(lower, upper, "x0>=1")
    lower = math.log(1.0 + k2 * a ** (1.0 - g1) / k1) / (k2 * (1.0 - g1))
    upper = a ** (1.0 - g1) / (k1 * (1.0 - g1))
    return SettlingBounds(lower, upper, "x0<1")


def settling_bounds_state_independent(params: ALParams) -> SettlingBounds:
    """Settling-duration bounds valid for every initial state.

    These are the fixed-time bounds: the upper bound caps the settling
    time no matter how large |x0| grows (and also covers |x0| < 1, whose
    state-dependent upper bound is smaller).
    """
    rho, k1, k2 = params.rho, params.kappa1, params.kappa2
    g1, g2 = params.gamma1.value, params.gamma2.value
    if rho > 0.0:
        lower = math.log(1.0 + (rho + k2) / k1) / ((rho + k2) * (1.0 - g1))
        upper = math.log(1.0 + rho / k2) / (rho * (g2 - 1.0)) + math.log(
            1.0 + rho / k1
        ) / (rho * (1.0 - g1))
    else:
        lower = math.log(1.0 + k2 / k1) / (k2 * (1.0 - g1))
        upper = 1.0 / (k1 * (1.0 - g1)) + 1.0 / (k2 * (g2 - 1.0))
    return SettlingBounds(lower, upper, "state-independent")


def transformed_params(
    params: ALParams, lambda2: float, n_agents: int
) -> ALParams:
    """Scalar parameters governing the network disagreement decay.

    The square root of the network disagreement obeys the scalar law with
    gains rescaled by the algebraic connectivity and the agent count;
    this returns that rescaled bundle. Exponents use the exact integer
    ratios.
    """
    if not (math.isfinite(lambda2) and lambda2 > 0.0):
        raise ValueError(
            f"lambda2 must be positive, got {lambda2}; the interaction "
            f"graph must be connected"
        )
    if n_agents < 2:
        raise ValueError(f"need at least 2 agents, got {n_agents}")
    q, p = params.gamma1.num, params.gamma1.den
    m, n = params.gamma2.num, params.gamma2.den
    kappa1 = (
        params.kappa1
        * 2.0 ** ((q - p) / (2.0 * p))
        * lambda2 ** ((q + p) / (2.0 * p))
    )
    kappa2 = (
        params.kappa2
        * 2.0 ** ((m - n) / (2.0 * n))
        * float(n_agents) ** ((n - m) / (2.0 * n))
        * lambda2 ** ((m + n) / (2.0 * n))
    )
    return replace(
        params, rho=params.rho * lambda2, kappa1=kappa1, kappa2=kappa2
    )


def corollary_compare(params: ALParams) -> bool:
    """True iff the three-term law beats its rho = 0 reduction.

    Compares the state-independent bounds against those of the same
    parameters with the proportional term removed; both the lower and
    the upper bound must shrink strictly.
    """
    if params.rho <= 0.0:
        raise ValueError("comparison requires rho > 0")
    fast = settling_bounds_state_independent(params)
    plain = settling_bounds_state_independent(
        params.without_proportional_term()
    )
    return fast.lower < plain.lower and fast.upper < plain.upper


def oracle_base_step(params: ALParams) -> float:
    """Base integration step of the scalar oracle.

    Scaled to the settling duration so that long-lived parameter sets do
    not cost millions of steps.
    """
    horizon = settling_bounds_state_independent(params).upper
    return 1e-4 * max(1.0, horizon)


def scalar_settling_time(
    params: ALParams,
    x0: float,
    band: float = 1e-9,
    base_step: float | None = None,
    max_steps: int = 50_000_000,
) -> float:
    """Empirical settling time of the scalar law from x0, by integration.

    Classical RK4 with a per-step cap h <= |x| / (2*gamma2*|f(x)|) on top
    of the fixed base step. The cap keeps the step inside the stability
    region when |x| is huge (the gamma2 term is stiff there) and refines
    it near the origin, where the gamma1 term has unbounded slope and a
    fixed step would chatter at an amplitude above the settled band.
    |x| decreases monotonically under this stepping, so the first entry
    into the band is the settling instant.
    """
    if x0 == 0.0:
        return 0.0
    if base_step is None:
        base_step = oracle_base_step(params)
    g2 = params.gamma2.value
    cap_gain = 1.0 / (2.0 * g2)
    t = 0.0
    x = float(x0)
    for _ in range(max_steps):
        if abs(x) <= band:
            return t
        k1 = al_rhs(params, x)
        h = base_step
        if k1 != 0.0:
            cap = cap_gain * abs(x) / abs(k1)
            if cap < h:
                h = cap
        k2 = al_rhs(params, x + 0.5 * h * k1)
        k3 = al_rhs(params, x + 0.5 * h * k2)
        k4 = al_rhs(params, x + h * k3)
        x += h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0
        t += h
    raise ArithmeticError(
        f"scalar law did not settle within {max_steps} steps from x0={x0}"
    )
