"""Closed-loop integration of the multi-agent system dx_i/dt = u_i.

Classical fixed-step RK4 over [0, horizon], with the control evaluated
at every stage time so that time-varying scales are honored inside a
step. A fixed step is deliberate: the closed loop is non-Lipschitz at
consensus (the gamma1 < 1 power), so adaptive stiff solvers tend to
stall exactly there; the epsilon band on the scaled disagreement is the
operational notion of "settled" instead, and integration continues to
the horizon to verify the trajectory stays inside the band.

Identical Scenario values produce bit-identical trajectories; the loop
is plain deterministic float arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graph import WeightedGraph
from .protocol import ProtocolSpec, _control_list
from .scales import ScaleFunction

__all__ = [
    "Scenario",
    "Trajectory",
    "LyapunovSeries",
    "SimulationDivergedError",
    "simulate",
    "measure_settling",
    "lyapunov_series",
    "write_trajectory_csv",
]


class SimulationDivergedError(RuntimeError):
    """State became non-finite; carries the failure time and last state."""

    def __init__(self, time: float, last_state: tuple):
        self.time = time
        self.last_state = last_state
        super().__init__(
            f"state diverged at t={time:.6f}; last finite state "
            f"{tuple(round(v, 6) for v in last_state)}"
        )


@dataclass(frozen=True, eq=False)
class Scenario:
    """Complete experiment description.

    ``epsilon`` is the consensus band on the largest pairwise scaled
    disagreement; ``record_stride`` the sampling interval of the
    trajectory record (rounded to a whole number of steps).
    """

    name: str
    graph: WeightedGraph
    protocol: ProtocolSpec
    scales: tuple[ScaleFunction, ...]
    x0: tuple[float, ...]
    horizon: float
    step: float = 1e-4
    epsilon: float = 1e-3
    record_stride: float = 1e-3

    def __post_init__(self):
        object.__setattr__(self, "scales", tuple(self.scales))
        object.__setattr__(self, "x0", tuple(float(v) for v in self.x0))
        if self.step <= 0.0:
            raise ValueError(f"step must be positive, got {self.step}")
        if self.horizon < self.step:
            raise ValueError("horizon must cover at least one step")
        if self.epsilon <= 0.0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if self.record_stride < self.step:
            raise ValueError("record_stride must be >= step")
        n = self.protocol.n
        if len(self.x0) != n:
            raise ValueError(f"x0 must have {n} entries, got {len(self.x0)}")
        if len(self.scales) != n:
            raise ValueError(
                f"need one scale per agent ({n}), got {len(self.scales)}"
            )


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Sampled closed-loop run.

    ``settling_time`` is the earliest sample instant after which the
    largest pairwise scaled disagreement stays within epsilon through
    the horizon, or None if it never does.
    """

    times: np.ndarray
    states: np.ndarray
    scaled_states: np.ndarray
    lyapunov: np.ndarray
    settling_time: float | None

    def __post_init__(self):
        for field in ("times", "states", "scaled_states", "lyapunov"):
            getattr(self, field).flags.writeable = False


@dataclass(frozen=True)
class LyapunovSeries:
    """Disagreement samples with finite-difference slopes between them."""

    values: np.ndarray
    slopes: np.ndarray


def simulate(scenario: Scenario) -> Trajectory:
    """Integrate the closed loop and record the sampled trajectory."""
    spec = scenario.protocol
    n = spec.n
    h = scenario.step
    total_steps = int(round(scenario.horizon / h))
    stride = max(1, int(round(scenario.record_stride / h)))
    evals = tuple(s.eval_all for s in scenario.scales)
    lap = spec.coupling_laplacian

    x = [float(v) for v in scenario.x0]
    times = [0.0]
    states = [tuple(x)]
    scaled = [tuple(evals[i](x[i], 0.0)[0] for i in range(n))]

    for step_index in range(total_steps):
        t = step_index * h
        try:
            k1 = _control_list(spec, evals, x, t)
            xs = [x[i] + 0.5 * h * k1[i] for i in range(n)]
            k2 = _control_list(spec, evals, xs, t + 0.5 * h)
            xs = [x[i] + 0.5 * h * k2[i] for i in range(n)]
            k3 = _control_list(spec, evals, xs, t + 0.5 * h)
            xs = [x[i] + h * k3[i] for i in range(n)]
            k4 = _control_list(spec, evals, xs, t + h)
        except (OverflowError, ValueError):
            # a power overflowed or a stage state left the float range
            raise SimulationDivergedError(t, tuple(x)) from None
        for i in range(n):
            x[i] += h * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) / 6.0
        t_next = (step_index + 1) * h
        for v in x:
            if not math.isfinite(v):
                raise SimulationDivergedError(t_next, states[-1])
        if (step_index + 1) % stride == 0:
            times.append(t_next)
            states.append(tuple(x))
            scaled.append(tuple(evals[i](x[i], t_next)[0] for i in range(n)))

    times_arr = np.array(times)
    states_arr = np.array(states)
    scaled_arr = np.array(scaled)
    lyap = 0.5 * np.einsum("ki,ij,kj->k", scaled_arr, lap, scaled_arr)
    settling = _settling_from_samples(times_arr, scaled_arr, scenario.epsilon)
    return Trajectory(
        times=times_arr,
        states=states_arr,
        scaled_states=scaled_arr,
        lyapunov=lyap,
        settling_time=settling,
    )


def _settling_from_samples(
    times: np.ndarray, scaled: np.ndarray, epsilon: float
) -> float | None:
    # max pairwise |g_j - g_i| is the range of the scaled values
    ranges = scaled.max(axis=1) - scaled.min(axis=1)
    outside = np.nonzero(ranges > epsilon)[0]
    if outside.size == 0:
        return float(times[0])
    last_violation = int(outside[-1])
    if last_violation + 1 >= len(times):
        return None
    return float(times[last_violation + 1])


def measure_settling(traj: Trajectory, epsilon: float) -> float | None:
    """Earliest sampled instant after which the scaled disagreement stays
    within epsilon; None when the trajectory never settles for good."""
    return _settling_from_samples(traj.times, traj.scaled_states, epsilon)


def lyapunov_series(scenario: Scenario, traj: Trajectory) -> LyapunovSeries:
    """Disagreement V(t) at every sample, with slopes for monotone checks."""
    lap = scenario.protocol.coupling_laplacian
    values = 0.5 * np.einsum(
        "ki,ij,kj->k", traj.scaled_states, lap, traj.scaled_states
    )
    dt = np.diff(traj.times)
    slopes = np.diff(values) / dt
    return LyapunovSeries(values=values, slopes=slopes)


def write_trajectory_csv(traj: Trajectory, path) -> None:
    """Delimited trajectory export: t, x_1..x_n, g_1..g_n, V per sample."""
    n = traj.states.shape[1]
    header = (
        "t,"
        + ",".join(f"x_{i+1}" for i in range(n))
        + ","
        + ",".join(f"g_{i+1}" for i in range(n))
        + ",V"
    )
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(header + "\n")
        for k in range(len(traj.times)):
            row = [traj.times[k], *traj.states[k], *traj.scaled_states[k],
                   traj.lyapunov[k]]
            fh.write(",".join(f"{v:.9g}" for v in row) + "\n")
