"""Figure rendering for simulation reports.

One minimal vector-graphics line chart per run: the scaled states
g_i(x_i, t) over time, with the measured settling instant marked. Dense
trajectories are thinned before drawing; the CSV keeps every sample.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")  # headless render; must precede pyplot import

import matplotlib.pyplot as plt  # noqa: E402

from .simulator import Trajectory  # noqa: E402

__all__ = ["render_scaled_states"]

_MAX_POINTS = 1200


def render_scaled_states(traj: Trajectory, path, title: str = "") -> None:
    """Write a line chart of the scaled states to ``path`` (svg or png)."""
    thin = max(1, len(traj.times) // _MAX_POINTS)
    times = traj.times[::thin]
    scaled = traj.scaled_states[::thin]
    fig, ax = plt.subplots(figsize=(7.0, 4.0))
    for i in range(scaled.shape[1]):
        ax.plot(times, scaled[:, i], linewidth=1.0, label=f"$g_{{{i+1}}}$")
    if traj.settling_time is not None and traj.settling_time > 0.0:
        ax.axvline(
            traj.settling_time,
            color="black",
            linestyle="--",
            linewidth=0.8,
            label="settled",
        )
    ax.set_xlabel("time [s]")
    ax.set_ylabel("scaled state $g_i(x_i, t)$")
    if title:
        ax.set_title(title)
    ax.legend(loc="best", fontsize=8, ncol=2)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
