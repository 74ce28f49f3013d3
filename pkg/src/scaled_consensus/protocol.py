"""Distributed control laws driving scaled consensus.

Each agent applies

    u_i = ( kappa1*e_i^gamma1 + kappa2*e_i^gamma2 + rho*e_i - dg_i/dt )
          / (dg_i/dx)

where e_i = sum_j a_ij (g_j(x_j, t) - g_i(x_i, t)) is the weighted
scaled disagreement seen by agent i and the powers are signed odd-ratio
powers. Three variants share this shape:

* ``gal``           three-term law on nonnegative symmetric weights;
* ``double_power``  the rho = 0 reduction;
* ``signed_gal``    signed weights a_ij with sgn(a_ij) applied to g_i
                    inside the difference, for cooperative/antagonistic
                    networks.

All three reduce to one arithmetic path: summing a_ij*(g_j -
sgn(a_ij)*g_i) over j equals (W g)_i - (sum_j |a_ij|) g_i, and for
nonnegative weights |a_ij| = a_ij. The signed variant with nonnegative
weights is therefore bit-identical to ``gal``, and ``double_power`` is
bit-identical to ``gal`` with rho = 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .attracting_law import ALParams, signed_power
from .scales import ScaleDerivativeError, ScaleFunction

__all__ = [
    "PROTOCOL_KINDS",
    "ProtocolSpec",
    "control",
    "disagreement",
    "DERIVATIVE_GUARD",
]

PROTOCOL_KINDS = ("gal", "double_power", "signed_gal")

#: Abort threshold on |dg/dx|; below this the division is meaningless.
DERIVATIVE_GUARD = 1e-8


@dataclass(frozen=True, eq=False)
class ProtocolSpec:
    """Control-law choice plus the effective coupling weights.

    For directed detail-balanced topologies pass the mirrored weights;
    the control law itself never branches on directedness. ``gal`` and
    ``double_power`` require symmetric nonnegative weights; ``signed_gal``
    accepts signed symmetric couplings.
    """

    kind: str
    params: ALParams
    weights: np.ndarray

    def __post_init__(self):
        if self.kind not in PROTOCOL_KINDS:
            raise ValueError(
                f"unknown protocol kind {self.kind!r}; expected one of "
                f"{PROTOCOL_KINDS}"
            )
        w = np.array(self.weights, dtype=float)
        if w.ndim != 2 or w.shape[0] != w.shape[1] or w.shape[0] < 2:
            raise ValueError(f"coupling matrix must be square n>=2, got {w.shape}")
        if not np.all(np.isfinite(w)):
            raise ValueError("coupling weights must be finite")
        if np.any(np.diagonal(w) != 0.0):
            raise ValueError("self-couplings are not allowed")
        if not np.array_equal(w, w.T):
            raise ValueError("effective coupling weights must be symmetric")
        if self.kind != "signed_gal" and np.any(w < 0.0):
            raise ValueError(
                f"{self.kind} requires nonnegative weights; use signed_gal "
                f"for antagonistic couplings"
            )
        params = self.params
        if self.kind == "double_power" and params.rho != 0.0:
            params = params.without_proportional_term()
        w.flags.writeable = False
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "params", params)
        # hot-loop views: row tuples and |a_ij| degrees
        object.__setattr__(
            self, "_rows", tuple(tuple(float(v) for v in row) for row in w)
        )
        object.__setattr__(
            self,
            "_degrees",
            tuple(float(v) for v in np.abs(w).sum(axis=1)),
        )
        lap = -w.copy()
        np.fill_diagonal(lap, 0.0)
        np.fill_diagonal(lap, -lap.sum(axis=1))
        lap.flags.writeable = False
        object.__setattr__(self, "_laplacian", lap)

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    @property
    def coupling_laplacian(self) -> np.ndarray:
        """Laplacian of the coupling weights; quadratic form of V."""
        return self._laplacian


def _control_list(
    spec: ProtocolSpec,
    evals: tuple,
    x: list,
    t: float,
) -> list:
    """Control inputs as plain floats; shared by simulate() and control()."""
    rows = spec._rows
    degrees = spec._degrees
    params = spec.params
    rho, kap1, kap2 = params.rho, params.kappa1, params.kappa2
    g1, g2 = params.gamma1.value, params.gamma2.value
    n = len(rows)
    g = [0.0] * n
    gx = [0.0] * n
    gt = [0.0] * n
    for i in range(n):
        gi, gxi, gti = evals[i](x[i], t)
        if abs(gxi) < DERIVATIVE_GUARD:
            raise ScaleDerivativeError(i + 1, t, x[i], gxi)
        g[i] = gi
        gx[i] = gxi
        gt[i] = gti
    u = [0.0] * n
    for i in range(n):
        row = rows[i]
        acc = 0.0
        for j in range(n):
            acc += row[j] * g[j]
        e = acc - degrees[i] * g[i]
        u[i] = (
            kap1 * signed_power(e, g1)
            + kap2 * signed_power(e, g2)
            + rho * e
            - gt[i]
        ) / gx[i]
    return u


def control(
    spec: ProtocolSpec,
    scales: tuple[ScaleFunction, ...],
    x,
    t: float,
) -> np.ndarray:
    """Control vector u for the network state x at time t.

    Raises ScaleDerivativeError when any |dg_i/dx| drops below the
    runtime guard.
    """
    if len(scales) != spec.n:
        raise ValueError(f"need {spec.n} scales, got {len(scales)}")
    evals = tuple(s.eval_all for s in scales)
    return np.array(_control_list(spec, evals, [float(v) for v in x], t))


def disagreement(
    spec: ProtocolSpec,
    scales: tuple[ScaleFunction, ...],
    x,
    t: float,
) -> float:
    """Scaled disagreement V = (1/2) * chi' L chi, chi_i = g_i(x_i, t).

    Nonnegative, and zero exactly when all scaled states agree on a
    connected topology.
    """
    chi = np.array([s.value(float(v), t) for s, v in zip(scales, x)])
    return 0.5 * float(chi @ spec.coupling_laplacian @ chi)
