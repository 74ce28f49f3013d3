"""Weighted interaction graphs and their spectral structure.

Provides the graph Laplacian, algebraic connectivity via a cyclic Jacobi
eigensolver, reachability-based connectivity checks, detail-balance
detection for directed weight matrices, and the symmetric mirror
construction that lets a detail-balanced digraph be analyzed as if it
were undirected.

All operations are pure functions of immutable values and safe to share
across concurrent runs.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

__all__ = [
    "WeightedGraph",
    "LaplacianAnalysis",
    "DetailBalance",
    "laplacian",
    "jacobi_eigenvalues",
    "algebraic_connectivity",
    "analyze",
    "is_connected",
    "find_detail_balance",
    "integer_balance",
    "mirror_adjacency",
    "mirror_laplacian",
]

#: Eigenvalues below this fraction of the largest degree count as zero.
ZERO_EIGENVALUE_RTOL = 1e-8

#: Relative tolerance for accepting a detail-balance vector.
DETAIL_BALANCE_RTOL = 1e-9


@dataclass(frozen=True, eq=False)
class WeightedGraph:
    """Interaction topology of n agents with nonnegative edge weights.

    ``weights[i, j]`` is the coupling a_ij from agent j's state into
    agent i's update. No self-loops; symmetric when undirected.
    """

    weights: np.ndarray
    directed: bool = False

    def __post_init__(self):
        w = np.array(self.weights, dtype=float)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise ValueError(f"weight matrix must be square, got {w.shape}")
        if w.shape[0] < 2:
            raise ValueError("a graph needs at least 2 agents")
        if not np.all(np.isfinite(w)):
            raise ValueError("weights must be finite")
        if np.any(w < 0.0):
            raise ValueError("weights must be nonnegative")
        if np.any(np.diagonal(w) != 0.0):
            raise ValueError("self-loops are not allowed (diagonal must be 0)")
        if not self.directed and not np.array_equal(w, w.T):
            raise ValueError("undirected graph requires a symmetric matrix")
        w.flags.writeable = False
        object.__setattr__(self, "weights", w)

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    def __repr__(self):
        kind = "directed" if self.directed else "undirected"
        return f"WeightedGraph(n={self.n}, {kind})"


@dataclass(frozen=True)
class LaplacianAnalysis:
    """Spectral summary of a symmetric Laplacian."""

    laplacian: np.ndarray
    eigenvalues: tuple[float, ...]
    lambda2: float
    connected: bool


@dataclass(frozen=True)
class DetailBalance:
    """Positive vector p with p_i a_ij = p_j a_ji, normalized to p_1 = 1.

    ``residual`` is the worst per-edge violation relative to the largest
    mirrored weight; ``valid`` means it is within tolerance and no
    one-way edge exists.
    """

    p: tuple[float, ...]
    valid: bool
    residual: float


def _laplacian_of(weights: np.ndarray) -> np.ndarray:
    # diagonal is the off-diagonal row sum, which forces zero row sums
    lap = -np.array(weights, dtype=float)
    np.fill_diagonal(lap, 0.0)
    np.fill_diagonal(lap, -lap.sum(axis=1))
    return lap


def laplacian(graph: WeightedGraph) -> np.ndarray:
    """Graph Laplacian: l_ii = sum_k a_ik, l_ij = -a_ij for i != j."""
    return _laplacian_of(graph.weights)


def jacobi_eigenvalues(
    matrix: np.ndarray, tol: float = 1e-12, max_sweeps: int = 100
) -> np.ndarray:
    """Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.

    Sweeps the upper triangle until the off-diagonal Frobenius norm drops
    below ``tol`` (scaled by the matrix norm when that exceeds one).
    Returns eigenvalues sorted ascending. Raises ValueError on
    non-symmetric input.
    """
    a = np.array(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"matrix must be square, got {a.shape}")
    scale = float(np.abs(a).max()) if a.size else 0.0
    if float(np.abs(a - a.T).max()) > 1e-9 * max(1.0, scale):
        raise ValueError(
            "matrix is not symmetric; directed topologies must be "
            "mirrored before spectral analysis"
        )
    a = 0.5 * (a + a.T)
    n = a.shape[0]
    threshold = tol * max(1.0, float(np.linalg.norm(a)))
    negligible = threshold / (n * n)
    for _ in range(max_sweeps):
        hollow = a.copy()
        np.fill_diagonal(hollow, 0.0)
        off = float(np.linalg.norm(hollow))
        if off < threshold:
            return np.sort(np.diagonal(a).copy())
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                if abs(apq) <= negligible:
                    # rotating a negligible element next to equal diagonal
                    # entries stalls convergence; drop it instead
                    a[p, q] = a[q, p] = 0.0
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if abs(theta) > 1e100:
                    t = 0.5 / theta
                elif theta >= 0.0:
                    t = 1.0 / (theta + math.sqrt(1.0 + theta * theta))
                else:
                    t = -1.0 / (-theta + math.sqrt(1.0 + theta * theta))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                app, aqq = a[p, p], a[q, q]
                for i in range(n):
                    if i == p or i == q:
                        continue
                    aip, aiq = a[i, p], a[i, q]
                    a[i, p] = a[p, i] = c * aip - s * aiq
                    a[i, q] = a[q, i] = s * aip + c * aiq
                a[p, p] = app - t * apq
                a[q, q] = aqq + t * apq
                a[p, q] = a[q, p] = 0.0
    raise ArithmeticError(
        f"Jacobi iteration did not converge in {max_sweeps} sweeps"
    )


def algebraic_connectivity(lap: np.ndarray) -> float:
    """Second-smallest eigenvalue of a symmetric Laplacian."""
    eig = jacobi_eigenvalues(lap)
    if eig.size < 2:
        raise ValueError("need at least a 2x2 Laplacian")
    return float(eig[1])


def analyze(lap: np.ndarray) -> LaplacianAnalysis:
    """Spectral analysis of a symmetric Laplacian.

    Connectivity is decided by lambda2 against a zero threshold scaled to
    the largest degree.
    """
    eig = jacobi_eigenvalues(lap)
    lam2 = float(eig[1])
    threshold = ZERO_EIGENVALUE_RTOL * float(np.diagonal(lap).max())
    return LaplacianAnalysis(
        laplacian=np.array(lap, dtype=float),
        eigenvalues=tuple(float(v) for v in eig),
        lambda2=lam2,
        connected=lam2 > threshold,
    )


def _reachable(weights: np.ndarray, start: int, transpose: bool) -> np.ndarray:
    n = weights.shape[0]
    seen = np.zeros(n, dtype=bool)
    seen[start] = True
    queue = deque([start])
    while queue:
        i = queue.popleft()
        row = weights[:, i] if transpose else weights[i]
        for j in np.nonzero(row > 0.0)[0]:
            if not seen[j]:
                seen[j] = True
                queue.append(int(j))
    return seen


def is_connected(graph: WeightedGraph) -> bool:
    """Undirected: all nodes reachable from node 1.

    Directed: strong connectivity (forward and reverse reachability).
    """
    forward = _reachable(graph.weights, 0, transpose=False)
    if not graph.directed:
        return bool(forward.all())
    return bool(forward.all() and _reachable(graph.weights, 0, True).all())


def find_detail_balance(graph: WeightedGraph) -> DetailBalance:
    """Detect p_i > 0 with p_i a_ij = p_j a_ji, canonicalized to p_1 = 1.

    Propagates p along a spanning tree of the symmetrized edge set, then
    verifies the balance on every edge. Any one-way edge (a_ij > 0 with
    a_ji = 0) makes the result invalid, as does a verification residual
    above tolerance. Never raises for an unbalanced graph; ``valid`` is
    false instead.
    """
    w = graph.weights
    n = graph.n
    ones = tuple(1.0 for _ in range(n))
    for i in range(n):
        for j in range(i + 1, n):
            if (w[i, j] > 0.0) != (w[j, i] > 0.0):
                return DetailBalance(p=ones, valid=False, residual=math.inf)
    p = np.zeros(n)
    p[0] = 1.0
    queue = deque([0])
    while queue:
        i = queue.popleft()
        for j in np.nonzero(w[i] > 0.0)[0]:
            if p[j] == 0.0:
                p[j] = p[i] * w[i, j] / w[j, i]
                queue.append(int(j))
    if np.any(p == 0.0):
        raise ValueError(
            "graph is not strongly connected; detail balance is defined "
            "only on strongly connected topologies"
        )
    mirrored = p[:, None] * w
    scale = float(mirrored.max())
    residual = float(np.abs(mirrored - mirrored.T).max()) / scale
    return DetailBalance(
        p=tuple(float(v) for v in p),
        valid=residual <= DETAIL_BALANCE_RTOL,
        residual=residual,
    )


def integer_balance(
    balance: DetailBalance, max_denominator: int = 10**6
) -> tuple[float, ...] | None:
    """Smallest positive integer multiple of a balance vector.

    Returns None when the components are not rational within 1e-9, in
    which case the canonical p_1 = 1 form is the only one available.
    """
    if not balance.valid:
        raise ValueError("cannot rescale an invalid detail balance")
    fracs = []
    for v in balance.p:
        f = Fraction(v).limit_denominator(max_denominator)
        if abs(float(f) - v) > 1e-9 * max(1.0, abs(v)):
            return None
        fracs.append(f)
    mult = math.lcm(*(f.denominator for f in fracs))
    ints = [int(f * mult) for f in fracs]
    common = math.gcd(*ints)
    return tuple(float(v // common) for v in ints)


def mirror_adjacency(graph: WeightedGraph, balance) -> np.ndarray:
    """Symmetric mirrored weights a^_ij = p_i a_ij of a balanced digraph.

    ``balance`` is a DetailBalance or an explicit positive vector. The
    result is symmetrized exactly after verifying the balance residual.
    """
    if isinstance(balance, DetailBalance):
        if not balance.valid:
            raise ValueError("detail balance is invalid for this graph")
        p = np.array(balance.p, dtype=float)
    else:
        p = np.array(balance, dtype=float)
    if p.shape != (graph.n,) or np.any(p <= 0.0):
        raise ValueError("balance vector must be positive with one entry per agent")
    mirrored = p[:, None] * graph.weights
    scale = float(mirrored.max())
    if scale > 0.0 and float(np.abs(mirrored - mirrored.T).max()) > (
        DETAIL_BALANCE_RTOL * scale
    ):
        raise ValueError("vector does not balance the weights")
    return 0.5 * (mirrored + mirrored.T)


def mirror_laplacian(graph: WeightedGraph, balance) -> np.ndarray:
    """Laplacian of the mirror graph; symmetric positive semi-definite."""
    return _laplacian_of(mirror_adjacency(graph, balance))
