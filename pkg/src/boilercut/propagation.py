"""Harmonic label propagation over a similarity graph.

Given seed labels on a few nodes, the remaining nodes receive the continuous
scores minimizing the quadratic graph energy

    E(f) = 1/2 * sum_{i,j} w_ij (f_i - f_j)^2        (ordered pairs, halved)

with seeds clamped.  The minimizer is harmonic: each unlabeled score equals
the weighted average of its neighbors' scores.  Two solvers are provided and
must agree: Gauss-Seidel sweeps (``solve_iterative``) and the exact reduced
linear system (``solve_direct``).  Scores binarize at a strict 0.5 by
default, so an exact tie counts as noise.

Unlabeled nodes with zero degree, or in a component holding no seed, have no
harmonic value; they receive the conservative default score 0 (noise) and
are reported in ``PropagationResult.isolated``.
"""

from __future__ import annotations

import warnings
from collections import deque
from dataclasses import dataclass
from types import MappingProxyType
from typing import Mapping

import numpy as np

from .errors import (
    NoSeedsError,
    NotConvergedError,
    ShapeError,
    SingularSystemError,
)
from .graph import SimilarityGraph

DEFAULT_TOL = 1e-8
MIN_MAX_ITERS = 1000


@dataclass(frozen=True)
class SeedSet:
    """Binary seed labels keyed by node index; 1 = relevant, 0 = noise.

    ``origin`` records how the seeds were produced (heuristic rules, truth
    sampling, manual) so runs can be reproduced from output metadata.
    """

    labels: Mapping[int, int]
    origin: str = "manual"

    def __post_init__(self):
        for index, label in self.labels.items():
            if label not in (0, 1):
                raise ValueError(f"seed label for node {index} must be 0 or 1")
        # snapshot so later mutation of the caller's dict cannot leak in
        object.__setattr__(self, "labels", MappingProxyType(dict(self.labels)))

    def __len__(self) -> int:
        return len(self.labels)


@dataclass
class PropagationResult:
    """Converged scores plus diagnostics.

    ``residual`` is the maximum harmonic defect |f_j - avg_j(f)| over
    non-isolated unlabeled nodes; ``energy`` is the quadratic graph energy of
    the final scores; ``sweep_energies`` is populated only when energy
    tracking was requested.
    """

    scores: np.ndarray
    labels: np.ndarray
    iterations: int
    residual: float
    energy: float
    isolated: tuple[int, ...]
    sweep_energies: tuple[float, ...] | None = None


def energy(graph: SimilarityGraph, f) -> float:
    """Quadratic graph energy of a score vector (ordered pairs, halved)."""
    f = np.asarray(f, dtype=np.float64)
    if f.shape != (graph.n,):
        raise ShapeError(f"score vector has shape {f.shape}, graph has {graph.n} nodes")
    if not np.all(np.isfinite(f)):
        raise ShapeError("score vector must be finite")
    diff = f[:, None] - f[None, :]
    return float(0.5 * np.sum(graph.weights * diff**2))


def binarize(scores, threshold: float = 0.5) -> np.ndarray:
    """Map continuous scores to {0, 1}: label 1 iff score is strictly above."""
    return (np.asarray(scores, dtype=np.float64) > threshold).astype(np.int64)


def solve_iterative(
    graph: SimilarityGraph,
    seeds: SeedSet,
    tol: float = DEFAULT_TOL,
    max_iters: int | None = None,
    init: float = 1.0,
    track_energy: bool = False,
) -> PropagationResult:
    """Gauss-Seidel sweeps toward the harmonic minimizer.

    Unlabeled nodes start at ``init`` (1.0 by default) and are updated in
    ascending index order using the latest values, which makes the energy
    non-increasing sweep over sweep; seeds are clamped throughout.  Stops
    once the harmonic defect is below ``tol`` and a geometric-decay estimate
    of the remaining distance to the fixed point is below ``tol/2``; the
    second condition keeps converged scores within ``tol`` of the unique
    solution regardless of initialization, which the defect alone cannot
    guarantee on weakly coupled graphs.

    Raises
    ------
    NoSeedsError
        The seed set is empty.
    NotConvergedError
        ``max_iters`` sweeps (default ``max(1000, 10 n)``) did not reach
        ``tol``; the exception carries the partial result.
    """
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    prep = _prepare(graph, seeds)
    if max_iters is None:
        max_iters = max(MIN_MAX_ITERS, 10 * graph.n)
    elif max_iters < 1:
        raise ValueError(f"max_iters must be positive, got {max_iters}")

    f = np.zeros(graph.n)
    f[prep.labeled] = prep.labeled_values
    f[prep.unlabeled] = init
    f[prep.isolated] = 0.0

    trace: list[float] | None = [] if track_energy else None
    if prep.unlabeled.size == 0:
        return _finalize(graph, prep, f, iterations=0, trace=trace)

    W = graph.weights
    d = graph.degrees
    iterations = 0
    deltas = deque(maxlen=4)  # per-sweep max changes, for the decay rate
    for _ in range(max_iters):
        previous = f[prep.unlabeled].copy()
        for j in prep.unlabeled:
            f[j] = (W[j] @ f) / d[j]
        np.clip(f, 0.0, 1.0, out=f)  # guard ulp excursions of the averages
        iterations += 1
        if trace is not None:
            trace.append(energy(graph, f))
        deltas.append(float(np.max(np.abs(f[prep.unlabeled] - previous))))
        if _defect(W, d, f, prep.unlabeled) < tol and _settled(deltas, tol):
            return _finalize(graph, prep, f, iterations, trace)
    partial = _finalize(graph, prep, f, iterations, trace)
    raise NotConvergedError(
        f"residual {partial.residual:.3e} after {iterations} sweeps (tol {tol:.1e})",
        partial,
    )


def _settled(deltas, tol: float) -> bool:
    """Estimate whether the iterate is within tol/2 of the fixed point.

    With geometric convergence at rate r, the remaining distance after a
    sweep of size delta is about delta * r / (1 - r).  The rate is taken as
    the largest recent sweep-to-sweep ratio, which errs conservative.
    """
    delta = deltas[-1]
    if delta == 0.0:
        return True
    if len(deltas) < deltas.maxlen:
        return False
    ratios = [b / a for a, b in zip(deltas, list(deltas)[1:]) if a > 0]
    rate = max(ratios, default=1.0)
    if rate >= 1.0:
        return False
    return delta * rate / (1.0 - rate) <= 0.5 * tol


def solve_direct(graph: SimilarityGraph, seeds: SeedSet) -> PropagationResult:
    """Exact harmonic solution via the reduced linear system.

    With D the diagonal degree matrix and the nodes split into labeled and
    reachable-unlabeled sets, solves (D_uu - W_uu) f_u = W_ul f_l.
    """
    prep = _prepare(graph, seeds)
    f = np.zeros(graph.n)
    f[prep.labeled] = prep.labeled_values
    if prep.unlabeled.size:
        W = graph.weights
        u = prep.unlabeled
        A = np.diag(graph.degrees[u]) - W[np.ix_(u, u)]
        b = W[np.ix_(u, prep.labeled)] @ prep.labeled_values
        try:
            fu = np.linalg.solve(A, b)
        except np.linalg.LinAlgError as exc:
            raise SingularSystemError(
                f"reduced system is singular ({exc}); this indicates an "
                "isolated component that escaped reachability filtering"
            ) from None
        if not np.all(np.isfinite(fu)):
            raise SingularSystemError("reduced system produced non-finite scores")
        f[u] = np.clip(fu, 0.0, 1.0)
    return _finalize(graph, prep, f, iterations=0, trace=None)


@dataclass
class _Prepared:
    labeled: np.ndarray
    labeled_values: np.ndarray
    unlabeled: np.ndarray  # reachable unlabeled, ascending
    isolated: np.ndarray  # unreachable or zero-degree unlabeled


def _prepare(graph: SimilarityGraph, seeds: SeedSet) -> _Prepared:
    n = graph.n
    if len(seeds) == 0:
        raise NoSeedsError("seed set is empty")
    labeled = np.array(sorted(seeds.labels), dtype=np.int64)
    if labeled[0] < 0 or labeled[-1] >= n:
        raise ShapeError(
            f"seed index out of range for a {n}-node graph: "
            f"{labeled[0] if labeled[0] < 0 else labeled[-1]}"
        )
    labeled_values = np.array(
        [float(seeds.labels[i]) for i in labeled], dtype=np.float64
    )
    if len(set(seeds.labels.values())) == 1:
        warnings.warn(
            "seed set is single-class; propagation degenerates to a constant",
            stacklevel=3,
        )
    reachable = _reachable_from(graph.weights, labeled)
    is_labeled = np.zeros(n, dtype=bool)
    is_labeled[labeled] = True
    unlabeled_mask = ~is_labeled
    unlabeled = np.flatnonzero(unlabeled_mask & reachable)
    isolated = np.flatnonzero(unlabeled_mask & ~reachable)
    return _Prepared(labeled, labeled_values, unlabeled, isolated)


def _reachable_from(W: np.ndarray, sources: np.ndarray) -> np.ndarray:
    """BFS over positive weights from the seed nodes."""
    n = W.shape[0]
    seen = np.zeros(n, dtype=bool)
    seen[sources] = True
    queue = deque(int(i) for i in sources)
    while queue:
        i = queue.popleft()
        for j in np.flatnonzero(W[i] > 0.0):
            if not seen[j]:
                seen[j] = True
                queue.append(int(j))
    return seen


def _defect(W, d, f, unlabeled) -> float:
    if unlabeled.size == 0:
        return 0.0
    averages = (W[unlabeled] @ f) / d[unlabeled]
    return float(np.max(np.abs(f[unlabeled] - averages)))


def _finalize(graph, prep, f, iterations, trace) -> PropagationResult:
    residual = _defect(graph.weights, graph.degrees, f, prep.unlabeled)
    return PropagationResult(
        scores=f,
        labels=binarize(f),
        iterations=iterations,
        residual=residual,
        energy=energy(graph, f),
        isolated=tuple(int(i) for i in prep.isolated),
        sweep_energies=None if trace is None else tuple(trace),
    )
