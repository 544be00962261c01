"""Similarity-graph construction over block feature vectors.

Nodes are text blocks; edge weights encode vector similarity under one of
two kernels: a clamped inner product, or a Gaussian (RBF) kernel over
Euclidean distance.  Weights are symmetric, non-negative, finite, and zero
on the diagonal; harmonic propagation relies on all four properties.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .embeddings import FeatureVector
from .errors import BadSigmaError, GraphShapeError


@dataclass(frozen=True)
class InnerProductKernel:
    """w(u, v) = max(0, u . v); negative products clamp to zero."""

    def similarity(self, u: np.ndarray, v: np.ndarray) -> float:
        return max(0.0, float(np.dot(u, v)))

    def matrix(self, X: np.ndarray) -> np.ndarray:
        return np.maximum(X @ X.T, 0.0)


@dataclass(frozen=True)
class RbfKernel:
    """w(u, v) = exp(-||u - v||^2 / (2 sigma^2)); always in (0, 1]."""

    sigma: float

    def __post_init__(self):
        if not (self.sigma > 0.0 and np.isfinite(self.sigma)):
            raise BadSigmaError(f"sigma must be positive and finite, got {self.sigma}")

    def similarity(self, u: np.ndarray, v: np.ndarray) -> float:
        d2 = float(np.sum((u - v) ** 2))
        return float(np.exp(-d2 / (2.0 * self.sigma**2)))

    def matrix(self, X: np.ndarray) -> np.ndarray:
        sq_norms = np.sum(X**2, axis=1)
        d2 = sq_norms[:, None] + sq_norms[None, :] - 2.0 * (X @ X.T)
        np.maximum(d2, 0.0, out=d2)  # clip rounding negatives
        return np.exp(-d2 / (2.0 * self.sigma**2))


Kernel = InnerProductKernel | RbfKernel


@dataclass
class SimilarityGraph:
    """Symmetric non-negative weight matrix with precomputed degrees."""

    weights: np.ndarray
    degrees: np.ndarray

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    def validate(self) -> None:
        """Re-check every structural invariant; raises on violation."""
        W = self.weights
        if W.ndim != 2 or W.shape[0] != W.shape[1]:
            raise GraphShapeError(f"weight matrix must be square, got {W.shape}")
        if self.degrees.shape != (W.shape[0],):
            raise GraphShapeError("degree vector length does not match matrix")
        if not np.all(np.isfinite(W)):
            raise GraphShapeError("weights must be finite")
        if np.any(W < 0):
            raise GraphShapeError("weights must be non-negative")
        if not np.array_equal(W, W.T):
            raise GraphShapeError("weight matrix must be symmetric")
        if np.any(np.diagonal(W) != 0):
            raise GraphShapeError("diagonal must be zero")
        if not np.allclose(self.degrees, W.sum(axis=1), rtol=0, atol=1e-12):
            raise GraphShapeError("degrees do not equal row sums")


def similarity(u, v, kernel: Kernel) -> float:
    """Pairwise weight between two vectors under *kernel*."""
    u = _as_vector(u)
    v = _as_vector(v)
    if u.shape != v.shape:
        raise GraphShapeError(f"dimension mismatch: {u.shape} vs {v.shape}")
    return kernel.similarity(u, v)


def median_sigma(X) -> float:
    """Median pairwise Euclidean distance; 1.0 when degenerate.

    The fallback covers single-node pages and pages whose vectors coincide
    (median distance zero), where the RBF bandwidth would be ill-defined.
    """
    X = _as_matrix(X)
    n = X.shape[0]
    if n < 2:
        return 1.0
    sq_norms = np.sum(X**2, axis=1)
    d2 = sq_norms[:, None] + sq_norms[None, :] - 2.0 * (X @ X.T)
    np.maximum(d2, 0.0, out=d2)
    dists = np.sqrt(d2[np.triu_indices(n, k=1)])
    med = float(np.median(dists))
    return med if med > 0.0 else 1.0


def build_graph(vectors, kernel: Kernel, knn: int | None = None) -> SimilarityGraph:
    """Build the weighted similarity graph over *vectors*.

    Dense pairwise weights by default.  With ``knn=k``, an edge survives only
    if one endpoint ranks it among its k strongest (union symmetrization);
    surviving weights are never altered.  Ties at the k-th strongest break
    toward the smaller node index.
    """
    X = _as_matrix(vectors)
    if X.shape[0] == 0:
        raise GraphShapeError("cannot build a graph over zero vectors")
    W = kernel.matrix(X)
    W = (W + W.T) / 2.0  # kill BLAS rounding asymmetry
    np.fill_diagonal(W, 0.0)
    if knn is not None:
        if knn < 1:
            raise GraphShapeError(f"knn must be a positive integer, got {knn}")
        W *= _knn_union_mask(W, knn)
    degrees = W.sum(axis=1)
    graph = SimilarityGraph(weights=W, degrees=degrees)
    graph.validate()
    return graph


def _knn_union_mask(W: np.ndarray, k: int) -> np.ndarray:
    n = W.shape[0]
    keep = np.zeros((n, n), dtype=bool)
    for i in range(n):
        order = np.argsort(-W[i], kind="stable")
        picked = 0
        for j in order:
            if j == i:
                continue
            keep[i, j] = True
            picked += 1
            if picked == k:
                break
    return keep | keep.T


def _as_vector(v) -> np.ndarray:
    if isinstance(v, FeatureVector):
        v = v.values
    return np.asarray(v, dtype=np.float64)


def _as_matrix(vectors) -> np.ndarray:
    if isinstance(vectors, np.ndarray) and vectors.ndim == 2:
        return vectors.astype(np.float64, copy=False)
    rows = [_as_vector(v) for v in vectors]
    if not rows:
        return np.zeros((0, 0))
    dim = rows[0].shape
    for i, row in enumerate(rows):
        if row.shape != dim:
            raise GraphShapeError(
                f"vector {i} has dimension {row.shape}, expected {dim}"
            )
    return np.vstack(rows)
