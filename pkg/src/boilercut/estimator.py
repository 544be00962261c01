"""Scikit-learn style wrapper around graph building and harmonic propagation.

``HarmonicPropagation`` is a transductive binary classifier: ``fit(X, y)``
takes feature vectors and a label vector with ``-1`` marking unlabeled
samples (the scikit-learn semi-supervised convention), builds the similarity
graph, and propagates the known labels.  Because the method is transductive,
``predict`` returns the transduction for the fitted samples rather than
generalizing to new data.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .graph import InnerProductKernel, RbfKernel, build_graph, median_sigma
from .propagation import binarize, solve_direct, solve_iterative


def resolve_kernel(kernel: str, sigma, X) -> tuple[object, float | None]:
    """Turn CLI/estimator kernel settings into a kernel object.

    Returns the kernel and the resolved bandwidth (None for inner product).
    ``sigma`` may be a number or the string ``"median"``, resolved per page
    from the pairwise distances of *X*.
    """
    if kernel == "inner":
        return InnerProductKernel(), None
    if kernel == "rbf":
        value = median_sigma(X) if sigma == "median" else float(sigma)
        return RbfKernel(sigma=value), value
    raise ValueError(f"unknown kernel {kernel!r}; expected 'inner' or 'rbf'")


class HarmonicPropagation(BaseEstimator, ClassifierMixin):
    """Transductive label propagation via the harmonic energy minimizer.

    Parameters
    ----------
    kernel : {'rbf', 'inner', 'precomputed'}, default='rbf'
        Edge-weight kernel.  With 'precomputed', ``X`` passed to ``fit`` is
        taken as the symmetric non-negative weight matrix itself.
    sigma : float or 'median', default='median'
        RBF bandwidth; 'median' uses the median pairwise distance of the
        fitted vectors.
    knn : int or None, default=None
        Optional sparsification: keep an edge iff either endpoint ranks it
        among its ``knn`` strongest.
    solver : {'iterative', 'direct'}, default='iterative'
        Gauss-Seidel sweeps or the exact reduced linear system.
    tol, max_iters, init
        Iterative-solver controls; see ``solve_iterative``.
    threshold : float, default=0.5
        Binarization threshold (strictly-greater comparison).

    Attributes
    ----------
    scores_ : ndarray of shape (n_samples,)
        Continuous relevance scores in [0, 1].
    transduction_ : ndarray of shape (n_samples,)
        Binarized labels for every fitted sample.
    graph_ : SimilarityGraph
        The similarity graph the labels were propagated over.
    result_ : PropagationResult
        Full solver diagnostics (iterations, residual, energy, isolated).
    sigma_ : float or None
        The resolved RBF bandwidth, when the RBF kernel was used.
    """

    def __init__(self, kernel="rbf", sigma="median", knn=None, solver="iterative",
                 tol=1e-8, max_iters=None, threshold=0.5, init=1.0):
        self.kernel = kernel
        self.sigma = sigma
        self.knn = knn
        self.solver = solver
        self.tol = tol
        self.max_iters = max_iters
        self.threshold = threshold
        self.init = init

    def fit(self, X, y):
        """Propagate the labeled entries of ``y`` (−1 = unlabeled) over ``X``."""
        from .propagation import SeedSet  # local import keeps module load light

        X = check_array(X, dtype=np.float64)
        y = np.asarray(y)
        if y.shape != (X.shape[0],):
            raise ValueError(
                f"y has shape {y.shape}, expected ({X.shape[0]},)"
            )
        bad = set(np.unique(y)) - {-1, 0, 1}
        if bad:
            raise ValueError(f"labels must be in {{-1, 0, 1}}, got {sorted(bad)}")

        if self.kernel == "precomputed":
            if X.shape[0] != X.shape[1]:
                raise ValueError("precomputed kernel requires a square matrix")
            W = (X + X.T) / 2.0
            np.fill_diagonal(W, 0.0)
            from .graph import SimilarityGraph

            graph = SimilarityGraph(weights=W, degrees=W.sum(axis=1))
            graph.validate()
            self.sigma_ = None
        else:
            kern, resolved = resolve_kernel(self.kernel, self.sigma, X)
            graph = build_graph(X, kern, knn=self.knn)
            self.sigma_ = resolved

        seeds = SeedSet(
            labels={int(i): int(y[i]) for i in np.flatnonzero(y != -1)},
            origin="estimator",
        )
        if self.solver == "direct":
            result = solve_direct(graph, seeds)
        elif self.solver == "iterative":
            result = solve_iterative(
                graph, seeds, tol=self.tol,
                max_iters=self.max_iters, init=self.init,
            )
        else:
            raise ValueError(
                f"unknown solver {self.solver!r}; expected 'iterative' or 'direct'"
            )

        self.X_fit_ = X
        self.graph_ = graph
        self.result_ = result
        self.scores_ = result.scores
        self.transduction_ = binarize(result.scores, self.threshold)
        self.classes_ = np.array([0, 1])
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X=None):
        """Labels for the fitted samples (transductive; X must match fit)."""
        check_is_fitted(self, "transduction_")
        self._check_same_X(X)
        return self.transduction_.copy()

    def predict_proba(self, X=None):
        """Column-stacked [P(noise), P(relevant)] from the harmonic scores."""
        check_is_fitted(self, "scores_")
        self._check_same_X(X)
        return np.column_stack([1.0 - self.scores_, self.scores_])

    def fit_predict(self, X, y):
        return self.fit(X, y).predict()

    def _check_same_X(self, X):
        if X is None:
            return
        X = check_array(X, dtype=np.float64)
        if X.shape != self.X_fit_.shape or not np.array_equal(X, self.X_fit_):
            raise ValueError(
                "HarmonicPropagation is transductive: predict only answers "
                "for the samples passed to fit"
            )
