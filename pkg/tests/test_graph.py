"""Similarity kernels and graph construction."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from boilercut.errors import BadSigmaError, GraphShapeError
from boilercut.graph import (
    InnerProductKernel,
    RbfKernel,
    build_graph,
    median_sigma,
    similarity,
)


def knn_union_oracle(dense: np.ndarray, k: int) -> np.ndarray:
    """Keep w_ij iff j is in i's top-k or i is in j's top-k (ties: smaller j)."""
    n = dense.shape[0]
    keep = np.zeros_like(dense, dtype=bool)
    for i in range(n):
        order = sorted(range(n), key=lambda j: (-dense[i, j], j))
        order = [j for j in order if j != i][:k]
        for j in order:
            keep[i, j] = True
    keep = keep | keep.T
    out = np.where(keep, dense, 0.0)
    np.fill_diagonal(out, 0.0)
    return out


class TestSimilarity:
    def test_inner_unit_self(self):
        assert similarity(np.array([1.0, 0.0]), np.array([1.0, 0.0]),
                          InnerProductKernel()) == 1.0

    def test_inner_orthogonal(self):
        assert similarity(np.array([1.0, 0.0]), np.array([0.0, 1.0]),
                          InnerProductKernel()) == 0.0

    def test_inner_negative_clamped(self):
        assert similarity(np.array([1.0, 0.0]), np.array([-2.0, 0.0]),
                          InnerProductKernel()) == 0.0

    def test_rbf_identical_vectors(self):
        v = np.array([3.0, -1.0, 2.0])
        assert similarity(v, v, RbfKernel(sigma=1.0)) == 1.0

    def test_rbf_formula(self):
        u, v = np.array([0.0, 0.0]), np.array([3.0, 4.0])
        got = similarity(u, v, RbfKernel(sigma=2.0))
        assert got == pytest.approx(np.exp(-25.0 / 8.0), rel=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(GraphShapeError):
            similarity(np.array([1.0]), np.array([1.0, 2.0]), InnerProductKernel())

    @pytest.mark.parametrize("sigma", [0.0, -1.0, float("nan"), float("inf")])
    def test_bad_sigma(self, sigma):
        with pytest.raises(BadSigmaError):
            RbfKernel(sigma=sigma)


class TestMedianSigma:
    def test_single_vector_falls_back(self):
        assert median_sigma(np.array([[1.0, 2.0]])) == 1.0

    def test_identical_vectors_fall_back(self):
        X = np.ones((4, 3))
        assert median_sigma(X) == 1.0

    def test_two_points(self):
        X = np.array([[0.0, 0.0], [3.0, 4.0]])
        assert median_sigma(X) == pytest.approx(5.0)

    def test_matches_brute_force(self):
        rng = np.random.default_rng(7)
        X = rng.normal(size=(9, 4))
        dists = [np.linalg.norm(X[i] - X[j])
                 for i in range(9) for j in range(i + 1, 9)]
        assert median_sigma(X) == pytest.approx(np.median(dists), rel=1e-12)


class TestBuildGraph:
    def test_two_identical_unit_vectors(self):
        g = build_graph([np.array([1.0, 0.0])] * 2, InnerProductKernel())
        assert np.array_equal(g.weights, [[0.0, 1.0], [1.0, 0.0]])
        assert np.array_equal(g.degrees, [1.0, 1.0])

    def test_orthogonal_triple(self):
        vecs = [np.array([1.0, 0.0]), np.array([0.0, 1.0]), np.array([1.0, 0.0])]
        g = build_graph(vecs, InnerProductKernel())
        assert g.weights[0, 2] == 1.0
        assert g.weights[0, 1] == 0.0
        assert g.weights[1, 2] == 0.0

    def test_mixed_dimensions(self):
        with pytest.raises(GraphShapeError):
            build_graph([np.array([1.0]), np.array([1.0, 2.0])],
                        InnerProductKernel())

    def test_knn_matches_oracle(self):
        rng = np.random.default_rng(3)
        vecs = [rng.uniform(0, 1, 4) for _ in range(5)]
        dense = build_graph(vecs, InnerProductKernel())
        sparse = build_graph(vecs, InnerProductKernel(), knn=2)
        expected = knn_union_oracle(dense.weights, 2)
        assert np.array_equal(sparse.weights, expected)

    @pytest.mark.parametrize("k", [1, 2, 3, 7])
    def test_knn_oracle_sweep(self, k):
        rng = np.random.default_rng(k)
        vecs = [rng.normal(size=3) for _ in range(8)]
        kernel = RbfKernel(sigma=1.3)
        dense = build_graph(vecs, kernel)
        sparse = build_graph(vecs, kernel, knn=k)
        assert np.array_equal(sparse.weights, knn_union_oracle(dense.weights, k))

    def test_knn_preserves_surviving_weights(self):
        rng = np.random.default_rng(11)
        vecs = [rng.normal(size=4) for _ in range(10)]
        dense = build_graph(vecs, RbfKernel(sigma=0.9))
        sparse = build_graph(vecs, RbfKernel(sigma=0.9), knn=3)
        mask = sparse.weights > 0
        assert np.array_equal(sparse.weights[mask], dense.weights[mask])

    @settings(max_examples=40, deadline=None)
    @given(arrays(np.float64, st.tuples(st.integers(2, 8), st.just(3)),
                  elements=st.floats(-2, 2, allow_nan=False)))
    def test_invariants_hold(self, X):
        g = build_graph(list(X), RbfKernel(sigma=1.0))
        assert np.array_equal(g.weights, g.weights.T)
        assert np.all(np.diag(g.weights) == 0)
        assert np.all(g.weights >= 0)
        assert np.all(np.isfinite(g.weights))
        assert np.allclose(g.degrees, g.weights.sum(axis=1), atol=1e-12)
        # off-diagonal RBF weights are in (0, 1]
        off = ~np.eye(g.n, dtype=bool)
        assert np.all(g.weights[off] > 0)
        assert np.all(g.weights[off] <= 1)

    def test_feature_vectors_accepted(self):
        from boilercut.embeddings import FeatureVector

        vecs = [FeatureVector(np.array([1.0, 0.0]), 1),
                FeatureVector(np.array([1.0, 0.0]), 1)]
        g = build_graph(vecs, InnerProductKernel())
        assert g.weights[0, 1] == 1.0

    def test_validate_catches_tampering(self):
        g = build_graph([np.array([1.0, 0.0])] * 3, InnerProductKernel())
        g.weights[0, 1] = 5.0
        with pytest.raises(GraphShapeError):
            g.validate()
