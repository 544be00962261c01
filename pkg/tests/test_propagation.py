"""Harmonic solver behavior: energy, sweeps, clamping, isolation."""

import numpy as np
import pytest

from boilercut.errors import NoSeedsError, NotConvergedError, ShapeError
from boilercut.graph import SimilarityGraph
from boilercut.propagation import (
    SeedSet,
    binarize,
    energy,
    solve_direct,
    solve_iterative,
)


def graph_from(weights) -> SimilarityGraph:
    W = np.asarray(weights, dtype=float)
    return SimilarityGraph(weights=W, degrees=W.sum(axis=1))


def random_graph(rng: np.random.Generator, n: int, density: float = 0.6,
                 connected: bool = True) -> SimilarityGraph:
    W = rng.uniform(0.1, 1.0, (n, n))
    mask = rng.uniform(size=(n, n)) < density
    W = np.where(mask, W, 0.0)
    W = np.triu(W, 1)
    if connected:
        # a weighted path keeps every node reachable
        for i in range(n - 1):
            W[i, i + 1] = max(W[i, i + 1], rng.uniform(0.1, 1.0))
    W = W + W.T
    return SimilarityGraph(weights=W, degrees=W.sum(axis=1))


def energy_brute(weights, f) -> float:
    total = 0.0
    n = len(f)
    for i in range(n):
        for j in range(n):
            total += weights[i][j] * (f[i] - f[j]) ** 2
    return total / 2.0


def defect_brute(graph, scores, seeds) -> float:
    worst = 0.0
    for j in range(graph.n):
        if j in seeds.labels or graph.degrees[j] == 0:
            continue
        target = float(graph.weights[j] @ scores) / graph.degrees[j]
        worst = max(worst, abs(scores[j] - target))
    return worst


PATH3 = graph_from([[0, 1, 0], [1, 0, 1], [0, 1, 0]])
PATH3_SEEDS = SeedSet({0: 0, 2: 1})


class TestEnergy:
    def test_constant_function_is_zero(self):
        g = random_graph(np.random.default_rng(0), 6)
        assert energy(g, np.full(6, 0.37)) == 0.0

    def test_two_node_convention(self):
        g = graph_from([[0, 1], [1, 0]])
        assert energy(g, np.array([0.0, 1.0])) == 1.0

    def test_matches_brute_force(self):
        rng = np.random.default_rng(42)
        g = random_graph(rng, 6)
        f = rng.uniform(size=6)
        assert energy(g, f) == pytest.approx(energy_brute(g.weights, f), abs=1e-12)

    def test_shape_mismatch(self):
        with pytest.raises(ShapeError):
            energy(PATH3, np.array([0.0, 1.0]))


class TestBinarize:
    def test_half_is_noise(self):
        assert binarize(np.array([0.5]))[0] == 0

    def test_just_above_half(self):
        assert binarize(np.array([0.5000001]))[0] == 1

    def test_zero(self):
        assert binarize(np.array([0.0]))[0] == 0

    def test_custom_threshold(self):
        scores = np.array([0.2, 0.3001])
        assert binarize(scores, threshold=0.3).tolist() == [0, 1]


class TestIterative:
    def test_path_midpoint(self):
        result = solve_iterative(PATH3, PATH3_SEEDS, tol=1e-12)
        assert result.scores[1] == pytest.approx(0.5, abs=1e-10)
        assert result.labels[1] == 0
        assert result.scores[0] == 0.0
        assert result.scores[2] == 1.0

    @pytest.mark.filterwarnings("ignore:seed set is single-class")
    def test_all_ones_seeds(self):
        g = random_graph(np.random.default_rng(1), 8)
        seeds = SeedSet({0: 1, 3: 1})
        result = solve_iterative(g, seeds, tol=1e-10)
        assert np.allclose(result.scores, 1.0, atol=1e-9)
        assert result.energy == pytest.approx(0.0, abs=1e-12)

    def test_all_seeded_returns_verbatim(self):
        g = graph_from([[0, 1], [1, 0]])
        result = solve_iterative(g, SeedSet({0: 1, 1: 0}), tol=1e-8)
        assert result.iterations == 0
        assert result.scores.tolist() == [1.0, 0.0]
        assert result.residual == 0.0

    def test_seeds_clamped(self):
        rng = np.random.default_rng(5)
        g = random_graph(rng, 12)
        seeds = SeedSet({0: 1, 5: 0, 7: 1})
        result = solve_iterative(g, seeds, tol=1e-10)
        for idx, label in seeds.labels.items():
            assert result.scores[idx] == float(label)

    def test_no_seeds(self):
        with pytest.raises(NoSeedsError):
            solve_iterative(PATH3, SeedSet({}), tol=1e-8)

    def test_seed_out_of_range(self):
        with pytest.raises(ShapeError):
            solve_iterative(PATH3, SeedSet({5: 1}), tol=1e-8)

    def test_not_converged_carries_partial_result(self):
        g = random_graph(np.random.default_rng(9), 30)
        seeds = SeedSet({0: 1, 29: 0})
        with pytest.raises(NotConvergedError) as err:
            solve_iterative(g, seeds, tol=1e-14, max_iters=2)
        partial = err.value.result
        assert partial.iterations == 2
        assert partial.residual >= 1e-14
        assert np.all((partial.scores >= 0) & (partial.scores <= 1))

    def test_residual_is_true_defect(self):
        rng = np.random.default_rng(13)
        g = random_graph(rng, 15)
        seeds = SeedSet({0: 1, 7: 0})
        result = solve_iterative(g, seeds, tol=1e-9)
        assert defect_brute(g, result.scores, seeds) == pytest.approx(
            result.residual, abs=1e-15)
        assert result.residual < 1e-9

    def test_sweep_energy_non_increasing(self):
        rng = np.random.default_rng(21)
        g = random_graph(rng, 25)
        seeds = SeedSet({0: 1, 12: 0, 24: 1})
        result = solve_iterative(g, seeds, tol=1e-10, track_energy=True)
        energies = result.sweep_energies
        assert len(energies) == result.iterations
        for before, after in zip(energies, energies[1:]):
            assert after <= before + 1e-12

    def test_init_zero_agrees(self):
        rng = np.random.default_rng(31)
        g = random_graph(rng, 20)
        seeds = SeedSet({0: 1, 10: 0})
        tol = 1e-10
        ones = solve_iterative(g, seeds, tol=tol, init=1.0)
        zeros = solve_iterative(g, seeds, tol=tol, init=0.0)
        assert np.allclose(ones.scores, zeros.scores, atol=2 * tol)

    def test_one_class_warns(self):
        g = graph_from([[0, 1], [1, 0]])
        with pytest.warns(UserWarning):
            solve_iterative(g, SeedSet({0: 1}), tol=1e-8)


class TestDirect:
    def test_path_midpoint_exact(self):
        result = solve_direct(PATH3, PATH3_SEEDS)
        assert result.scores[1] == 0.5
        assert result.labels[1] == 0

    def test_star_two_thirds(self):
        W = np.zeros((4, 4))
        W[0, 1] = W[0, 2] = W[0, 3] = 1.0
        W = W + W.T
        g = SimilarityGraph(weights=W, degrees=W.sum(axis=1))
        result = solve_direct(g, SeedSet({1: 1, 2: 1, 3: 0}))
        assert result.scores[0] == pytest.approx(2 / 3, abs=1e-15)
        assert result.labels[0] == 1

    @pytest.mark.filterwarnings("ignore:seed set is single-class")
    def test_agrees_with_iterative(self):
        rng = np.random.default_rng(100)
        for trial in range(10):
            n = int(rng.integers(5, 40))
            g = random_graph(rng, n)
            k = int(rng.integers(2, max(3, n // 4)))
            idx = rng.choice(n, size=k, replace=False)
            seeds = SeedSet({int(i): int(rng.integers(0, 2)) for i in idx})
            direct = solve_direct(g, seeds)
            iterative = solve_iterative(g, seeds, tol=1e-10)
            assert np.allclose(direct.scores, iterative.scores, atol=1e-6), trial

    def test_residual_small(self):
        g = random_graph(np.random.default_rng(50), 20)
        result = solve_direct(g, SeedSet({0: 1, 19: 0}))
        assert result.residual < 1e-10


@pytest.mark.filterwarnings("ignore:seed set is single-class")
class TestIsolation:
    def test_zero_degree_node(self):
        W = np.zeros((3, 3))
        W[0, 1] = W[1, 0] = 1.0
        g = SimilarityGraph(weights=W, degrees=W.sum(axis=1))
        for solve in (solve_iterative, solve_direct):
            result = solve(g, SeedSet({0: 1}))
            assert result.scores[2] == 0.0
            assert result.labels[2] == 0
            assert 2 in result.isolated

    def test_unreachable_component(self):
        # two 2-cliques; seeds only in the first
        W = np.zeros((4, 4))
        W[0, 1] = W[1, 0] = 1.0
        W[2, 3] = W[3, 2] = 1.0
        g = SimilarityGraph(weights=W, degrees=W.sum(axis=1))
        result = solve_direct(g, SeedSet({0: 1}))
        assert result.scores[1] == 1.0
        assert result.scores[2] == 0.0 and result.scores[3] == 0.0
        assert set(result.isolated) == {2, 3}

    def test_isolated_excluded_from_residual(self):
        W = np.zeros((3, 3))
        W[0, 1] = W[1, 0] = 1.0
        g = SimilarityGraph(weights=W, degrees=W.sum(axis=1))
        result = solve_iterative(g, SeedSet({0: 1}), tol=1e-12)
        assert result.residual < 1e-12

    def test_isolated_seed_keeps_its_label(self):
        W = np.zeros((3, 3))
        W[0, 1] = W[1, 0] = 1.0
        g = SimilarityGraph(weights=W, degrees=W.sum(axis=1))
        result = solve_direct(g, SeedSet({0: 0, 2: 1}))
        assert result.scores[2] == 1.0
        assert 2 not in result.isolated


class TestMaximumPrinciple:
    @pytest.mark.parametrize("seed", range(6))
    def test_scores_within_seed_range(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(6, 30))
        g = random_graph(rng, n)
        k = int(rng.integers(2, 5))
        idx = rng.choice(n, size=k, replace=False)
        labels = {int(i): int(rng.integers(0, 2)) for i in idx}
        if len(set(labels.values())) == 1:
            labels[int(idx[0])] = 1 - labels[int(idx[0])]
        result = solve_iterative(g, SeedSet(labels), tol=1e-10)
        lo = min(labels.values())
        hi = max(labels.values())
        unlabeled = [i for i in range(n)
                     if i not in labels and i not in result.isolated]
        assert np.all(result.scores[unlabeled] >= lo - 1e-12)
        assert np.all(result.scores[unlabeled] <= hi + 1e-12)


class TestSeedSet:
    def test_rejects_non_binary(self):
        with pytest.raises(ValueError):
            SeedSet({0: 2})

    def test_mapping_is_frozen(self):
        seeds = SeedSet({0: 1})
        with pytest.raises(TypeError):
            seeds.labels[1] = 0
