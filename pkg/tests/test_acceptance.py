"""End-to-end acceptance suite.

One test per shipping criterion; each prints a PASS/FAIL line via the
conftest hook.  Tolerances here are contractual: do not loosen them to make
a failing build green.
"""

import json
import math
import time

import jsonschema
import numpy as np
import pytest

from boilercut.cli import main
from boilercut.evaluation import PredictionBlock, PredictionPage, compare
from boilercut.graph import SimilarityGraph
from boilercut.propagation import SeedSet, solve_direct, solve_iterative

from schemas import PREDICTION_SCHEMA
from test_evaluation import pred_page, truth_for
from test_propagation import defect_brute, energy_brute

pytestmark = pytest.mark.acceptance

N_GRAPHS = 100
AGREE_TOL = 1e-6
DEFECT_TOL = 1e-8
ITER_TOL = 1e-10


def make_case(rng: np.random.Generator):
    """Random graph with non-negative weights, every node reachable, >= 2 seeds."""
    n = int(rng.integers(4, 51))
    W = rng.uniform(0.05, 1.0, (n, n))
    W = np.where(rng.uniform(size=(n, n)) < 0.5, W, 0.0)
    W = np.triu(W, 1)
    for i in range(n - 1):
        W[i, i + 1] = max(W[i, i + 1], rng.uniform(0.1, 1.0))
    W = W + W.T
    graph = SimilarityGraph(weights=W, degrees=W.sum(axis=1))
    k = int(rng.integers(2, min(n, 8)))
    idx = rng.choice(n, size=k, replace=False)
    labels = {int(i): int(rng.integers(0, 2)) for i in idx}
    if len(set(labels.values())) == 1:
        labels[int(idx[0])] = 1 - labels[int(idx[0])]
    return graph, SeedSet(labels)


@pytest.fixture(scope="module")
def graph_suite():
    rng = np.random.default_rng(20240915)
    return [make_case(rng) for _ in range(N_GRAPHS)]


def test_harmonic_solver_agreement(graph_suite):
    for trial, (graph, seeds) in enumerate(graph_suite):
        direct = solve_direct(graph, seeds)
        iterative = solve_iterative(graph, seeds, tol=ITER_TOL)
        gap = float(np.max(np.abs(direct.scores - iterative.scores)))
        assert gap <= AGREE_TOL, f"trial {trial}: solvers disagree by {gap}"
        assert defect_brute(graph, direct.scores, seeds) < DEFECT_TOL, trial
        assert defect_brute(graph, iterative.scores, seeds) < DEFECT_TOL, trial


def test_energy_law(graph_suite):
    from boilercut.propagation import energy

    rng = np.random.default_rng(7)
    for graph, _ in graph_suite[:20]:
        f = rng.uniform(size=graph.n)
        assert energy(graph, f) == pytest.approx(
            energy_brute(graph.weights, f), abs=1e-12)
    for trial, (graph, seeds) in enumerate(graph_suite):
        result = solve_iterative(graph, seeds, tol=ITER_TOL, track_energy=True)
        energies = result.sweep_energies
        for sweep, (before, after) in enumerate(zip(energies, energies[1:])):
            # slack covers rounding of the energy evaluation itself (an
            # n^2-term float sum); a genuine monotonicity bug overshoots
            # this by many orders of magnitude
            assert after <= before + 1e-12 * max(1.0, before), (
                f"trial {trial}: energy rose at sweep {sweep}: {before} -> {after}")


def test_maximum_principle(graph_suite):
    for trial, (graph, seeds) in enumerate(graph_suite):
        for result in (solve_iterative(graph, seeds, tol=ITER_TOL),
                       solve_direct(graph, seeds)):
            assert np.all(result.scores >= 0.0), trial
            assert np.all(result.scores <= 1.0), trial


def test_path_graph_oracle():
    W = np.array([[0.0, 1.0, 0.0],
                  [1.0, 0.0, 1.0],
                  [0.0, 1.0, 0.0]])
    graph = SimilarityGraph(weights=W, degrees=W.sum(axis=1))
    seeds = SeedSet({0: 0, 2: 1})
    for result in (solve_iterative(graph, seeds, tol=1e-12),
                   solve_direct(graph, seeds)):
        assert result.scores[1] == pytest.approx(0.5, abs=1e-10)
        assert result.labels[1] == 0


def test_corpus_protocol(tmp_path, corpus_dir, fixtures_dir):
    started = time.monotonic()

    pred_dir = tmp_path / "pred"
    code = main(["extract", str(corpus_dir / "pages"),
                 "--embeddings", str(corpus_dir / "embeddings.txt"),
                 "--out", str(pred_dir),
                 "--kernel", "rbf", "--sigma", "median",
                 "--seed-mode", "truth", "--truth", str(corpus_dir / "truth"),
                 "--seed-fraction", "0.2", "--seed-strategy", "first"])
    assert code == 0
    report_path = tmp_path / "report.json"
    code = main(["evaluate", str(pred_dir), str(corpus_dir / "truth"),
                 "--mode", "macro", "--out", str(report_path)])
    assert code == 0
    report = json.loads(report_path.read_text())
    assert all(page["seeds_excluded"] for page in report["pages"])
    accuracy = report["aggregate"]["accuracy"]
    assert accuracy >= 0.90, f"macro accuracy {accuracy} below 0.90"

    real_out = tmp_path / "real"
    code = main(["extract", str(fixtures_dir / "real_page.html"),
                 "--embeddings", str(corpus_dir / "embeddings.txt"),
                 "--out", str(real_out)])
    assert code == 0
    payload = json.loads((real_out / "real_page.json").read_text())
    jsonschema.validate(payload, PREDICTION_SCHEMA)
    assert payload["blocks"], "real page produced no blocks"

    elapsed = time.monotonic() - started
    assert elapsed < 30.0, f"protocol run took {elapsed:.1f}s"


def test_initialization_independence(graph_suite):
    for trial, (graph, seeds) in enumerate(graph_suite):
        ones = solve_iterative(graph, seeds, tol=ITER_TOL, init=1.0)
        zeros = solve_iterative(graph, seeds, tol=ITER_TOL, init=0.0)
        live = [i for i in range(graph.n) if i not in ones.isolated]
        gap = float(np.max(np.abs(ones.scores[live] - zeros.scores[live])))
        assert gap <= 2 * ITER_TOL, f"trial {trial}: init changed scores by {gap}"


def test_determinism(tmp_path, corpus_dir):
    outputs = []
    for run in ("first", "second"):
        out = tmp_path / run
        code = main(["extract", str(corpus_dir / "pages"),
                     "--embeddings", str(corpus_dir / "embeddings.txt"),
                     "--out", str(out),
                     "--seed-mode", "truth", "--truth", str(corpus_dir / "truth")])
        assert code == 0
        outputs.append({p.name: p.read_bytes()
                        for p in sorted(out.glob("*.json"))})
    assert outputs[0].keys() == outputs[1].keys()
    for name in outputs[0]:
        assert outputs[0][name] == outputs[1][name], f"{name} differs between runs"


def test_evaluator_arithmetic():
    pred = pred_page([1, 1, 1, 1, 0, 0, 0, 0, 0, 0])
    truth = truth_for(pred, [1, 1, 1, 0, 1, 0, 0, 0, 0, 0])
    report = compare(pred, truth, exclude_seeds=False)
    assert (report.tp, report.fp, report.fn, report.tn) == (3, 1, 1, 5)
    assert report.precision == pytest.approx(0.75)
    assert report.recall == pytest.approx(0.75)
    assert report.accuracy == pytest.approx(0.8)

    identity = pred_page([1, 0, 1, 0, 1, 1, 0, 1, 0, 0])
    report = compare(identity, truth_for(identity), exclude_seeds=False)
    assert report.precision == 1.0
    assert report.recall == 1.0
    assert report.f1 == 1.0
    assert report.accuracy == 1.0
