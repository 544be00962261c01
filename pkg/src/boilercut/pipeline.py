"""End-to-end page processing: parse, embed, build graph, seed, propagate.

This is the wiring the CLI ``extract`` command runs per page.  The returned
:class:`PredictionPage` embeds the fully resolved configuration so any page
can be re-run identically from its own output.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .dom import extract_text_blocks, parse_document
from .embeddings import EmbeddingTable, embed_block
from .errors import SeedingError
from .estimator import resolve_kernel
from .evaluation import GroundTruthPage, PredictionBlock, PredictionPage
from .graph import build_graph
from .propagation import binarize, solve_direct, solve_iterative
from .seeding import DEFAULT_RULES, apply_heuristics, sample_seeds


@dataclass
class ExtractOptions:
    """Pipeline knobs; defaults mirror the CLI defaults."""

    kernel: str = "rbf"
    sigma: float | str = "median"
    knn: int | None = None
    solver: str = "iterative"
    tol: float = 1e-8
    max_iters: int | None = None
    threshold: float = 0.5
    init: float = 1.0
    seed_mode: str = "heuristic"
    seed_fraction: float = 0.2
    seed_strategy: str = "first"
    seed_rng: int = 0
    rules: tuple = DEFAULT_RULES

    def to_config(self) -> dict:
        return {
            "kernel": self.kernel,
            "sigma": self.sigma,
            "knn": self.knn,
            "solver": self.solver,
            "tol": self.tol,
            "max_iters": self.max_iters,
            "threshold": self.threshold,
            "init": self.init,
            "seed_mode": self.seed_mode,
            "seed_fraction": self.seed_fraction,
            "seed_strategy": self.seed_strategy,
            "seed_rng": self.seed_rng,
        }


def extract_page(
    html: str | bytes,
    page_id: str,
    table: EmbeddingTable,
    options: ExtractOptions | None = None,
    truth: GroundTruthPage | None = None,
    config_extra: dict | None = None,
) -> PredictionPage:
    """Classify every text block of one page as relevant or noise.

    ``truth`` is required when ``options.seed_mode == "truth"`` and supplies
    the labels the seed sample is drawn from.
    """
    options = options or ExtractOptions()
    config = options.to_config()
    if config_extra:
        config.update(config_extra)

    tree = parse_document(html)
    blocks = extract_text_blocks(tree)
    if not blocks:
        return PredictionPage(page_id=page_id, config=config, blocks=())

    vectors = [embed_block(b.text, table) for b in blocks]
    kernel, resolved_sigma = resolve_kernel(
        options.kernel, options.sigma, [v.values for v in vectors]
    )
    config["sigma_resolved"] = resolved_sigma
    graph = build_graph(vectors, kernel, knn=options.knn)

    if options.seed_mode == "heuristic":
        seeds = apply_heuristics(blocks, options.rules)
    elif options.seed_mode == "truth":
        if truth is None:
            raise SeedingError(
                f"page {page_id!r}: seed_mode 'truth' needs a ground-truth page"
            )
        seeds = sample_seeds(
            truth, blocks,
            fraction=options.seed_fraction,
            strategy=options.seed_strategy,
            rng=options.seed_rng,
        )
    else:
        raise SeedingError(f"unknown seed_mode {options.seed_mode!r}")
    config["seed_origin"] = seeds.origin

    if options.solver == "direct":
        result = solve_direct(graph, seeds)
    elif options.solver == "iterative":
        result = solve_iterative(
            graph, seeds, tol=options.tol,
            max_iters=options.max_iters, init=options.init,
        )
    else:
        raise ValueError(f"unknown solver {options.solver!r}")
    labels = binarize(result.scores, options.threshold)

    out = tuple(
        PredictionBlock(
            dom_path=block.dom_path,
            text_hash=block.text_hash,
            score=float(result.scores[block.index]),
            label=int(labels[block.index]),
            seed=block.index in seeds.labels,
        )
        for block in blocks
    )
    return PredictionPage(page_id=page_id, config=config, blocks=out)
