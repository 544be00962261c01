"""Boilerplate removal for HTML pages.

Leaf text blocks are embedded with averaged word vectors, connected by a
similarity graph, and scored by the harmonic minimizer of the graph's
quadratic energy with a handful of labeled blocks clamped as seeds.
Scores above the threshold mark a block as relevant content; the rest is
boilerplate.
"""

from .dom import TextBlock, extract_text_blocks, fnv1a_64, normalize_text, parse_document
from .embeddings import EmbeddingTable, FeatureVector, embed_block, load_table, tokenize
from .errors import (
    BadSigmaError,
    BoilercutError,
    EncodingError,
    EvaluationError,
    GraphShapeError,
    NotConvergedError,
    SeedingError,
    SolverError,
    TableFormatError,
)
from .estimator import HarmonicPropagation, resolve_kernel
from .evaluation import (
    AggregateReport,
    EvalReport,
    GroundTruthPage,
    PredictionPage,
    aggregate,
    canonical_json,
    compare,
)
from .graph import (
    InnerProductKernel,
    RbfKernel,
    SimilarityGraph,
    build_graph,
    median_sigma,
    similarity,
)
from .pipeline import ExtractOptions, extract_page
from .propagation import (
    PropagationResult,
    SeedSet,
    binarize,
    energy,
    solve_direct,
    solve_iterative,
)
from .seeding import DEFAULT_RULES, HeuristicRule, apply_heuristics, sample_seeds

__version__ = "0.1.0"

__all__ = [
    "AggregateReport",
    "BadSigmaError",
    "BoilercutError",
    "DEFAULT_RULES",
    "EmbeddingTable",
    "EncodingError",
    "EvalReport",
    "EvaluationError",
    "ExtractOptions",
    "FeatureVector",
    "GraphShapeError",
    "GroundTruthPage",
    "HarmonicPropagation",
    "HeuristicRule",
    "InnerProductKernel",
    "NotConvergedError",
    "PredictionPage",
    "PropagationResult",
    "RbfKernel",
    "SeedSet",
    "SeedingError",
    "SimilarityGraph",
    "SolverError",
    "TableFormatError",
    "TextBlock",
    "aggregate",
    "apply_heuristics",
    "binarize",
    "build_graph",
    "canonical_json",
    "compare",
    "embed_block",
    "energy",
    "extract_page",
    "extract_text_blocks",
    "fnv1a_64",
    "load_table",
    "median_sigma",
    "normalize_text",
    "parse_document",
    "resolve_kernel",
    "sample_seeds",
    "similarity",
    "solve_direct",
    "solve_iterative",
    "tokenize",
]
