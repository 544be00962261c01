"""Word-vector table loading and block embedding.

Tables are plain GloVe text files: one ``token v1 ... vd`` line per token,
no header.  A block's feature vector is the arithmetic mean of the vectors
of its in-vocabulary tokens; out-of-vocabulary tokens are skipped rather
than zero-substituted, and a block with no known token gets the zero vector
with ``in_vocab_count == 0`` so downstream stages can treat it specially.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .errors import TableDimensionError, TableEmptyError, TableNumberError

_TOKEN_RE = re.compile(r"[^\W_]+")  # alphanumeric runs; underscore splits


@dataclass
class EmbeddingTable:
    """Immutable token -> vector map with a fixed dimension."""

    dim: int
    vectors: dict[str, np.ndarray]

    def __contains__(self, token: str) -> bool:
        return token in self.vectors

    def __len__(self) -> int:
        return len(self.vectors)


@dataclass(frozen=True)
class FeatureVector:
    """Averaged word-embedding representation of one text block."""

    values: np.ndarray
    in_vocab_count: int


def load_table(path) -> EmbeddingTable:
    """Load a GloVe-format text file into an :class:`EmbeddingTable`.

    The dimension is inferred from the first line; duplicate tokens keep
    their first occurrence; blank lines are skipped.

    Raises
    ------
    TableDimensionError
        A line has a different component count than the first line.
    TableNumberError
        A component is not parseable as a float.
    TableEmptyError
        The file holds no entries at all.
    """
    dim = None
    vectors: dict[str, np.ndarray] = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            parts = line.split()
            if not parts:
                continue
            token, components = parts[0], parts[1:]
            if dim is None:
                if not components:
                    raise TableDimensionError(
                        f"line {line_no}: no vector components", line_no
                    )
                dim = len(components)
            elif len(components) != dim:
                raise TableDimensionError(
                    f"line {line_no}: expected {dim} components, got "
                    f"{len(components)}",
                    line_no,
                )
            try:
                values = np.array([float(c) for c in components], dtype=np.float64)
            except ValueError:
                raise TableNumberError(
                    f"line {line_no}: unparseable vector component", line_no
                ) from None
            if not np.all(np.isfinite(values)):
                raise TableNumberError(
                    f"line {line_no}: non-finite vector component", line_no
                )
            vectors.setdefault(token, values)
    if dim is None:
        raise TableEmptyError("embedding table file is empty")
    return EmbeddingTable(dim=dim, vectors=vectors)


def tokenize(text: str) -> list[str]:
    """Lowercase and split on runs of non-alphanumeric characters."""
    return _TOKEN_RE.findall(text.lower())


def embed_block(text: str, table: EmbeddingTable) -> FeatureVector:
    """Mean of the table vectors for the in-vocabulary tokens of *text*.

    Contributions are summed in sorted token order so that reordering the
    words of a block cannot change the result even at the bit level.
    """
    hits = sorted(tok for tok in tokenize(text) if tok in table.vectors)
    if not hits:
        return FeatureVector(np.zeros(table.dim), 0)
    total = np.zeros(table.dim)
    for tok in hits:
        total += table.vectors[tok]
    return FeatureVector(total / len(hits), len(hits))
