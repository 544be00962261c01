"""Prediction-versus-truth comparison and per-corpus aggregation.

Blocks are matched on (dom_path, text_hash) so a ground-truth file survives
minor re-parses of the same snapshot.  The positive class is "relevant"
(label 1).  Metrics with a zero denominator are reported as undefined
(``None``, JSON ``null``) rather than forced to an arbitrary value, and
aggregation averages only the defined ones, reporting how many pages were
excluded per metric.

All JSON emitted from this module uses sorted keys, two-space indentation,
and a trailing newline, so files diff byte-stably.
"""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, field

from .errors import EmptyReportSetError, EvaluationError, NoOverlapError

_METRICS = ("precision", "recall", "f1", "accuracy")


def canonical_json(payload) -> str:
    """Serialize with the byte-stable conventions shared across components."""
    return json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=True) + "\n"


def write_json_atomic(path, payload) -> None:
    """Write canonical JSON via a temp file and rename."""
    text = canonical_json(payload)
    tmp = f"{path}.tmp.{os.getpid()}"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(text)
    os.replace(tmp, path)


@dataclass(frozen=True)
class TruthBlock:
    dom_path: str
    text_hash: str
    label: int


@dataclass(frozen=True)
class GroundTruthPage:
    """Human labels for one page, as exported by the tagging tool."""

    page_id: str
    blocks: tuple[TruthBlock, ...]

    def __post_init__(self):
        paths = [b.dom_path for b in self.blocks]
        if len(set(paths)) != len(paths):
            raise EvaluationError(f"duplicate dom_path in truth for {self.page_id!r}")
        for b in self.blocks:
            if b.label not in (0, 1):
                raise EvaluationError(
                    f"non-binary label {b.label!r} in truth for {self.page_id!r}"
                )

    def to_payload(self) -> dict:
        return {
            "page_id": self.page_id,
            "blocks": [asdict(b) for b in self.blocks],
        }

    @classmethod
    def from_payload(cls, payload) -> "GroundTruthPage":
        try:
            blocks = tuple(
                TruthBlock(
                    dom_path=str(b["dom_path"]),
                    text_hash=str(b["text_hash"]),
                    label=int(b["label"]),
                )
                for b in payload["blocks"]
            )
            return cls(page_id=str(payload["page_id"]), blocks=blocks)
        except (KeyError, TypeError, ValueError) as exc:
            raise EvaluationError(f"malformed truth payload: {exc}") from None

    @classmethod
    def load(cls, path) -> "GroundTruthPage":
        with open(path, encoding="utf-8") as fh:
            return cls.from_payload(json.load(fh))

    def save(self, path) -> None:
        write_json_atomic(path, self.to_payload())


@dataclass(frozen=True)
class PredictionBlock:
    dom_path: str
    text_hash: str
    score: float
    label: int
    seed: bool


@dataclass(frozen=True)
class PredictionPage:
    """Pipeline output for one page, including the config that produced it."""

    page_id: str
    config: dict
    blocks: tuple[PredictionBlock, ...]

    def to_payload(self) -> dict:
        return {
            "page_id": self.page_id,
            "config": self.config,
            "blocks": [asdict(b) for b in self.blocks],
        }

    @classmethod
    def from_payload(cls, payload) -> "PredictionPage":
        try:
            blocks = tuple(
                PredictionBlock(
                    dom_path=str(b["dom_path"]),
                    text_hash=str(b["text_hash"]),
                    score=float(b["score"]),
                    label=int(b["label"]),
                    seed=bool(b["seed"]),
                )
                for b in payload["blocks"]
            )
            return cls(
                page_id=str(payload["page_id"]),
                config=dict(payload.get("config", {})),
                blocks=blocks,
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise EvaluationError(f"malformed prediction payload: {exc}") from None

    @classmethod
    def load(cls, path) -> "PredictionPage":
        with open(path, encoding="utf-8") as fh:
            return cls.from_payload(json.load(fh))

    def save(self, path) -> None:
        write_json_atomic(path, self.to_payload())


@dataclass
class EvalReport:
    """Confusion counts and derived metrics for one page.

    ``matched`` counts the block pairs that entered the confusion matrix;
    with ``seeds_excluded`` the seeded predictions (and their truth entries)
    are left out entirely.  ``unmatched_*`` count identity mismatches, which
    are reported rather than silently dropped.
    """

    page_id: str
    tp: int
    fp: int
    fn: int
    tn: int
    precision: float | None
    recall: float | None
    f1: float | None
    accuracy: float | None
    matched: int
    unmatched_pred: int
    unmatched_truth: int
    seeds_excluded: bool

    def to_payload(self) -> dict:
        return asdict(self)


def _metrics(tp, fp, fn, tn):
    matched = tp + fp + fn + tn
    precision = tp / (tp + fp) if tp + fp > 0 else None
    recall = tp / (tp + fn) if tp + fn > 0 else None
    if precision is None or recall is None or precision + recall == 0:
        f1 = None
    else:
        f1 = 2 * precision * recall / (precision + recall)
    accuracy = (tp + tn) / matched if matched > 0 else None
    return precision, recall, f1, accuracy


def compare(pred: PredictionPage, truth: GroundTruthPage,
            exclude_seeds: bool = True) -> EvalReport:
    """Confront one page's predictions with its ground truth.

    Raises :class:`NoOverlapError` when no (dom_path, text_hash) pair is
    shared (after seed exclusion, if requested): there is nothing to score.
    """
    truth_labels = {(b.dom_path, b.text_hash): b.label for b in truth.blocks}
    matched_truth_keys = set()
    tp = fp = fn = tn = 0
    unmatched_pred = 0
    for block in pred.blocks:
        key = (block.dom_path, block.text_hash)
        if key not in truth_labels:
            if not (exclude_seeds and block.seed):
                unmatched_pred += 1
            continue
        matched_truth_keys.add(key)
        if exclude_seeds and block.seed:
            continue
        actual = truth_labels[key]
        predicted = block.label
        if predicted == 1 and actual == 1:
            tp += 1
        elif predicted == 1 and actual == 0:
            fp += 1
        elif predicted == 0 and actual == 1:
            fn += 1
        else:
            tn += 1
    unmatched_truth = len(truth_labels) - len(matched_truth_keys)
    matched = tp + fp + fn + tn
    if matched == 0:
        raise NoOverlapError(
            f"page {pred.page_id!r}: no scorable overlap between prediction "
            "and truth"
        )
    precision, recall, f1, accuracy = _metrics(tp, fp, fn, tn)
    return EvalReport(
        page_id=pred.page_id,
        tp=tp, fp=fp, fn=fn, tn=tn,
        precision=precision, recall=recall, f1=f1, accuracy=accuracy,
        matched=matched,
        unmatched_pred=unmatched_pred,
        unmatched_truth=unmatched_truth,
        seeds_excluded=exclude_seeds,
    )


@dataclass
class AggregateReport:
    """Corpus-level summary.

    Macro mode averages each metric over the pages where it is defined
    (``excluded`` counts the left-out pages per metric); micro mode pools the
    confusion counts first.
    """

    pages: int
    mode: str
    precision: float | None
    recall: float | None
    f1: float | None
    accuracy: float | None
    excluded: dict = field(default_factory=dict)
    totals: dict = field(default_factory=dict)

    def to_payload(self) -> dict:
        return asdict(self)


def aggregate(reports, mode: str = "macro") -> AggregateReport:
    """Combine per-page reports; unweighted per-page (macro) mean by default."""
    reports = list(reports)
    if not reports:
        raise EmptyReportSetError("no reports to aggregate")
    if mode not in ("macro", "micro"):
        raise EvaluationError(f"unknown aggregation mode {mode!r}")
    totals = {
        "tp": sum(r.tp for r in reports),
        "fp": sum(r.fp for r in reports),
        "fn": sum(r.fn for r in reports),
        "tn": sum(r.tn for r in reports),
    }
    if mode == "micro":
        precision, recall, f1, accuracy = _metrics(**totals)
        excluded = {name: 0 for name in _METRICS}
    else:
        means = {}
        excluded = {}
        for name in _METRICS:
            defined = [getattr(r, name) for r in reports
                       if getattr(r, name) is not None]
            excluded[name] = len(reports) - len(defined)
            means[name] = sum(defined) / len(defined) if defined else None
        precision, recall, f1, accuracy = (means[name] for name in _METRICS)
    return AggregateReport(
        pages=len(reports),
        mode=mode,
        precision=precision,
        recall=recall,
        f1=f1,
        accuracy=accuracy,
        excluded=excluded,
        totals=totals,
    )
