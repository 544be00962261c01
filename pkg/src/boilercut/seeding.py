"""Seed-label construction: heuristic rules or sampled ground truth.

Heuristic mode labels blocks from their ancestry (the one rule everyone
agrees on: inside ``<article>`` means relevant), with lower-priority default
rules marking obvious chrome as noise.  Truth mode samples a fraction of a
ground-truth page, either the first l blocks in document order or a
seeded-random subset, for evaluation experiments.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field

from .dom import TextBlock
from .errors import NoSeedMatchesError, SeedCoverageError, SeedingError
from .evaluation import GroundTruthPage
from .propagation import SeedSet

RELEVANT = 1
NOISE = 0


@dataclass(frozen=True)
class HeuristicRule:
    """Ancestry predicate over a block; lower priority number wins.

    A block matches when any ancestor tag is in ``ancestor_tags`` or any
    ancestor class/id value contains one of ``attr_substrings``.
    """

    name: str
    label: int
    priority: int
    ancestor_tags: frozenset[str] = frozenset()
    attr_substrings: tuple[str, ...] = ()

    def matches(self, block: TextBlock) -> bool:
        if self.ancestor_tags and not self.ancestor_tags.isdisjoint(block.tag_chain):
            return True
        for needle in self.attr_substrings:
            if any(needle in value for value in block.ancestor_attrs):
                return True
        return False


DEFAULT_RULES = (
    HeuristicRule(
        name="article-content",
        label=RELEVANT,
        priority=1,
        ancestor_tags=frozenset({"article"}),
    ),
    HeuristicRule(
        name="chrome-tags",
        label=NOISE,
        priority=2,
        ancestor_tags=frozenset({"nav", "footer", "header", "aside", "form"}),
    ),
    HeuristicRule(
        name="chrome-attrs",
        label=NOISE,
        priority=3,
        attr_substrings=("comment", "sidebar", "footer", "ad-"),
    ),
)


def _check_rules(rules) -> None:
    if not rules:
        raise SeedingError("rule set is empty")
    priorities = [r.priority for r in rules]
    if len(set(priorities)) != len(priorities):
        raise SeedingError(f"rule priorities must be unique, got {priorities}")
    for rule in rules:
        if rule.label not in (0, 1):
            raise SeedingError(f"rule {rule.name!r} has non-binary label {rule.label}")


def apply_heuristics(blocks, rules=DEFAULT_RULES) -> SeedSet:
    """Label each block by its highest-priority matching rule.

    Blocks matching no rule stay unlabeled.  Raises
    :class:`NoSeedMatchesError` when nothing matched at all, so callers can
    decide whether to fall back to ground-truth seeding.
    """
    _check_rules(rules)
    ordered = sorted(rules, key=lambda r: r.priority)
    labels: dict[int, int] = {}
    for block in blocks:
        for rule in ordered:
            if rule.matches(block):
                labels[block.index] = rule.label
                break
    if not labels:
        raise NoSeedMatchesError("no block matched any heuristic rule")
    return SeedSet(labels=labels, origin="heuristic")


def load_rules(path) -> tuple[HeuristicRule, ...]:
    """Read a rule set from the JSON format used by the CLI ``--rules`` flag."""
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    if not isinstance(raw, list):
        raise SeedingError("rule file must hold a JSON array")
    rules = []
    for i, entry in enumerate(raw):
        try:
            rules.append(HeuristicRule(
                name=str(entry["name"]),
                label=int(entry["label"]),
                priority=int(entry["priority"]),
                ancestor_tags=frozenset(entry.get("ancestor_tags", ())),
                attr_substrings=tuple(entry.get("attr_substrings", ())),
            ))
        except (KeyError, TypeError, ValueError) as exc:
            raise SeedingError(f"rule entry {i} is malformed: {exc}") from None
    _check_rules(rules)
    return tuple(rules)


def sample_seeds(
    truth: GroundTruthPage,
    blocks,
    fraction: float,
    strategy: str = "first",
    rng: int = 0,
) -> SeedSet:
    """Seed ``ceil(fraction * n)`` blocks with their ground-truth labels.

    ``strategy='first'`` takes the first l matchable blocks in document
    order; ``strategy='random'`` draws a uniform sample reproducible from the
    ``rng`` integer.  Blocks are matched to truth entries on
    (dom_path, text_hash).
    """
    if not (0.0 < fraction <= 1.0):
        raise SeedingError(f"fraction must be in (0, 1], got {fraction}")
    if strategy not in ("first", "random"):
        raise SeedingError(f"unknown strategy {strategy!r}")
    blocks = list(blocks)
    if not blocks:
        raise SeedCoverageError("page has no blocks to seed")
    truth_labels = {(b.dom_path, b.text_hash): b.label for b in truth.blocks}
    candidates = [b for b in blocks if (b.dom_path, b.text_hash) in truth_labels]
    l = math.ceil(fraction * len(blocks))
    if len(candidates) < l:
        raise SeedCoverageError(
            f"truth matches {len(candidates)} blocks, need {l} seeds"
        )
    if strategy == "first":
        chosen = candidates[:l]
    else:
        chosen = random.Random(rng).sample(candidates, l)
    labels = {
        b.index: truth_labels[(b.dom_path, b.text_hash)] for b in chosen
    }
    return SeedSet(labels=labels, origin=f"truth:{strategy}:{fraction}")
