"""Deterministic synthetic news-page corpus for end-to-end checks.

Generates a toy word-vector table whose vocabulary splits into two
well-separated clusters (article words vs site-chrome words), plus a set of
news-like pages whose article blocks draw from the first cluster and whose
chrome blocks draw from the second.  Ground truth comes from the generator
itself, so the corpus exercises the whole pipeline with a known answer.

Everything is a pure function of the RNG seed: regenerating the corpus
produces byte-identical files.
"""

from __future__ import annotations

import random
from pathlib import Path

from .dom import extract_text_blocks, parse_document
from .evaluation import GroundTruthPage, TruthBlock

DEFAULT_SEED = 20240915
DEFAULT_PAGES = 10
EMBEDDING_DIM = 8

ARTICLE_WORDS = (
    "council", "budget", "election", "minister", "economy", "residents",
    "project", "funding", "schools", "transport", "hospital", "community",
    "climate", "investment", "survey", "officials", "decision", "meeting",
    "region", "development", "announced", "approved", "proposal", "committee",
    "review", "plan", "national", "study", "growth", "report", "public",
    "million", "percent", "week", "year", "service", "infrastructure",
)

CHROME_WORDS = (
    "home", "menu", "search", "subscribe", "newsletter", "signin", "account",
    "cookie", "consent", "privacy", "terms", "contact", "copyright", "rights",
    "reserved", "follow", "share", "advertisement", "sponsored", "trending",
    "popular", "sitemap", "feedback", "bookmark",
)


def build_embedding_lines(rng: random.Random) -> list[str]:
    """GloVe-format lines for the two-cluster toy vocabulary."""
    lines = []
    for words, center in ((ARTICLE_WORDS, 3.0), (CHROME_WORDS, -3.0)):
        for word in words:
            components = [
                repr(round(center + rng.uniform(-0.3, 0.3), 6))
                for _ in range(EMBEDDING_DIM)
            ]
            lines.append(" ".join([word, *components]))
    return lines


def _sentence(rng: random.Random, words, n_words: int) -> str:
    picked = [rng.choice(words) for _ in range(n_words)]
    return (" ".join(picked)).capitalize() + "."


def generate_page(rng: random.Random, page_index: int) -> tuple[str, list[int]]:
    """One news-like page plus the intended label of each block in order."""
    art = lambda n: _sentence(rng, ARTICLE_WORDS, n)
    chrome = lambda n: _sentence(rng, CHROME_WORDS, n)

    blocks: list[tuple[str, int]] = []  # (html fragment, label)
    parts = ["<html>", '<head><meta charset="utf-8"></head>', "<body>", "<header>"]
    parts.append(f'<div class="brand">{chrome(3)}</div>')
    blocks.append(("brand", 0))
    parts.append("<nav>")
    for _ in range(2):
        parts.append(f'<a href="#">{chrome(2)}</a>')
        blocks.append(("nav", 0))
    parts.append("</nav></header>")

    parts.append("<article>")
    parts.append(f"<h1>{art(rng.randint(5, 8))}</h1>")
    blocks.append(("headline", 1))
    parts.append(f'<p class="lede">{art(rng.randint(8, 12))}</p>')
    blocks.append(("lede", 1))
    for _ in range(rng.randint(9, 13)):
        parts.append(f"<p>{art(rng.randint(8, 14))}</p>")
        blocks.append(("para", 1))
    parts.append("</article>")

    parts.append(f'<aside class="sidebar"><p>{chrome(4)}</p></aside>')
    blocks.append(("aside", 0))
    parts.append("<footer>")
    for _ in range(2):
        parts.append(f"<p>{chrome(rng.randint(3, 5))}</p>")
        blocks.append(("footer", 0))
    parts.append("</footer></body></html>")

    html = "\n".join(parts) + "\n"
    return html, [label for _, label in blocks]


def make_truth(html: str, labels: list[int], page_id: str) -> GroundTruthPage:
    """Ground truth for a generated page, identified via the real extractor."""
    blocks = extract_text_blocks(parse_document(html))
    if len(blocks) != len(labels):
        raise AssertionError(
            f"generator produced {len(labels)} labels but the page parses "
            f"into {len(blocks)} blocks"
        )
    return GroundTruthPage(
        page_id=page_id,
        blocks=tuple(
            TruthBlock(dom_path=b.dom_path, text_hash=b.text_hash, label=label)
            for b, label in zip(blocks, labels)
        ),
    )


def write_corpus(out_dir, pages: int = DEFAULT_PAGES, rng_seed: int = DEFAULT_SEED):
    """Write pages/, truth/ and embeddings.txt under *out_dir*.

    Returns the list of page ids.  Deterministic in (pages, rng_seed).
    """
    out = Path(out_dir)
    (out / "pages").mkdir(parents=True, exist_ok=True)
    (out / "truth").mkdir(parents=True, exist_ok=True)

    rng = random.Random(rng_seed)
    lines = build_embedding_lines(rng)
    (out / "embeddings.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")

    page_ids = []
    for i in range(pages):
        page_id = f"page{i:02d}"
        html, labels = generate_page(rng, i)
        (out / "pages" / f"{page_id}.html").write_text(html, encoding="utf-8")
        make_truth(html, labels, page_id).save(out / "truth" / f"{page_id}.json")
        page_ids.append(page_id)
    return page_ids
