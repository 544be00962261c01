"""Regenerate the tagging-UI parity fixtures from the bundled corpus.

For every corpus page this captures, in one JSON file per page:

- the snapshot exactly as the tagging server serves it (script tag injected),
- the block list as /api/blocks reports it,
- the (dom_path, text_hash) pairs of a prediction run on the same page,
- the ground-truth labels a scripted tagging session should apply,
- the canonical truth JSON that session must export, byte for byte,
- the evaluator's comparison of that truth against the prediction run.

The frontend test suite replays these without a Python runtime; the Python
suite cross-checks the same files against the live server. Regenerate with:

    python3 scripts/make_ui_fixtures.py
"""

import json
from pathlib import Path

from boilercut.dom import extract_text_blocks, parse_document
from boilercut.embeddings import load_table
from boilercut.evaluation import GroundTruthPage, canonical_json, compare
from boilercut.pipeline import ExtractOptions, extract_page
from boilercut.server import inject_script

ROOT = Path(__file__).resolve().parent.parent
CORPUS = ROOT / "corpus"
OUT = ROOT / "frontend" / "tests" / "fixtures"

# The bundled-corpus protocol settings; kernel and sigma stay at their
# defaults (rbf, median).
OPTIONS = {"seed_mode": "truth", "seed_fraction": 0.2, "seed_strategy": "first"}


def build_fixture(page_path: Path, table) -> dict:
    page_id = page_path.stem
    raw = page_path.read_bytes()

    blocks = extract_text_blocks(parse_document(raw))
    truth_payload = json.loads((CORPUS / "truth" / f"{page_id}.json").read_text())
    truth = GroundTruthPage.from_payload(truth_payload)

    # what a session that tags every block with the bundled labels exports
    exported = GroundTruthPage(
        page_id=page_id,
        blocks=tuple(sorted(truth.blocks, key=lambda b: b.dom_path)),
    )

    pred = extract_page(raw, page_id, table, ExtractOptions(**OPTIONS), truth=truth)
    report = compare(pred, exported)

    return {
        "page_id": page_id,
        "served_html": inject_script(raw).decode("utf-8"),
        "blocks": [
            {
                "index": b.index,
                "dom_path": b.dom_path,
                "text_hash": b.text_hash,
                "text": b.text,
            }
            for b in blocks
        ],
        "prediction_blocks": [[b.dom_path, b.text_hash] for b in pred.blocks],
        "truth_labels": {b.dom_path: b.label for b in truth.blocks},
        "expected_truth_json": canonical_json(exported.to_payload()),
        "options": OPTIONS,
        "evaluator": {
            "matched": report.matched,
            "unmatched_pred": report.unmatched_pred,
            "unmatched_truth": report.unmatched_truth,
            "accuracy": report.accuracy,
        },
    }


def main() -> None:
    table = load_table(CORPUS / "embeddings.txt")
    OUT.mkdir(parents=True, exist_ok=True)
    for page_path in sorted((CORPUS / "pages").glob("*.html")):
        fixture = build_fixture(page_path, table)
        out_path = OUT / f"{fixture['page_id']}.json"
        out_path.write_text(canonical_json(fixture), encoding="utf-8")
        print(f"{out_path.relative_to(ROOT)}: {len(fixture['blocks'])} blocks")


if __name__ == "__main__":
    main()
