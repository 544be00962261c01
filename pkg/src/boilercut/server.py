"""Local HTTP service for the tagging workflow.

Serves saved page snapshots with the tagging script injected, exposes the
server-side block enumeration for parity checking, and persists posted
ground-truth JSON.  Routes:

    GET  /                  index of available snapshots
    GET  /page/<id>         snapshot HTML with the tagging script injected
    GET  /api/blocks/<id>   block list as the extraction pipeline sees it
    GET  /truth/<id>        previously saved truth for the page, if any
    POST /truth/<id>        store schema-validated ground truth (204)
    GET  /static/<file>     tagging-script assets

Truth files are written canonically (sorted keys, blocks ordered by
dom_path, trailing newline) and atomically, with writes serialized per page.
"""

from __future__ import annotations

import json
import logging
import re
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from .dom import extract_text_blocks, parse_document
from .errors import BoilercutError
from .evaluation import GroundTruthPage, TruthBlock, canonical_json, write_json_atomic

log = logging.getLogger(__name__)

_PAGE_ID_RE = re.compile(r"^[A-Za-z0-9._-]+$")
_HASH_RE = re.compile(r"^[0-9a-f]{16}$")
_BODY_CLOSE_RE = re.compile(rb"</body\s*>", re.IGNORECASE)

SCRIPT_TAG = b'<script type="module" src="/static/main.js"></script>\n'

_CONTENT_TYPES = {
    ".js": "text/javascript",
    ".mjs": "text/javascript",
    ".css": "text/css",
    ".map": "application/json",
    ".html": "text/html",
    ".json": "application/json",
}


def inject_script(raw: bytes) -> bytes:
    """Insert the tagging-script tag before ``</body>``, or append if absent.

    Injection happens at the end of the body so the extra element and its
    trailing newline land after every original text node: block paths and
    ``#text`` indices of the snapshot are unchanged.
    """
    match = _BODY_CLOSE_RE.search(raw)
    if match:
        return raw[:match.start()] + SCRIPT_TAG + raw[match.start():]
    return raw + SCRIPT_TAG


def validate_truth_payload(payload, page_id: str):
    """Strict schema check for posted ground truth; returns an error or None."""
    if not isinstance(payload, dict):
        return "payload must be a JSON object"
    if set(payload) != {"page_id", "blocks"}:
        return "payload must have exactly the keys 'page_id' and 'blocks'"
    if payload["page_id"] != page_id:
        return f"page_id {payload['page_id']!r} does not match the URL ({page_id!r})"
    if not isinstance(payload["blocks"], list):
        return "'blocks' must be an array"
    seen_paths = set()
    for i, block in enumerate(payload["blocks"]):
        if not isinstance(block, dict):
            return f"blocks[{i}] must be an object"
        if set(block) != {"dom_path", "text_hash", "label"}:
            return (f"blocks[{i}] must have exactly the keys "
                    "'dom_path', 'text_hash' and 'label'")
        if not isinstance(block["dom_path"], str) or not block["dom_path"]:
            return f"blocks[{i}].dom_path must be a non-empty string"
        if block["dom_path"] in seen_paths:
            return f"blocks[{i}].dom_path is a duplicate"
        seen_paths.add(block["dom_path"])
        if not isinstance(block["text_hash"], str) or not _HASH_RE.match(block["text_hash"]):
            return f"blocks[{i}].text_hash must be 16 lowercase hex digits"
        label = block["label"]
        if isinstance(label, bool) or label not in (0, 1):
            return f"blocks[{i}].label must be 0 or 1"
    return None


class TaggingServer(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(self, address, pages_dir, truth_dir, static_dir=None):
        self.pages_dir = Path(pages_dir)
        self.truth_dir = Path(truth_dir)
        self.static_dir = Path(static_dir) if static_dir else None
        self._page_locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()
        super().__init__(address, _Handler)

    def page_lock(self, page_id: str) -> threading.Lock:
        with self._locks_guard:
            return self._page_locks.setdefault(page_id, threading.Lock())

    def page_path(self, page_id: str) -> Path | None:
        if not _PAGE_ID_RE.match(page_id):
            return None
        path = self.pages_dir / f"{page_id}.html"
        return path if path.is_file() else None

    def list_pages(self) -> list[str]:
        return sorted(p.stem for p in self.pages_dir.glob("*.html"))


class _Handler(BaseHTTPRequestHandler):
    server: TaggingServer

    def _send(self, status: int, body: bytes, content_type: str) -> None:
        self.send_response(status)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _send_json(self, status: int, payload) -> None:
        self._send(status, canonical_json(payload).encode("utf-8"),
                   "application/json")

    def _error(self, status: int, message: str) -> None:
        self._send_json(status, {"error": message})

    def do_GET(self):
        path = self.path.split("?", 1)[0]
        if path == "/":
            return self._index()
        if path.startswith("/page/"):
            return self._page(path[len("/page/"):])
        if path.startswith("/api/blocks/"):
            return self._blocks(path[len("/api/blocks/"):])
        if path.startswith("/truth/"):
            return self._truth_get(path[len("/truth/"):])
        if path.startswith("/static/"):
            return self._static(path[len("/static/"):])
        self._error(404, f"no route for {path}")

    def do_POST(self):
        path = self.path.split("?", 1)[0]
        if path.startswith("/truth/"):
            return self._truth_post(path[len("/truth/"):])
        self._error(404, f"no POST route for {path}")

    def _index(self):
        items = "".join(
            f'<li><a href="/page/{pid}">{pid}</a></li>'
            for pid in self.server.list_pages()
        )
        body = (
            "<!doctype html><html><head><title>tagging</title></head>"
            f"<body><h1>Pages</h1><ul>{items}</ul></body></html>"
        ).encode("utf-8")
        self._send(200, body, "text/html")

    def _page(self, page_id: str):
        path = self.server.page_path(page_id)
        if path is None:
            return self._error(404, f"unknown page {page_id!r}")
        self._send(200, inject_script(path.read_bytes()), "text/html")

    def _blocks(self, page_id: str):
        path = self.server.page_path(page_id)
        if path is None:
            return self._error(404, f"unknown page {page_id!r}")
        try:
            blocks = extract_text_blocks(parse_document(path.read_bytes()))
        except BoilercutError as exc:
            return self._error(500, f"cannot parse page: {exc}")
        self._send_json(200, {
            "page_id": page_id,
            "blocks": [
                {
                    "index": b.index,
                    "dom_path": b.dom_path,
                    "text_hash": b.text_hash,
                    "text": b.text,
                }
                for b in blocks
            ],
        })

    def _truth_get(self, page_id: str):
        if not _PAGE_ID_RE.match(page_id):
            return self._error(404, f"unknown page {page_id!r}")
        path = self.server.truth_dir / f"{page_id}.json"
        if not path.is_file():
            return self._error(404, f"no truth stored for {page_id!r}")
        self._send(200, path.read_bytes(), "application/json")

    def _truth_post(self, page_id: str):
        if self.server.page_path(page_id) is None:
            return self._error(404, f"unknown page {page_id!r}")
        length = int(self.headers.get("Content-Length", 0))
        body = self.rfile.read(length)
        try:
            payload = json.loads(body)
        except json.JSONDecodeError as exc:
            return self._error(400, f"invalid JSON: {exc}")
        problem = validate_truth_payload(payload, page_id)
        if problem is not None:
            return self._error(400, problem)
        truth = GroundTruthPage(
            page_id=page_id,
            blocks=tuple(sorted(
                (TruthBlock(b["dom_path"], b["text_hash"], b["label"])
                 for b in payload["blocks"]),
                key=lambda b: b.dom_path,
            )),
        )
        self.server.truth_dir.mkdir(parents=True, exist_ok=True)
        out = self.server.truth_dir / f"{page_id}.json"
        with self.server.page_lock(page_id):
            write_json_atomic(out, truth.to_payload())
        self.send_response(204)
        self.send_header("Content-Length", "0")
        self.end_headers()

    def _static(self, name: str):
        if self.server.static_dir is None:
            return self._error(404, "no static assets configured")
        base = self.server.static_dir.resolve()
        target = (base / name).resolve()
        if not str(target).startswith(str(base)) or not target.is_file():
            return self._error(404, f"no static asset {name!r}")
        ctype = _CONTENT_TYPES.get(target.suffix, "application/octet-stream")
        self._send(200, target.read_bytes(), ctype)

    def log_message(self, format, *args):
        log.debug("%s - %s", self.address_string(), format % args)


def make_server(pages_dir, truth_dir, static_dir=None, host="127.0.0.1",
                port=0) -> TaggingServer:
    """Create (but do not start) a tagging server; port 0 picks a free port."""
    return TaggingServer((host, port), pages_dir, truth_dir, static_dir)
