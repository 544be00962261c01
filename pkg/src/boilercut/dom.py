"""HTML parsing and leaf text-block extraction.

Parses arbitrary (possibly malformed) HTML into an element tree with the
implied ``html``/``head``/``body`` structure browsers build, then walks the
tree to emit one :class:`TextBlock` per non-empty leaf text node.  Block
identity is a canonical DOM path of the form::

    /html[1]/body[1]/div[2]/p[1]/#text[1]

where the bracketed index counts same-tag siblings (1-based) and ``#text[m]``
counts text-node children of the parent.  The same grammar and the same FNV-1a
text hash are produced by the browser-side tagging script, so labels written
there match blocks extracted here.
"""

from __future__ import annotations

import codecs
import re
from dataclasses import dataclass, field
from html.parser import HTMLParser

from .errors import EncodingError

# Elements whose subtree never holds human-readable content.
EXCLUDED_TAGS = frozenset({"script", "style", "noscript", "template", "iframe"})

# HTML5 void elements: never pushed on the open-element stack.
VOID_ELEMENTS = frozenset({
    "area", "base", "br", "col", "embed", "hr", "img", "input",
    "link", "meta", "param", "source", "track", "wbr",
})

# Metadata elements routed into <head> while no body content has been seen.
_HEAD_TAGS = frozenset({"base", "link", "meta", "title", "style"})

# Start tags that implicitly close an open <p> (HTML5 "in body" rules).
_P_CLOSERS = frozenset({
    "address", "article", "aside", "blockquote", "details", "div", "dl",
    "fieldset", "figcaption", "figure", "footer", "form", "h1", "h2", "h3",
    "h4", "h5", "h6", "header", "hgroup", "hr", "main", "menu", "nav", "ol",
    "p", "pre", "section", "table", "ul",
})

# Elements bounding the scope search for an open <p>.
_P_SCOPE_BOUNDARIES = frozenset({
    "html", "body", "table", "td", "th", "caption",
    "applet", "object", "marquee", "template", "button",
})

# Start tag -> open-element tags it implicitly ends while on top of the stack.
_IMPLIED_END = {
    "li": ("li",),
    "dt": ("dt", "dd"),
    "dd": ("dt", "dd"),
    "tr": ("tr", "td", "th"),
    "td": ("td", "th"),
    "th": ("td", "th"),
    "thead": ("tr", "td", "th"),
    "tbody": ("tr", "td", "th", "thead"),
    "tfoot": ("tr", "td", "th", "tbody"),
    "option": ("option",),
    "optgroup": ("option", "optgroup"),
}

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3


def fnv1a_64(text: str) -> str:
    """64-bit FNV-1a of the UTF-8 bytes of *text*, as 16 lowercase hex digits.

    This is the block-identity hash shared bit-exactly with the tagging UI.
    """
    h = _FNV_OFFSET
    for byte in text.encode("utf-8"):
        h ^= byte
        h = (h * _FNV_PRIME) & 0xFFFFFFFFFFFFFFFF
    return f"{h:016x}"


def normalize_text(raw: str) -> str:
    """Collapse Unicode whitespace runs to single spaces and strip the ends."""
    return " ".join(raw.split())


class TextNode:
    """A run of character data; ``offset`` is its source position."""

    __slots__ = ("text", "offset")

    def __init__(self, text: str, offset: int):
        self.text = text
        self.offset = offset

    def __repr__(self):
        return f"TextNode({self.text!r})"


class ElementNode:
    __slots__ = ("tag", "attrs", "children")

    def __init__(self, tag: str, attrs: dict[str, str] | None = None):
        self.tag = tag
        self.attrs = attrs or {}
        self.children: list[TextNode | ElementNode] = []

    def __repr__(self):
        return f"ElementNode({self.tag!r}, {len(self.children)} children)"


@dataclass
class DomTree:
    """Element tree rooted at ``html``; ``head`` and ``body`` always exist."""

    root: ElementNode
    head: ElementNode
    body: ElementNode


@dataclass(frozen=True)
class TextBlock:
    """One leaf text node of a page, with its stable identity.

    ``ancestor_attrs`` carries the lowercase ``class``/``id`` attribute values
    of the ancestor elements so heuristic rules can match on them.
    """

    index: int
    dom_path: str
    tag_chain: tuple[str, ...]
    text: str
    text_hash: str
    ancestor_attrs: tuple[str, ...] = ()


class _TreeBuilder(HTMLParser):
    """Error-recovering tree construction over the stdlib tokenizer.

    Implements the subset of HTML5 tree building that matters for text
    placement: implied html/head/body, void elements, implicit end tags for
    p/li/dd/dt/tr/td/th/option, mismatched-end-tag recovery, and text-run
    splitting at comments.  Whitespace-only text outside <body> is dropped,
    as browsers do; everything inside the body is preserved verbatim.
    """

    def __init__(self, line_starts: list[int]):
        super().__init__(convert_charrefs=True)
        self._line_starts = line_starts
        self.root = ElementNode("html")
        self.head: ElementNode | None = None
        self.body: ElementNode | None = None
        self._stack: list[ElementNode] = [self.root]
        self._tail: TextNode | None = None  # text node the next data chunk may extend

    # -- structure helpers -------------------------------------------------

    def _ensure_head(self) -> ElementNode:
        if self.head is None:
            self.head = ElementNode("head")
            self.root.children.insert(0, self.head)
        return self.head

    def _ensure_body(self) -> ElementNode:
        if self.body is None:
            self.body = ElementNode("body")
            self.root.children.append(self.body)
        return self.body

    def _pop_to(self, tag: str) -> None:
        while len(self._stack) > 1:
            node = self._stack.pop()
            if node.tag == tag:
                return

    def _offset(self) -> int:
        line, col = self.getpos()
        return self._line_starts[line - 1] + col

    def _auto_close(self, tag: str) -> None:
        if tag in _P_CLOSERS:
            for node in reversed(self._stack):
                if node.tag == "p":
                    self._pop_to("p")
                    break
                if node.tag in _P_SCOPE_BOUNDARIES:
                    break
        implied = _IMPLIED_END.get(tag)
        if implied:
            while len(self._stack) > 1 and self._stack[-1].tag in implied:
                self._stack.pop()

    # -- tokenizer callbacks ------------------------------------------------

    def handle_starttag(self, tag, attrs):
        self._tail = None
        attr_map: dict[str, str] = {}
        for name, value in attrs:
            attr_map.setdefault(name, value if value is not None else "")
        if tag == "html":
            for name, value in attr_map.items():
                self.root.attrs.setdefault(name, value)
            return
        if tag == "head":
            head = self._ensure_head()
            for name, value in attr_map.items():
                head.attrs.setdefault(name, value)
            if head not in self._stack:
                self._stack.append(head)
            return
        if tag == "body":
            body = self._ensure_body()
            for name, value in attr_map.items():
                body.attrs.setdefault(name, value)
            if body not in self._stack:
                self._stack.append(body)
            return

        self._auto_close(tag)
        if len(self._stack) == 1:
            if tag in _HEAD_TAGS and self.body is None:
                parent = self._ensure_head()
            else:
                parent = self._ensure_body()
        else:
            parent = self._stack[-1]
        node = ElementNode(tag, attr_map)
        parent.children.append(node)
        if tag not in VOID_ELEMENTS:
            self._stack.append(node)

    def handle_startendtag(self, tag, attrs):
        # HTML5 ignores the trailing slash: treat as a plain start tag.
        self.handle_starttag(tag, attrs)

    def handle_endtag(self, tag):
        self._tail = None
        if tag == "html":
            del self._stack[1:]
            return
        if tag in VOID_ELEMENTS:
            return
        if any(node.tag == tag for node in self._stack[1:]):
            self._pop_to(tag)

    def handle_data(self, data):
        if not data:
            return
        if len(self._stack) > 1:
            parent = self._stack[-1]
        else:
            if self.body is None and data.isspace():
                return  # pre-body whitespace is ignored, as in browsers
            parent = self._ensure_body()
        if (
            self._tail is not None
            and parent.children
            and parent.children[-1] is self._tail
        ):
            self._tail.text += data
            return
        node = TextNode(data, self._offset())
        parent.children.append(node)
        self._tail = node

    def handle_comment(self, data):
        self._tail = None  # comments split adjacent text runs, as in the DOM

    def handle_decl(self, decl):
        self._tail = None

    def handle_pi(self, data):
        self._tail = None

    def unknown_decl(self, data):
        self._tail = None

    def finish(self) -> DomTree:
        self.close()
        head = self._ensure_head()
        body = self._ensure_body()
        return DomTree(root=self.root, head=head, body=body)


_META_CHARSET_RE = re.compile(
    rb"""<meta[^>]+charset\s*=\s*["']?\s*([a-zA-Z0-9_\-:]+)""", re.IGNORECASE
)


def decode_html(data: bytes) -> str:
    """Decode raw HTML bytes, honoring a BOM or meta charset, else UTF-8."""
    if data.startswith(codecs.BOM_UTF8):
        data, encoding = data[len(codecs.BOM_UTF8):], "utf-8"
    elif data.startswith(codecs.BOM_UTF16_LE) or data.startswith(codecs.BOM_UTF16_BE):
        encoding = "utf-16"
    else:
        encoding = "utf-8"
        match = _META_CHARSET_RE.search(data[:1024])
        if match:
            declared = match.group(1).decode("ascii").lower()
            try:
                codecs.lookup(declared)
            except LookupError:
                pass  # unknown label: fall back to utf-8
            else:
                encoding = declared
    try:
        return data.decode(encoding)
    except UnicodeDecodeError as exc:
        raise EncodingError(f"input is not valid {encoding}: {exc}") from None


def parse_document(html: str | bytes) -> DomTree:
    """Parse HTML into a :class:`DomTree`, recovering from malformed markup.

    Accepts text or raw bytes; bytes are decoded per :func:`decode_html`.
    Never raises on bad markup — only on undecodable byte input.
    """
    if isinstance(html, (bytes, bytearray)):
        html = decode_html(bytes(html))
    line_starts = [0]
    for i, ch in enumerate(html):
        if ch == "\n":
            line_starts.append(i + 1)
    builder = _TreeBuilder(line_starts)
    builder.feed(html)
    return builder.finish()


class _Frame:
    __slots__ = ("child_iter", "prefix", "chain", "attrs", "excluded",
                 "tag_counts", "text_count")

    def __init__(self, element, prefix, chain, attrs, excluded):
        self.child_iter = iter(element.children)
        self.prefix = prefix
        self.chain = chain
        self.attrs = attrs
        self.excluded = excluded
        self.tag_counts: dict[str, int] = {}
        self.text_count = 0


def _attr_values(element: ElementNode) -> tuple[str, ...]:
    values = []
    for key in ("class", "id"):
        value = element.attrs.get(key)
        if value:
            values.append(value.lower())
    return tuple(values)


def iter_text_nodes(tree: DomTree):
    """Yield (node, dom_path, tag_chain, ancestor_attrs, excluded) in document order.

    Every text node in the tree is visited, including whitespace-only ones,
    so ``#text`` indices always reflect true DOM positions.  Uses an explicit
    stack: malformed input can nest arbitrarily deep.
    """
    root = tree.root
    frames = [_Frame(root, "/html[1]", ("html",), _attr_values(root), False)]
    while frames:
        frame = frames[-1]
        child = next(frame.child_iter, None)
        if child is None:
            frames.pop()
            continue
        if isinstance(child, TextNode):
            frame.text_count += 1
            path = f"{frame.prefix}/#text[{frame.text_count}]"
            yield child, path, frame.chain, frame.attrs, frame.excluded
        else:
            k = frame.tag_counts.get(child.tag, 0) + 1
            frame.tag_counts[child.tag] = k
            frames.append(_Frame(
                child,
                f"{frame.prefix}/{child.tag}[{k}]",
                frame.chain + (child.tag,),
                frame.attrs + _attr_values(child),
                frame.excluded or child.tag in EXCLUDED_TAGS,
            ))


def extract_text_blocks(tree: DomTree) -> list[TextBlock]:
    """Extract the ordered list of classifiable text blocks from a parsed page.

    One block per text node whose normalized text is non-empty and whose
    ancestry avoids :data:`EXCLUDED_TAGS`; indices are contiguous in document
    order.
    """
    blocks = []
    for node, path, chain, attrs, excluded in iter_text_nodes(tree):
        if excluded:
            continue
        text = normalize_text(node.text)
        if not text:
            continue
        blocks.append(TextBlock(
            index=len(blocks),
            dom_path=path,
            tag_chain=chain,
            text=text,
            text_hash=fnv1a_64(text),
            ancestor_attrs=attrs,
        ))
    return blocks


_PATH_SEGMENT_RE = re.compile(r"/([^/\[\]]+)\[(\d+)\]")


def resolve_path(tree: DomTree, dom_path: str) -> TextNode:
    """Resolve a canonical DOM path back to its text node.

    Raises ``LookupError`` if the path does not address a text node of *tree*.
    """
    segments = _PATH_SEGMENT_RE.findall(dom_path)
    if "".join(f"/{t}[{k}]" for t, k in segments) != dom_path or len(segments) < 2:
        raise LookupError(f"malformed dom path: {dom_path!r}")
    tag, k = segments[0]
    if tag != "html" or k != "1":
        raise LookupError(f"path must start at /html[1]: {dom_path!r}")
    current = tree.root
    for tag, index_text in segments[1:-1]:
        wanted = int(index_text)
        seen = 0
        for child in current.children:
            if isinstance(child, ElementNode) and child.tag == tag:
                seen += 1
                if seen == wanted:
                    current = child
                    break
        else:
            raise LookupError(f"no element {tag}[{wanted}] under {current.tag}")
    tag, index_text = segments[-1]
    if tag != "#text":
        raise LookupError(f"path does not end in a #text segment: {dom_path!r}")
    wanted = int(index_text)
    seen = 0
    for child in current.children:
        if isinstance(child, TextNode):
            seen += 1
            if seen == wanted:
                return child
    raise LookupError(f"no #text[{wanted}] under {current.tag}")
