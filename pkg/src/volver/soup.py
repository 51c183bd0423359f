"""Tag-soup tolerant HTML parsing.

Proceedings pages frequently carry invalid markup (unclosed list items,
stray end tags, legacy encodings), so parsing is built on the forgiving
stdlib ``html.parser`` and never rejects a page. The result is a small
DOM of :class:`Element` nodes with just enough query surface for the
extraction templates.
"""

from __future__ import annotations

import re
from html.parser import HTMLParser
from typing import Iterator, Optional

VOID_TAGS = {
    "area", "base", "br", "col", "embed", "hr", "img", "input",
    "link", "meta", "param", "source", "track", "wbr",
}

_HEADINGS = {"h1", "h2", "h3", "h4", "h5", "h6"}

# block starts that implicitly close an open <p> or heading, as browsers do
_BLOCK_STARTS = _HEADINGS | {
    "p", "div", "ul", "ol", "li", "table", "tr", "td", "th",
    "blockquote", "pre", "hr", "dl", "dt", "dd",
}

# tags that implicitly close an open element of the same (or listed) kind
_IMPLIED_CLOSERS = {
    "li": {"li"},
    "p": {"p"},
    "tr": {"tr", "td", "th"},
    "td": {"td", "th"},
    "th": {"td", "th"},
    "option": {"option"},
    "dt": {"dt", "dd"},
    "dd": {"dt", "dd"},
}

_WS_RE = re.compile(r"\s+")


def collapse_ws(text: str) -> str:
    return _WS_RE.sub(" ", text).strip()


class Element:
    __slots__ = ("tag", "attrs", "children", "parent")

    def __init__(self, tag: str, attrs: Optional[dict] = None, parent: Optional["Element"] = None):
        self.tag = tag
        self.attrs = attrs or {}
        self.children: list = []  # Element or str
        self.parent = parent

    def __repr__(self):
        return f"<Element {self.tag} {self.attrs}>"

    # -- queries -----------------------------------------------------------

    def iter(self) -> Iterator["Element"]:
        """All descendant elements in document order, self excluded."""
        for child in self.children:
            if isinstance(child, Element):
                yield child
                yield from child.iter()

    def find_all(self, tag: Optional[str] = None, class_: Optional[str] = None,
                 **attrs) -> list["Element"]:
        out = []
        for el in self.iter():
            if tag is not None and el.tag != tag:
                continue
            if class_ is not None and class_ not in el.classes:
                continue
            if any(el.attrs.get(k.rstrip("_")) != v for k, v in attrs.items()):
                continue
            out.append(el)
        return out

    def find(self, tag: Optional[str] = None, class_: Optional[str] = None,
             **attrs) -> Optional["Element"]:
        found = self.find_all(tag, class_, **attrs)
        return found[0] if found else None

    @property
    def classes(self) -> list[str]:
        return (self.attrs.get("class") or "").split()

    def text(self) -> str:
        """Concatenated descendant text with whitespace collapsed."""
        parts: list[str] = []
        self._collect_text(parts)
        return collapse_ws("".join(parts))

    def _collect_text(self, parts: list) -> None:
        for child in self.children:
            if isinstance(child, str):
                parts.append(child)
            else:
                if child.tag in ("script", "style"):
                    continue
                child._collect_text(parts)
                # element boundaries separate words in practice
                if child.tag in ("br", "p", "li", "tr", "div", "h1", "h2", "h3", "h4"):
                    parts.append(" ")

    def ancestors(self) -> Iterator["Element"]:
        node = self.parent
        while node is not None:
            yield node
            node = node.parent

    def has_ancestor(self, tag: str) -> bool:
        return any(a.tag == tag for a in self.ancestors())

    def lines(self) -> list[str]:
        """Text split on block/``<br>`` boundaries, each line ws-collapsed.

        Gives heuristic templates a view of the page close to what a
        reader sees, independent of how broken the markup is.
        """
        chunks: list[str] = []
        self._collect_lines(chunks)
        lines = "".join(chunks).split("\n")
        return [collapse_ws(ln) for ln in lines if collapse_ws(ln)]

    _BLOCK = {"p", "li", "tr", "div", "h1", "h2", "h3", "h4", "h5", "table", "ul", "ol", "dd", "dt"}

    def _collect_lines(self, chunks: list) -> None:
        for child in self.children:
            if isinstance(child, str):
                chunks.append(child)
            elif child.tag == "br":
                chunks.append("\n")
            elif child.tag in ("script", "style"):
                continue
            else:
                if child.tag in self._BLOCK:
                    chunks.append("\n")
                child._collect_lines(chunks)
                if child.tag in self._BLOCK:
                    chunks.append("\n")


class _TreeBuilder(HTMLParser):
    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.root = Element("#document")
        self.stack = [self.root]

    def handle_starttag(self, tag, attrs):
        if tag in _BLOCK_STARTS:
            while self.stack[-1].tag == "p" or self.stack[-1].tag in _HEADINGS:
                self.stack.pop()
        closers = _IMPLIED_CLOSERS.get(tag)
        if closers:
            # unwind soup like <li>a<li>b without explicit closing tags
            while self.stack[-1].tag in closers:
                self.stack.pop()
        el = Element(tag, dict(attrs), parent=self.stack[-1])
        self.stack[-1].children.append(el)
        if tag not in VOID_TAGS:
            self.stack.append(el)

    def handle_startendtag(self, tag, attrs):
        el = Element(tag, dict(attrs), parent=self.stack[-1])
        self.stack[-1].children.append(el)

    def handle_endtag(self, tag):
        for depth in range(len(self.stack) - 1, 0, -1):
            if self.stack[depth].tag == tag:
                del self.stack[depth:]
                return
        # stray end tag: ignore

    def handle_data(self, data):
        if data:
            self.stack[-1].children.append(data)


def parse_html(text: str) -> Element:
    builder = _TreeBuilder()
    builder.feed(text)
    builder.close()
    return builder.root


_CHARSET_RE = re.compile(
    rb"""<meta[^>]+charset\s*=\s*["']?\s*([A-Za-z0-9_\-]+)""", re.IGNORECASE
)


def decode_html(body: bytes) -> str:
    """Decode page bytes: declared charset, then UTF-8, then Latin-1.

    Latin-1 maps every byte, so this never raises.
    """
    match = _CHARSET_RE.search(body[:2048])
    if match:
        try:
            return body.decode(match.group(1).decode("ascii"))
        except (LookupError, UnicodeDecodeError):
            pass
    try:
        return body.decode("utf-8")
    except UnicodeDecodeError:
        return body.decode("latin-1")


def parse_page(body: bytes) -> Element:
    return parse_html(decode_html(body))
