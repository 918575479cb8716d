"""Visible-text extraction from HTML bytes via the tolerant stdlib parser."""

from __future__ import annotations

import re
from html.parser import HTMLParser

from ..errors import EmptyText

# https://developer.mozilla.org/en-US/docs/Web/HTML/Block-level_elements
_BLOCK_TAGS = {
    "address", "article", "aside", "blockquote", "dd", "div", "dl", "dt",
    "fieldset", "figcaption", "figure", "footer", "form", "h1", "h2", "h3",
    "h4", "h5", "h6", "header", "hr", "li", "main", "nav", "ol", "p", "pre",
    "section", "table", "td", "tfoot", "th", "thead", "tr", "ul",
}

# Entire subtrees that never contribute visible article text.
_SKIP_TAGS = {"script", "style", "noscript", "template", "nav", "footer", "head"}

_VOID_TAGS = {"br", "hr", "img", "input", "meta", "link"}


class _TextCollector(HTMLParser):
    def __init__(self) -> None:
        super().__init__(convert_charrefs=True)
        self.parts: list[str] = []
        self._skip_depth = 0

    def handle_starttag(self, tag: str, attrs) -> None:
        if tag in _SKIP_TAGS and tag not in _VOID_TAGS:
            self._skip_depth += 1
        if tag in _BLOCK_TAGS or tag == "br":
            self.parts.append("\n")

    def handle_endtag(self, tag: str) -> None:
        if tag in _SKIP_TAGS and self._skip_depth > 0:
            self._skip_depth -= 1
        if tag in _BLOCK_TAGS:
            self.parts.append("\n")

    def handle_data(self, data: str) -> None:
        if self._skip_depth == 0:
            self.parts.append(data)


def extract_text_html(data: bytes) -> str:
    """Return visible text with block boundaries as newlines.

    Script, style, nav, and footer subtrees are dropped; runs of spaces
    collapse to one; blank lines collapse to a single newline. Raises
    EmptyText when nothing visible remains.
    """
    try:
        markup = data.decode("utf-8")
    except UnicodeDecodeError:
        markup = data.decode("latin-1")
    collector = _TextCollector()
    collector.feed(markup)
    collector.close()
    text = "".join(collector.parts)
    text = re.sub(r"[ \t\r\xa0]+", " ", text)
    text = re.sub(r" ?\n ?", "\n", text)
    text = re.sub(r"\n{2,}", "\n", text).strip()
    if not text:
        raise EmptyText("no visible text in HTML document")
    return text
