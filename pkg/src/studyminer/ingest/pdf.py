"""Plain-text extraction from PDF bytes.

A deliberately small parser: it scans indirect objects (tolerating broken
cross-reference tables), walks the page tree, inflates FlateDecode content
streams, and replays the text-showing operators. Simple (non-CID) fonts
only; anything that is not text is skipped silently. Pages are joined with
a form feed so page boundaries survive for downstream provenance.
"""

from __future__ import annotations

import re
import zlib
from typing import NamedTuple

from ..errors import EmptyText, PdfUnreadable

_WHITESPACE = b"\x00\t\n\x0c\r "
_DELIMITERS = b"()<>[]{}/%"


class Ref(NamedTuple):
    num: int
    gen: int


class Name(str):
    """A PDF name token, distinct from a string literal."""


class _Stream(NamedTuple):
    info: dict
    raw: bytes


class _Parser:
    """Recursive-descent parser for the PDF object grammar."""

    def __init__(self, data: bytes, pos: int = 0) -> None:
        self.data = data
        self.pos = pos

    def skip_ws(self) -> None:
        data, n = self.data, len(self.data)
        while self.pos < n:
            c = data[self.pos]
            if c in _WHITESPACE:
                self.pos += 1
            elif c == 0x25:  # '%' comment runs to end of line
                eol = data.find(b"\n", self.pos)
                self.pos = n if eol < 0 else eol + 1
            else:
                return

    def parse(self):
        self.skip_ws()
        if self.pos >= len(self.data):
            raise PdfUnreadable("unexpected end of data")
        c = self.data[self.pos]
        if c == 0x2F:  # /
            return self._name()
        if c == 0x28:  # (
            return self._literal_string()
        if c == 0x3C:  # < or <<
            if self.data.startswith(b"<<", self.pos):
                return self._dict()
            return self._hex_string()
        if c == 0x5B:  # [
            return self._array()
        if c in b"+-." or 0x30 <= c <= 0x39:
            return self._number_or_ref()
        return self._keyword()

    def _name(self) -> Name:
        self.pos += 1
        out = bytearray()
        data, n = self.data, len(self.data)
        while self.pos < n:
            c = data[self.pos]
            if c in _WHITESPACE or c in _DELIMITERS:
                break
            if c == 0x23 and self.pos + 2 < n:  # '#xx' escape
                out.append(int(data[self.pos + 1 : self.pos + 3], 16))
                self.pos += 3
            else:
                out.append(c)
                self.pos += 1
        return Name(out.decode("latin-1"))

    def _literal_string(self) -> bytes:
        self.pos += 1
        out = bytearray()
        depth = 1
        data, n = self.data, len(self.data)
        while self.pos < n:
            c = data[self.pos]
            if c == 0x5C:  # backslash
                self.pos += 1
                if self.pos >= n:
                    break
                e = data[self.pos]
                escapes = {0x6E: 0x0A, 0x72: 0x0D, 0x74: 0x09, 0x62: 0x08, 0x66: 0x0C}
                if e in escapes:
                    out.append(escapes[e])
                    self.pos += 1
                elif 0x30 <= e <= 0x37:  # up to three octal digits
                    oct_digits = bytearray()
                    while self.pos < n and len(oct_digits) < 3 and 0x30 <= data[self.pos] <= 0x37:
                        oct_digits.append(data[self.pos])
                        self.pos += 1
                    out.append(int(oct_digits, 8) & 0xFF)
                elif e in (0x0A, 0x0D):  # escaped newline: line continuation
                    self.pos += 1
                    if e == 0x0D and self.pos < n and data[self.pos] == 0x0A:
                        self.pos += 1
                else:
                    out.append(e)
                    self.pos += 1
            elif c == 0x28:
                depth += 1
                out.append(c)
                self.pos += 1
            elif c == 0x29:
                depth -= 1
                self.pos += 1
                if depth == 0:
                    return bytes(out)
                out.append(c)
            else:
                out.append(c)
                self.pos += 1
        raise PdfUnreadable("unterminated string literal")

    def _hex_string(self) -> bytes:
        self.pos += 1
        end = self.data.find(b">", self.pos)
        if end < 0:
            raise PdfUnreadable("unterminated hex string")
        digits = re.sub(rb"[^0-9A-Fa-f]", b"", self.data[self.pos : end])
        self.pos = end + 1
        if len(digits) % 2:
            digits += b"0"
        return bytes.fromhex(digits.decode("ascii"))

    def _dict(self) -> dict:
        self.pos += 2
        out: dict = {}
        while True:
            self.skip_ws()
            if self.data.startswith(b">>", self.pos):
                self.pos += 2
                return out
            key = self.parse()
            if not isinstance(key, Name):
                raise PdfUnreadable("dictionary key is not a name")
            out[str(key)] = self.parse()

    def _array(self) -> list:
        self.pos += 1
        out = []
        while True:
            self.skip_ws()
            if self.pos >= len(self.data):
                raise PdfUnreadable("unterminated array")
            if self.data[self.pos] == 0x5D:
                self.pos += 1
                return out
            out.append(self.parse())

    def _number_or_ref(self):
        m = re.match(rb"[+-]?(?:\d+\.\d*|\.\d+|\d+)", self.data[self.pos :])
        if not m:
            raise PdfUnreadable("malformed number")
        text = m.group(0)
        self.pos += len(text)
        if b"." in text:
            return float(text)
        value = int(text)
        # 'N G R' lookahead for an indirect reference
        m = re.match(rb"\s+(\d+)\s+R(?![A-Za-z])", self.data[self.pos :])
        if m and value >= 0:
            self.pos += m.end()
            return Ref(value, int(m.group(1)))
        return value

    def _keyword(self):
        m = re.match(rb"[A-Za-z]+", self.data[self.pos :])
        if not m:
            raise PdfUnreadable(f"unexpected byte {self.data[self.pos]:#x}")
        word = m.group(0)
        self.pos += len(word)
        if word == b"true":
            return True
        if word == b"false":
            return False
        if word == b"null":
            return None
        return word.decode("ascii")


class _Document:
    def __init__(self, data: bytes) -> None:
        self.data = data
        self.objects: dict[int, object] = {}
        self._scan_objects()
        self._expand_object_streams()

    def _scan_objects(self) -> None:
        # Later definitions win, which matches incremental-update semantics.
        for m in re.finditer(rb"(\d+)\s+(\d+)\s+obj\b", self.data):
            num = int(m.group(1))
            parser = _Parser(self.data, m.end())
            try:
                value = parser.parse()
            except PdfUnreadable:
                continue
            parser.skip_ws()
            if self.data.startswith(b"stream", parser.pos) and isinstance(value, dict):
                raw = self._read_stream_data(value, parser.pos + len(b"stream"))
                self.objects[num] = _Stream(value, raw)
            else:
                self.objects[num] = value

    def _read_stream_data(self, info: dict, pos: int) -> bytes:
        if self.data.startswith(b"\r\n", pos):
            pos += 2
        elif self.data.startswith(b"\n", pos) or self.data.startswith(b"\r", pos):
            pos += 1
        length = self.resolve(info.get("Length"))
        if isinstance(length, int) and 0 <= length <= len(self.data) - pos:
            candidate = self.data[pos : pos + length]
            tail = self.data[pos + length : pos + length + 20]
            if b"endstream" in tail or not tail.strip(_WHITESPACE):
                return candidate
        end = self.data.find(b"endstream", pos)
        if end < 0:
            raise PdfUnreadable("stream without endstream")
        return self.data[pos:end].rstrip(b"\r\n")

    def _expand_object_streams(self) -> None:
        for stream in [o for o in self.objects.values() if isinstance(o, _Stream)]:
            if stream.info.get("Type") != Name("ObjStm"):
                continue
            try:
                payload = decode_stream(stream, self)
                count = int(self.resolve(stream.info.get("N")))
                first = int(self.resolve(stream.info.get("First")))
            except (PdfUnreadable, TypeError, ValueError):
                continue
            header = payload[:first].split()
            for i in range(count):
                try:
                    num = int(header[2 * i])
                    offset = int(header[2 * i + 1])
                    self.objects.setdefault(num, _Parser(payload, first + offset).parse())
                except (IndexError, ValueError, PdfUnreadable):
                    continue

    def resolve(self, value, _depth: int = 0):
        while isinstance(value, Ref) and _depth < 32:
            value = self.objects.get(value.num)
            _depth += 1
        return value


def decode_stream(stream: _Stream, doc: _Document) -> bytes:
    filters = doc.resolve(stream.info.get("Filter"))
    if filters is None:
        return stream.raw
    if not isinstance(filters, list):
        filters = [filters]
    data = stream.raw
    for filt in filters:
        name = str(doc.resolve(filt))
        if name in ("FlateDecode", "Fl"):
            try:
                data = zlib.decompress(data)
            except zlib.error as exc:
                raise PdfUnreadable(f"bad flate stream: {exc}") from exc
        else:
            # Image and exotic filters carry no text for us.
            raise PdfUnreadable(f"unsupported stream filter {name}")
    return data


def _page_objects(doc: _Document) -> list[dict]:
    catalog = None
    for obj in doc.objects.values():
        if isinstance(obj, dict) and obj.get("Type") == Name("Catalog"):
            catalog = obj
            break
    if catalog is not None:
        pages: list[dict] = []
        seen: set[int] = set()

        def walk(node_ref) -> None:
            node = doc.resolve(node_ref)
            if not isinstance(node, dict) or id(node) in seen:
                return
            seen.add(id(node))
            if node.get("Type") == Name("Page"):
                pages.append(node)
            else:
                for kid in doc.resolve(node.get("Kids")) or []:
                    walk(kid)

        walk(catalog.get("Pages"))
        if pages:
            return pages
    return [
        obj
        for _, obj in sorted(doc.objects.items())
        if isinstance(obj, dict) and obj.get("Type") == Name("Page")
    ]


def _page_content(doc: _Document, page: dict) -> bytes:
    contents = doc.resolve(page.get("Contents"))
    parts = contents if isinstance(contents, list) else [contents]
    out = bytearray()
    for part in parts:
        resolved = doc.resolve(part)
        if isinstance(resolved, _Stream):
            try:
                out += decode_stream(resolved, doc)
                out += b"\n"
            except PdfUnreadable:
                continue
    return bytes(out)


def _render_text(content: bytes) -> str:
    """Replay text operators of one page's content stream."""
    parser = _Parser(content)
    operands: list = []
    lines: list[str] = []
    current: list[str] = []
    in_text = False

    def flush_line() -> None:
        if current:
            lines.append("".join(current))
            current.clear()

    def show(raw: bytes) -> None:
        if in_text:
            current.append(raw.decode("latin-1"))

    while True:
        parser.skip_ws()
        if parser.pos >= len(parser.data):
            break
        try:
            token = parser.parse()
        except PdfUnreadable:
            parser.pos += 1
            continue
        if not isinstance(token, str) or isinstance(token, Name):
            operands.append(token)
            continue
        op = token
        if op == "BT":
            in_text = True
        elif op == "ET":
            in_text = False
            flush_line()
        elif op == "Tj" and operands and isinstance(operands[-1], bytes):
            show(operands[-1])
        elif op == "'" and operands and isinstance(operands[-1], bytes):
            flush_line()
            show(operands[-1])
        elif op == '"' and operands and isinstance(operands[-1], bytes):
            flush_line()
            show(operands[-1])
        elif op == "TJ" and operands and isinstance(operands[-1], list):
            for item in operands[-1]:
                if isinstance(item, bytes):
                    show(item)
                elif isinstance(item, (int, float)) and item <= -180:
                    show(b" ")
        elif op in ("Td", "TD", "T*", "Tm"):
            flush_line()
        operands = []
    flush_line()
    return "\n".join(lines)


def extract_text_pdf(data: bytes) -> str:
    """Extract concatenated page text, pages separated by form feeds.

    Raises PdfUnreadable for encrypted or structurally broken files and
    EmptyText when no text operators produce any characters (typical for
    scanned, image-only PDFs).
    """
    if not data.startswith(b"%PDF-"):
        raise PdfUnreadable("missing %PDF- header")
    for m in re.finditer(rb"trailer\b", data):
        parser = _Parser(data, m.end())
        try:
            trailer = parser.parse()
        except PdfUnreadable:
            continue
        if isinstance(trailer, dict) and "Encrypt" in trailer:
            raise PdfUnreadable("encrypted PDF")
    doc = _Document(data)
    if not doc.objects:
        raise PdfUnreadable("no parseable objects")
    for obj in doc.objects.values():
        info = obj.info if isinstance(obj, _Stream) else obj
        if isinstance(info, dict) and info.get("Type") == Name("XRef") and "Encrypt" in info:
            raise PdfUnreadable("encrypted PDF")
    pages = _page_objects(doc)
    if not pages:
        raise PdfUnreadable("no pages found")
    rendered = [_render_text(_page_content(doc, page)).strip() for page in pages]
    text = "\x0c".join(rendered)
    if not text.strip():
        raise EmptyText("no extractable text; likely a scanned or image-only PDF")
    return text
