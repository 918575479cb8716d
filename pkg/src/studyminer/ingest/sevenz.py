"""Reader for 7z containers built on the stdlib lzma module.

Covers the layout that stock 7z writers produce for document archives:
single-coder folders using the Copy, LZMA, or LZMA2 codecs, optional
encoded (compressed) headers, and per-stream CRC checks. Encrypted
archives and filter chains (BCJ, delta, ...) are rejected as unreadable
rather than silently mis-extracted.
"""

from __future__ import annotations

import lzma
import zlib
from dataclasses import dataclass, field

from ..errors import CorruptArchive

MAGIC = b"7z\xbc\xaf\x27\x1c"

_K_END = 0x00
_K_HEADER = 0x01
_K_MAIN_STREAMS = 0x04
_K_FILES_INFO = 0x05
_K_PACK_INFO = 0x06
_K_UNPACK_INFO = 0x07
_K_SUBSTREAMS_INFO = 0x08
_K_SIZE = 0x09
_K_CRC = 0x0A
_K_FOLDER = 0x0B
_K_CODERS_UNPACK_SIZE = 0x0C
_K_NUM_UNPACK_STREAM = 0x0D
_K_EMPTY_STREAM = 0x0E
_K_EMPTY_FILE = 0x0F
_K_NAME = 0x11
_K_ENCODED_HEADER = 0x17
_K_DUMMY = 0x19

_CODEC_COPY = b"\x00"
_CODEC_LZMA2 = b"\x21"
_CODEC_LZMA1 = b"\x03\x01\x01"
_CODEC_AES = b"\x06\xf1\x07\x01"


class _Reader:
    def __init__(self, data: bytes) -> None:
        self.data = data
        self.pos = 0

    def read(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise CorruptArchive("truncated 7z header")
        out = self.data[self.pos : self.pos + n]
        self.pos += n
        return out

    def byte(self) -> int:
        return self.read(1)[0]

    def number(self) -> int:
        """7z variable-length integer."""
        first = self.byte()
        mask = 0x80
        value = 0
        for i in range(8):
            if first & mask == 0:
                value |= (first & (mask - 1)) << (8 * i)
                return value
            value |= self.byte() << (8 * i)
            mask >>= 1
        return value

    def bit_vector(self, count: int) -> list[bool]:
        raw = self.read((count + 7) // 8)
        return [bool(raw[i // 8] >> (7 - i % 8) & 1) for i in range(count)]

    def optional_bit_vector(self, count: int) -> list[bool]:
        """Bit vector preceded by an all-are-defined flag byte."""
        if self.byte():
            return [True] * count
        return self.bit_vector(count)


@dataclass
class _Coder:
    codec: bytes
    props: bytes
    num_in: int
    num_out: int


@dataclass
class _Folder:
    coders: list[_Coder]
    bind_pairs: list[tuple[int, int]]
    packed_indices: list[int]
    unpack_sizes: list[int] = field(default_factory=list)
    crc: int | None = None

    @property
    def output_size(self) -> int:
        bound_outputs = {out for _, out in self.bind_pairs}
        for i, size in enumerate(self.unpack_sizes):
            if i not in bound_outputs:
                return size
        raise CorruptArchive("folder without an unbound output stream")


@dataclass
class SevenZEntry:
    name: str
    data: bytes | None  # None marks a directory

    @property
    def is_dir(self) -> bool:
        return self.data is None


def _parse_folder(r: _Reader) -> _Folder:
    num_coders = r.number()
    coders = []
    total_in = total_out = 0
    for _ in range(num_coders):
        flags = r.byte()
        if flags & 0x80:
            raise CorruptArchive("obsolete alternative-method coder flag")
        codec = r.read(flags & 0x0F)
        num_in = num_out = 1
        if flags & 0x10:
            num_in = r.number()
            num_out = r.number()
        props = b""
        if flags & 0x20:
            props = r.read(r.number())
        coders.append(_Coder(codec, props, num_in, num_out))
        total_in += num_in
        total_out += num_out
    bind_pairs = [(r.number(), r.number()) for _ in range(total_out - 1)]
    num_packed = total_in - len(bind_pairs)
    if num_packed == 1:
        bound_inputs = {inp for inp, _ in bind_pairs}
        packed = [i for i in range(total_in) if i not in bound_inputs][:1]
    else:
        packed = [r.number() for _ in range(num_packed)]
    return _Folder(coders, bind_pairs, packed)


def _skip_digests(r: _Reader, count: int) -> list[int | None]:
    defined = r.optional_bit_vector(count)
    return [
        int.from_bytes(r.read(4), "little") if is_set else None for is_set in defined
    ]


def _parse_streams_info(r: _Reader) -> tuple[int, list[int], list[_Folder], list[int], list[list[int]], list[int | None]]:
    pack_pos = 0
    pack_sizes: list[int] = []
    folders: list[_Folder] = []
    num_unpack_streams: list[int] = []
    substream_sizes: list[list[int]] = []
    substream_crcs: list[int | None] = []

    prop = r.number()
    if prop == _K_PACK_INFO:
        pack_pos = r.number()
        num_pack = r.number()
        while True:
            inner = r.number()
            if inner == _K_END:
                break
            if inner == _K_SIZE:
                pack_sizes = [r.number() for _ in range(num_pack)]
            elif inner == _K_CRC:
                _skip_digests(r, num_pack)
            else:
                raise CorruptArchive(f"unexpected pack-info property {inner:#x}")
        prop = r.number()
    if prop == _K_UNPACK_INFO:
        if r.number() != _K_FOLDER:
            raise CorruptArchive("missing folder marker")
        num_folders = r.number()
        if r.byte() != 0:
            raise CorruptArchive("external folder definitions are unsupported")
        folders = [_parse_folder(r) for _ in range(num_folders)]
        if r.number() != _K_CODERS_UNPACK_SIZE:
            raise CorruptArchive("missing coder unpack sizes")
        for folder in folders:
            total_out = sum(c.num_out for c in folder.coders)
            folder.unpack_sizes = [r.number() for _ in range(total_out)]
        while True:
            inner = r.number()
            if inner == _K_END:
                break
            if inner == _K_CRC:
                digests = _skip_digests(r, len(folders))
                for folder, crc in zip(folders, digests):
                    folder.crc = crc
            else:
                raise CorruptArchive(f"unexpected unpack-info property {inner:#x}")
        prop = r.number()

    num_unpack_streams = [1] * len(folders)
    if prop == _K_SUBSTREAMS_INFO:
        sizes_seen = False
        while True:
            inner = r.number()
            if inner == _K_END:
                break
            if inner == _K_NUM_UNPACK_STREAM:
                num_unpack_streams = [r.number() for _ in folders]
            elif inner == _K_SIZE:
                sizes_seen = True
                for folder, count in zip(folders, num_unpack_streams):
                    listed = [r.number() for _ in range(count - 1)]
                    listed.append(folder.output_size - sum(listed))
                    substream_sizes.append(listed)
            elif inner == _K_CRC:
                known = sum(
                    1
                    for folder, count in zip(folders, num_unpack_streams)
                    if count == 1 and folder.crc is not None
                )
                pending = sum(num_unpack_streams) - known
                digests = iter(_skip_digests(r, pending))
                for folder, count in zip(folders, num_unpack_streams):
                    if count == 1 and folder.crc is not None:
                        substream_crcs.append(folder.crc)
                    else:
                        substream_crcs.extend(next(digests) for _ in range(count))
            else:
                raise CorruptArchive(f"unexpected substreams property {inner:#x}")
        if not sizes_seen:
            substream_sizes = [[f.output_size] for f in folders]
        prop = r.number()
    else:
        substream_sizes = [[f.output_size] for f in folders]
    if not substream_crcs:
        substream_crcs = [f.crc for f, n in zip(folders, num_unpack_streams) for _ in range(n)]
    if prop != _K_END:
        raise CorruptArchive(f"unexpected streams-info property {prop:#x}")
    return pack_pos, pack_sizes, folders, num_unpack_streams, substream_sizes, substream_crcs


def _decode_folder(folder: _Folder, packed: bytes) -> bytes:
    if len(folder.coders) != 1:
        raise CorruptArchive("multi-coder 7z folders (filter chains) are unsupported")
    coder = folder.coders[0]
    size = folder.output_size
    if coder.codec == _CODEC_COPY:
        out = packed
    elif coder.codec in (_CODEC_LZMA2, _CODEC_LZMA1):
        if coder.codec == _CODEC_LZMA2:
            if len(coder.props) != 1:
                raise CorruptArchive("bad LZMA2 properties")
            p = coder.props[0]
            dict_size = 0xFFFFFFFF if p >= 40 else (2 | (p & 1)) << (p // 2 + 11)
            filters = [{"id": lzma.FILTER_LZMA2, "dict_size": dict_size}]
        else:
            if len(coder.props) != 5:
                raise CorruptArchive("bad LZMA properties")
            d = coder.props[0]
            filters = [{
                "id": lzma.FILTER_LZMA1,
                "lc": d % 9,
                "lp": d // 9 % 5,
                "pb": d // 45,
                "dict_size": int.from_bytes(coder.props[1:5], "little"),
            }]
        dec = lzma.LZMADecompressor(format=lzma.FORMAT_RAW, filters=filters)
        try:
            out = dec.decompress(packed, max_length=size)
            while len(out) < size and not dec.eof:
                chunk = dec.decompress(b"", max_length=size - len(out))
                if not chunk:
                    break
                out += chunk
        except lzma.LZMAError as exc:
            raise CorruptArchive(f"LZMA stream failed: {exc}") from exc
    elif coder.codec == _CODEC_AES:
        raise CorruptArchive("encrypted 7z archives are unsupported")
    else:
        raise CorruptArchive(f"unsupported 7z codec {coder.codec.hex()}")
    if len(out) < size:
        raise CorruptArchive("folder output shorter than declared")
    out = out[:size]
    if folder.crc is not None and zlib.crc32(out) != folder.crc:
        raise CorruptArchive("folder CRC mismatch")
    return out


def _folder_outputs(data: bytes, pack_pos: int, pack_sizes: list[int], folders: list[_Folder]) -> list[bytes]:
    base = 32 + pack_pos
    offsets = [base]
    for size in pack_sizes:
        offsets.append(offsets[-1] + size)
    outputs = []
    stream_index = 0
    for folder in folders:
        n = len(folder.packed_indices)
        start = offsets[stream_index]
        end = offsets[stream_index + n]
        if end > len(data):
            raise CorruptArchive("packed data extends past end of file")
        outputs.append(_decode_folder(folder, data[start:end]))
        stream_index += n
    return outputs


def _parse_files_info(r: _Reader) -> tuple[int, list[bool], list[bool], list[str]]:
    num_files = r.number()
    empty_stream = [False] * num_files
    empty_file: list[bool] = []
    names: list[str] = []
    while True:
        prop = r.number()
        if prop == _K_END:
            break
        size = r.number()
        body = _Reader(r.read(size))
        if prop == _K_EMPTY_STREAM:
            empty_stream = body.bit_vector(num_files)
        elif prop == _K_EMPTY_FILE:
            empty_file = body.bit_vector(sum(empty_stream))
        elif prop == _K_NAME:
            if body.byte() != 0:
                raise CorruptArchive("external file names are unsupported")
            decoded = body.data[1:].decode("utf-16-le", errors="replace")
            names = decoded.split("\x00")[:-1]
        elif prop == _K_DUMMY:
            pass
        # timestamps/attributes are irrelevant for text extraction
    if len(names) != num_files:
        raise CorruptArchive("file-name count does not match file count")
    if not empty_file:
        empty_file = [False] * sum(empty_stream)
    return num_files, empty_stream, empty_file, names


def read_sevenz(data: bytes) -> list[SevenZEntry]:
    """Parse 7z bytes into entries; directories carry data=None."""
    if not data.startswith(MAGIC) or len(data) < 32:
        raise CorruptArchive("not a 7z archive")
    if zlib.crc32(data[12:32]) != int.from_bytes(data[8:12], "little"):
        raise CorruptArchive("signature header CRC mismatch")
    next_offset = int.from_bytes(data[12:20], "little")
    next_size = int.from_bytes(data[20:28], "little")
    next_crc = int.from_bytes(data[28:32], "little")
    start = 32 + next_offset
    header_bytes = data[start : start + next_size]
    if len(header_bytes) != next_size:
        raise CorruptArchive("truncated 7z file")
    if zlib.crc32(header_bytes) != next_crc:
        raise CorruptArchive("next-header CRC mismatch")
    if not header_bytes:
        return []

    r = _Reader(header_bytes)
    kind = r.number()
    if kind == _K_ENCODED_HEADER:
        pack_pos, pack_sizes, folders, _, _, _ = _parse_streams_info(r)
        decoded = b"".join(_folder_outputs(data, pack_pos, pack_sizes, folders))
        r = _Reader(decoded)
        kind = r.number()
    if kind != _K_HEADER:
        raise CorruptArchive(f"unexpected header marker {kind:#x}")

    prop = r.number()
    folders: list[_Folder] = []
    pack_pos, pack_sizes = 0, []
    num_unpack_streams: list[int] = []
    substream_sizes: list[list[int]] = []
    substream_crcs: list[int | None] = []
    if prop == _K_MAIN_STREAMS:
        (pack_pos, pack_sizes, folders, num_unpack_streams,
         substream_sizes, substream_crcs) = _parse_streams_info(r)
        prop = r.number()
    if prop != _K_FILES_INFO:
        raise CorruptArchive("archive has no file table")
    num_files, empty_stream, empty_file, names = _parse_files_info(r)

    contents: list[bytes] = []
    if folders:
        for output, sizes in zip(
            _folder_outputs(data, pack_pos, pack_sizes, folders), substream_sizes
        ):
            offset = 0
            for size in sizes:
                contents.append(output[offset : offset + size])
                offset += size
    if len(contents) != num_files - sum(empty_stream):
        raise CorruptArchive("substream count does not match file table")
    for content, crc in zip(contents, substream_crcs):
        if crc is not None and zlib.crc32(content) != crc:
            raise CorruptArchive("file CRC mismatch")

    entries: list[SevenZEntry] = []
    content_iter = iter(contents)
    empty_iter = iter(empty_file)
    for i, name in enumerate(names):
        normalized = name.replace("\\", "/")
        if empty_stream[i]:
            entries.append(
                SevenZEntry(normalized, b"" if next(empty_iter) else None)
            )
        else:
            entries.append(SevenZEntry(normalized, next(content_iter)))
    return entries
