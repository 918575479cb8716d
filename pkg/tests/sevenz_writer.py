"""Minimal 7z writer used to build reader fixtures.

Produces single-folder archives (Copy or LZMA2 codec) with per-file CRCs,
optionally with an LZMA2-encoded header, mirroring what stock tools emit
for small document bundles.
"""

from __future__ import annotations

import lzma
import zlib

MAGIC = b"7z\xbc\xaf\x27\x1c"

_LZMA2_DICT_SIZE = 1 << 23
_LZMA2_PROP = 22  # (2 | (22 & 1)) << (22 // 2 + 11) == 1 << 23


def encode_number(value: int) -> bytes:
    for n_extra in range(8):
        high = value >> (8 * n_extra)
        if high < (1 << (7 - n_extra)):
            prefix = (0x100 - (1 << (8 - n_extra))) & 0xFF
            low = value & ((1 << (8 * n_extra)) - 1)
            return bytes([prefix | high]) + low.to_bytes(n_extra, "little")
    return b"\xff" + value.to_bytes(8, "little")


def _bit_vector(bits: list[bool]) -> bytes:
    out = bytearray((len(bits) + 7) // 8)
    for i, bit in enumerate(bits):
        if bit:
            out[i // 8] |= 1 << (7 - i % 8)
    return bytes(out)


def _lzma2_compress(data: bytes) -> bytes:
    return lzma.compress(
        data,
        format=lzma.FORMAT_RAW,
        filters=[{"id": lzma.FILTER_LZMA2, "dict_size": _LZMA2_DICT_SIZE}],
    )


def _streams_info(pack_pos: int, pack_size: int, unpack_size: int, codec: str,
                  substream_sizes: list[int] | None = None,
                  substream_crcs: list[int] | None = None) -> bytes:
    out = bytearray()
    out += bytes([0x06])  # kPackInfo
    out += encode_number(pack_pos)
    out += encode_number(1)
    out += bytes([0x09]) + encode_number(pack_size)  # kSize
    out += bytes([0x00])  # kEnd of PackInfo

    out += bytes([0x07, 0x0B])  # kUnpackInfo kFolder
    out += encode_number(1)
    out += bytes([0x00])  # not external
    if codec == "copy":
        out += encode_number(1) + bytes([0x01, 0x00])  # one coder, id size 1, id 0x00
    elif codec == "lzma2":
        out += encode_number(1) + bytes([0x21, 0x21])  # id size 1 + has-attrs, id 0x21
        out += encode_number(1) + bytes([_LZMA2_PROP])
    else:
        raise ValueError(codec)
    out += bytes([0x0C]) + encode_number(unpack_size)  # kCodersUnpackSize
    out += bytes([0x00])  # kEnd of UnpackInfo

    if substream_sizes is not None:
        out += bytes([0x08])  # kSubStreamsInfo
        out += bytes([0x0D]) + encode_number(len(substream_sizes))
        if len(substream_sizes) > 1:
            out += bytes([0x09])
            for size in substream_sizes[:-1]:
                out += encode_number(size)
        if substream_crcs:
            out += bytes([0x0A, 0x01])  # kCRC, all defined
            for crc in substream_crcs:
                out += crc.to_bytes(4, "little")
        out += bytes([0x00])  # kEnd of SubStreamsInfo
    out += bytes([0x00])  # kEnd of StreamsInfo
    return bytes(out)


def build_sevenz(
    files: list[tuple[str, bytes]],
    codec: str = "copy",
    encode_header: bool = False,
    corrupt_crc: bool = False,
) -> bytes:
    """Assemble a 7z archive holding `files` in the given order."""
    nonempty = [(name, data) for name, data in files if data]
    payload = b"".join(data for _, data in nonempty)
    packed = payload if codec == "copy" else _lzma2_compress(payload)

    header = bytearray([0x01])  # kHeader
    if nonempty:
        header += bytes([0x04])  # kMainStreamsInfo
        crcs = [zlib.crc32(data) for _, data in nonempty]
        if corrupt_crc:
            crcs[0] ^= 0xFFFFFFFF
        header += _streams_info(
            0, len(packed), len(payload), codec,
            substream_sizes=[len(data) for _, data in nonempty],
            substream_crcs=crcs,
        )
    header += bytes([0x05])  # kFilesInfo
    header += encode_number(len(files))
    empty_bits = [not data for _, data in files]
    if any(empty_bits):
        vec = _bit_vector(empty_bits)
        header += bytes([0x0E]) + encode_number(len(vec)) + vec
        empty_file_bits = [True] * sum(empty_bits)  # empty files, not directories
        vec = _bit_vector(empty_file_bits)
        header += bytes([0x0F]) + encode_number(len(vec)) + vec
    names = b"\x00" + "".join(f"{name}\x00" for name, _ in files).encode("utf-16-le")
    header += bytes([0x11]) + encode_number(len(names)) + names
    header += bytes([0x00, 0x00])  # kEnd of FilesInfo, kEnd of Header
    header = bytes(header)

    body = bytearray(packed)
    if encode_header:
        packed_header = _lzma2_compress(header)
        inner_pos = len(body)
        body += packed_header
        next_header = bytes([0x17]) + _streams_info(
            inner_pos, len(packed_header), len(header), "lzma2"
        )
    else:
        next_header = header

    out = bytearray(MAGIC)
    out += bytes([0x00, 0x04])  # format version
    start = (
        len(body).to_bytes(8, "little")
        + len(next_header).to_bytes(8, "little")
        + zlib.crc32(next_header).to_bytes(4, "little")
    )
    out += zlib.crc32(start).to_bytes(4, "little")
    out += start
    out += body
    out += next_header
    return bytes(out)
