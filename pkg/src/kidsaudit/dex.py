"""Minimal DEX reader: just enough of the format to enumerate class
descriptors.

A DEX file starts with a 0x70-byte little-endian header whose fields
include the offsets/counts of the string_ids and type_ids tables.  Each
type_ids entry is a u32 index into string_ids; each string_ids entry is
a u32 offset to string data (uleb128 char count followed by MUTF-8
bytes).  Class types are descriptors of the form ``Lcom/foo/Bar;``.

Nothing else (protos, fields, methods, bytecode) is parsed.
"""
from __future__ import annotations

import struct

from .errors import MalformedDex

DEX_MAGIC = b"dex\n"
HEADER_SIZE = 0x70

_STRING_IDS_SIZE_OFF = 0x38
_STRING_IDS_OFF_OFF = 0x3C
_TYPE_IDS_SIZE_OFF = 0x40
_TYPE_IDS_OFF_OFF = 0x44


def _u32(data: bytes, off: int) -> int:
    try:
        return struct.unpack_from("<I", data, off)[0]
    except struct.error as exc:
        raise MalformedDex("truncated header") from exc


def _read_uleb128(data: bytes, off: int) -> tuple[int, int]:
    result = 0
    shift = 0
    while True:
        if off >= len(data):
            raise MalformedDex("uleb128 runs past end of file")
        b = data[off]
        off += 1
        result |= (b & 0x7F) << shift
        if not b & 0x80:
            return result, off
        shift += 7
        if shift > 35:
            raise MalformedDex("uleb128 too long")


def _read_string(data: bytes, off: int) -> str:
    _utf16_len, off = _read_uleb128(data, off)
    end = data.find(b"\x00", off)
    if end < 0:
        raise MalformedDex("unterminated string data")
    # MUTF-8; descriptors are ASCII, so plain UTF-8 with replacement
    # is fine for the non-descriptor strings we never look at.
    return data[off:end].decode("utf-8", errors="replace")


def type_descriptors(blob: bytes) -> list[str]:
    """All type descriptors of one DEX blob, in table order."""
    if len(blob) < HEADER_SIZE:
        raise MalformedDex("file shorter than header")
    if blob[:4] != DEX_MAGIC:
        raise MalformedDex("bad magic")

    string_count = _u32(blob, _STRING_IDS_SIZE_OFF)
    string_off = _u32(blob, _STRING_IDS_OFF_OFF)
    type_count = _u32(blob, _TYPE_IDS_SIZE_OFF)
    type_off = _u32(blob, _TYPE_IDS_OFF_OFF)

    if string_off + 4 * string_count > len(blob):
        raise MalformedDex("string_ids table beyond file")
    if type_off + 4 * type_count > len(blob):
        raise MalformedDex("type_ids table beyond file")

    out = []
    for i in range(type_count):
        str_idx = _u32(blob, type_off + 4 * i)
        if str_idx >= string_count:
            raise MalformedDex("type_ids entry references bad string index")
        data_off = _u32(blob, string_off + 4 * str_idx)
        if data_off >= len(blob):
            raise MalformedDex("string data offset beyond file")
        out.append(_read_string(blob, data_off))
    return out


def class_descriptors(blob: bytes) -> set[str]:
    """Normalized reference-type descriptors of one DEX blob.

    ``Lcom/foo/Bar;`` becomes ``com/foo/Bar``; primitives (``I``, ``V``,
    ...) and array types (``[...``) are skipped.
    """
    out = set()
    for desc in type_descriptors(blob):
        if desc.startswith("L") and desc.endswith(";"):
            out.add(desc[1:-1])
    return out
