"""Decoder for Android binary XML (AXML), the encoding used for
AndroidManifest.xml inside APKs.

The format is chunked, little-endian:

  file header:   type=0x0003, header_size=8, file_size
  string pool:   type=0x0001 — all strings used by the document,
                 referenced by index from element/attribute records
  resource map:  type=0x0180 (optional, skipped)
  namespace:     type=0x0100 / 0x0101
  start element: type=0x0102 — holds the attribute records
  end element:   type=0x0103

Only what manifest extraction needs is decoded: the tree structure,
element names, and attribute name/value pairs.  Styles, namespaces
prefixes and comments are ignored.
"""
from __future__ import annotations

import struct
import xml.etree.ElementTree as ET

from .errors import MalformedAxml

CHUNK_AXML_FILE = 0x0003
CHUNK_STRING_POOL = 0x0001
CHUNK_RESOURCE_MAP = 0x0180
CHUNK_START_NAMESPACE = 0x0100
CHUNK_END_NAMESPACE = 0x0101
CHUNK_START_ELEMENT = 0x0102
CHUNK_END_ELEMENT = 0x0103
CHUNK_CDATA = 0x0104

UTF8_FLAG = 1 << 8

# typedValue dataType codes we care about
TYPE_STRING = 0x03
TYPE_INT_DEC = 0x10
TYPE_INT_HEX = 0x11
TYPE_INT_BOOLEAN = 0x12


def looks_like_axml(data: bytes) -> bool:
    """Cheap sniff: AXML files open with chunk type 0x0003."""
    return len(data) >= 8 and struct.unpack_from("<HH", data, 0)[0] == CHUNK_AXML_FILE


class _StringPool:
    def __init__(self, data: bytes, offset: int):
        try:
            (_type, header_size, size, count, style_count, flags,
             strings_start, _styles_start) = struct.unpack_from("<HHIIIIII", data, offset)
        except struct.error as exc:
            raise MalformedAxml("truncated string pool header") from exc
        if offset + size > len(data):
            raise MalformedAxml("string pool extends beyond file")
        self._utf8 = bool(flags & UTF8_FLAG)
        self._data = data
        self._base = offset + strings_start
        off_table = offset + header_size
        try:
            self._offsets = struct.unpack_from("<%dI" % count, data, off_table)
        except struct.error as exc:
            raise MalformedAxml("truncated string offset table") from exc
        self._end = offset + size

    def __getitem__(self, idx: int) -> str:
        if idx < 0 or idx >= len(self._offsets):
            raise MalformedAxml("string index %d out of range" % idx)
        pos = self._base + self._offsets[idx]
        if pos >= self._end:
            raise MalformedAxml("string offset beyond pool")
        try:
            if self._utf8:
                return self._read_utf8(pos)
            return self._read_utf16(pos)
        except (struct.error, IndexError, UnicodeDecodeError) as exc:
            raise MalformedAxml("undecodable string at index %d" % idx) from exc

    def _read_utf16(self, pos: int) -> str:
        # u16 char count; high bit set means a second u16 extends the length
        n = struct.unpack_from("<H", self._data, pos)[0]
        pos += 2
        if n & 0x8000:
            n = ((n & 0x7FFF) << 16) | struct.unpack_from("<H", self._data, pos)[0]
            pos += 2
        raw = self._data[pos:pos + 2 * n]
        if len(raw) < 2 * n:
            raise MalformedAxml("truncated UTF-16 string")
        return raw.decode("utf-16-le")

    def _read_utf8(self, pos: int) -> str:
        # two lengths (char count, byte count), each u8 with high-bit extension
        def _len(p):
            v = self._data[p]
            p += 1
            if v & 0x80:
                v = ((v & 0x7F) << 8) | self._data[p]
                p += 1
            return v, p

        _chars, pos = _len(pos)
        nbytes, pos = _len(pos)
        raw = self._data[pos:pos + nbytes]
        if len(raw) < nbytes:
            raise MalformedAxml("truncated UTF-8 string")
        return raw.decode("utf-8")


def _attr_value(pool: _StringPool, raw_idx: int, dtype: int, data: int) -> str:
    if raw_idx != 0xFFFFFFFF:
        return pool[raw_idx]
    if dtype == TYPE_STRING:
        return pool[data]
    if dtype == TYPE_INT_DEC:
        return str(data)
    if dtype == TYPE_INT_HEX:
        return "0x%x" % data
    if dtype == TYPE_INT_BOOLEAN:
        return "true" if data else "false"
    return str(data)


def parse_axml(data: bytes) -> ET.Element:
    """Decode an AXML document into an ElementTree element.

    Attribute names are kept bare (no namespace prefix); the binary
    format references the android namespace by URI and manifest
    attributes are unambiguous without it.

    Raises MalformedAxml on any structural problem.
    """
    if not looks_like_axml(data):
        raise MalformedAxml("missing AXML file header")
    try:
        _type, _hdr, file_size = struct.unpack_from("<HHI", data, 0)
    except struct.error as exc:
        raise MalformedAxml("truncated file header") from exc
    end = min(file_size, len(data))

    pool: _StringPool | None = None
    root: ET.Element | None = None
    stack: list[ET.Element] = []
    pos = 8
    while pos + 8 <= end:
        try:
            ctype, header_size, csize = struct.unpack_from("<HHI", data, pos)
        except struct.error as exc:
            raise MalformedAxml("truncated chunk header") from exc
        if csize < 8 or pos + csize > end:
            raise MalformedAxml("chunk size out of bounds")
        if ctype == CHUNK_STRING_POOL:
            pool = _StringPool(data, pos)
        elif ctype == CHUNK_START_ELEMENT:
            if pool is None:
                raise MalformedAxml("element before string pool")
            try:
                (_ns, name_idx, attr_start, attr_size,
                 attr_count, _id, _cls, _style) = struct.unpack_from(
                    "<IIHHHHHH", data, pos + header_size)
            except struct.error as exc:
                raise MalformedAxml("truncated element record") from exc
            elem = ET.Element(pool[name_idx])
            apos = pos + header_size + attr_start
            for _ in range(attr_count):
                try:
                    (_ans, aname_idx, raw_idx, _vsize, _res0,
                     dtype, vdata) = struct.unpack_from("<IIIHBBI", data, apos)
                except struct.error as exc:
                    raise MalformedAxml("truncated attribute record") from exc
                elem.set(pool[aname_idx], _attr_value(pool, raw_idx, dtype, vdata))
                apos += attr_size
            if stack:
                stack[-1].append(elem)
            elif root is None:
                root = elem
            else:
                raise MalformedAxml("multiple root elements")
            stack.append(elem)
        elif ctype == CHUNK_END_ELEMENT:
            if not stack:
                raise MalformedAxml("unbalanced end element")
            stack.pop()
        elif ctype in (CHUNK_START_NAMESPACE, CHUNK_END_NAMESPACE,
                       CHUNK_RESOURCE_MAP, CHUNK_CDATA):
            pass
        else:
            raise MalformedAxml("unknown chunk type 0x%04x" % ctype)
        pos += csize

    if root is None:
        raise MalformedAxml("document has no root element")
    if stack:
        raise MalformedAxml("unclosed element at end of document")
    return root
