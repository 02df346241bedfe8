"""Protobuf wire-format primitives: the handful of writers and readers the
model serializer needs. No schema knowledge lives here."""

from __future__ import annotations

from .errors import ExportFormatError

WIRE_VARINT = 0
WIRE_64BIT = 1
WIRE_LEN = 2
WIRE_32BIT = 5


def write_varint(out: bytearray, value: int) -> None:
    if value < 0:
        # int64 fields carry negatives as 10-byte two's-complement varints
        value += 1 << 64
    while True:
        byte = value & 0x7F
        value >>= 7
        if value:
            out.append(byte | 0x80)
        else:
            out.append(byte)
            return


def write_key(out: bytearray, field: int, wtype: int) -> None:
    write_varint(out, (field << 3) | wtype)


def write_varint_field(out: bytearray, field: int, value: int) -> None:
    write_key(out, field, WIRE_VARINT)
    write_varint(out, value)


def write_bytes_field(out: bytearray, field: int, payload: bytes) -> None:
    write_key(out, field, WIRE_LEN)
    write_varint(out, len(payload))
    out.extend(payload)


def write_string_field(out: bytearray, field: int, text: str) -> None:
    write_bytes_field(out, field, text.encode("utf-8"))


def write_fixed32_field(out: bytearray, field: int, payload: bytes) -> None:
    if len(payload) != 4:
        raise ValueError("fixed32 payload must be 4 bytes")
    write_key(out, field, WIRE_32BIT)
    out.extend(payload)


def read_varint(buf, pos: int):
    result = 0
    shift = 0
    while True:
        if pos >= len(buf):
            raise ExportFormatError("truncated varint")
        byte = buf[pos]
        pos += 1
        result |= (byte & 0x7F) << shift
        if not byte & 0x80:
            return result, pos
        shift += 7
        if shift > 70:
            raise ExportFormatError("varint too long")


def signed64(value: int) -> int:
    return value - (1 << 64) if value >= (1 << 63) else value


def iter_fields(buf):
    """Yield (field_number, wire_type, value) over one serialized message."""
    pos = 0
    while pos < len(buf):
        key, pos = read_varint(buf, pos)
        fnum, wtype = key >> 3, key & 0x7
        if wtype == WIRE_VARINT:
            val, pos = read_varint(buf, pos)
        elif wtype == WIRE_64BIT:
            val, pos = bytes(buf[pos:pos + 8]), pos + 8
        elif wtype == WIRE_LEN:
            length, pos = read_varint(buf, pos)
            if pos + length > len(buf):
                raise ExportFormatError("truncated length-delimited field")
            val, pos = buf[pos:pos + length], pos + length
        elif wtype == WIRE_32BIT:
            val, pos = bytes(buf[pos:pos + 4]), pos + 4
        else:
            raise ExportFormatError(f"unsupported wire type {wtype}")
        yield fnum, wtype, val


def packed_int64s(val, wtype) -> list[int]:
    if wtype == WIRE_VARINT:
        return [signed64(val)]
    out = []
    pos = 0
    while pos < len(val):
        v, pos = read_varint(val, pos)
        out.append(signed64(v))
    return out
