"""Canonical binary encoding shared by every artifact.

Layout::

    b"SKL1" | tag (1 byte) | field count (u32 LE) | { length (u32 LE) | bytes }*

Integers inside fields are unsigned little-endian, minimal length (zero is the
empty string). Signed matrices use the layout of :func:`encode_matrix`.
"""
from __future__ import annotations

import hashlib
import struct

import numpy as np

MAGIC = b"SKL1"

#: type tags, one byte each
TAGS = {
    "collapsed": 0x01,
    "superposed": 0x02,
    "hadamard_outcome": 0x03,
    "pke_ek": 0x10,
    "pke_dk": 0x11,
    "pke_ct": 0x12,
    "skl_pk": 0x20,
    "skl_dk": 0x21,
    "skl_dvk": 0x22,
    "skl_cert": 0x23,
    "skl_ct": 0x24,
    "ind_ct": 0x25,
    "teprf_key": 0x30,
    "upf_msk": 0x31,
    "upf_sk": 0x32,
    "upf_dvk": 0x33,
    "upf_cert": 0x34,
    "matrix": 0x40,
    "cs_vk": 0x50,
    "cs_key": 0x51,
    "cs_sig": 0x52,
    "ds_sk": 0x60,
    "ds_vk": 0x61,
    "ds_dvk": 0x62,
    "ds_sig": 0x63,
    "ds_cert": 0x64,
    "bb84": 0x70,
}
_NAMES = {v: k for k, v in TAGS.items()}


class DecodeError(ValueError):
    """Input is not a well-formed canonical encoding."""


def pack(tag: str, fields) -> bytes:
    out = [MAGIC, bytes([TAGS[tag]]), struct.pack("<I", len(fields))]
    for f in fields:
        f = bytes(f)
        out.append(struct.pack("<I", len(f)))
        out.append(f)
    return b"".join(out)


def unpack(data: bytes, tag: str | None = None) -> tuple[str, list[bytes]]:
    data = bytes(data)
    if len(data) < 9 or data[:4] != MAGIC:
        raise DecodeError("bad magic")
    name = _NAMES.get(data[4])
    if name is None:
        raise DecodeError(f"unknown tag {data[4]:#x}")
    if tag is not None and name != tag:
        raise DecodeError(f"expected {tag}, found {name}")
    (count,) = struct.unpack_from("<I", data, 5)
    pos, fields = 9, []
    for _ in range(count):
        if pos + 4 > len(data):
            raise DecodeError("truncated field header")
        (ln,) = struct.unpack_from("<I", data, pos)
        pos += 4
        if pos + ln > len(data):
            raise DecodeError("truncated field")
        fields.append(data[pos:pos + ln])
        pos += ln
    if pos != len(data):
        raise DecodeError("trailing bytes")
    return name, fields


def enc_int(x: int) -> bytes:
    if x < 0:
        raise ValueError("enc_int takes non-negative integers")
    return x.to_bytes((x.bit_length() + 7) // 8, "little")


def dec_int(b: bytes) -> int:
    return int.from_bytes(b, "little")


def enc_sint(x: int) -> bytes:
    """Zig-zag signed integer."""
    return enc_int(2 * x if x >= 0 else -2 * x - 1)


def dec_sint(b: bytes) -> int:
    z = dec_int(b)
    return z // 2 if z % 2 == 0 else -(z + 1) // 2


def entry_width(q: int) -> int:
    """Bytes per signed entry of a matrix mod q: 8 when q < 2**62, else wider."""
    if q < (1 << 62):
        return 8
    return (q.bit_length() + 1 + 7) // 8


def encode_matrix(M, q: int) -> bytes:
    """Header (rows, cols, q) then row-major signed little-endian entries."""
    M = np.asarray(M)
    if M.ndim == 1:
        M = M.reshape(1, -1)
    rows, cols = M.shape
    w = entry_width(q)
    if w == 8:
        body = np.ascontiguousarray(M.astype(np.int64)).astype("<i8").tobytes()
    else:
        body = b"".join(int(v).to_bytes(w, "little", signed=True) for v in M.ravel())
    return pack("matrix", [enc_int(rows), enc_int(cols), enc_int(q), body])


def decode_matrix(data: bytes) -> tuple[np.ndarray, int]:
    _, (r, c, qb, body) = unpack(data, "matrix")
    rows, cols, q = dec_int(r), dec_int(c), dec_int(qb)
    w = entry_width(q)
    if len(body) != rows * cols * w:
        raise DecodeError("matrix body length mismatch")
    if w == 8:
        M = np.frombuffer(body, dtype="<i8").astype(np.int64).reshape(rows, cols)
    else:
        vals = [int.from_bytes(body[i:i + w], "little", signed=True) for i in range(0, len(body), w)]
        M = np.array(vals, dtype=object).reshape(rows, cols)
    return M, q


def digest(data: bytes, n: int = 8) -> str:
    """Short hex digest for human-readable traces."""
    return hashlib.sha256(data).hexdigest()[: 2 * n]
