"""Key payload codec: serialize, XOR-encrypt, run-length code, frame.

Bitstreams are 1-D ``uint8`` arrays of 0/1 values.

Payload layout, all fields big-endian and unencrypted except the body::

    magic           16  0x5354 ("ST")
    version          8  1
    index_width      8  bits per key entry
    block_size       8  block edge length
    entry_count     32  number of key entries
    secret_rows     16  secret LL height
    secret_cols     16  secret LL width
    check           32  CRC-32 of the plaintext entry bits (packed, zero-padded)
    rle_bit_length  32  length of the body in bits
    body             *  8-bit run counts of the encrypted entry bits

The header is 168 bits (21 bytes) and the body is whole bytes, so the
framed payload is byte-aligned.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass

import numpy as np

from . import _accel
from ._accel import njit
from .blockmatch import BlockGrid, BlockKey
from .errors import (
    DimensionError,
    KeyCheckError,
    KeyRangeError,
    PayloadFormatError,
    PayloadLengthError,
)

MAGIC = 0x5354
VERSION = 1
MAX_RUN = 255
COUNT_BITS = 8

HEADER_FIELDS = (
    ("magic", 16),
    ("version", 8),
    ("index_width", 8),
    ("block_size", 8),
    ("entry_count", 32),
    ("secret_rows", 16),
    ("secret_cols", 16),
    ("check", 32),
    ("rle_bit_length", 32),
)
HEADER_BITS = sum(width for _, width in HEADER_FIELDS)


@dataclass(frozen=True)
class XorKey:
    data: bytes

    def __post_init__(self):
        if not isinstance(self.data, (bytes, bytearray)):
            raise TypeError("XorKey data must be bytes")
        if len(self.data) == 0:
            raise ValueError("XOR key must not be empty")
        object.__setattr__(self, "data", bytes(self.data))

    @classmethod
    def from_hex(cls, text: str) -> "XorKey":
        text = text.strip()
        if text.lower().startswith("0x"):
            text = text[2:]
        if not text or len(text) % 2:
            raise ValueError("hex key must be a non-empty, even-length hex string")
        return cls(bytes.fromhex(text))

    def hex(self) -> str:
        return self.data.hex()


def _as_xor_key(key) -> XorKey:
    return key if isinstance(key, XorKey) else XorKey(bytes(key))


def as_bits(bits) -> np.ndarray:
    arr = np.asarray(bits, dtype=np.uint8).reshape(-1)
    if arr.size and arr.max() > 1:
        raise ValueError("bitstream values must be 0 or 1")
    return arr


def int_to_bits(values, width: int) -> np.ndarray:
    """Fixed-width big-endian bits of each value, concatenated."""
    values = np.asarray(values, dtype=np.int64).reshape(-1)
    if width == 0:
        return np.zeros(0, dtype=np.uint8)
    shifts = np.arange(width - 1, -1, -1, dtype=np.int64)
    return ((values[:, None] >> shifts) & 1).astype(np.uint8).reshape(-1)


def bits_to_int(bits, width: int) -> np.ndarray:
    bits = as_bits(bits)
    if width == 0:
        return np.zeros(0, dtype=np.int64)
    if bits.size % width:
        raise ValueError(f"{bits.size} bits do not split into {width}-bit fields")
    weights = np.int64(1) << np.arange(width - 1, -1, -1, dtype=np.int64)
    return bits.reshape(-1, width).astype(np.int64) @ weights


def serialize_key(key: BlockKey) -> np.ndarray:
    return int_to_bits(key.entries, key.cover_grid.index_width)


def keystream(key, length: int) -> np.ndarray:
    bits = np.unpackbits(np.frombuffer(_as_xor_key(key).data, dtype=np.uint8))
    return np.resize(bits, length)


def xor_crypt(bits, key) -> np.ndarray:
    """XOR with the key bytes repeated from the first bit; self-inverse."""
    bits = as_bits(bits)
    return bits ^ keystream(key, bits.size)


# -- run-length kernels -------------------------------------------------------
# Counts alternate between runs of 0 and runs of 1, starting with 0.  A run
# longer than 255 is split as 255, 0, 255, 0, ..., remainder.


def _rle_counts_numpy(bits: np.ndarray) -> np.ndarray:
    n = bits.size
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    edges = np.flatnonzero(np.diff(bits)) + 1
    starts = np.concatenate(([0], edges))
    lengths = np.diff(np.concatenate((starts, [n])))
    pieces = (lengths + MAX_RUN - 1) // MAX_RUN
    seg = 2 * pieces - 1
    seg_end = np.cumsum(seg)
    total = int(seg_end[-1])
    pos = np.arange(total) - np.repeat(seg_end - seg, seg)
    out = np.full(total, MAX_RUN, dtype=np.int64)
    out[pos % 2 == 1] = 0
    out[seg_end - 1] = lengths - MAX_RUN * (pieces - 1)
    if bits[0] == 1:
        out = np.concatenate(([0], out))
    return out


@njit
def _rle_counts_loop(bits):
    n = bits.size
    out = np.empty(2 * n + 1, dtype=np.int64)
    m = 0
    if n == 0:
        return out[:0]
    if bits[0] == 1:
        out[m] = 0
        m += 1
    i = 0
    while i < n:
        j = i
        while j < n and bits[j] == bits[i]:
            j += 1
        run = j - i
        while run > 255:
            out[m] = 255
            out[m + 1] = 0
            m += 2
            run -= 255
        out[m] = run
        m += 1
        i = j
    return out[:m]


def _rle_expand_numpy(counts: np.ndarray) -> np.ndarray:
    values = (np.arange(counts.size) % 2).astype(np.uint8)
    return np.repeat(values, counts)


@njit
def _rle_expand_loop(counts):
    total = 0
    for c in counts:
        total += c
    out = np.empty(total, dtype=np.uint8)
    pos = 0
    for k in range(counts.size):
        bit = k % 2
        for _ in range(counts[k]):
            out[pos] = bit
            pos += 1
    return out


def rle_counts(bits) -> np.ndarray:
    bits = as_bits(bits)
    if _accel.USE_NUMBA:
        return _rle_counts_loop(bits)
    return _rle_counts_numpy(bits)


def rle_encode(bits) -> np.ndarray:
    """Run-length code a bitstream into a stream of 8-bit counts."""
    return int_to_bits(rle_counts(bits), COUNT_BITS)


def rle_decode(bits, original_len: int) -> np.ndarray:
    bits = as_bits(bits)
    if bits.size % COUNT_BITS:
        raise PayloadLengthError(f"run stream of {bits.size} bits is not a whole number of counts")
    counts = bits_to_int(bits, COUNT_BITS)
    if int(counts.sum()) != original_len:
        raise PayloadLengthError(f"runs cover {int(counts.sum())} bits, expected {original_len}")
    if _accel.USE_NUMBA:
        return _rle_expand_loop(counts)
    return _rle_expand_numpy(counts)


# -- framing ------------------------------------------------------------------


def _check_value(bits: np.ndarray) -> int:
    return zlib.crc32(np.packbits(bits).tobytes()) & 0xFFFFFFFF


@dataclass(frozen=True, eq=False)
class KeyPayload:
    index_width: int
    block_size: int
    entry_count: int
    secret_rows: int
    secret_cols: int
    check: int
    body: np.ndarray
    magic: int = MAGIC
    version: int = VERSION

    @property
    def rle_bit_length(self) -> int:
        return int(self.body.size)

    @property
    def bit_length(self) -> int:
        return HEADER_BITS + self.rle_bit_length

    def header_bits(self) -> np.ndarray:
        values = {name: getattr(self, name) for name, _ in HEADER_FIELDS}
        return np.concatenate([int_to_bits([values[name]], width) for name, width in HEADER_FIELDS])

    def to_bits(self) -> np.ndarray:
        return np.concatenate((self.header_bits(), as_bits(self.body)))

    def to_bytes(self) -> bytes:
        return np.packbits(self.to_bits()).tobytes()

    @classmethod
    def from_bits(cls, bits) -> "KeyPayload":
        bits = as_bits(bits)
        header = read_header(bits)
        end = HEADER_BITS + header["rle_bit_length"]
        if bits.size < end:
            raise PayloadLengthError(f"payload declares {end} bits but only {bits.size} are available")
        fields = {k: v for k, v in header.items() if k != "rle_bit_length"}
        return cls(body=bits[HEADER_BITS:end].copy(), **fields)

    @classmethod
    def from_bytes(cls, data: bytes) -> "KeyPayload":
        return cls.from_bits(np.unpackbits(np.frombuffer(data, dtype=np.uint8)))

    def __eq__(self, other):
        if not isinstance(other, KeyPayload):
            return NotImplemented
        return np.array_equal(self.to_bits(), other.to_bits())


def read_header(bits) -> dict:
    """Decode and validate the fixed-size header at the start of ``bits``."""
    bits = as_bits(bits)
    if bits.size < HEADER_BITS:
        raise PayloadFormatError(f"need {HEADER_BITS} header bits, got {bits.size}")
    header = {}
    pos = 0
    for name, width in HEADER_FIELDS:
        header[name] = int(bits_to_int(bits[pos : pos + width], width)[0])
        pos += width
    if header["magic"] != MAGIC:
        raise PayloadFormatError(f"bad magic 0x{header['magic']:04x}; no key payload present")
    if header["version"] != VERSION:
        raise PayloadFormatError(f"unsupported payload version {header['version']}")
    return header


def build_payload(key: BlockKey, xk) -> KeyPayload:
    plain = serialize_key(key)
    body = rle_encode(xor_crypt(plain, xk))
    sg = key.secret_grid
    return KeyPayload(
        index_width=key.cover_grid.index_width,
        block_size=sg.block_size,
        entry_count=len(key),
        secret_rows=sg.rows,
        secret_cols=sg.cols,
        check=_check_value(plain),
        body=body,
    )


def parse_payload(payload: KeyPayload, xk, cover_grid: BlockGrid, secret_grid: BlockGrid | None = None) -> BlockKey:
    """Invert :func:`build_payload`.

    Raises a :class:`PayloadFormatError` for header or geometry problems,
    :class:`PayloadLengthError` when the run counts do not add up,
    :class:`KeyCheckError` when decryption yields a key failing its
    checksum (wrong XOR key), and :class:`KeyRangeError` for entries
    outside the cover grid.
    """
    if payload.magic != MAGIC:
        raise PayloadFormatError(f"bad magic 0x{payload.magic:04x}")
    if payload.version != VERSION:
        raise PayloadFormatError(f"unsupported payload version {payload.version}")
    if payload.block_size != cover_grid.block_size:
        raise PayloadFormatError(
            f"payload block size {payload.block_size} does not match cover grid ({cover_grid.block_size})"
        )
    if payload.index_width != cover_grid.index_width:
        raise PayloadFormatError(
            f"payload index width {payload.index_width} does not match cover grid ({cover_grid.index_width})"
        )
    try:
        sgrid = BlockGrid(payload.secret_rows, payload.secret_cols, payload.block_size)
    except DimensionError as exc:
        raise PayloadFormatError(f"payload secret geometry is invalid: {exc}") from None
    if sgrid.n_blocks != payload.entry_count:
        raise PayloadFormatError(
            f"entry count {payload.entry_count} disagrees with a {sgrid.rows}x{sgrid.cols} secret grid"
        )
    if secret_grid is not None and secret_grid != sgrid:
        raise PayloadFormatError(f"payload secret grid {sgrid} differs from expected {secret_grid}")

    cipher = rle_decode(payload.body, payload.entry_count * payload.index_width)
    plain = xor_crypt(cipher, xk)
    if _check_value(plain) != payload.check:
        raise KeyCheckError("decrypted key fails its checksum; wrong XOR key?")
    if payload.index_width == 0:
        entries = np.zeros(payload.entry_count, dtype=np.int64)
    else:
        entries = bits_to_int(plain, payload.index_width)
    if entries.size and entries.max() >= cover_grid.n_blocks:
        raise KeyRangeError(f"key entry {int(entries.max())} outside cover grid of {cover_grid.n_blocks} blocks")
    return BlockKey(entries=entries, secret_grid=sgrid, cover_grid=cover_grid)
