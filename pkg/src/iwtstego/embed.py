"""LSB substitution in the high-frequency subbands.

Carrier scan order: every coefficient of LH in row-major order, then HL,
then HH, in the least significant bit plane; when ``planes > 1`` the same
scan repeats for bit plane 1, 2, ...  A stream that fits in plane 0 is
therefore laid out identically whatever ``planes`` is.

An optional boolean ``mask`` of subband shape restricts the scan to the
selected positions (the same positions in all three bands).

Bit ``k`` of a signed coefficient ``v`` is ``floor(v / 2**k) mod 2``
with a non-negative remainder, i.e. two's-complement bit ``k``; so in
plane 0 embedding computes ``2 * floor(v / 2) + bit``.  LL is never
touched.
"""

from __future__ import annotations

import numpy as np

from .errors import CapacityError, DimensionError
from .iwt import SubbandSet
from .keycodec import as_bits


def _positions(bands: SubbandSet, mask) -> np.ndarray:
    """Flat indices into the stacked (LH, HL, HH) array, in scan order."""
    rows, cols = bands.shape
    if mask is None:
        return np.arange(3 * rows * cols)
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != bands.shape:
        raise DimensionError(f"mask shape {mask.shape} does not match subbands {bands.shape}")
    return np.flatnonzero(np.tile(mask.reshape(-1), 3))


def capacity(bands: SubbandSet, planes: int = 1, mask=None) -> int:
    """Number of payload bits the high bands can carry."""
    if planes < 1:
        raise ValueError("planes must be at least 1")
    return planes * int(_positions(bands, mask).size)


def embed_bits(bands: SubbandSet, bits, planes: int = 1, mask=None) -> SubbandSet:
    bits = as_bits(bits)
    cap = capacity(bands, planes, mask)
    if bits.size > cap:
        raise CapacityError(f"payload of {bits.size} bits exceeds carrier capacity of {cap} bits")
    high = np.stack(bands.high()).astype(np.int64).reshape(-1)
    pos = _positions(bands, mask)
    per_plane = pos.size
    for plane in range(planes):
        chunk = bits[plane * per_plane : (plane + 1) * per_plane].astype(np.int64)
        if chunk.size == 0:
            break
        idx = pos[: chunk.size]
        v = high[idx]
        high[idx] = v - (((v >> plane) & 1) << plane) + (chunk << plane)
    lh, hl, hh = high.reshape(3, *bands.shape)
    return SubbandSet(ll=bands.ll.copy(), lh=lh, hl=hl, hh=hh)


def extract_bits(bands: SubbandSet, count: int, planes: int = 1, mask=None, start: int = 0) -> np.ndarray:
    """Read ``count`` carrier bits beginning at scan position ``start``."""
    cap = capacity(bands, planes, mask)
    if count < 0 or start < 0 or start + count > cap:
        raise CapacityError(f"cannot read bits [{start}, {start + count}) from a carrier of {cap} bits")
    high = np.stack(bands.high()).astype(np.int64).reshape(-1)
    pos = _positions(bands, mask)
    t = np.arange(start, start + count)
    plane, slot = np.divmod(t, pos.size) if pos.size else (t, t)
    return ((high[pos[slot]] >> plane) & 1).astype(np.uint8)
