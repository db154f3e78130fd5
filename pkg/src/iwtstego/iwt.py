"""Single-level 2-D integer wavelet transform.

Each 2x2 anchor at (2i, 2j) with samples

    a = I[2i, 2j]      c = I[2i, 2j+1]
    b = I[2i+1, 2j]    d = I[2i+1, 2j+1]

maps to

    LL = floor((a + b) / 2)   HL = b - a   LH = c - a   HH = d - a

The first index is the row.  Floors are mathematical floors, so negative
samples are handled exactly and the transform is a bijection on integer
planes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError


@dataclass(frozen=True)
class SubbandSet:
    ll: np.ndarray
    lh: np.ndarray
    hl: np.ndarray
    hh: np.ndarray

    def __post_init__(self):
        shapes = {self.ll.shape, self.lh.shape, self.hl.shape, self.hh.shape}
        if len(shapes) != 1:
            raise DimensionError(f"subbands disagree in shape: {sorted(shapes)}")
        if self.ll.ndim != 2:
            raise DimensionError("subbands must be 2-D")

    @property
    def shape(self) -> tuple[int, int]:
        return self.ll.shape

    @property
    def origin_shape(self) -> tuple[int, int]:
        rows, cols = self.ll.shape
        return 2 * rows, 2 * cols

    def high(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """High-frequency bands in carrier scan order."""
        return self.lh, self.hl, self.hh

    def replace(self, **bands) -> "SubbandSet":
        fields = {"ll": self.ll, "lh": self.lh, "hl": self.hl, "hh": self.hh}
        fields.update(bands)
        return SubbandSet(**fields)

    def copy(self) -> "SubbandSet":
        return SubbandSet(self.ll.copy(), self.lh.copy(), self.hl.copy(), self.hh.copy())


def as_plane(plane) -> np.ndarray:
    arr = np.asarray(plane)
    if arr.ndim != 2:
        raise DimensionError(f"expected a 2-D plane, got shape {arr.shape}")
    if not np.issubdtype(arr.dtype, np.integer):
        if arr.size and not np.array_equal(arr, np.round(arr)):
            raise ValueError("plane must hold integer samples")
    return arr.astype(np.int64)


def iwt_forward(plane) -> SubbandSet:
    """Forward transform of an even-sized integer plane."""
    p = as_plane(plane)
    rows, cols = p.shape
    if rows == 0 or cols == 0 or rows % 2 or cols % 2:
        raise DimensionError(f"IWT needs positive even dimensions, got {rows}x{cols}")
    a = p[0::2, 0::2]
    b = p[1::2, 0::2]
    c = p[0::2, 1::2]
    d = p[1::2, 1::2]
    return SubbandSet(ll=(a + b) // 2, lh=c - a, hl=b - a, hh=d - a)


def iwt_inverse(bands: SubbandSet) -> np.ndarray:
    """Exact inverse of :func:`iwt_forward`."""
    ll = bands.ll.astype(np.int64)
    hl = bands.hl.astype(np.int64)
    a = ll - hl // 2
    out = np.empty(bands.origin_shape, dtype=np.int64)
    out[0::2, 0::2] = a
    out[1::2, 0::2] = a + hl
    out[0::2, 1::2] = a + bands.lh
    out[1::2, 1::2] = a + bands.hh
    return out


def lowpass_only(ll) -> SubbandSet:
    """Subband set carrying ``ll`` with all high bands zeroed."""
    ll = as_plane(ll)
    zero = np.zeros_like(ll)
    return SubbandSet(ll=ll, lh=zero, hl=zero.copy(), hh=zero.copy())
