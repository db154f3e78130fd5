"""RGB <-> luma/chroma conversion.

Two modes are supported:

``reversible``
    The integer reversible colour transform (as in JPEG 2000).  Chroma is
    stored signed, without the usual +128 bias, so the round trip is exact.
``bt601``
    Full-range ITU-R BT.601 YCbCr with round-half-away-from-zero and
    clamping to [0, 255].  Lossy by up to a couple of code values.

RGB images are ``(H, W, 3)`` arrays with samples in [0, 255].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, ModeMismatchError

REVERSIBLE = "reversible"
BT601 = "bt601"
MODES = (REVERSIBLE, BT601)

# Offset that puts chroma in the conventional 128-centred range.
CHROMA_BIAS = {REVERSIBLE: 128, BT601: 0}

_FWD_601 = np.array(
    [
        [0.299, 0.587, 0.114],
        [-0.168736, -0.331264, 0.5],
        [0.5, -0.418688, -0.081312],
    ]
)
_INV_601 = np.array(
    [
        [1.0, 0.0, 1.402],
        [1.0, -0.344136, -0.714136],
        [1.0, 1.772, 0.0],
    ]
)


@dataclass(frozen=True)
class YccImage:
    y: np.ndarray
    cb: np.ndarray
    cr: np.ndarray
    mode: str

    def __post_init__(self):
        if not (self.y.shape == self.cb.shape == self.cr.shape):
            raise DimensionError("y, cb and cr planes must share dimensions")
        _check_mode(self.mode)

    @property
    def shape(self) -> tuple[int, int]:
        return self.y.shape


def _check_mode(mode: str) -> None:
    if mode not in MODES:
        raise ValueError(f"unknown colour mode {mode!r}; expected one of {MODES}")


def as_rgb(img) -> np.ndarray:
    """Validate an RGB image and return it as a widened int64 array."""
    arr = np.asarray(img)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise DimensionError(f"expected an (H, W, 3) RGB image, got shape {arr.shape}")
    if arr.shape[0] == 0 or arr.shape[1] == 0:
        raise DimensionError("RGB image is empty")
    arr = arr.astype(np.int64)
    if arr.min() < 0 or arr.max() > 255:
        raise ValueError("RGB samples must lie in [0, 255]")
    return arr


def round_half_away(x: np.ndarray) -> np.ndarray:
    return (np.sign(x) * np.floor(np.abs(x) + 0.5)).astype(np.int64)


def rgb_to_ycc(img, mode: str = REVERSIBLE) -> YccImage:
    """Convert an RGB image to luma/chroma planes."""
    _check_mode(mode)
    rgb = as_rgb(img)
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    if mode == REVERSIBLE:
        y = (r + 2 * g + b) // 4
        return YccImage(y=y, cb=b - g, cr=r - g, mode=mode)

    ycc = rgb.astype(np.float64) @ _FWD_601.T
    ycc[..., 1:] += 128.0
    ycc = np.clip(round_half_away(ycc), 0, 255)
    return YccImage(y=ycc[..., 0], cb=ycc[..., 1], cr=ycc[..., 2], mode=mode)


def ycc_to_rgb(img: YccImage, mode: str | None = None) -> tuple[np.ndarray, int]:
    """Convert luma/chroma planes back to RGB.

    Returns the ``(H, W, 3)`` uint8 image and the number of samples that
    had to be clamped into [0, 255].  In reversible mode a non-zero count
    means the round trip is no longer exact.
    """
    if mode is None:
        mode = img.mode
    _check_mode(mode)
    if img.mode != mode:
        raise ModeMismatchError(f"image is in {img.mode!r} mode, conversion requested {mode!r}")

    y = np.asarray(img.y, dtype=np.int64)
    cb = np.asarray(img.cb, dtype=np.int64)
    cr = np.asarray(img.cr, dtype=np.int64)
    if mode == REVERSIBLE:
        g = y - (cb + cr) // 4
        rgb = np.stack([cr + g, g, cb + g], axis=-1)
    else:
        ycc = np.stack([y, cb - 128, cr - 128], axis=-1).astype(np.float64)
        rgb = round_half_away(ycc @ _INV_601.T)

    clamped = int(np.count_nonzero((rgb < 0) | (rgb > 255)))
    return np.clip(rgb, 0, 255).astype(np.uint8), clamped
