"""MSE and PSNR.

For RGB inputs the mean is pooled over all samples of all channels, so
each image pair gets a single number.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError

PEAK = 255


@dataclass(frozen=True)
class QualityReport:
    mse: float
    psnr_db: float  # math.inf when the inputs are identical
    sample_count: int
    peak: int = PEAK

    def psnr_text(self, digits: int = 2) -> str:
        return "inf" if math.isinf(self.psnr_db) else f"{self.psnr_db:.{digits}f}"


def _pair(x, x2) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(x, dtype=np.float64)
    b = np.asarray(x2, dtype=np.float64)
    if a.shape != b.shape:
        raise DimensionError(f"cannot compare shapes {a.shape} and {b.shape}")
    if a.size == 0:
        raise DimensionError("cannot compare empty inputs")
    return a, b


def mse(x, x2) -> float:
    a, b = _pair(x, x2)
    return float(np.mean((a - b) ** 2))


def psnr_from_mse(value: float, peak: int = PEAK) -> float:
    if value == 0:
        return math.inf
    return 10.0 * math.log10(peak * peak / value)


def psnr(x, x2, peak: int = PEAK) -> float:
    if peak < 1:
        raise ValueError("peak value must be at least 1")
    return psnr_from_mse(mse(x, x2), peak)


def quality_report(reference, test, peak: int = PEAK) -> QualityReport:
    value = mse(reference, test)
    return QualityReport(mse=value, psnr_db=psnr_from_mse(value, peak), sample_count=int(np.size(reference)), peak=peak)
