"""Hide two grayscale images in one colour cover.

Only block-matching keys travel inside the cover: each secret's wavelet
LL band is approximated by blocks of the cover's chroma LL band, and the
list of block addresses is encrypted, run-length coded and written into
the LSBs of the chroma high-frequency subbands.
"""

from .blockmatch import BlockGrid, BlockKey, block_rmse, build_key, partition, reconstruct_ll
from .colorspace import BT601, REVERSIBLE, YccImage, rgb_to_ycc, ycc_to_rgb
from .embed import capacity, embed_bits, extract_bits
from .errors import (
    CapacityError,
    DimensionError,
    KeyCheckError,
    KeyRangeError,
    ModeMismatchError,
    PayloadError,
    PayloadFormatError,
    PayloadLengthError,
    SelfCheckError,
    StegoError,
)
from .iwt import SubbandSet, iwt_forward, iwt_inverse
from .keycodec import KeyPayload, XorKey, build_payload, parse_payload, rle_decode, rle_encode, serialize_key, xor_crypt
from .metrics import QualityReport, mse, psnr, quality_report
from .pipeline import DecodeResult, EncodeResult, decode, encode

__version__ = "0.1.0"
