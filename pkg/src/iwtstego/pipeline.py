"""Encode two grayscale secrets into a colour cover, and decode them again.

Encoding
    1. cover -> Y, Cb, Cr
    2. one-level IWT of Cb, Cr and of both secrets
    3. key K1 matches secret-1 LL blocks against Cb LL, K2 secret-2 against Cr LL
    4. each key is framed into a payload (serialize, XOR, run-length code)
    5. payload 1 goes into the LSBs of the Cb high bands, payload 2 into Cr
    6. inverse IWT, back to RGB, then decode the result as a self-check

Decoding reads the payloads back from the chroma high bands, parses the
keys, copies the addressed chroma LL blocks into a secret LL estimate and
inverts the IWT with the secret's high bands set to zero.

Block matching runs against chroma LL in the conventional 128-centred
range (``CHROMA_BIAS``), which is where grayscale secrets live.

In reversible mode only blocks that can take any low-bit pattern without
pushing an RGB sample out of [0, 255] carry payload bits
(:func:`clip_safe_mask`).  The mask depends only on quantities embedding
leaves intact (Y, chroma LL, and the high-band coefficients with their
low ``planes`` bits dropped), so the decoder recomputes it exactly.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .blockmatch import BLOCK_SIZE, BlockKey, build_key, partition, reconstruct_ll
from .colorspace import BT601, CHROMA_BIAS, REVERSIBLE, YccImage, as_rgb, rgb_to_ycc, ycc_to_rgb
from .embed import capacity, embed_bits, extract_bits
from .errors import CapacityError, DimensionError, PayloadError, PayloadLengthError, SelfCheckError
from .iwt import SubbandSet, as_plane, iwt_forward, iwt_inverse, lowpass_only
from .keycodec import HEADER_BITS, KeyPayload, build_payload, parse_payload, read_header
from .metrics import QualityReport, quality_report

log = logging.getLogger(__name__)

DEFAULT_PLANES = 2
CHANNELS = ("cb", "cr")


@dataclass(frozen=True)
class ChannelDigest:
    channel: str
    entry_count: int
    payload_bits: int
    capacity_bits: int
    carrier_positions: int

    @property
    def planes_used(self) -> int:
        if self.payload_bits == 0:
            return 0
        per_plane = 3 * self.carrier_positions
        return -(-self.payload_bits // per_plane)


@dataclass(frozen=True)
class EncodeResult:
    stego: np.ndarray
    report: QualityReport
    keys: tuple[BlockKey, BlockKey]
    channels: tuple[ChannelDigest, ChannelDigest]
    verified: bool
    clamped: int = 0
    mode: str = REVERSIBLE

    @property
    def status(self) -> str:
        return "verified" if self.verified else "unverified"


@dataclass(frozen=True)
class DecodeResult:
    secret1: np.ndarray
    secret2: np.ndarray
    keys: tuple[BlockKey, BlockKey]
    diagnostics: dict = field(default_factory=dict)


def chroma_dictionary(ll: np.ndarray, mode: str) -> np.ndarray:
    """Chroma LL shifted into the range block matching compares against."""
    return ll + CHROMA_BIAS[mode]


def _chroma_ranges(bands: SubbandSet, planes: int) -> tuple[np.ndarray, np.ndarray]:
    """Per-pixel bounds of the reconstructed plane over every low-bit pattern."""
    step = 1 << planes

    def span(v):
        lo = (v >> planes) << planes
        return lo, lo + step - 1

    ll = bands.ll
    hl_lo, hl_hi = span(bands.hl)
    lh_lo, lh_hi = span(bands.lh)
    hh_lo, hh_hi = span(bands.hh)
    # a = LL - floor(HL/2) falls with HL; b = a + HL = LL + ceil(HL/2) rises
    a_lo, a_hi = ll - hl_hi // 2, ll - hl_lo // 2
    b_lo, b_hi = ll - (-hl_lo) // 2, ll - (-hl_hi) // 2
    lo = np.empty(bands.origin_shape, dtype=np.int64)
    hi = np.empty_like(lo)
    for (r, c), (x_lo, x_hi) in {
        (0, 0): (a_lo, a_hi),
        (1, 0): (b_lo, b_hi),
        (0, 1): (a_lo + lh_lo, a_hi + lh_hi),
        (1, 1): (a_lo + hh_lo, a_hi + hh_hi),
    }.items():
        lo[r::2, c::2] = x_lo
        hi[r::2, c::2] = x_hi
    return lo, hi


def clip_safe_mask(y: np.ndarray, cb: SubbandSet, cr: SubbandSet, planes: int = DEFAULT_PLANES) -> np.ndarray:
    """Subband positions whose low ``planes`` bits may change without RGB clipping.

    Uses the reversible colour transform: G = Y - floor((Cb + Cr)/4),
    B = Cb + G, R = Cr + G.  G falls in both chroma values, B rises in Cb
    and falls in Cr, R the reverse, so the extremes sit at interval ends.
    """
    cb_lo, cb_hi = _chroma_ranges(cb, planes)
    cr_lo, cr_hi = _chroma_ranges(cr, planes)
    y = np.asarray(y, dtype=np.int64)
    g_lo = y - (cb_hi + cr_hi) // 4
    g_hi = y - (cb_lo + cr_lo) // 4
    b_lo = y + cb_lo - (cb_lo + cr_hi) // 4
    b_hi = y + cb_hi - (cb_hi + cr_lo) // 4
    r_lo = y + cr_lo - (cr_lo + cb_hi) // 4
    r_hi = y + cr_hi - (cr_hi + cb_lo) // 4
    ok = (g_lo >= 0) & (g_hi <= 255) & (b_lo >= 0) & (b_hi <= 255) & (r_lo >= 0) & (r_hi <= 255)
    rows, cols = cb.shape
    return ok.reshape(rows, 2, cols, 2).all(axis=(1, 3))


def _carrier_mask(ycc: YccImage, cb: SubbandSet, cr: SubbandSet, planes: int):
    if ycc.mode == REVERSIBLE:
        return clip_safe_mask(ycc.y, cb, cr, planes)
    return None


def _check_cover(rgb: np.ndarray) -> None:
    rows, cols = rgb.shape[:2]
    unit = 2 * BLOCK_SIZE
    if rows % unit or cols % unit:
        raise DimensionError(f"cover dimensions must be multiples of {unit}, got {rows}x{cols}")


def prepare_secret(secret) -> np.ndarray:
    s = as_plane(secret)
    rows, cols = s.shape
    unit = 2 * BLOCK_SIZE
    if rows == 0 or cols == 0 or rows % unit or cols % unit:
        raise DimensionError(f"secret dimensions must be positive multiples of {unit}, got {rows}x{cols}")
    if s.min() < 0 or s.max() > 255:
        raise ValueError("secret samples must lie in [0, 255]")
    return s


def secret_from_ll(ll: np.ndarray) -> np.ndarray:
    """Grayscale image from an LL estimate, high bands zeroed, saturated to [0, 255]."""
    return np.clip(iwt_inverse(lowpass_only(ll)), 0, 255).astype(np.uint8)


def _read_payloads(ycc: YccImage, planes: int):
    bands = {"cb": iwt_forward(ycc.cb), "cr": iwt_forward(ycc.cr)}
    mask = _carrier_mask(ycc, bands["cb"], bands["cr"], planes)
    cap = capacity(bands["cb"], planes, mask)
    payloads = {}
    for ch in CHANNELS:
        if cap < HEADER_BITS:
            raise CapacityError(f"{ch} carrier holds {cap} bits, fewer than a payload header")
        header = read_header(extract_bits(bands[ch], HEADER_BITS, planes, mask))
        total = HEADER_BITS + header["rle_bit_length"]
        if total > cap:
            raise PayloadLengthError(f"{ch} payload declares {total} bits, carrier holds {cap}")
        payloads[ch] = KeyPayload.from_bits(extract_bits(bands[ch], total, planes, mask))
    return bands, payloads, cap


def decode(stego, xk, mode: str = REVERSIBLE, planes: int = DEFAULT_PLANES) -> DecodeResult:
    """Recover both secrets from a stego image."""
    rgb = as_rgb(stego)
    _check_cover(rgb)
    ycc = rgb_to_ycc(rgb, mode)
    bands, payloads, cap = _read_payloads(ycc, planes)
    keys, secrets, diag = [], [], {"mode": mode, "planes": planes, "capacity_bits": cap}
    for ch in CHANNELS:
        dictionary = chroma_dictionary(bands[ch].ll, mode)
        key = parse_payload(payloads[ch], xk, partition(dictionary))
        keys.append(key)
        secrets.append(secret_from_ll(reconstruct_ll(key, dictionary)))
        diag[ch] = {"status": "ok", "payload_bits": payloads[ch].bit_length, "entries": len(key)}
    return DecodeResult(secret1=secrets[0], secret2=secrets[1], keys=tuple(keys), diagnostics=diag)


def encode(
    cover,
    secret1,
    secret2,
    xk,
    mode: str = REVERSIBLE,
    planes: int = DEFAULT_PLANES,
    method: str | None = None,
) -> EncodeResult:
    """Hide the block-matching keys of two secrets in ``cover``.

    Raises :class:`CapacityError` before touching the cover when either
    payload does not fit, and :class:`SelfCheckError` when the produced
    stego image does not decode back to the same payloads (expected in
    ``bt601`` mode, where colour rounding scrambles the LSBs).
    """
    rgb = as_rgb(cover)
    _check_cover(rgb)
    secrets = (prepare_secret(secret1), prepare_secret(secret2))

    ycc = rgb_to_ycc(rgb, mode)
    bands = {"cb": iwt_forward(ycc.cb), "cr": iwt_forward(ycc.cr)}
    keys = tuple(
        build_key(iwt_forward(s).ll, chroma_dictionary(bands[ch].ll, mode), method=method)
        for s, ch in zip(secrets, CHANNELS)
    )
    payloads = [build_payload(k, xk) for k in keys]

    mask = _carrier_mask(ycc, bands["cb"], bands["cr"], planes)
    cap = capacity(bands["cb"], planes, mask)
    positions = cap // (3 * planes)
    for ch, p in zip(CHANNELS, payloads):
        if p.bit_length > cap:
            raise CapacityError(f"{ch} payload needs {p.bit_length} bits, carrier holds {cap} ({planes} plane(s))")

    marked = {
        ch: iwt_inverse(embed_bits(bands[ch], p.to_bits(), planes, mask)) for ch, p in zip(CHANNELS, payloads)
    }
    stego, clamped = ycc_to_rgb(YccImage(y=ycc.y, cb=marked["cb"], cr=marked["cr"], mode=mode))

    try:
        _, recovered, _ = _read_payloads(rgb_to_ycc(stego, mode), planes)
        ok = all(recovered[ch] == p for ch, p in zip(CHANNELS, payloads))
    except (PayloadError, CapacityError) as exc:
        log.debug("self-check decode failed: %s", exc)
        ok = False
    if not ok:
        hint = " (bt601 rounding destroys carrier LSBs; use reversible mode)" if mode == BT601 else ""
        raise SelfCheckError(f"unrecoverable payload: stego image does not decode to the embedded keys{hint}")

    digests = tuple(
        ChannelDigest(ch, len(k), p.bit_length, cap, positions) for ch, k, p in zip(CHANNELS, keys, payloads)
    )
    return EncodeResult(
        stego=stego,
        report=quality_report(rgb, stego),
        keys=keys,
        channels=digests,
        verified=True,
        clamped=clamped,
        mode=mode,
    )
