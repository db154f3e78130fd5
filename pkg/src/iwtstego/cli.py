"""Command-line front end.

    iwtstego embed COVER SECRET1 SECRET2 -o STEGO --key HEX
    iwtstego extract STEGO -1 OUT1 -2 OUT2 --key HEX
    iwtstego psnr REFERENCE TEST
    iwtstego reproduce CORPUS_DIR [--format csv]

Keys come from ``--key`` (hex) or ``--key-file`` (raw bytes); when both
are given ``--key`` wins.  Images must be 8-bit per channel and stego
output is always written in a lossless format.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import math
import os
import sys
import tempfile
from pathlib import Path

import numpy as np
from PIL import Image

from . import __version__
from .colorspace import MODES, REVERSIBLE
from .errors import (
    CapacityError,
    DimensionError,
    KeyCheckError,
    KeyRangeError,
    PayloadError,
    SelfCheckError,
)
from .keycodec import XorKey
from .metrics import psnr, quality_report
from .pipeline import DEFAULT_PLANES, decode, encode

log = logging.getLogger("iwtstego")

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_DIMENSION = 4
EXIT_CAPACITY = 5
EXIT_SELFCHECK = 6
EXIT_PARSE = 7
EXIT_WRONG_KEY = 8

LOSSLESS_SUFFIXES = {".png": "PNG", ".bmp": "BMP", ".tif": "TIFF", ".tiff": "TIFF", ".ppm": "PPM", ".pgm": "PPM"}
ACCEPTED_MODES = {"1", "L", "LA", "P", "RGB", "RGBA"}
DEMO_KEY = "5ac31788e4"

DEFAULT_PAIRS = {"peppers": ("football", "earth"), "baboon": ("earth", "moon")}
CSV_COLUMNS = ["cover", "secrets", "stego_psnr_db", "secret1_psnr_db", "secret2_psnr_db"]


class UsageError(Exception):
    pass


class CorpusError(OSError):
    pass


# -- image I/O ---------------------------------------------------------------


def _open(path) -> Image.Image:
    img = Image.open(path)
    img.load()
    if img.mode not in ACCEPTED_MODES:
        raise UsageError(f"{path}: unsupported image mode {img.mode!r}; expected 8-bit per channel")
    return img


def load_rgb(path) -> np.ndarray:
    return np.asarray(_open(path).convert("RGB"), dtype=np.uint8)


def load_gray(path) -> np.ndarray:
    """Grayscale samples; colour input is reduced with the BT.601 luma weights (PIL ``L``)."""
    return np.asarray(_open(path).convert("L"), dtype=np.uint8)


def load_any(path) -> np.ndarray:
    img = _open(path)
    if img.mode in ("1", "L", "LA"):
        return np.asarray(img.convert("L"), dtype=np.uint8)
    return np.asarray(img.convert("RGB"), dtype=np.uint8)


def lossless_format(path) -> str:
    suffix = Path(path).suffix.lower()
    if suffix not in LOSSLESS_SUFFIXES:
        raise UsageError(
            f"{path}: output must use a lossless format ({', '.join(sorted(LOSSLESS_SUFFIXES))}); "
            "lossy compression would destroy the payload"
        )
    return LOSSLESS_SUFFIXES[suffix]


def save_image(arr: np.ndarray, path) -> None:
    """Write atomically so a failure never leaves a partial file behind."""
    path = Path(path)
    fmt = lossless_format(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", suffix=path.suffix)
    try:
        with os.fdopen(fd, "wb") as fh:
            Image.fromarray(np.asarray(arr, dtype=np.uint8)).save(fh, format=fmt)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_key(args) -> XorKey:
    if getattr(args, "key", None):
        if getattr(args, "key_file", None):
            log.warning("both --key and --key-file given; using --key")
        try:
            return XorKey.from_hex(args.key)
        except ValueError as exc:
            raise UsageError(f"--key: {exc}") from None
    if getattr(args, "key_file", None):
        data = Path(args.key_file).read_bytes()
        if not data:
            raise UsageError(f"{args.key_file}: key file is empty")
        return XorKey(data)
    raise UsageError("an XOR key is required (--key HEX or --key-file PATH)")


def _fmt_db(value: float) -> str:
    return "inf" if math.isinf(value) else f"{value:.2f}"


# -- commands ------------------------------------------------------------------


def cmd_embed(args) -> int:
    lossless_format(args.output)
    xk = read_key(args)
    cover = load_rgb(args.cover)
    s1 = load_gray(args.secret1)
    s2 = load_gray(args.secret2)
    result = encode(cover, s1, s2, xk, mode=args.mode, planes=args.planes)
    save_image(result.stego, args.output)
    print(f"stego written to {args.output}")
    print(f"PSNR(cover, stego) = {_fmt_db(result.report.psnr_db)} dB  (MSE {result.report.mse:.4f})")
    for ch in result.channels:
        print(
            f"{ch.channel}: {ch.entry_count} key entries, payload {ch.payload_bits} bits "
            f"of {ch.capacity_bits} ({ch.planes_used} bit plane(s))"
        )
    print(f"verification: {result.status}")
    return EXIT_OK


def cmd_extract(args) -> int:
    xk = read_key(args)
    for out in (args.out1, args.out2):
        lossless_format(out)
    stego = load_rgb(args.stego)
    result = decode(stego, xk, mode=args.mode, planes=args.planes)
    save_image(result.secret1, args.out1)
    save_image(result.secret2, args.out2)
    print(f"secrets written to {args.out1} and {args.out2}")
    for label, original, got in (
        ("secret1", args.original1, result.secret1),
        ("secret2", args.original2, result.secret2),
    ):
        if original:
            ref = load_gray(original)
            print(f"PSNR({label}) = {_fmt_db(psnr(ref, got))} dB")
    return EXIT_OK


def cmd_psnr(args) -> int:
    ref = load_any(args.reference)
    test = load_any(args.test)
    if ref.ndim != test.ndim:
        ref = load_rgb(args.reference)
        test = load_rgb(args.test)
    report = quality_report(ref, test, peak=args.peak)
    print(f"MSE  = {report.mse:.6f}")
    print(f"PSNR = {report.psnr_text()} dB  (peak {report.peak}, {report.sample_count} samples)")
    return EXIT_OK


def _images_in(folder: Path) -> dict[str, Path]:
    if not folder.is_dir():
        return {}
    return {
        p.stem: p
        for p in sorted(folder.iterdir())
        if p.is_file() and p.suffix.lower() in LOSSLESS_SUFFIXES
    }


def corpus_pairs(corpus: Path) -> list[tuple[str, Path, str, Path, str, Path]]:
    """Resolve (cover, secret1, secret2) triples for the reproduce command.

    Layout: ``covers/`` and ``secrets/`` sub-directories of lossless images,
    plus an optional ``pairs.csv`` with columns cover,secret1,secret2 naming
    file stems.  Without ``pairs.csv`` the covers ``peppers`` and ``baboon``
    get their secrets from the reference experiment when present; any other
    cover is paired with the first two secrets in name order (or the only
    secret, twice).
    """
    covers = _images_in(corpus / "covers")
    secrets = _images_in(corpus / "secrets")
    if not covers or not secrets:
        raise CorpusError(
            f"{corpus}: expected covers/ and secrets/ sub-directories holding lossless images "
            "(e.g. covers/peppers.png, covers/baboon.png, secrets/earth.png, secrets/football.png, secrets/moon.png)"
        )
    triples = []
    pairs_file = corpus / "pairs.csv"
    if pairs_file.exists():
        with pairs_file.open(newline="") as fh:
            rows = [(r["cover"], r["secret1"], r["secret2"]) for r in csv.DictReader(fh)]
    else:
        names = sorted(secrets)
        fallback = (names[0], names[1] if len(names) > 1 else names[0])
        rows = []
        for cover in sorted(covers):
            wanted = DEFAULT_PAIRS.get(cover)
            pair = wanted if wanted and all(s in secrets for s in wanted) else fallback
            rows.append((cover, *pair))
    for cover, s1, s2 in rows:
        for name, pool in ((cover, covers), (s1, secrets), (s2, secrets)):
            if name not in pool:
                raise CorpusError(f"{corpus}: no image named {name!r}")
        triples.append((cover, covers[cover], s1, secrets[s1], s2, secrets[s2]))
    if not triples:
        raise CorpusError(f"{corpus}: pairs.csv lists no experiments")
    return triples


def reproduce_rows(corpus: Path, xk: XorKey, mode: str = REVERSIBLE, planes: int = DEFAULT_PLANES, save_dir=None):
    rows = []
    for cover_name, cover_path, s1_name, s1_path, s2_name, s2_path in corpus_pairs(corpus):
        cover = load_rgb(cover_path)
        s1 = load_gray(s1_path)
        s2 = load_gray(s2_path)
        enc = encode(cover, s1, s2, xk, mode=mode, planes=planes)
        dec = decode(enc.stego, xk, mode=mode, planes=planes)
        if save_dir is not None:
            save_dir.mkdir(parents=True, exist_ok=True)
            save_image(enc.stego, save_dir / f"stego_{cover_name}.png")
            save_image(dec.secret1, save_dir / f"{cover_name}_{s1_name}.png")
            save_image(dec.secret2, save_dir / f"{cover_name}_{s2_name}.png")
        rows.append(
            {
                "cover": cover_name,
                "secrets": f"{s1_name}+{s2_name}",
                "stego_psnr_db": enc.report.psnr_db,
                "secret1_psnr_db": psnr(s1, dec.secret1),
                "secret2_psnr_db": psnr(s2, dec.secret2),
                "secret_names": (s1_name, s2_name),
            }
        )
    return rows


def format_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, extrasaction="ignore", lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: (_fmt_db(v) if isinstance(v, float) else v) for k, v in row.items()})
    return buf.getvalue()


def format_tables(rows) -> str:
    lines = ["PSNR (dB) of the stego image", f"{'cover':<16}{'secrets':<28}{'PSNR':>8}"]
    for row in rows:
        lines.append(f"{row['cover']:<16}{row['secrets'].replace('+', ' and '):<28}{_fmt_db(row['stego_psnr_db']):>8}")
    names = []
    for row in rows:
        for name in row["secret_names"]:
            if name not in names:
                names.append(name)
    lines += ["", "PSNR (dB) of the extracted secret images", f"{'cover':<16}" + "".join(f"{n:>12}" for n in names)]
    for row in rows:
        cells = {}
        for name, key in zip(row["secret_names"], ("secret1_psnr_db", "secret2_psnr_db")):
            cells.setdefault(name, _fmt_db(row[key]))
        lines.append(f"{row['cover']:<16}" + "".join(f"{cells.get(n, ''):>12}" for n in names))
    return "\n".join(lines) + "\n"


def cmd_reproduce(args) -> int:
    xk = read_key(args) if (args.key or args.key_file) else XorKey.from_hex(DEMO_KEY)
    save_dir = Path(args.save_dir) if args.save_dir else None
    rows = reproduce_rows(Path(args.corpus), xk, mode=args.mode, planes=args.planes, save_dir=save_dir)
    text = format_csv(rows) if args.format == "csv" else format_tables(rows)
    if args.output:
        Path(args.output).write_text(text)
    sys.stdout.write(text)
    return EXIT_OK


# -- wiring --------------------------------------------------------------------


def _add_key_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--key", help="XOR key as a hex string (takes precedence over --key-file)")
    p.add_argument("--key-file", help="file whose raw bytes form the XOR key")


def _add_codec_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--mode", choices=MODES, default=REVERSIBLE, help="colour transform (default: %(default)s)")
    p.add_argument(
        "--planes",
        type=int,
        default=DEFAULT_PLANES,
        help="LSB planes the payload may spill into (default: %(default)s); must match at extraction",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="iwtstego", description=__doc__.splitlines()[0] if __doc__ else None)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("embed", help="hide two grayscale secrets in a colour cover")
    p.add_argument("cover")
    p.add_argument("secret1", help="hidden through the Cb channel")
    p.add_argument("secret2", help="hidden through the Cr channel")
    p.add_argument("-o", "--output", required=True, help="stego image path (lossless format)")
    _add_key_options(p)
    _add_codec_options(p)
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("extract", help="recover both secrets from a stego image")
    p.add_argument("stego")
    p.add_argument("-1", "--out1", required=True, help="output path for secret 1")
    p.add_argument("-2", "--out2", required=True, help="output path for secret 2")
    p.add_argument("--original1", help="original secret 1, to report PSNR")
    p.add_argument("--original2", help="original secret 2, to report PSNR")
    _add_key_options(p)
    _add_codec_options(p)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("psnr", help="MSE and PSNR between two images")
    p.add_argument("reference")
    p.add_argument("test")
    p.add_argument("--peak", type=int, default=255)
    p.set_defaults(func=cmd_psnr)

    p = sub.add_parser("reproduce", help="stego and extracted-secret PSNR tables over a corpus")
    p.add_argument("corpus", help="directory with covers/, secrets/ and optional pairs.csv")
    p.add_argument("--format", choices=("text", "csv"), default="text")
    p.add_argument("-o", "--output", help="also write the report here")
    p.add_argument("--save-dir", help="write stego and extracted images here")
    _add_key_options(p)
    _add_codec_options(p)
    p.set_defaults(func=cmd_reproduce)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DimensionError as exc:
        print(f"dimension error: {exc}", file=sys.stderr)
        return EXIT_DIMENSION
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except SelfCheckError as exc:
        print(f"self-check failed: {exc}", file=sys.stderr)
        return EXIT_SELFCHECK
    except (KeyCheckError, KeyRangeError) as exc:
        print(f"wrong key: {exc}", file=sys.stderr)
        return EXIT_WRONG_KEY
    except PayloadError as exc:
        print(f"payload error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (OSError, ValueError) as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
