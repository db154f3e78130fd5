"""Time the numpy and numba kernels side by side.

    python benchmarks/bench_kernels.py [--repeat 3] [--size 256]

The numba timings exclude compilation (one warm-up call per kernel).
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from iwtstego import _accel
from iwtstego.blockmatch import SEARCH_METHODS, nearest_blocks, partition, to_blocks
from iwtstego.iwt import iwt_forward
from iwtstego.keycodec import XorKey, rle_counts
from iwtstego.pipeline import encode


def best_of(fn, repeat: int) -> float:
    fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main(argv: list[str] | None = None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--size", type=int, default=256, help="cover side; secrets are half")
    args = ap.parse_args(argv)

    rng = np.random.default_rng(0)
    n = args.size
    cover = rng.integers(0, 256, (n, n, 3)).astype(np.uint8)
    s1 = rng.integers(0, 256, (n // 2, n // 2)).astype(np.uint8)
    s2 = rng.integers(0, 256, (n // 2, n // 2)).astype(np.uint8)
    s_ll, c_ll = iwt_forward(s1).ll, iwt_forward(cover[..., 0]).ll
    secret_blocks = to_blocks(s_ll, partition(s_ll))
    cover_blocks = to_blocks(c_ll, partition(c_ll))
    bits = rng.integers(0, 2, 200_000).astype(np.uint8)
    xk = XorKey(b"\x5a\xc3\x17\x88\xe4")

    print(f"numba available: {_accel.NUMBA_AVAILABLE}")

    # search kernels are selected explicitly; the loop ones are compiled when numba imports
    print(f"\n{'search kernel':<24}{'seconds':>12}")
    for method in SEARCH_METHODS:
        t = best_of(lambda m=method: nearest_blocks(secret_blocks, cover_blocks, m), args.repeat)
        print(f"{method:<24}{t:>12.4f}")

    # these follow the backend flag
    print(f"\n{'backend-dispatched':<24}{'numpy s':>12}{'numba s':>12}")
    rows = [
        ("rle_counts", lambda: rle_counts(bits)),
        ("encode (default search)", lambda: encode(cover, s1, s2, xk)),
    ]
    saved = _accel.USE_NUMBA
    try:
        for name, fn in rows:
            cells = []
            for flag in (False, True):
                if flag and not _accel.NUMBA_AVAILABLE:
                    cells.append("n/a")
                    continue
                _accel.USE_NUMBA = flag
                cells.append(f"{best_of(fn, args.repeat):.4f}")
            print(f"{name:<24}{cells[0]:>12}{cells[1]:>12}")
    finally:
        _accel.USE_NUMBA = saved

if __name__ == "__main__":
    main()
