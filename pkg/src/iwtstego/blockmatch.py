"""Block-matching key construction.

A secret LL plane is cut into non-overlapping square blocks; for each one
the cover LL block with the smallest RMSE is located and its row-major
index recorded.  The list of indices is the key.  Reconstruction copies
the addressed cover blocks back into place.

Distances are compared as exact integer sums of squares, so keys do not
depend on floating-point rounding.  Ties go to the lowest cover index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _accel
from ._accel import njit
from .errors import DimensionError, KeyRangeError
from .iwt import as_plane

BLOCK_SIZE = 2


@dataclass(frozen=True)
class BlockGrid:
    rows: int
    cols: int
    block_size: int = BLOCK_SIZE

    def __post_init__(self):
        if self.block_size < 1:
            raise DimensionError("block size must be positive")
        if self.rows % self.block_size or self.cols % self.block_size:
            raise DimensionError(
                f"{self.rows}x{self.cols} plane is not divisible into {self.block_size}x{self.block_size} blocks"
            )

    @property
    def blocks_per_row(self) -> int:
        return self.cols // self.block_size

    @property
    def blocks_per_col(self) -> int:
        return self.rows // self.block_size

    @property
    def n_blocks(self) -> int:
        return self.blocks_per_row * self.blocks_per_col

    @property
    def index_width(self) -> int:
        """Bits needed to address any block: ceil(log2(n_blocks))."""
        return max(self.n_blocks - 1, 0).bit_length()

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def block_origin(self, k: int) -> tuple[int, int]:
        r, c = divmod(k, self.blocks_per_row)
        return r * self.block_size, c * self.block_size


@dataclass(frozen=True, eq=False)
class BlockKey:
    entries: np.ndarray
    secret_grid: BlockGrid
    cover_grid: BlockGrid

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=np.int64).reshape(-1)
        object.__setattr__(self, "entries", entries)
        if entries.size != self.secret_grid.n_blocks:
            raise DimensionError(
                f"key has {entries.size} entries, secret grid has {self.secret_grid.n_blocks} blocks"
            )
        if self.secret_grid.block_size != self.cover_grid.block_size:
            raise DimensionError("secret and cover grids use different block sizes")

    def __len__(self) -> int:
        return self.entries.size

    def __eq__(self, other):
        if not isinstance(other, BlockKey):
            return NotImplemented
        return (
            self.secret_grid == other.secret_grid
            and self.cover_grid == other.cover_grid
            and np.array_equal(self.entries, other.entries)
        )

    def __hash__(self):
        return hash((self.secret_grid, self.cover_grid, self.entries.tobytes()))


def partition(plane, block_size: int = BLOCK_SIZE) -> BlockGrid:
    p = np.asarray(plane)
    if p.ndim != 2:
        raise DimensionError(f"expected a 2-D plane, got shape {p.shape}")
    return BlockGrid(p.shape[0], p.shape[1], block_size)


def to_blocks(plane, grid: BlockGrid) -> np.ndarray:
    """Flatten ``plane`` into an ``(n_blocks, block_size**2)`` array, row-major."""
    p = as_plane(plane)
    if p.shape != grid.shape:
        raise DimensionError(f"plane shape {p.shape} does not match grid {grid.shape}")
    bs = grid.block_size
    return (
        p.reshape(grid.blocks_per_col, bs, grid.blocks_per_row, bs)
        .transpose(0, 2, 1, 3)
        .reshape(grid.n_blocks, bs * bs)
    )


def from_blocks(blocks: np.ndarray, grid: BlockGrid) -> np.ndarray:
    bs = grid.block_size
    return (
        np.asarray(blocks, dtype=np.int64)
        .reshape(grid.blocks_per_col, grid.blocks_per_row, bs, bs)
        .transpose(0, 2, 1, 3)
        .reshape(grid.shape)
    )


def block_rmse(a, b) -> float:
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    if a.shape != b.shape:
        raise DimensionError(f"block shapes differ: {a.shape} vs {b.shape}")
    if a.size == 0:
        raise DimensionError("empty block")
    diff = a - b
    return math.sqrt(int((diff * diff).sum()) / a.size)


# -- search kernels -----------------------------------------------------------
# All three return, for each row of ``secret``, the index of the row of
# ``cover`` with the smallest integer sum of squared differences, lowest
# index on ties.


def _nearest_numpy(secret: np.ndarray, cover: np.ndarray, chunk: int = 256) -> np.ndarray:
    secret = secret.astype(np.int64)
    cover = cover.astype(np.int64)
    cover_sq = (cover * cover).sum(axis=1)
    out = np.empty(secret.shape[0], dtype=np.int64)
    for start in range(0, secret.shape[0], chunk):
        s = secret[start : start + chunk]
        # ||s||^2 is constant per row and cannot change the argmin
        d = cover_sq[None, :] - 2 * (s @ cover.T)
        out[start : start + chunk] = np.argmin(d, axis=1)
    return out


@njit
def _nearest_exhaustive(secret, cover):
    ns, width = secret.shape
    nc = cover.shape[0]
    out = np.empty(ns, dtype=np.int64)
    for i in range(ns):
        best = np.int64(-1)
        best_j = 0
        for j in range(nc):
            acc = np.int64(0)
            for k in range(width):
                diff = secret[i, k] - cover[j, k]
                acc += diff * diff
                if best >= 0 and acc >= best:
                    break
            if best < 0 or acc < best:
                best = acc
                best_j = j
        out[i] = best_j
    return out


@njit
def _nearest_pruned(secret, cover):
    # Cover blocks sorted by their sample sum; (sum_s - sum_c)^2 / width is a
    # lower bound on the squared distance, so the scan can stop in each
    # direction once that bound exceeds the best distance found.
    ns, width = secret.shape
    nc = cover.shape[0]
    sums = np.empty(nc, dtype=np.int64)
    for j in range(nc):
        acc = np.int64(0)
        for k in range(width):
            acc += cover[j, k]
        sums[j] = acc
    order = np.argsort(sums, kind="mergesort")
    sorted_sums = sums[order]
    out = np.empty(ns, dtype=np.int64)
    for i in range(ns):
        ssum = np.int64(0)
        for k in range(width):
            ssum += secret[i, k]
        pos = np.searchsorted(sorted_sums, ssum)
        best = np.int64(-1)
        best_j = np.int64(0)
        lo = pos - 1
        hi = pos
        while lo >= 0 or hi < nc:
            # take the side whose sum is closer to the secret's
            take_hi = False
            if hi < nc and lo >= 0:
                take_hi = (sorted_sums[hi] - ssum) <= (ssum - sorted_sums[lo])
            elif hi < nc:
                take_hi = True
            if take_hi:
                t = hi
                hi += 1
            else:
                t = lo
                lo -= 1
            gap = sorted_sums[t] - ssum
            if best >= 0 and gap * gap > best * width:
                # every remaining candidate on this side is at least as far
                if take_hi:
                    hi = nc
                else:
                    lo = -1
                continue
            j = order[t]
            acc = np.int64(0)
            for k in range(width):
                diff = secret[i, k] - cover[j, k]
                acc += diff * diff
                if best >= 0 and acc > best:
                    break
            if best < 0 or acc < best or (acc == best and j < best_j):
                best = acc
                best_j = j
        out[i] = best_j
    return out


SEARCH_METHODS = ("numpy", "exhaustive", "pruned")


def nearest_blocks(secret_blocks: np.ndarray, cover_blocks: np.ndarray, method: str | None = None) -> np.ndarray:
    """Index of the closest cover block for every secret block.

    ``method`` picks the kernel; ``None`` uses ``"pruned"`` when numba is
    active and ``"numpy"`` otherwise.  All methods give identical results.
    """
    secret_blocks = np.ascontiguousarray(secret_blocks, dtype=np.int64)
    cover_blocks = np.ascontiguousarray(cover_blocks, dtype=np.int64)
    if cover_blocks.shape[0] == 0:
        raise DimensionError("cover has no blocks")
    if secret_blocks.shape[0] == 0:
        return np.empty(0, dtype=np.int64)
    if method is None:
        method = "pruned" if _accel.USE_NUMBA else "numpy"
    if method == "numpy":
        return _nearest_numpy(secret_blocks, cover_blocks)
    if method == "exhaustive":
        return _nearest_exhaustive(secret_blocks, cover_blocks)
    if method == "pruned":
        return _nearest_pruned(secret_blocks, cover_blocks)
    raise ValueError(f"unknown search method {method!r}; expected one of {SEARCH_METHODS}")


def build_key(secret_ll, cover_ll, block_size: int = BLOCK_SIZE, method: str | None = None) -> BlockKey:
    """Best-matching cover block for every secret block, in row-major order."""
    secret_ll = as_plane(secret_ll)
    cover_ll = as_plane(cover_ll)
    if secret_ll.size == 0 or cover_ll.size == 0:
        raise DimensionError("cannot build a key from an empty plane")
    sgrid = partition(secret_ll, block_size)
    cgrid = partition(cover_ll, block_size)
    entries = nearest_blocks(to_blocks(secret_ll, sgrid), to_blocks(cover_ll, cgrid), method)
    return BlockKey(entries=entries, secret_grid=sgrid, cover_grid=cgrid)


def reconstruct_ll(key: BlockKey, cover_ll) -> np.ndarray:
    """Rebuild an approximate secret LL by copying the addressed cover blocks."""
    cover_ll = as_plane(cover_ll)
    if cover_ll.shape != key.cover_grid.shape:
        raise DimensionError(f"cover LL {cover_ll.shape} does not match key grid {key.cover_grid.shape}")
    entries = key.entries
    if entries.size and (entries.min() < 0 or entries.max() >= key.cover_grid.n_blocks):
        raise KeyRangeError(f"key addresses blocks outside [0, {key.cover_grid.n_blocks})")
    cover_blocks = to_blocks(cover_ll, key.cover_grid)
    return from_blocks(cover_blocks[entries], key.secret_grid)
