import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from iwtstego.blockmatch import (
    SEARCH_METHODS,
    BlockGrid,
    BlockKey,
    block_rmse,
    build_key,
    nearest_blocks,
    partition,
    reconstruct_ll,
    to_blocks,
)
from iwtstego.errors import DimensionError, KeyRangeError
from oracles import brute_force_key, rmse


@pytest.mark.parametrize("size,blocks,per_row", [(4, 4, 2), (64, 1024, 32), (128, 4096, 64)])
def test_partition_counts(size, blocks, per_row):
    grid = partition(np.zeros((size, size)), 2)
    assert grid.n_blocks == blocks
    assert grid.blocks_per_row == per_row


def test_partition_block_origins():
    grid = partition(np.zeros((4, 6)), 2)
    assert [grid.block_origin(k) for k in range(grid.n_blocks)] == [
        (0, 0), (0, 2), (0, 4), (2, 0), (2, 2), (2, 4)
    ]


def test_partition_rejects_indivisible():
    with pytest.raises(DimensionError):
        partition(np.zeros((4, 5)), 2)


def test_index_width():
    assert BlockGrid(128, 128).index_width == 12
    assert BlockGrid(4, 4).index_width == 2
    assert BlockGrid(2, 2).index_width == 0
    assert BlockGrid(6, 2).index_width == 2


def test_block_rmse_examples():
    z = np.zeros((2, 2))
    assert block_rmse(z, z) == 0
    assert block_rmse(z, np.full((2, 2), 2)) == 2
    assert block_rmse([[1, 0], [0, 0]], z) == 0.5
    with pytest.raises(DimensionError):
        block_rmse(z, np.zeros((2, 3)))


def test_exact_match_found():
    rng = np.random.default_rng(3)
    cover = rng.integers(0, 50, (8, 8)) * 5
    # block 7 is rows 2-3, cols 6-7; make it unique
    cover[2:4, 6:8] = [[1, 2], [3, 4]]
    key = build_key(np.array([[1, 2], [3, 4]]), cover)
    assert key.entries.tolist() == [7]


def test_all_ties_pick_lowest_index():
    key = build_key(np.zeros((4, 4)), np.zeros((8, 8)))
    assert key.entries.tolist() == [0, 0, 0, 0]


@pytest.mark.parametrize("method", SEARCH_METHODS)
def test_matches_brute_force(method, rng):
    for _ in range(10):
        secret = rng.integers(0, 256, (8, 8))
        cover = rng.integers(0, 256, (16, 16))
        key = build_key(secret, cover, method=method)
        assert key.entries.tolist() == brute_force_key(secret, cover)


@pytest.mark.parametrize("method", SEARCH_METHODS)
def test_tie_heavy_inputs_match_brute_force(method, rng):
    # values from a tiny alphabet produce many equal distances
    for _ in range(10):
        secret = rng.integers(0, 3, (8, 8))
        cover = rng.integers(0, 3, (16, 16))
        assert build_key(secret, cover, method=method).entries.tolist() == brute_force_key(secret, cover)


def test_optimality(rng):
    secret = rng.integers(0, 256, (16, 16))
    cover = rng.integers(-255, 256, (32, 32))
    key = build_key(secret, cover)
    sblocks = to_blocks(secret, key.secret_grid)
    cblocks = to_blocks(cover, key.cover_grid)
    for i, k in enumerate(key.entries):
        best = rmse(sblocks[i], cblocks[k])
        assert all(best <= rmse(sblocks[i], c) for c in cblocks)


def test_reconstruct_reproduces_verbatim_blocks(rng):
    cover = rng.integers(0, 256, (16, 16))
    secret = cover[4:12, 4:12].copy()
    key = build_key(secret, cover)
    assert np.array_equal(reconstruct_ll(key, cover), secret)


def test_reconstruct_zero_key_tiles_block_zero():
    cover = np.arange(16).reshape(4, 4)
    grid = BlockGrid(4, 6)
    key = BlockKey(np.zeros(grid.n_blocks, dtype=int), grid, BlockGrid(4, 4))
    out = reconstruct_ll(key, cover)
    assert np.array_equal(out, np.tile([[0, 1], [4, 5]], (2, 3)))


def test_reconstruct_rejects_out_of_range():
    key = BlockKey(np.array([4]), BlockGrid(2, 2), BlockGrid(4, 4))
    with pytest.raises(KeyRangeError):
        reconstruct_ll(key, np.zeros((4, 4)))


def test_key_length_for_reference_geometry(rng):
    key = build_key(rng.integers(0, 256, (64, 64)), rng.integers(0, 256, (128, 128)))
    assert len(key) == 1024
    assert len(key) * key.cover_grid.index_width == 12288


def test_empty_cover_rejected():
    with pytest.raises(DimensionError):
        build_key(np.zeros((2, 2)), np.zeros((0, 0)))
    with pytest.raises(DimensionError):
        nearest_blocks(np.zeros((1, 4)), np.zeros((0, 4)))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 6), st.integers(1, 6), st.integers(1, 300))
def test_kernels_agree(seed, srows, crows, spread):
    gen = np.random.default_rng(seed)
    secret = gen.integers(0, spread + 1, (srows * 2, 4))
    cover = gen.integers(-spread, spread + 1, (crows * 2, 6))
    results = {m: build_key(secret, cover, method=m).entries for m in SEARCH_METHODS}
    assert np.array_equal(results["numpy"], results["exhaustive"])
    assert np.array_equal(results["numpy"], results["pruned"])


def test_deterministic(rng):
    secret = rng.integers(0, 256, (8, 8))
    cover = rng.integers(0, 256, (16, 16))
    assert build_key(secret, cover) == build_key(secret, cover)


def test_unknown_method():
    with pytest.raises(ValueError):
        nearest_blocks(np.zeros((1, 4)), np.zeros((1, 4)), method="fuzzy")
