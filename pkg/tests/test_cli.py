import csv
import io

import numpy as np
import pytest
from PIL import Image

from iwtstego import cli
from iwtstego.keycodec import XorKey
from iwtstego.pipeline import decode, encode

KEY = "5ac31788"


@pytest.fixture
def files(tmp_path, rng):
    cover = rng.integers(0, 256, (64, 64, 3)).astype(np.uint8)
    s1 = rng.integers(0, 256, (32, 32)).astype(np.uint8)
    s2 = rng.integers(0, 256, (32, 32, 3)).astype(np.uint8)  # colour secret, reduced to luma
    paths = {"cover": tmp_path / "cover.png", "s1": tmp_path / "s1.png", "s2": tmp_path / "s2.png"}
    Image.fromarray(cover).save(paths["cover"])
    Image.fromarray(s1).save(paths["s1"])
    Image.fromarray(s2).save(paths["s2"])
    return tmp_path, paths


def embed(paths, out, *extra):
    return cli.main(["embed", str(paths["cover"]), str(paths["s1"]), str(paths["s2"]), "-o", str(out), *extra])


def test_embed_and_extract(files, capsys):
    tmp, paths = files
    stego = tmp / "stego.png"
    assert embed(paths, stego, "--key", KEY) == cli.EXIT_OK
    out = capsys.readouterr().out
    assert "PSNR(cover, stego)" in out and "verification: verified" in out

    assert cli.main([
        "extract", str(stego), "-1", str(tmp / "o1.png"), "-2", str(tmp / "o2.png"),
        "--key", KEY, "--original1", str(paths["s1"]), "--original2", str(paths["s2"]),
    ]) == cli.EXIT_OK
    out = capsys.readouterr().out
    assert "PSNR(secret1)" in out and "PSNR(secret2)" in out
    got = np.asarray(Image.open(tmp / "o1.png"))
    assert got.shape == (32, 32)


def test_on_disk_round_trip_keeps_keys(files):
    tmp, paths = files
    stego = tmp / "stego.png"
    embed(paths, stego, "--key", KEY)
    cover = cli.load_rgb(paths["cover"])
    s1, s2 = cli.load_gray(paths["s1"]), cli.load_gray(paths["s2"])
    enc = encode(cover, s1, s2, XorKey.from_hex(KEY))
    assert np.array_equal(cli.load_rgb(stego), enc.stego)
    assert decode(cli.load_rgb(stego), XorKey.from_hex(KEY)).keys == enc.keys


def test_stego_files_are_byte_stable(files):
    tmp, paths = files
    embed(paths, tmp / "a.png", "--key", KEY)
    embed(paths, tmp / "b.png", "--key", KEY)
    assert (tmp / "a.png").read_bytes() == (tmp / "b.png").read_bytes()


def test_key_file_and_precedence(files):
    tmp, paths = files
    (tmp / "key.bin").write_bytes(bytes.fromhex(KEY))
    assert embed(paths, tmp / "a.png", "--key-file", str(tmp / "key.bin")) == cli.EXIT_OK
    assert embed(paths, tmp / "b.png", "--key", KEY) == cli.EXIT_OK
    assert (tmp / "a.png").read_bytes() == (tmp / "b.png").read_bytes()
    (tmp / "other.bin").write_bytes(b"\x01")
    assert embed(paths, tmp / "c.png", "--key", KEY, "--key-file", str(tmp / "other.bin")) == cli.EXIT_OK
    assert (tmp / "c.png").read_bytes() == (tmp / "b.png").read_bytes()


def test_missing_key_and_bad_hex(files):
    tmp, paths = files
    assert embed(paths, tmp / "a.png") == cli.EXIT_USAGE
    assert embed(paths, tmp / "a.png", "--key", "abc") == cli.EXIT_USAGE
    assert not (tmp / "a.png").exists()


def test_missing_secret_is_io_error(files):
    tmp, paths = files
    paths = dict(paths, s2=tmp / "nope.png")
    assert embed(paths, tmp / "a.png", "--key", KEY) == cli.EXIT_IO
    assert not (tmp / "a.png").exists()


def test_lossy_output_refused(files):
    tmp, paths = files
    assert embed(paths, tmp / "a.jpg", "--key", KEY) == cli.EXIT_USAGE
    assert not (tmp / "a.jpg").exists()


def test_dimension_and_capacity_exit_codes(files, rng):
    tmp, paths = files
    Image.fromarray(rng.integers(0, 256, (30, 30)).astype(np.uint8)).save(tmp / "odd.png")
    assert embed(dict(paths, s1=tmp / "odd.png"), tmp / "a.png", "--key", KEY) == cli.EXIT_DIMENSION
    Image.fromarray(rng.integers(0, 256, (64, 64)).astype(np.uint8)).save(tmp / "big.png")
    big = dict(paths, s1=tmp / "big.png", s2=tmp / "big.png")
    assert embed(big, tmp / "a.png", "--key", KEY) == cli.EXIT_CAPACITY
    assert not (tmp / "a.png").exists()


def test_bt601_self_check_exit_code(files):
    tmp, paths = files
    code = embed(paths, tmp / "a.png", "--key", KEY, "--mode", "bt601")
    assert code in (cli.EXIT_OK, cli.EXIT_SELFCHECK)
    assert (tmp / "a.png").exists() == (code == cli.EXIT_OK)


def test_extract_failures(files):
    tmp, paths = files
    stego = tmp / "stego.png"
    embed(paths, stego, "--key", KEY)
    outs = ["-1", str(tmp / "o1.png"), "-2", str(tmp / "o2.png")]
    assert cli.main(["extract", str(stego), *outs, "--key", "00ff"]) == cli.EXIT_WRONG_KEY
    assert cli.main(["extract", str(paths["cover"]), *outs, "--key", KEY]) == cli.EXIT_PARSE
    assert not (tmp / "o1.png").exists()

    data = stego.read_bytes()
    (tmp / "trunc.png").write_bytes(data[: len(data) // 2])
    assert cli.main(["extract", str(tmp / "trunc.png"), *outs, "--key", KEY]) == cli.EXIT_IO
    assert not (tmp / "o2.png").exists()


def test_psnr_command(files, capsys):
    tmp, paths = files
    assert cli.main(["psnr", str(paths["cover"]), str(paths["cover"])]) == cli.EXIT_OK
    assert "PSNR = inf dB" in capsys.readouterr().out
    arr = np.zeros((4, 4), np.uint8)
    Image.fromarray(arr).save(tmp / "z.png")
    Image.fromarray(arr + 2).save(tmp / "t.png")
    assert cli.main(["psnr", str(tmp / "z.png"), str(tmp / "t.png")]) == cli.EXIT_OK
    out = capsys.readouterr().out
    assert "MSE  = 4.000000" in out and "42.11 dB" in out
    assert cli.main(["psnr", str(tmp / "z.png"), str(paths["s1"])]) == cli.EXIT_DIMENSION


def _small_corpus(root, rng, covers=("peppers", "baboon"), secrets=("earth", "football", "moon")):
    (root / "covers").mkdir(parents=True)
    (root / "secrets").mkdir()
    for name in covers:
        Image.fromarray(rng.integers(0, 256, (64, 64, 3)).astype(np.uint8)).save(root / "covers" / f"{name}.png")
    for name in secrets:
        Image.fromarray(rng.integers(0, 256, (32, 32)).astype(np.uint8)).save(root / "secrets" / f"{name}.png")
    return root


def test_reproduce_reference_layout(tmp_path, rng, capsys):
    corpus = _small_corpus(tmp_path / "c", rng)
    assert cli.main(["reproduce", str(corpus), "--format", "csv"]) == cli.EXIT_OK
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert [r["cover"] for r in rows] == ["baboon", "peppers"]
    assert [r["secrets"] for r in rows] == ["earth+moon", "football+earth"]
    assert list(rows[0]) == cli.CSV_COLUMNS
    assert all(float(r["stego_psnr_db"]) > 40 for r in rows)

    assert cli.main(["reproduce", str(corpus), "-o", str(tmp_path / "t.txt"), "--save-dir", str(tmp_path / "out")]) == 0
    text = capsys.readouterr().out
    assert "PSNR (dB) of the stego image" in text and "baboon" in text and "earth and moon" in text
    assert (tmp_path / "t.txt").read_text() == text
    assert (tmp_path / "out" / "stego_peppers.png").exists()


def test_reproduce_single_pair(tmp_path, rng, capsys):
    corpus = _small_corpus(tmp_path / "c", rng, covers=("cover",), secrets=("only",))
    assert cli.main(["reproduce", str(corpus), "--format", "csv"]) == cli.EXIT_OK
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert len(rows) == 1 and rows[0]["secrets"] == "only+only"


def test_reproduce_empty_corpus(tmp_path):
    (tmp_path / "empty").mkdir()
    assert cli.main(["reproduce", str(tmp_path / "empty")]) == cli.EXIT_IO


def test_reproduce_unknown_pair(tmp_path, rng):
    corpus = _small_corpus(tmp_path / "c", rng)
    (corpus / "pairs.csv").write_text("cover,secret1,secret2\npeppers,earth,mars\n")
    assert cli.main(["reproduce", str(corpus)]) == cli.EXIT_IO
