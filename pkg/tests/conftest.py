import numpy as np
import pytest
from PIL import Image

from iwtstego import _accel

# Stand-in for the reference experiment: two colour photographs as covers
# and two smooth grayscale photographs as secrets, all from scikit-image.
COVER_NAMES = ("astronaut", "coffee", "chelsea", "rocket")
SECRET_PAIR = ("moon", "clock")

_acceptance_lines = []


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(criterion, title): exit criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        status = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}[report.outcome]
        details = [v for k, v in report.user_properties if k == "detail"]
        line = f"[{status}] criterion {marker.kwargs['criterion']}: {marker.kwargs['title']}"
        if details:
            line += " -- " + "; ".join(details)
        _acceptance_lines.append(line)


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_acceptance_lines, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)


@pytest.fixture
def detail(request):
    """Attach a measured value to the acceptance summary line of this test."""

    def add(text):
        request.node.user_properties.append(("detail", text))
        print(text)

    return add


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(params=["numpy", "numba"])
def backend(request, monkeypatch):
    if request.param == "numba" and not _accel.NUMBA_AVAILABLE:
        pytest.skip("numba not installed")
    monkeypatch.setattr(_accel, "USE_NUMBA", request.param == "numba")
    return request.param


def _square(arr, size, gray):
    h, w = arr.shape[:2]
    s = min(h, w)
    arr = arr[(h - s) // 2 : (h - s) // 2 + s, (w - s) // 2 : (w - s) // 2 + s]
    img = Image.fromarray(arr[..., :3] if arr.ndim == 3 else arr)
    img = img.convert("L") if gray else img.convert("RGB")
    return np.asarray(img.resize((size, size), Image.LANCZOS))


@pytest.fixture(scope="session")
def natural_images():
    data = pytest.importorskip("skimage.data")
    covers = {name: _square(getattr(data, name)(), 256, gray=False) for name in COVER_NAMES}
    secrets = {name: _square(getattr(data, name)(), 128, gray=True) for name in SECRET_PAIR + ("camera",)}
    return covers, secrets


@pytest.fixture(scope="session")
def corpus_dir(natural_images, tmp_path_factory):
    covers, secrets = natural_images
    root = tmp_path_factory.mktemp("corpus")
    (root / "covers").mkdir()
    (root / "secrets").mkdir()
    for name, arr in covers.items():
        Image.fromarray(arr).save(root / "covers" / f"{name}.png")
    for name, arr in secrets.items():
        Image.fromarray(arr).save(root / "secrets" / f"{name}.png")
    lines = ["cover,secret1,secret2"] + [f"{c},{SECRET_PAIR[0]},{SECRET_PAIR[1]}" for c in COVER_NAMES]
    (root / "pairs.csv").write_text("\n".join(lines) + "\n")
    return root
