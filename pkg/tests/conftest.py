import numpy as np
import pytest

from fairlens import _backend, metrics, saliency

_ACCEPTANCE = {}


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(params=_backend.available())
def backend(request, monkeypatch):
    """Run a test once per importable kernel backend."""
    k = _backend.get(request.param)
    monkeypatch.setattr(saliency, "kernels", k)
    monkeypatch.setattr(metrics, "kernels", k)
    return request.param


def random_image(rng, h, w):
    return rng.integers(0, 256, size=(h, w, 3), dtype=np.uint8)


def pytest_runtest_logreport(report):
    if "test_acceptance.py" in report.nodeid and report.when == "call":
        _ACCEPTANCE[report.nodeid.split("::")[-1]] = report.outcome
    elif "test_acceptance.py" in report.nodeid and report.failed:
        _ACCEPTANCE[report.nodeid.split("::")[-1]] = "failed"


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_ACCEPTANCE):
        status = "PASS" if _ACCEPTANCE[name] == "passed" else "FAIL"
        terminalreporter.write_line(f"{status}  {name}")
