import numpy as np
import pytest

from gzslkit import Dataset

_ACCEPTANCE = {}


@pytest.fixture
def record():
    """Store one pass/fail line for the terminal summary."""

    def _record(number, title, passed, detail=""):
        _ACCEPTANCE[number] = f"criterion {number:>2} {'PASS' if passed else 'FAIL'}  {title}  {detail}".rstrip()
        return passed

    return _record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_ACCEPTANCE):
        terminalreporter.write_line(_ACCEPTANCE[key])


def toy_dataset(n_classes=20, per_class=10, dim=6, k=4, seed=0):
    rng = np.random.default_rng(seed)
    S = rng.standard_normal((n_classes, k))
    y = np.repeat(np.arange(n_classes), per_class)
    X = rng.standard_normal((y.size, dim)) + (S @ rng.standard_normal((k, dim)))[y]
    return Dataset(X, y, S)


@pytest.fixture
def toy():
    return toy_dataset()
