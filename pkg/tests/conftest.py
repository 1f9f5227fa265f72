import numpy as np
import pytest

from bottleqc.classify import samples_from_arrays

# one line per acceptance criterion, filled in by test_acceptance.py
CRITERIA: dict[int, str] = {}


def record_criterion(number: int, title: str, passed: bool, detail: str) -> None:
    line = f"criterion {number:2d} {'PASS' if passed else 'FAIL'}  {title}: {detail}"
    CRITERIA[number] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if CRITERIA:
        terminalreporter.section("acceptance criteria")
        for number in sorted(CRITERIA):
            terminalreporter.write_line(CRITERIA[number])


def make_blobs(n=40, d=24, gap=8.0, seed=0):
    """Two well separated Gaussian blobs, half of them positive."""
    rng = np.random.default_rng(seed)
    positive = np.arange(n) % 2 == 1
    x = rng.normal(size=(n, d))
    x[positive] += gap
    return x, positive


@pytest.fixture
def blobs():
    x, positive = make_blobs()
    return samples_from_arrays(x, positive)
