import numpy as np
import pytest
from hypothesis import settings

from bpalg.groups import cyclic, direct_product, symmetric

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")

SMALL_GROUPS = {
    "Z1": lambda: cyclic(1),
    "Z2": lambda: cyclic(2),
    "Z3": lambda: cyclic(3),
    "Z4": lambda: cyclic(4),
    "Z2xZ2": lambda: direct_product(cyclic(2), cyclic(2)),
    "S3": lambda: symmetric(3),
}


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def cvec(rng, n):
    return rng.standard_normal(n) + 1j * rng.standard_normal(n)


CRITERIA: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in CRITERIA:
            terminalreporter.write_line(line)
