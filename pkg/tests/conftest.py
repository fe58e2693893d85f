import os

import hypothesis
import numpy as np
import pytest

from heterogen import GraphSample
from oracles import complete

hypothesis.settings.register_profile("default", deadline=None, max_examples=50)
hypothesis.settings.register_profile("fast", deadline=None, max_examples=10)
hypothesis.settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

# criterion number -> (passed, description)
ACCEPTANCE: dict = {}


@pytest.fixture
def acceptance_log():
    return ACCEPTANCE


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, line = ACCEPTANCE[k]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {k:2d}: {line}")


@pytest.fixture
def k2():
    return complete(2)


@pytest.fixture
def k3():
    return complete(3)


@pytest.fixture
def k4():
    return complete(4)


@pytest.fixture
def star3():
    return GraphSample.from_edges(4, [[0, 1], [0, 2], [0, 3]])


@pytest.fixture
def empty10():
    return GraphSample.from_edges(10, np.empty((0, 2), dtype=int))
