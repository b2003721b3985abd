import re

import numpy as np
import pytest

from hamrep import _kernels, models

# gate number -> (name, passed); filled by the acceptance suite hooks below
_GATES = {}
_GATE_RE = re.compile(r"test_acceptance\.py::test_(\d+)_(\w+)")


def pytest_runtest_logreport(report):
    m = _GATE_RE.search(report.nodeid)
    if m is None:
        return
    num, name = int(m.group(1)), m.group(2).replace("_", " ")
    if report.when == "call":
        _GATES[num] = (name, report.outcome == "passed")
    elif report.outcome != "passed":
        # setup/teardown error counts against the gate
        _GATES[num] = (name, False)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _GATES:
        return
    terminalreporter.write_sep("-", "acceptance gates")
    for num in sorted(_GATES):
        name, ok = _GATES[num]
        terminalreporter.write_line(
            "gate %02d (%s): %s" % (num, name, "PASS" if ok else "FAIL"))


@pytest.fixture(scope="session", autouse=True)
def _warm_kernels():
    _kernels.warmup()


@pytest.fixture(scope="session")
def catalog():
    return models.catalog()


@pytest.fixture(scope="session")
def plan():
    return models.SamplePlan.default(R=2.0, p_max=10.0, seed=0)


@pytest.fixture(scope="session")
def small_plan():
    return models.SamplePlan.default(R=2.0, p_max=10.0, k=25, seed=1)


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)
