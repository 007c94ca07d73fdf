import os
import sys
import warnings

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from memristor1d import kernels  # noqa: E402
from memristor1d._backend import numba  # noqa: E402
from memristor1d.errors import SimmonsRangeWarning  # noqa: E402

BACKENDS = ["numpy"] + (["numba"] if numba is not None else [])


@pytest.fixture(params=BACKENDS)
def backend(request):
    """Name of a kernel backend; both are exercised regardless of the env flag."""
    return request.param


@pytest.fixture
def array_kernels(backend):
    return kernels.IMPLS[backend]


@pytest.fixture
def scalar_kernels(backend):
    return kernels.SCALAR_IMPLS[backend]


@pytest.fixture(autouse=True)
def _quiet_simmons_range():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", SimmonsRangeWarning)
        yield


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
