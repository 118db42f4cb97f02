import numpy as np
import pytest

from ganphotocell.model import DeviceParams
from ganphotocell.numerics.backend import compiled_kernels

BACKENDS = ["python"] + (["cython"] if compiled_kernels is not None else [])


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param


@pytest.fixture
def params():
    return DeviceParams()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
