import math

import pytest

from atomlaser.model import Broadband, Gaussian, KernelSpec, PhotonDelta, SystemParams

W0 = 2 * math.pi * 123.0
MASS = 5e-26


@pytest.fixture
def system():
    return SystemParams(W0, MASS)


@pytest.fixture
def gaussian_kernel(system):
    return KernelSpec(system, Gaussian(1e6, 1e6))


@pytest.fixture
def broadband_kernel(system):
    return KernelSpec(system, Broadband(1 / math.sqrt(2 * math.pi)))


@pytest.fixture
def delta_kernel(system):
    return KernelSpec(system, PhotonDelta(750.0))


def pytest_terminal_summary(terminalreporter):
    from acceptance_report import RESULTS

    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(RESULTS, key=lambda k: (int(str(k).rstrip("abc")), str(k))):
        name, ok, detail = RESULTS[n]
        terminalreporter.write_line(f"criterion {n:>3} {'PASS' if ok else 'FAIL'}  {name}: {detail}")
