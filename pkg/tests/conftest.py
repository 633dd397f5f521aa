import numpy as np
import pytest

from pisd.constants import PhysicalConstants, SpinSystemSpec

CONST = PhysicalConstants()
GMUB = CONST.g_mu_B
HBAR = CONST.hbar


@pytest.fixture(scope="session")
def const():
    return CONST


@pytest.fixture(scope="session")
def gmub():
    return GMUB


def make_spec(s=0.5, j_over=1.0, bz=1.0, alpha=0.5):
    """Spin system with J expressed in units of g*mu_B*Bz."""
    return SpinSystemSpec(s=s, J=j_over * GMUB * (bz if bz != 0 else 1.0),
                          B=(0.0, 0.0, bz), alpha=alpha)


def random_unit(rng, avoid_south=True):
    n = rng.standard_normal(3)
    n /= np.linalg.norm(n)
    if avoid_south and n[2] < -0.999:
        n[2] = abs(n[2])
        n /= np.linalg.norm(n)
    return n


# ---- acceptance summary: one pass/fail line per acceptance criterion ----

_acceptance_reports = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" in report.nodeid and report.when == "call":
        _acceptance_reports[report.nodeid] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_reports:
        return
    terminalreporter.section("acceptance criteria")
    for nodeid, outcome in sorted(_acceptance_reports.items()):
        name = nodeid.split("::")[-1].replace("test_", "", 1)
        terminalreporter.write_line(
            f"{'PASS' if outcome == 'passed' else 'FAIL'}  {name}"
        )
