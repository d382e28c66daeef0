import sys
from pathlib import Path

import pytest
from hypothesis import settings

from wheelleg.geometry import Pro3ModuleSpec, ProModuleSpec, wheel_profile
from wheelleg.rollout import RolloutConfig, roll_wheel
from wheelleg.stairs import DESIGN_STAIR, Staircase

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", deadline=None)
settings.load_profile("default")


@pytest.fixture(scope="session")
def pro():
    return ProModuleSpec()


@pytest.fixture(scope="session")
def pro3():
    return Pro3ModuleSpec()


@pytest.fixture(scope="session")
def open_profile(pro3):
    return wheel_profile(pro3, pro3.rod_max, 64)


@pytest.fixture(scope="session")
def design_flight():
    return Staircase(DESIGN_STAIR, n_steps=10)


@pytest.fixture(scope="session")
def design_climb(open_profile, design_flight):
    """Fully open three-spoke wheel rolled up the 300 x 160 mm flight."""
    return roll_wheel(open_profile, design_flight, RolloutConfig())


@pytest.fixture(scope="session")
def long_flight():
    return Staircase(DESIGN_STAIR, n_steps=16)


@pytest.fixture(scope="session")
def long_climb(open_profile, long_flight):
    return roll_wheel(open_profile, long_flight, RolloutConfig())


# --- acceptance summary -----------------------------------------------------

CRITERIA = {
    1: "stair slopes within 0.01 deg, < 1 ms",
    2: "specific resistance rows within 0.5%",
    3: "max load 26-27 kg",
    4: "required span for C1 and C2",
    5: "spoke chain vs coordinate oracle, hinge circle residuals",
    6: "push-rod inversion and unreachable reporting",
    7: "rod-to-angle fit R^2 > 0.99",
    8: "flat-ground rollout heights",
    9: "wheelbase optimum in [480, 540] mm, < 60 s (soft)",
    10: "gait offsets, drift, half-period identity, tripod support",
    11: "metrics property suites",
}
_outcomes: dict[int, list[bool]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        _outcomes.setdefault(mark.args[0], []).append(rep.passed)


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for n, label in CRITERIA.items():
        results = _outcomes.get(n)
        if results is None:
            status = "NOT RUN"
        else:
            status = "PASS" if all(results) else "FAIL"
        terminalreporter.write_line(f"criterion {n:2d}: {status}  {label}")
