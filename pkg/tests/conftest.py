import pytest

from sitcov.hyperspace import load_hyperspace
from sitcov.simulator.config import SimConfig, load_sim_config


@pytest.fixture(scope="session")
def h():
    return load_hyperspace()


@pytest.fixture(scope="session")
def sim():
    return load_sim_config()[0]


@pytest.fixture(scope="session")
def calm(sim) -> SimConfig:
    """Default config with the OV swerve switched off."""
    return sim.with_(physics={"p_swerve": 0.0})


_CRITERIA: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): numbered acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    n, title = mark.args
    if rep.when == "call" or (rep.when == "setup" and rep.failed):
        _CRITERIA[n] = (title, "PASS" if rep.passed else "FAIL")


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        title, status = _CRITERIA[n]
        terminalreporter.write_line(f"criterion {n}: {status}  {title}")
