import pytest

from dressed_cavity import approx_elements, build_scenario, exact_elements, solve_spectrum

OMEGA_BAR = 4.0e14
RADIUS = 1e-6


@pytest.fixture(scope="session")
def scenario():
    return build_scenario(OMEGA_BAR, RADIUS)


@pytest.fixture(scope="session")
def spectrum_exact(scenario):
    return solve_spectrum(scenario, 2000, method="exact")


@pytest.fixture(scope="session")
def spectrum_hybrid(scenario):
    return solve_spectrum(scenario, 2000, method="hybrid")


@pytest.fixture(scope="session")
def matrix_exact(scenario, spectrum_exact):
    return exact_elements(scenario, spectrum_exact)


@pytest.fixture(scope="session")
def matrix_approx(scenario, spectrum_hybrid):
    return approx_elements(scenario, spectrum_hybrid, L=200)


# -- one PASS/FAIL line per acceptance criterion ------------------------------

_criteria: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None or call.when != "call":
        return
    number, title = marker.args
    status = "PASS" if call.excinfo is None else "FAIL"
    _criteria[number] = (status, title)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        status, title = _criteria[number]
        terminalreporter.write_line(f"[{status}] criterion {number:2d}: {title}")
