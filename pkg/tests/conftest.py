import pytest
from hypothesis import HealthCheck, settings

from zerocyc.points import build_elliptic, build_mock
from zerocyc.tower import FieldTower

settings.register_profile(
    "repo",
    derandomize=True,
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.function_scoped_fixture],
)
settings.load_profile("repo")


@pytest.fixture(scope="session")
def swap():
    return build_mock([3, 3], [[0, 1], [1, 0]], 2)


@pytest.fixture(scope="session")
def z9():
    return build_mock([9], [[4]], 3)


@pytest.fixture(scope="session")
def trivial():
    return build_mock([], [], 1)


@pytest.fixture(scope="session")
def wedge9():
    return build_mock([9, 9], [[0, 8], [1, 8]], 3)


@pytest.fixture(scope="session")
def elliptic():
    return build_elliptic(FieldTower(5, 1, 6), 1, 1)


def pytest_configure(config):
    config.acceptance_lines = {}


@pytest.fixture
def acceptance_log(request):
    return request.config.acceptance_lines


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "acceptance_lines", {})
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(lines):
        terminalreporter.write_line(lines[k])
