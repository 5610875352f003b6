import os

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", max_examples=500, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture(scope="session")
def fsiase3():
    from ras.enumeration import enumerate_fsiase
    return list(enumerate_fsiase(3))


@pytest.fixture(scope="session")
def fsiase4():
    from ras.enumeration import enumerate_fsiase
    return list(enumerate_fsiase(4))


@pytest.fixture(scope="session")
def fas3():
    from ras.enumeration import enumerate_fas
    return list(enumerate_fas(3))


_ACCEPTANCE = pytest.StashKey[dict]()


@pytest.fixture
def acceptance(request):
    """``acceptance(k, ok, detail)`` records the verdict line for criterion ``k``."""
    lines = request.config.stash.setdefault(_ACCEPTANCE, {})

    def record(k: int, ok: bool, detail: str) -> bool:
        lines[k] = f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
        return ok
    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE, {})
    if lines:
        terminalreporter.section("acceptance criteria")
        for k in sorted(lines):
            terminalreporter.write_line(lines[k])
