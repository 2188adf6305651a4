import os

import pytest
from hypothesis import HealthCheck, settings

from wppfuzzy.wpp import default_variables, model_rulebase

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", parent=settings.get_profile("default"), max_examples=300)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

# filled by the acceptance tests, printed after the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
        terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def model():
    return model_rulebase()


@pytest.fixture(scope="session")
def wpp_vars():
    return default_variables()


def _run_cli(argv):
    import time
    from wppfuzzy.cli import main
    t0 = time.perf_counter()
    code = main(argv)
    return code, time.perf_counter() - t0


@pytest.fixture(scope="session")
def default_run(tmp_path_factory):
    """``reproduce`` with every default, as shipped."""
    out = tmp_path_factory.mktemp("reproduce_a")
    code, elapsed = _run_cli(["reproduce", "--out-dir", str(out)])
    assert code == 0
    return out, elapsed


@pytest.fixture(scope="session")
def default_rerun(tmp_path_factory):
    out = tmp_path_factory.mktemp("reproduce_b")
    code, _ = _run_cli(["reproduce", "--out-dir", str(out)])
    assert code == 0
    return out


@pytest.fixture(scope="session")
def vmax_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("sweep")
    code, _ = _run_cli(["vmax-sweep", "--vmax", "0.1", "1.0", "--out-dir", str(out)])
    assert code == 0
    return out
