import pytest

from posauth.harness.config import ExperimentConfig, parse_config


def pytest_configure(config):
    config._acceptance_lines = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_acceptance_lines", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)


@pytest.fixture
def report(request):
    """Record one PASS/FAIL line for the acceptance summary and assert it."""

    def _report(cid: str, ok: bool, detail: str):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {cid}: {detail}"
        print(line)
        request.config._acceptance_lines.append(line)
        assert ok, line

    return _report


SMALL = """
[sweep]
lq_db = 0, 10, 20
trials = 400
roc_lq_db = 0, 20
roc_speeds = 1
roc_points = 20

[dataset]
slots_per_lq = 60
lq_db = 0, 10, 20

[model]
train_slots_per_lq = 60
"""


@pytest.fixture(scope="session")
def small_text() -> str:
    return SMALL


@pytest.fixture(scope="session")
def small_config() -> ExperimentConfig:
    return parse_config(SMALL)


@pytest.fixture
def default_config() -> ExperimentConfig:
    return ExperimentConfig()
