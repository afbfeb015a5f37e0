import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("wavekit", deadline=None, max_examples=60, derandomize=True)
settings.load_profile("wavekit")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# acceptance criteria report: one line per criterion in the terminal summary
ACCEPTANCE: dict = {}


@pytest.fixture
def criterion():
    def report(number: int, title: str, ok: bool, detail: str):
        line = f"criterion {number} [{'PASS' if ok else 'FAIL'}] {title}: {detail}"
        ACCEPTANCE[number] = line
        print(line)
        return ok

    return report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[key])
