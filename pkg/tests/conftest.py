from __future__ import annotations

import numpy as np
import pytest

from tlsclock import GROUND, SystemParams

RABI = 0.1

# Lines appended by the acceptance tests, echoed in the terminal summary.
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def ground():
    return GROUND


def params(delta_over_rabi: float, gamma_over_rabi: float, rabi: float = RABI) -> SystemParams:
    return SystemParams.from_detuning(delta_over_rabi * rabi, rabi, gamma_over_rabi * rabi)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
