import numpy as np
import pytest

from mefit.datagen import DEMO_BETA, FactorialSpec, generate


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def demo_data():
    return generate(FactorialSpec(DEMO_BETA, repetitions=5, noise_sd=0.1, seed=1))


@pytest.fixture
def noiseless_data():
    return generate(FactorialSpec(DEMO_BETA, repetitions=5, noise_sd=0.0))


def pytest_terminal_summary(terminalreporter):
    from helpers import ACCEPTANCE_LINES

    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
