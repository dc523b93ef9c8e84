from pathlib import Path

import pytest

from pho.data import make_two_gaussians, split
from pho.space import SearchSpace

ROOT = Path(__file__).resolve().parent.parent

# validation accuracy per iteration of the two models compared in the
# motivating learning-curve figure (x-axis iterations 0..19)
MODEL1_CURVE = [
    0.4356, 0.5344, 0.5839, 0.619, 0.6178, 0.696, 0.7438, 0.7438, 0.7886, 0.7737,
    0.8011, 0.8151, 0.8031, 0.8083, 0.8054, 0.8151, 0.8413, 0.8251, 0.8375, 0.8567,
]
MODEL2_CURVE = [
    0.2639, 0.4229, 0.4809, 0.4935, 0.5126, 0.5816, 0.5965, 0.5891, 0.6096, 0.611,
    0.6354, 0.6506, 0.6382, 0.6538, 0.6559, 0.6832, 0.6989, 0.7032, 0.6895, 0.6743,
]


@pytest.fixture
def small_space():
    return SearchSpace.from_dict({"a": [1, 2], "b": [0.1, 0.2, 0.3]})


@pytest.fixture(scope="session")
def gaussian_split():
    data = make_two_gaussians(rows=200, features=4, separation=2.0, seed=3)
    return split(data, 0.67, seed=3)


_acceptance_lines: list[str] = []


@pytest.fixture(scope="session")
def acceptance_log():
    return _acceptance_lines


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)
