import json

import pytest

from overlapq import (Deterministic, DeterministicBatch, ExplicitBatch, Exponential,
                      QueueModel)


@pytest.fixture
def mm1():
    """M/M/inf with unit rates and single arrivals."""
    return QueueModel(Exponential(1.0), DeterministicBatch(1), Exponential(1.0))


@pytest.fixture
def mb2():
    return QueueModel(Exponential(1.0), DeterministicBatch(2), Exponential(1.0))


@pytest.fixture
def mb13():
    """Batch size 1 or 3 with equal probability."""
    return QueueModel(Exponential(1.0), ExplicitBatch((0.5, 0.0, 0.5)), Exponential(1.0))


@pytest.fixture
def det_service():
    return QueueModel(Exponential(1.0), DeterministicBatch(2), Deterministic(1.0))


@pytest.fixture
def write_json(tmp_path):
    def write(name, data):
        path = tmp_path / name
        path.write_text(json.dumps(data))
        return str(path)
    return write


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
