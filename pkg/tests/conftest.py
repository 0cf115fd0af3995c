import pytest

from rotmorse.eigensystem import RadialGrid
from rotmorse.molecule import I2, approx_channel
from rotmorse.wavepacket import build_cs, packet_grid, revival_time

FD_GRID = RadialGrid(3.8, 8.5, 4096)

_ACCEPTANCE_LINES = []


def record(criterion: str, description: str, ok: bool, detail: str = "") -> bool:
    _ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'}  AC{criterion:<5s} {description}  [{detail}]")
    return ok


@pytest.fixture(scope="session")
def acceptance_record():
    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def channels():
    return {j: approx_channel(I2, j) for j in (0, 60, 75, 81, 87)}


@pytest.fixture(scope="session")
def states(channels):
    return {j: build_cs(ch) for j, ch in channels.items()}


@pytest.fixture(scope="session")
def t_rev(channels):
    return revival_time(channels[0])


@pytest.fixture(scope="session")
def grid(states):
    return packet_grid(states[0])
