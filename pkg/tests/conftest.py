from pathlib import Path

import pytest

from exceptcheck import chartable, matgroup

DATA = Path(__file__).resolve().parents[1] / "src" / "exceptcheck" / "data"
TABLE_NAMES = sorted(p.stem for p in DATA.glob("*.json"))
SIX_DIM = ["2A5", "2HaJ", "3A7", "6A6", "6A7", "6PSL3F4", "SL2F11", "SL2F13", "SL2F7", "SU3F3"]
SEVEN_DIM = ["PSL2F13", "PSL2F8", "PSU3F3"]

_tables = {}


def table(name):
    if name not in _tables:
        _tables[name] = chartable.load(DATA / f"{name}.json")
    return _tables[name]


@pytest.fixture(scope="session")
def tables():
    return {name: table(name) for name in TABLE_NAMES}


@pytest.fixture(scope="session")
def g7():
    return matgroup.closure_from_file(DATA / "generators" / "G7.json", 200000)


@pytest.fixture(scope="session")
def ico():
    return matgroup.closure_from_file(DATA / "generators" / "2A5_dim2.json", 1000)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in RESULTS:
        terminalreporter.write_line(line)
