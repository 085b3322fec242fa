from pathlib import Path

import pytest

from srcsel import build_index, ingest_claims
from srcsel.model import read_query
from srcsel.evaluation import read_golden

DATA = Path(__file__).parent / "data"
HQ = DATA / "hq.csv"
HQ_QUERY = DATA / "hq_query.txt"
HQ_GOLDEN = DATA / "hq_golden.csv"


@pytest.fixture
def hq():
    return ingest_claims(HQ)


@pytest.fixture
def index(hq):
    return build_index(hq, read_query(HQ_QUERY))


@pytest.fixture
def golden():
    return read_golden(HQ_GOLDEN)


# (criterion, passed, detail) rows appended by test_acceptance
ACCEPTANCE: list[tuple[int, bool, str]] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n, ok, detail in sorted(ACCEPTANCE):
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
