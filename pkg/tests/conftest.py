import json
from importlib import resources

import pytest

from relbell.hilbert import AmplitudePair, DocumentState

_ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number, name, passed, detail in sorted(_ACCEPTANCE_LINES):
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{status}] {number}. {name} -- {detail}")


@pytest.fixture
def criterion():
    """Record one acceptance line; returns ``passed`` so tests can assert on it."""

    def record(number, name, passed, detail=""):
        _ACCEPTANCE_LINES.append((number, name, bool(passed), detail))
        return bool(passed)

    return record


@pytest.fixture(scope="session")
def fixture_log_path():
    return str(resources.files("relbell") / "data" / "synthetic_log.jsonl")


@pytest.fixture(scope="session")
def fixture_expected():
    text = (resources.files("relbell") / "data" / "synthetic_log.expected.json").read_text()
    return json.loads(text)


@pytest.fixture(scope="session")
def fixture_lines(fixture_log_path):
    with open(fixture_log_path, encoding="utf-8") as fh:
        return fh.readlines()


@pytest.fixture
def worked_doc():
    """Order-effect example document: amplitudes quoted to four digits, renormalized."""
    return DocumentState(
        "worked-doc",
        "reliability",
        {
            "reliability": AmplitudePair.from_unnormalized(0.9715, 0.2370),
            "topicality": AmplitudePair.from_unnormalized(0.3535, 0.9354),
        },
    )
