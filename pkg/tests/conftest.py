import pytest

from epdm.model import VOID, ReactionSpec
from epdm.rulesets import ReactionTable

# criterion name -> (passed, detail); filled by test_acceptance
ACCEPTANCE_RESULTS = {}


def mixed_table():
    """Eleven channels covering source, unimolecular and both bimolecular kinds."""
    return ReactionTable({
        (VOID, VOID): [ReactionSpec(0.7, {"A": 1}), ReactionSpec(0.3, {"C": 1})],
        ("A", VOID): [ReactionSpec(0.5), ReactionSpec(0.2, {"B": 1})],
        ("B", VOID): [ReactionSpec(0.4, {"C": 2})],
        ("A", "A"): [ReactionSpec(0.05, {"B": 1})],
        ("A", "B"): [ReactionSpec(0.1, {"C": 1}), ReactionSpec(0.03, {"A": 2})],
        ("B", "C"): [ReactionSpec(0.02)],
        ("C", "C"): [ReactionSpec(0.01, {"A": 1})],
        ("A", "C"): [ReactionSpec(0.04, {"A": 1, "C": 1})],
    })


@pytest.fixture
def mixed_rules():
    return mixed_table()


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, (ok, detail) in ACCEPTANCE_RESULTS.items():
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
