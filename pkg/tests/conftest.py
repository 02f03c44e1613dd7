from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # make oracles importable

from narvis import component_tree as ct, svg_ingest as si

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def opinionseer_markup() -> str:
    return (FIXTURES / "opinionseer.svg").read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def opinionseer_doc(opinionseer_markup) -> si.SvgDocument:
    return si.parse_svg(opinionseer_markup)


@pytest.fixture(scope="session")
def opinionseer_primitives(opinionseer_doc) -> list[si.VisualPrimitive]:
    return si.extract_primitives(opinionseer_doc)


@pytest.fixture(scope="session")
def opinionseer_tree(opinionseer_primitives) -> ct.ComponentTree:
    return ct.build_tree(opinionseer_primitives, "opinionseer")


@pytest.fixture(scope="session")
def textflow_markup() -> str:
    return (FIXTURES / "textflow.svg").read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def textflow_doc(textflow_markup) -> si.SvgDocument:
    return si.parse_svg(textflow_markup)


@pytest.fixture(scope="session")
def table1_deck_text() -> str:
    return (FIXTURES / "table1_deck.json").read_text(encoding="utf-8")


# -- acceptance criterion reporting -------------------------------------------

def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One pass/fail line per acceptance criterion."""
    lines = []
    for outcome in ("passed", "failed", "error"):
        for report in terminalreporter.stats.get(outcome, []):
            if "test_acceptance.py" in str(getattr(report, "nodeid", "")):
                name = report.nodeid.split("::")[-1].replace("test_criterion_", "")
                status = "PASS" if outcome == "passed" else "FAIL"
                lines.append((name, status))
    if lines:
        terminalreporter.write_sep("-", "acceptance criteria")
        for name, status in sorted(lines):
            terminalreporter.write_line(f"[{status}] {name}")
