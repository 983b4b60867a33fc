import os
from pathlib import Path

import pytest
from hypothesis import settings

from wefkit.circuit import encode, pm4_circuit
from wefkit.compiler import CompileParams, compile_program
from wefkit.pseudolang import load

ROOT = Path(__file__).resolve().parent.parent
PROGRAMS = ROOT / "programs"

settings.register_profile("default", max_examples=60, deadline=None)
settings.register_profile("ci", max_examples=200, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture(scope="session")
def pm4_wef():
    return encode(pm4_circuit())


@pytest.fixture(scope="session")
def listing():
    return load((PROGRAMS / "matching4.psc").read_text())


@pytest.fixture(scope="session")
def listing_wef(listing):
    return compile_program(listing, CompileParams(3, 13))


# one pass/fail line per acceptance criterion, printed after the run
_CRITERIA = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    props = dict(report.user_properties)
    if "criterion" not in props:
        return
    num = props["criterion"]
    prev = _CRITERIA.get(num, ("PASS", ""))
    if report.when == "call" or report.failed:
        status = "PASS" if report.passed and prev[0] == "PASS" else "FAIL"
        _CRITERIA[num] = (status, props.get("detail", prev[1]))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_CRITERIA):
        status, detail = _CRITERIA[num]
        terminalreporter.write_line(f"criterion {num:>2}: {status}  {detail}")
