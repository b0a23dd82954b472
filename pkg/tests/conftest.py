import numpy as np
import pytest

from bpsat.cnf import CnfFormula

# 3x4 parity-check matrix used throughout the LDPC tests
PAPER_H = np.array([[1, 1, 1, 0],
                    [1, 1, 0, 1],
                    [0, 1, 1, 1]], dtype=np.uint8)


@pytest.fixture
def paper_h():
    return PAPER_H.copy()


@pytest.fixture
def xor2():
    """(x1 | x2) & (~x1 | ~x2): exactly one of two."""
    return CnfFormula(2, ((1, 2), (-1, -2)))


# --- acceptance reporting: one PASS/FAIL line per criterion

_ACCEPTANCE = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label): acceptance criterion")


def pytest_runtest_logreport(report):
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        for key, label in report.user_properties:
            if key == "criterion":
                notes = [v for k, v in report.user_properties if k == "note"]
                status = {"passed": "PASS", "failed": "FAIL"}.get(report.outcome, "SKIP")
                _ACCEPTANCE.append((label, status, "; ".join(notes)))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label, status, note in sorted(_ACCEPTANCE):
        terminalreporter.write_line(f"{status:4}  {label}" + (f"  [{note}]" if note else ""))


@pytest.fixture
def criterion(request, record_property):
    """Tag a test with its acceptance label; returns a ``note(text)`` recorder."""
    marker = request.node.get_closest_marker("criterion")
    record_property("criterion", marker.args[0])
    return lambda text: record_property("note", text)
