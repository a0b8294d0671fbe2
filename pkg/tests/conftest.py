from pathlib import Path

import pytest

from qpt.exchange import explore, heart_key
from qpt.io import load_qp
from qpt.objects import CYObject

FIXTURES = Path(__file__).parent / "fixtures"

# Letter names for A3 objects: X=S_3, Y=S_2, Z=S_1 and the
# three non-simple indecomposables. A digit d after a letter means shift d-1.
LETTERS = {"X": (0, 0, 1), "Y": (0, 1, 0), "Z": (1, 0, 0), "U": (0, 1, 1), "V": (1, 1, 0), "W": (1, 1, 1)}

REGION_HEARTS = {
    "x1": "X1Y1Z2",
    "x2": "X1Y1Z1",
    "x3": "X2U1Z2",
    "x4": "X2U1Z1",
    "x5": "W1Y1U2",
    "x6": "X1Y2V1",
    "x7": "X2Y2W1",
    "x8": "W2Y1Z1",
    "x9": "U2Y1Z2",
    "x10": "V1Y2W2",
    "x11": "X2V2Z1",
    "x12": "X1V2Z1",
    "x13": "X2Y2Z2",
    "x14": "X1Y2Z2",
}

# every labelled forward tilt drawn between the hearts above
REGION_EDGES = [
    ("x2", "x1", "Z1"), ("x2", "x4", "X1"), ("x2", "x6", "Y1"), ("x1", "x3", "X1"),
    ("x1", "x14", "Y1"), ("x4", "x5", "U1"), ("x4", "x3", "Z1"), ("x3", "x9", "U1"),
    ("x5", "x7", "Y1"), ("x5", "x8", "W1"), ("x6", "x7", "X1"), ("x6", "x12", "V1"),
    ("x7", "x10", "W1"), ("x8", "x10", "Y1"), ("x8", "x9", "Z1"), ("x9", "x13", "Y1"),
    ("x10", "x11", "V1"), ("x11", "x13", "Z1"), ("x14", "x13", "X1"), ("x12", "x11", "X1"),
    ("x12", "x14", "Z1"),
]


def obj(code: str) -> CYObject:
    return CYObject.rep(LETTERS[code[0]], int(code[1:]) - 1)


def heart_of(text: str) -> str:
    return heart_key([obj(text[i : i + 2]) for i in range(0, len(text), 2)])


def fixture(name: str):
    return load_qp(FIXTURES / f"{name}.qp")


@pytest.fixture(scope="session")
def a3():
    return fixture("a3")


@pytest.fixture(scope="session")
def mu2_a3():
    return fixture("mu2_a3")


@pytest.fixture(scope="session")
def a3_graph(a3):
    return explore(a3, 6, "both")


@pytest.fixture(scope="session")
def region_keys():
    return {name: heart_of(text) for name, text in REGION_HEARTS.items()}


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.report_lines():
        terminalreporter.write_line(line)
