from fractions import Fraction

import pytest

from resonance_lab.exterior import flat_index


def make_point(n, **coords):
    """Point from keyword coordinates like ``a21=1, a34=-2``."""
    pt = [Fraction(0)] * (n * (n - 1))
    for key, val in coords.items():
        p, q = int(key[1]), int(key[2])
        pt[flat_index((p, q), n)] = Fraction(val)
    return pt


@pytest.fixture
def point():
    return make_point


ACCEPTANCE_LINES: list[str] = []


def record_criterion(number, title, ok, detail=""):
    line = f"criterion {number:>2} {'PASS' if ok else 'FAIL'}  {title}" + (f"  [{detail}]" if detail else "")
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
