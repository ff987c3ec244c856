"""Independent oracles shared by the test modules.

High-precision reference values come from mpmath, exact determinants from
Leibniz expansion over Fractions; neither touches the code under test.
"""

import itertools
import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

ORACLE_DPS = 120


def mp_zeta(s, dps=ORACLE_DPS):
    with mpmath.workdps(dps):
        return mpmath.zeta(s)


def mp_det(rows, dps=ORACLE_DPS):
    with mpmath.workdps(dps):
        return mpmath.det(mpmath.matrix(rows))


def zeta_hankel_oracle(n, r, dps=ORACLE_DPS):
    with mpmath.workdps(dps):
        vals = {k: mpmath.zeta(k) for k in range(2 + r, 2 * n + r + 1)}
        return mpmath.det(mpmath.matrix([[vals[i + j + r] for j in range(1, n + 1)] for i in range(1, n + 1)]))


def leibniz_det(rows):
    """Exact determinant by permutation expansion (small n only)."""
    n = len(rows)
    total = Fraction(0)
    for perm in itertools.permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        term = Fraction(-1 if inv % 2 else 1)
        for i, p in enumerate(perm):
            term *= rows[i][p]
        total += term
    return total


def hankel_rows(h, n, r):
    return [[Fraction(h(i + j + r)) for j in range(1, n + 1)] for i in range(1, n + 1)]


def contains_mp(ball, value, slack_bits=8):
    """True if the mpmath ``value`` lies in ``ball`` up to the oracle's own error."""
    lo, hi = ball.to_mpq_bounds()
    with mpmath.workdps(ORACLE_DPS):
        eps = abs(value) * mpmath.mpf(2) ** (-(ORACLE_DPS * 3 - slack_bits)) + mpmath.mpf(10) ** (-ORACLE_DPS + 5)
        lo_mp = mpmath.mpf(int(lo.numerator)) / int(lo.denominator)
        hi_mp = mpmath.mpf(int(hi.numerator)) / int(hi.denominator)
        return lo_mp - eps <= value <= hi_mp + eps


@pytest.fixture
def zeta_oracle():
    return mp_zeta


# one line per acceptance criterion, collected by test_acceptance and echoed at the end of the run
ACCEPTANCE_LINES: dict[str, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES, key=lambda k: int(k)):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
