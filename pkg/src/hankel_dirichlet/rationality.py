"""Denominator growth of rational-valued series and the integrality step.

If every value F(k) = p_k / q_k is rational, then with
D_m = lcm(q_{R+2}, ..., q_{R+m}) the scaled determinant D^n * H_n^(r) is
an integer. Here everything is exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .errors import NotAnInteger, NotRationalSeries
from .hankel import HankelQuery, det_exact_rational
from .numerics import Ball, Sign
from .sequences import SeriesSpec


@dataclass(frozen=True)
class DenominatorLedger:
    """Values F(k) = p_k/q_k for k = R+2 .. R+m_max and the running lcm.

    ``D[m]`` is lcm(q_{R+2}, ..., q_{R+m}); the first entry is m = 2.
    """

    series: str
    R: int
    ks: tuple[int, ...]
    p: tuple[int, ...]
    q: tuple[int, ...]
    D: dict[int, int]

    def __len__(self) -> int:
        return len(self.ks)

    @property
    def m_max(self) -> int:
        return len(self.ks) + 1

    def q_of(self, k: int) -> int:
        return self.q[k - self.R - 2]

    def growth(self, prec: int = 128) -> dict[int, Ball]:
        """log D_m / m for each ledger entry."""
        return {m: Ball.exact(D, prec).log() / m for m, D in self.D.items()}


def _require_rational(spec: SeriesSpec) -> None:
    if not spec.is_rational:
        raise NotRationalSeries(f"{spec.name} has no exact rational values")


def rational_values(spec: SeriesSpec, R: int, m_max: int) -> DenominatorLedger:
    _require_rational(spec)
    if R < spec.s0 - 2:
        raise ValueError(f"{spec.name}: R={R} is below s0-2={spec.s0 - 2}")
    if m_max < 2:
        raise ValueError("m_max must be at least 2")
    ks, ps, qs, D = [], [], [], {}
    running = 1
    for m in range(2, m_max + 1):
        k = R + m
        v = spec.exact_value(k)
        ks.append(k)
        ps.append(v.numerator)
        qs.append(v.denominator)
        running = math.lcm(running, v.denominator)
        D[m] = running
    return DenominatorLedger(spec.name, R, tuple(ks), tuple(ps), tuple(qs), D)


def minimal_R(spec: SeriesSpec) -> int:
    """Smallest admissible R, i.e. ceil(s0) - 2."""
    return math.ceil(spec.s0) - 2


def integrality_check(spec: SeriesSpec, n: int, r: int, R: int | None = None) -> int:
    """Return D^n * H_n^(r) as an exact integer.

    The matrix uses values F(2+r) .. F(2n+r). With R = r the scaling
    denominator is D_{2n}; for r > R it is D_{2n+r-R}, which covers the
    same values.
    """
    _require_rational(spec)
    R = r if R is None else R
    if r < R:
        raise ValueError(f"need r >= R, got r={r}, R={R}")
    m = 2 * n + r - R
    ledger = rational_values(spec, R, max(m, 2))
    D = ledger.D[m] if m >= 2 else 1
    H, _ = det_exact_rational(HankelQuery(spec, n, r))
    scaled = D**n * H
    if scaled.denominator != 1 or scaled < 0:
        raise NotAnInteger(f"{spec.name}: D^{n} * H_{n}^({r}) = {scaled}")
    return int(scaled)


def integrality_grid(spec: SeriesSpec, ns: Iterable[int], rs: Iterable[int],
                     R: int | None = None) -> dict[tuple[int, int], int]:
    rs = list(rs)
    return {(n, r): integrality_check(spec, n, r, R) for n in ns for r in rs}


@dataclass(frozen=True)
class GrowthRow:
    m: int
    D: int
    base_power: Fraction
    holds: bool          # D_m > base^m
    rate: float          # log D_m / m
    max_q: int
    max_q_rhs: float     # m log(base)
    max_q_holds: bool


@dataclass(frozen=True)
class GrowthReport:
    series: str
    base: Fraction
    rows: tuple[GrowthRow, ...]

    @property
    def all_hold(self) -> bool:
        return all(row.holds for row in self.rows)

    @property
    def first_failure(self) -> int | None:
        return next((row.m for row in self.rows if not row.holds), None)

    @property
    def eventually_holds(self) -> bool:
        """D_m > base^m for every m past the last failure, with at least one such m."""
        last_fail = max((row.m for row in self.rows if not row.holds), default=None)
        return last_fail is None or last_fail < self.rows[-1].m

    @property
    def rate_nondecreasing(self) -> bool:
        rates = [row.rate for row in self.rows]
        return all(a <= b + 1e-12 for a, b in zip(rates, rates[1:]))


def growth_verifier(ledger: DenominatorLedger, base: Fraction | str | float) -> GrowthReport:
    if len(ledger) < 3:
        raise ValueError("growth verification needs a ledger with at least 3 entries")
    base = Fraction(str(base)) if isinstance(base, float) else Fraction(base)
    log_base = Ball.exact(base, 128).log() if base > 0 else None
    rows = []
    max_q = 0
    for i, m in enumerate(sorted(ledger.D)):
        D = ledger.D[m]
        max_q = max(max_q, ledger.q[i])
        power = base**m
        if log_base is None:
            rhs_ball, max_q_holds = None, True
        else:
            rhs_ball = log_base * m
            max_q_holds = (Ball.exact(max_q, 128) - rhs_ball).sign() is Sign.POSITIVE
        rows.append(GrowthRow(
            m=m, D=D, base_power=power, holds=D > power, rate=math.log(D) / m,
            max_q=max_q, max_q_rhs=float(rhs_ball.mid) if rhs_ball is not None else float("-inf"),
            max_q_holds=max_q_holds,
        ))
    return GrowthReport(ledger.series, base, tuple(rows))
