"""Upper bounds on Hankel determinants and checks of the asymptotic constants."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .errors import EnvelopeDomainViolated, PrecisionExhausted
from .hankel import HankelQuery, exact_det, exact_hankel, hankel_det
from .numerics import Ball, PrecisionPolicy, Sign, escalate
from .sequences import RatioEnvelope, SeriesSpec, eval_series, factorial_seq, minimal_indices

A0_REFERENCE = Fraction("0.351466738331")


def envelope_bound(env: RatioEnvelope, spec: SeriesSpec, n: int, r: int, prec: int = 256) -> Ball:
    """h(2+r) * prod_{k=2}^n lambda(2k+r)."""
    if n < 2:
        raise ValueError("the envelope bound starts at n = 2")
    if r < env.K - 2:
        raise EnvelopeDomainViolated(f"r={r} below K-2={env.K - 2}")
    bound = eval_series(spec, 2 + r, prec)
    for k in range(2, n + 1):
        bound = bound * env.lam(2 * k + r)
    return bound


def factorial_envelope(prec: int = 64) -> RatioEnvelope:
    """A(k) = k-1, B(k) = k, lambda(k) = 2 (k-2)! for h(k) = (k-2)!."""
    return RatioEnvelope(
        case_tag="explicit",
        c=Fraction(0),
        K=2,
        A=lambda k: Ball.exact(k - 1, prec),
        B=lambda k: Ball.exact(k, prec),
        lam=lambda k: Ball.exact(2 * math.factorial(k - 2), prec),
        label="closed form",
    )


@dataclass(frozen=True)
class FactorialCheck:
    n: int
    r: int
    H: int
    bound: int
    holds: bool
    positive: bool


def factorial_bound(n: int, r: int) -> int:
    """2^(n-1) * prod_{k=1}^n (2k + r - 2)!."""
    out = 2 ** (n - 1)
    for k in range(1, n + 1):
        out *= math.factorial(2 * k + r - 2)
    return out


def factorial_bound_check(n: int, r: int) -> FactorialCheck:
    if n < 1 or r < 0:
        raise ValueError("need n >= 1 and r >= 0")
    H = exact_det(exact_hankel(HankelQuery(factorial_seq(), n, r)))
    assert H.denominator == 1
    H = int(H)
    bound = factorial_bound(n, r)
    return FactorialCheck(n, r, H, bound, H < bound, H > 0)


# ---------------------------------------------------------------------------
# Quadratic decay
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DecayRow:
    n: int
    log_H: Optional[Ball]
    bound_rhs: Ball
    status: str  # holds | fails | unresolved
    bits: int

    @property
    def holds(self) -> bool:
        return self.status == "holds"


@dataclass
class DecayReport:
    spec_name: str
    r: int
    rows: list[DecayRow]
    c_used: Ball
    epsilon: Optional[Fraction]
    asymptotic_constant: Optional[Ball]
    mode: str
    degenerate: bool = False


def asymptotic_constant(spec: SeriesSpec, prec: int = 128) -> Ball:
    """-log M when N = 1, else -2 (alpha - 1) log N = -2 (log M - log N)."""
    mi = minimal_indices(spec, prec=prec)
    logM = Ball.exact(mi.M, prec).log()
    if mi.N == 1:
        return -logM
    return -(logM - Ball.exact(mi.N, prec).log()) * 2


def verify_quadratic_decay(spec: SeriesSpec, n_range: Iterable[int], r: int,
                           epsilon: Fraction | None = None, c: Fraction | None = None,
                           max_bits: int = 8192) -> DecayReport:
    """Compare log H_n^(r) with -n^2 log(2 - epsilon) or -c n^2 per row.

    Rows whose comparison cannot be separated at ``max_bits`` are reported
    as unresolved rather than failed.
    """
    if (epsilon is None) == (c is None):
        raise ValueError("give exactly one of epsilon (zeta mode) or c (general mode)")
    mode = "zeta_epsilon" if epsilon is not None else "general_c"

    def slope(prec: int) -> Ball:
        if epsilon is not None:
            return Ball.exact(2 - Fraction(epsilon), prec).log()
        return Ball.exact(Fraction(c), prec)

    rows = []
    for n in sorted(n_range):
        policy = PrecisionPolicy.for_hankel(n, max_bits)

        def attempt(prec: int, n=n):
            det = hankel_det(spec, n, r, engine="lu", prec=prec)
            rhs = slope(prec) * (-n * n)
            if det.sign is not Sign.POSITIVE:
                return None, rhs, Sign.ZERO_UNRESOLVED, prec
            logH = det.value.log()
            return logH, rhs, (rhs - logH).sign(), prec

        try:
            (logH, rhs, sep, bits), _ = escalate(attempt, policy, lambda t: t[2] is not Sign.ZERO_UNRESOLVED)
            status = "holds" if sep is Sign.POSITIVE else "fails"
        except PrecisionExhausted:
            logH, rhs, _, bits = attempt(policy.max_bits)
            status = "unresolved"
        rows.append(DecayRow(n, logH, rhs, status, bits))

    try:
        asym = asymptotic_constant(spec)
        degenerate = minimal_indices(spec).degenerate
    except Exception:
        asym, degenerate = None, False
    return DecayReport(spec.name, r, rows, slope(128), Fraction(epsilon) if epsilon is not None else None,
                       asym, mode, degenerate)


# ---------------------------------------------------------------------------
# Heuristic asymptotics for zeta
# ---------------------------------------------------------------------------


class _ZetaDets:
    """Memo of certified zeta Hankel determinants for one computation."""

    def __init__(self, max_bits: int = 8192):
        from .sequences import zeta

        self.spec = zeta()
        self.max_bits = max_bits
        self._cache: dict[tuple[int, int], Ball] = {}

    def __call__(self, n: int, r: int) -> Ball:
        if n == 0:
            return Ball.exact(1)
        key = (n, r)
        if key not in self._cache:
            policy = PrecisionPolicy.for_hankel(n + 1, self.max_bits)
            self._cache[key] = hankel_det(self.spec, n, r, engine="lu", policy=policy,
                                          target="relative").value
        return self._cache[key]


def first_expansion(n: int) -> Fraction:
    """-1/(2n+1) + 2/(2n+1)^2 - (7/3)/(2n+1)^3."""
    x = Fraction(2 * n + 1)
    return -1 / x + 2 / x**2 - Fraction(7, 3) / x**3


def second_expansion(n: int) -> Fraction:
    """-1/(2n) - 1/(2n)^2 + (2/3)/(2n)^3 - (6/5)/(2n)^4 + (56/45)/(2n)^5."""
    y = Fraction(2 * n)
    return -1 / y - 1 / y**2 + Fraction(2, 3) / y**3 - Fraction(6, 5) / y**4 + Fraction(56, 45) / y**5


@dataclass(frozen=True)
class RatioComparison:
    measured: Ball
    predicted: Fraction
    residual: float  # |measured - predicted| * scale


@dataclass(frozen=True)
class MonienRatioRow:
    n: int
    first: RatioComparison            # -H_{n-1}^(0) H_n^(1) / (H_n^(0) H_{n+1}^(1)) vs first expansion
    second: RatioComparison           # -H_{n+1}^(0) H_{n-1}^(1) / (H_n^(0) H_n^(1)) vs second expansion
    first_reindexed: RatioComparison  # -H_{n+1}^(0) H_{n-1}^(1) / (H_n^(0) H_n^(1)) vs first expansion
    second_reindexed: RatioComparison  # -H_{n-1}^(0) H_n^(1) / (H_n^(0) H_{n-1}^(1)) vs second expansion


def _compare(measured: Ball, predicted: Fraction, scale: int) -> RatioComparison:
    delta = (measured - predicted) * scale
    return RatioComparison(measured, predicted, float(delta.mag()))


def monien_ratio_check(n_range: Iterable[int], max_bits: int = 8192,
                       dets: _ZetaDets | None = None) -> list[MonienRatioRow]:
    """Measured determinant ratios against the truncated expansions.

    Both the ratios as printed and the reindexed pairing are measured; the
    residual is scaled by (2n+1)^4 for the first expansion and (2n)^6 for
    the second.
    """
    H = dets or _ZetaDets(max_bits)
    rows = []
    for n in n_range:
        if n < 2:
            raise ValueError("ratios need n >= 2")
        p1, p2 = first_expansion(n), second_expansion(n)
        s1, s2 = (2 * n + 1) ** 4, (2 * n) ** 6
        a = -(H(n - 1, 0) * H(n, 1)) / (H(n, 0) * H(n + 1, 1))
        b = -(H(n + 1, 0) * H(n - 1, 1)) / (H(n, 0) * H(n, 1))
        c = -(H(n - 1, 0) * H(n, 1)) / (H(n, 0) * H(n - 1, 1))
        rows.append(MonienRatioRow(n, _compare(a, p1, s1), _compare(b, p2, s2),
                                   _compare(b, p1, s1), _compare(c, p2, s2)))
    return rows


@dataclass
class AsymptoticFit:
    n_range: list[int]
    A0_estimates: list[tuple[int, Ball]]
    A1_estimates: list[tuple[int, Ball]]
    ratio_estimates: list[tuple[int, Ball]]
    A0_reference: Fraction = A0_REFERENCE
    ratio_reference: Optional[Ball] = None
    ratio_rows: list[MonienRatioRow] = field(default_factory=list)


def ratio_reference(prec: int = 128) -> Ball:
    """e^(9/8) / sqrt(6)."""
    return Ball.exact(Fraction(9, 8), prec).exp() / Ball.exact(6, prec).sqrt()


def a0_estimate(n: int, H_n0: Ball) -> Ball:
    """H_n^(0) ((2n+1)/e^(3/2))^((n+1/2)^2) / (1 + (2n+1)^-2/24 - (12319/259200)(2n+1)^-4)."""
    prec = H_n0.prec
    x = Ball.exact(2 * n + 1, prec) / Ball.exact(Fraction(3, 2), prec).exp()
    X = Fraction(2 * n + 1)
    corr = 1 + Fraction(1, 24) / X**2 - Fraction(12319, 259200) / X**4
    return H_n0 * x.power(Fraction(2 * n + 1, 2) ** 2) / corr


def a1_estimate(n: int, H_nm1_1: Ball) -> Ball:
    """H_{n-1}^(1) (2n/e^(3/2))^(n^2 - 3/4) / (1 - (17/240)(2n)^-2 - (199873/7257600)(2n)^-4)."""
    prec = H_nm1_1.prec
    y = Ball.exact(2 * n, prec) / Ball.exact(Fraction(3, 2), prec).exp()
    Y = Fraction(2 * n)
    corr = 1 - Fraction(17, 240) / Y**2 - Fraction(199873, 7257600) / Y**4
    return H_nm1_1 * y.power(Fraction(n * n) - Fraction(3, 4)) / corr


def zagier_fit(n_range: Iterable[int], max_bits: int = 8192, with_ratios: bool = False,
               dets: _ZetaDets | None = None) -> AsymptoticFit:
    H = dets or _ZetaDets(max_bits)
    ns = list(n_range)
    a0 = [(n, a0_estimate(n, H(n, 0))) for n in ns]
    a1 = [(n, a1_estimate(n, H(n - 1, 1))) for n in ns if n >= 2]
    ratios = [(n, b / dict(a0)[n]) for n, b in a1]
    fit = AsymptoticFit(ns, a0, a1, ratios, ratio_reference=ratio_reference())
    if with_ratios:
        fit.ratio_rows = monien_ratio_check([n for n in ns if n >= 2], max_bits, dets=H)
    return fit
