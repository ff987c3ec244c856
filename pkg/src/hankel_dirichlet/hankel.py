"""Hankel determinants H_n^(r)[h] = det(h(i + j + r))_{1 <= i, j <= n}.

Four engines share one result type:

* ``det_lu``             ball Gaussian elimination (the workhorse)
* ``det_dodgson``        the condensation recurrence on a table of offsets
* ``monien_sum``         positive-term expansion, a certified lower bound
* ``det_exact_rational`` fraction-free elimination over the integers
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

import gmpy2

from .errors import (
    DivisorContainsZero,
    InteriorDeterminantUnresolved,
    NotDirichletKind,
    NotRationalSeries,
    PivotContainsZero,
    PrecisionExhausted,
)
from .numerics import RAD_PREC, Ball, PrecisionPolicy, Sign, certify_sign, escalate, _ctx
from .sequences import SeriesKind, SeriesSpec, ValueCache, nonzero_indices

Matrix = list[list[Ball]]

ENGINES = ("lu", "dodgson", "monien", "exact")


@dataclass(frozen=True)
class HankelQuery:
    spec: SeriesSpec
    n: int
    r: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("Hankel size n must be positive")
        if 2 + self.r < self.spec.s0:
            raise ValueError(
                f"{self.spec.name}: offset r={self.r} puts h({2 + self.r}) below s0={self.spec.s0}"
            )


@dataclass(frozen=True)
class DetResult:
    value: Ball
    sign: Sign
    engine: str
    bits_used: int
    n: int
    r: Optional[int] = None
    exact: Optional[Fraction] = None
    lower_bound: bool = False


def _sign_of_fraction(x: Fraction) -> Sign:
    if x > 0:
        return Sign.POSITIVE
    if x < 0:
        return Sign.NEGATIVE
    return Sign.EXACTLY_ZERO


def build_hankel(q: HankelQuery, prec: int, values: Callable[[int], Ball] | None = None) -> Matrix:
    """Ball matrix with entry (i, j) = h(i + j + r); one shared ball per anti-diagonal."""
    values = values or ValueCache(q.spec, prec)
    diag = {k: values(k) for k in range(2 + q.r, 2 * q.n + q.r + 1)}
    return [[diag[i + j + q.r] for j in range(1, q.n + 1)] for i in range(1, q.n + 1)]


def exact_hankel(q: HankelQuery) -> list[list[Fraction]]:
    if not q.spec.is_rational:
        raise NotRationalSeries(f"{q.spec.name} has no exact rational values")
    diag = {k: q.spec.exact_value(k) for k in range(2 + q.r, 2 * q.n + q.r + 1)}
    return [[diag[i + j + q.r] for j in range(1, q.n + 1)] for i in range(1, q.n + 1)]


# ---------------------------------------------------------------------------
# Ball LU
# ---------------------------------------------------------------------------


def _hadamard_bound(rows: Sequence[Sequence[Ball]]) -> gmpy2.mpfr:
    """Upper bound for |det| of any matrix enclosed by ``rows``."""
    ru = _ctx(RAD_PREC, gmpy2.RoundUp)
    bound = gmpy2.mpfr(1)
    for row in rows:
        sq = gmpy2.mpfr(0)
        for x in row:
            m = x.mag()
            sq = ru.add(sq, ru.mul(m, m))
        bound = ru.mul(bound, ru.sqrt(sq))
    return bound


def det_lu(m: Matrix, strict: bool = False, r: int | None = None) -> DetResult:
    """Determinant enclosure by elimination with partial pivoting on |mid|.

    A pivot ball containing zero raises :class:`PivotContainsZero` when
    ``strict``; otherwise the remaining Schur complement is bounded with
    Hadamard's inequality and the result straddles zero.
    """
    n = len(m)
    if any(len(row) != n for row in m):
        raise ValueError("matrix must be square")
    if n == 0:
        return DetResult(Ball.exact(1), Sign.POSITIVE, "lu", 0, 0, r)
    prec = max(x.prec for row in m for x in row)
    a = [list(row) for row in m]
    det = Ball.exact(1, prec)
    for k in range(n):
        p = max(range(k, n), key=lambda i: abs(gmpy2.mpq(a[i][k].mid)))
        if p != k:
            a[k], a[p] = a[p], a[k]
            det = -det
        piv = a[k][k]
        if piv.contains_zero():
            if k == n - 1:
                det = det * piv
                break
            if strict:
                raise PivotContainsZero(f"pivot {k} of {n} contains zero")
            rest = [row[k:] for row in a[k:]]
            det = det * Ball(gmpy2.mpfr(0), _hadamard_bound(rest), prec)
            break
        det = det * piv
        for i in range(k + 1, n):
            f = a[i][k] / piv
            row_i, row_k = a[i], a[k]
            for j in range(k + 1, n):
                row_i[j] = row_i[j] - f * row_k[j]
    return DetResult(det, certify_sign(det), "lu", prec, n, r)


# ---------------------------------------------------------------------------
# Exact rational
# ---------------------------------------------------------------------------


def bareiss_det(a: Sequence[Sequence[int]]) -> int:
    """Fraction-free integer determinant (Bareiss) with row pivoting."""
    n = len(a)
    m = [[gmpy2.mpz(x) for x in row] for row in a]
    sign = 1
    prev = gmpy2.mpz(1)
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        piv = m[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * piv - m[i][k] * m[k][j]) // prev
        prev = piv
    return sign * int(m[n - 1][n - 1]) if n else 1


def exact_det(rows: Sequence[Sequence[Fraction]]) -> Fraction:
    n = len(rows)
    if n == 0:
        return Fraction(1)
    L = 1
    for row in rows:
        for x in row:
            L = math.lcm(L, Fraction(x).denominator)
    ints = [[int(Fraction(x) * L) for x in row] for row in rows]
    return Fraction(bareiss_det(ints), L**n)


def det_exact_rational(q: HankelQuery) -> tuple[Fraction, DetResult]:
    value = exact_det(exact_hankel(q))
    prec = max(64, value.numerator.bit_length() + 64)
    ball = Ball.exact(value, prec)
    return value, DetResult(ball, _sign_of_fraction(value), "exact", 0, q.n, q.r, exact=value)


# ---------------------------------------------------------------------------
# Dodgson condensation
# ---------------------------------------------------------------------------


def dodgson_table(spec: SeriesSpec, n: int, r: int, prec: int,
                  values: Callable[[int], Ball] | None = None) -> dict[tuple[int, int], Ball]:
    """All H_k^(rho) with k <= n and r <= rho <= r + 2(n - k).

    Uses H_{k+1}^(rho) = (H_k^(rho) H_k^(rho+2) - (H_k^(rho+1))^2) / H_{k-1}^(rho+2).
    """
    values = values or ValueCache(spec, prec)
    top = r + 2 * (n - 1)
    table: dict[tuple[int, int], Ball] = {}
    one = Ball.exact(1, prec)
    for rho in range(r, top + 3):
        table[(0, rho)] = one
    for rho in range(r, top + 1):
        table[(1, rho)] = values(rho + 2)
    for k in range(1, n):
        for rho in range(r, r + 2 * (n - k - 1) + 1):
            num = table[(k, rho)] * table[(k, rho + 2)] - table[(k, rho + 1)] * table[(k, rho + 1)]
            div = table[(k - 1, rho + 2)]
            if div.contains_zero():
                raise DivisorContainsZero(f"H_{k - 1}^({rho + 2}) contains zero")
            table[(k + 1, rho)] = num / div
    return table


def det_dodgson(q: HankelQuery, prec: int, values: Callable[[int], Ball] | None = None) -> DetResult:
    table = dodgson_table(q.spec, q.n, q.r, prec, values)
    v = table[(q.n, q.r)]
    return DetResult(v, certify_sign(v), "dodgson", prec, q.n, q.r)


# ---------------------------------------------------------------------------
# Monien sum
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MonienResult:
    value: Fraction
    exact: bool
    terms: int
    cutoff: int


def _monien_term(spec: SeriesSpec, tup: Sequence[int], n: int, r: int) -> Fraction:
    t = Fraction(1)
    e = 2 * n + r
    for m in tup:
        t *= Fraction(spec.coeff(m)) * (Fraction(1, m) ** e if e >= 0 else Fraction(m) ** -e)
    vdm = 1
    for i, j in itertools.combinations(tup, 2):
        vdm *= (i - j) ** 2
    return t * vdm


def monien_sum(q: HankelQuery, cutoff: int, max_terms: int = 2_000_000) -> MonienResult:
    """Sum of the positive-term expansion over m_1 < ... < m_n <= cutoff.

    Every term is nonnegative, so the partial sum is an exact rational lower
    bound for H_n^(r); it is the exact determinant when the declared support
    lies inside [1, cutoff].
    """
    spec = q.spec
    if spec.kind is SeriesKind.EXPLICIT or spec.coeff is None:
        raise NotDirichletKind(f"{spec.name} is not a Dirichlet series")
    if cutoff < q.n:
        raise ValueError("cutoff must be at least n")
    idx = nonzero_indices(spec, cutoff)
    exact = spec.support is not None and all(m <= cutoff for m in spec.support)
    count = math.comb(len(idx), q.n)
    if count > max_terms:
        raise ValueError(f"{count} tuples exceed max_terms={max_terms}")
    total = Fraction(0)
    for tup in itertools.combinations(idx, q.n):
        total += _monien_term(spec, tup, q.n, q.r)
    return MonienResult(total, exact, count, cutoff)


@dataclass(frozen=True)
class PositivityCertificate:
    status: str  # positive_certificate | vanishes_certificate | unresolved
    tuple: Optional[tuple[int, ...]] = None
    term: Optional[Fraction] = None
    reason: str = ""


def certify_positive(q: HankelQuery, horizon: int = 4096) -> PositivityCertificate:
    """Sign certificate from the positive expansion.

    One strictly positive term already proves H > 0 because no term is
    negative; a declared support with fewer than n points forces H = 0.
    """
    spec = q.spec
    if spec.kind is SeriesKind.EXPLICIT or spec.coeff is None:
        return PositivityCertificate("unresolved", reason="not a Dirichlet series")
    if spec.support is not None and len([m for m in spec.support if spec.coeff(m)]) < q.n:
        return PositivityCertificate("vanishes_certificate",
                                     reason=f"support has fewer than {q.n} points")
    first = []
    for m in nonzero_indices(spec, horizon):
        first.append(m)
        if len(first) == q.n:
            break
    if len(first) < q.n:
        return PositivityCertificate("unresolved", reason=f"fewer than {q.n} nonzero coefficients up to {horizon}")
    term = _monien_term(spec, first, q.n, q.r)
    if term > 0:
        return PositivityCertificate("positive_certificate", tuple(first), term)
    return PositivityCertificate("unresolved", tuple(first), term)


# ---------------------------------------------------------------------------
# Driver with precision escalation
# ---------------------------------------------------------------------------


def _accept(target: str) -> Callable[[DetResult], bool]:
    if target == "sign":
        return lambda d: d.sign is not Sign.ZERO_UNRESOLVED
    if target == "relative":
        return lambda d: d.sign is not Sign.ZERO_UNRESOLVED and d.value.rel_rad() < 2.0**-53
    raise ValueError(f"unknown target {target!r}")


def hankel_det(spec: SeriesSpec, n: int, r: int, engine: str = "auto",
               policy: PrecisionPolicy | None = None, prec: int | None = None,
               target: str = "sign", monien_cutoff: int | None = None) -> DetResult:
    """Compute H_n^(r) with the requested engine.

    With ``prec`` given the computation runs once at that precision and may
    return ``zero_unresolved``; otherwise precision follows ``policy``.
    A Dodgson divisor that contains zero triggers one precision doubling,
    then a fallback to LU.
    """
    q = HankelQuery(spec, n, r)
    if engine == "auto":
        engine = "exact" if spec.is_rational else "lu"
    if engine == "exact":
        return det_exact_rational(q)[1]
    if engine == "monien":
        res = monien_sum(q, monien_cutoff or n + 4)
        v = res.value
        sign = _sign_of_fraction(v)
        if not res.exact and sign is Sign.EXACTLY_ZERO:
            sign = Sign.ZERO_UNRESOLVED
        return DetResult(Ball.exact(v, max(64, v.numerator.bit_length() + 64)), sign, "monien", 0, n, r,
                         exact=v if res.exact else None, lower_bound=not res.exact)
    if engine not in ("lu", "dodgson"):
        raise ValueError(f"unknown engine {engine!r}")

    def lu_at(p: int) -> DetResult:
        return det_lu(build_hankel(q, p), r=r)

    def dodgson_at(p: int) -> DetResult:
        try:
            return det_dodgson(q, p)
        except DivisorContainsZero:
            pass
        try:
            return det_dodgson(q, 2 * p)
        except DivisorContainsZero:
            return lu_at(p)

    compute = lu_at if engine == "lu" else dodgson_at
    if prec is not None:
        return compute(prec)
    policy = policy or PrecisionPolicy.for_hankel(n)
    result, _ = escalate(compute, policy, _accept(target))
    return result


# ---------------------------------------------------------------------------
# Identity checks
# ---------------------------------------------------------------------------


def check_dodgson_identity(spec: SeriesSpec, n: int, r: int, prec: int = 256,
                           engine: str = "lu", shared_values: bool = True) -> Ball:
    """Residual H_{n+1}^(r) H_{n-1}^(r+2) - H_n^(r) H_n^(r+2) + (H_n^(r+1))^2.

    ``engine="lu"`` evaluates every factor with ball LU; ``engine="exact"``
    uses exact rationals and returns a zero-radius ball. With
    ``shared_values=False`` each determinant re-evaluates the series, so an
    evaluator that is not a function of its argument shows up as a
    nonzero residual.
    """
    if n < 2:
        raise ValueError("identity check needs n >= 2")
    keys = [(n + 1, r), (n - 1, r + 2), (n, r), (n, r + 2), (n, r + 1)]
    if engine == "exact":
        H = {k: exact_det(exact_hankel(HankelQuery(spec, *k))) for k in keys}
        res = H[(n + 1, r)] * H[(n - 1, r + 2)] - H[(n, r)] * H[(n, r + 2)] + H[(n, r + 1)] ** 2
        return Ball.exact(res, max(64, res.numerator.bit_length() + 64))
    if engine != "lu":
        raise ValueError(f"unsupported engine {engine!r}")
    values = ValueCache(spec, prec) if shared_values else None
    H = {k: det_lu(build_hankel(HankelQuery(spec, *k), prec, values)).value for k in keys}
    return H[(n + 1, r)] * H[(n - 1, r + 2)] - H[(n, r)] * H[(n, r + 2)] + H[(n, r + 1)] * H[(n, r + 1)]


@dataclass(frozen=True)
class Telescoping:
    ratio_product: Ball
    correction_product: Ball
    reconstruction: Ball
    log_ratio_product: Optional[Ball]
    correction_factors: int
    direct: Ball
    agrees: bool
    printed_reconstruction: Optional[Ball] = None
    printed_agrees: Optional[bool] = None
    factors: list[tuple[int, int, Ball]] = field(default_factory=list, compare=False)


def telescoping_decomposition(q: HankelQuery, prec: int = 256) -> Telescoping:
    """Factor H_n^(r) by iterating the one-step condensation identity.

    H_n^(r) = h(2+r) * prod_{i=2}^n H_2^(r+2(i-2)) / H_1^(r+2(i-2))
                     * prod_{i=2}^n prod_{j=0}^{i-3} c_{i-1-j}^(r+2j),
    with c_m^(rho) = 1 - (H_m^(rho+1))^2 / (H_m^(rho) H_m^(rho+2)).

    The printed variant with denominators H^(r) H^(r+2j) and numerator
    H^(r+j+1) is evaluated alongside and its agreement reported.
    """
    n, r, spec = q.n, q.r, q.spec
    if n < 3:
        raise ValueError("telescoping needs n >= 3")
    values = ValueCache(spec, prec)
    cache: dict[tuple[int, int], Ball] = {}

    def H(k: int, rho: int) -> Ball:
        if (k, rho) not in cache:
            cache[(k, rho)] = det_lu(build_hankel(HankelQuery(spec, k, rho), prec, values)).value
        return cache[(k, rho)]

    def nonzero(k: int, rho: int) -> Ball:
        v = H(k, rho)
        if v.contains_zero():
            raise InteriorDeterminantUnresolved(f"H_{k}^({rho}) not certified nonzero at {prec} bits")
        return v

    ratio = Ball.exact(1, prec)
    for i in range(2, n + 1):
        rho = r + 2 * (i - 2)
        ratio = ratio * nonzero(2, rho) / nonzero(1, rho)

    corr = Ball.exact(1, prec)
    printed = Ball.exact(1, prec)
    factors = []
    printed_ok = True
    for i in range(2, n + 1):
        for j in range(0, i - 2):
            m, rho = i - 1 - j, r + 2 * j
            c = 1 - H(m, rho + 1) * H(m, rho + 1) / (nonzero(m, rho) * nonzero(m, rho + 2))
            factors.append((i, j, c))
            corr = corr * c
            try:
                printed = printed * (1 - H(m, r + j + 1) * H(m, r + j + 1) / (nonzero(m, r) * nonzero(m, r + 2 * j)))
            except InteriorDeterminantUnresolved:
                printed_ok = False

    h0 = values(2 + r)
    recon = h0 * ratio * corr
    direct = H(n, r)
    log_ratio = ratio.log() if ratio.sign() is Sign.POSITIVE else None
    printed_recon = h0 * ratio * printed if printed_ok else None
    return Telescoping(
        ratio_product=ratio,
        correction_product=corr,
        reconstruction=recon,
        log_ratio_product=log_ratio,
        correction_factors=len(factors),
        direct=direct,
        agrees=recon.overlaps(direct),
        printed_reconstruction=printed_recon,
        printed_agrees=printed_recon.overlaps(direct) if printed_recon is not None else None,
        factors=factors,
    )


def engines_agree(results: Sequence[DetResult]) -> bool:
    """Pairwise intersection of the enclosures."""
    return all(a.value.overlaps(b.value) for a, b in itertools.combinations(results, 2))
