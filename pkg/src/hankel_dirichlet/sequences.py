"""Dirichlet series and explicit sequences with certified evaluation.

The catalog covers the series used throughout the package::

    zeta            f(n) = 1
    zeta_ap(a,b)    F(k) = zeta(a*k + b), i.e. f(m**a) = m**-b
    zeta_minus_1    f(1) = 0, f(n) = 1 otherwise
    pow2            f(n) = 1 iff n is a power of two; F(s) = 2**s / (2**s - 1)
    factorial_seq   h(k) = (k - 2)!  (explicit sequence)
    geo2            f(1) = f(2) = 1; h(k) = 1 + 2**-k  (finite support)

Custom series can be loaded from JSON with :func:`from_file`.
"""

from __future__ import annotations

import enum
import json
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Callable, Iterable, Mapping, Optional, Sequence, Union

import gmpy2
import mpmath

from .errors import (
    EnvelopeViolated,
    FewerThanTwoNonzero,
    InvalidSeries,
    TailDiverges,
)
from .numerics import Ball, Sign, _down, _up

Real = Union[int, Fraction, Ball]

DEFAULT_HORIZON = 256
MAX_TERMS = 200_000


class SeriesKind(str, enum.Enum):
    DIRICHLET = "dirichlet"
    EXPLICIT = "explicit_sequence"
    RATIONAL = "rational_closed_form"


@dataclass(frozen=True)
class SeriesSpec:
    """An ordinary Dirichlet series F(s) = sum f(n) n**-s, or an explicit h(k).

    ``support`` declares a finite support; ``horizon`` marks the last index
    for which ``coeff`` is known (beyond it only ``tail_bound`` applies).
    ``evaluator`` is an optional specialised certified evaluator
    ``(s, prec) -> Ball`` used in place of generic summation.
    """

    name: str
    kind: SeriesKind
    s0: Fraction
    coeff: Optional[Callable[[int], Fraction]] = None
    term: Optional[Callable[[int], Fraction]] = None
    tail_bound: tuple[Fraction, Fraction] = (Fraction(1), Fraction(0))
    rational_eval: Optional[Callable[[int], Fraction]] = None
    support: Optional[tuple[int, ...]] = None
    horizon: Optional[int] = None
    evaluator: Optional[Callable[[Real, int], Ball]] = field(default=None, compare=False)
    nondegenerate: Optional[bool] = None
    sample_horizon: int = 64

    def __post_init__(self) -> None:
        object.__setattr__(self, "s0", Fraction(self.s0))
        C, kappa = (Fraction(x) for x in self.tail_bound)
        object.__setattr__(self, "tail_bound", (C, kappa))
        if C < 0:
            raise InvalidSeries("tail constant C must be nonnegative")
        if self.kind is SeriesKind.EXPLICIT:
            if self.term is None:
                raise InvalidSeries("explicit sequences need a term oracle")
            return
        if self.coeff is None:
            raise InvalidSeries(f"{self.kind.value} series need a coefficient oracle")
        if self.kind is SeriesKind.RATIONAL and self.rational_eval is None:
            raise InvalidSeries("rational_closed_form series need rational_eval")
        limit = self.sample_horizon if self.horizon is None else min(self.sample_horizon, self.horizon)
        for n in range(1, limit + 1):
            f = Fraction(self.coeff(n))
            if f < 0:
                raise InvalidSeries(f"{self.name}: coefficient f({n}) = {f} is negative")
            if not _within_growth(f, n, C, kappa):
                raise InvalidSeries(f"{self.name}: f({n}) = {f} exceeds declared bound {C}*n^{kappa}")

    @property
    def has_coefficients(self) -> bool:
        return self.coeff is not None

    @property
    def support_finite(self) -> bool:
        return self.support is not None

    @property
    def is_rational(self) -> bool:
        return self.rational_eval is not None or self.kind is SeriesKind.EXPLICIT

    def exact_value(self, k: int) -> Fraction:
        if self.kind is SeriesKind.EXPLICIT:
            return Fraction(self.term(k))
        if self.rational_eval is None:
            raise TypeError(f"{self.name} has no exact rational values")
        return Fraction(self.rational_eval(k))


def _within_growth(f: Fraction, n: int, C: Fraction, kappa: Fraction) -> bool:
    """Exact test of ``f <= C * n**kappa`` for rational kappa."""
    if f == 0:
        return True
    if C == 0:
        return False
    p, q = kappa.numerator, kappa.denominator
    lhs = (f / C) ** q
    return lhs <= Fraction(n) ** p


# ---------------------------------------------------------------------------
# Certified evaluation
# ---------------------------------------------------------------------------


def _as_ball(s: Real, prec: int) -> Ball:
    return s.with_prec(max(prec, s.prec)) if isinstance(s, Ball) else Ball.exact(s, prec)


def _float(s: Real) -> float:
    return float(s.mid) if isinstance(s, Ball) else float(s)


def inv_pow(n: int, s: Real, prec: int) -> Ball:
    """Enclosure of ``n ** -s``."""
    if isinstance(s, int):
        if n == 1:
            return Ball.exact(1, prec)
        lo = _down(prec).pow(gmpy2.mpz(n), -s)
        hi = _up(prec).pow(gmpy2.mpz(n), -s)
        return Ball.from_bounds(lo, hi, prec)
    if n == 1:
        return Ball.exact(1, prec)
    return (Ball.exact(n, prec).log() * (-_as_ball(s, prec))).exp()


@lru_cache(maxsize=None)
def _em_coefficient(j: int) -> Fraction:
    """B_{2j} / (2j)! as an exact fraction."""
    p, q = mpmath.bernfrac(2 * j)
    return Fraction(int(p), int(q)) / math.factorial(2 * j)


def zeta_em(s: Real, prec: int, start: int = 1) -> Ball:
    """Certified ``sum_{n >= start} n**-s`` for real s > 1 by Euler-Maclaurin.

    The remainder after M correction terms is bounded by
    ``4 |(s)_{2M}| N**(1 - s - 2M) / ((2 pi)**(2M) (s + 2M - 1))``.
    """
    sb = _as_ball(s, prec)
    if not sb.lower() > 1:
        raise TailDiverges(f"zeta needs s > 1, got {s}")
    sf = _float(s)
    M = math.ceil((prec + 16) / (2 * math.log2(2 * math.pi))) + 1
    N = max(start + 1, math.ceil(sf) + 2 * M + 1)

    total = Ball.exact(0, prec)
    for n in range(start, N):
        total = total + inv_pow(n, s, prec)
    NT = inv_pow(N, s, prec)
    total = total + NT * N / (sb - 1) + NT / 2

    t = NT * sb / N
    corr = Ball.exact(0, prec)
    N2 = N * N
    for j in range(1, M + 1):
        corr = corr + t * _em_coefficient(j)
        if j < M:
            t = t * (sb + (2 * j - 1)) * (sb + 2 * j) / N2
    two_pi_pow = (Ball.pi(prec) * 2).pow_int(2 * M)
    err = (t * 4 / two_pi_pow).mag()
    return (total + corr).add_error(err)


def dirichlet_sum(spec: SeriesSpec, s: Real, prec: int, cutoff: int | None = None,
                  max_terms: int = MAX_TERMS) -> Ball:
    """Direct summation up to a cutoff T plus the integral tail bound.

    The tail is enclosed in ``[0, C * T**(kappa + 1 - s) / (s - kappa - 1)]``.
    """
    if spec.coeff is None:
        raise InvalidSeries(f"{spec.name} has no coefficients")
    C, kappa = spec.tail_bound
    if spec.support is not None:
        total = Ball.exact(0, prec)
        for n in spec.support:
            total = total + inv_pow(n, s, prec) * Fraction(spec.coeff(n))
        return total
    if isinstance(s, Ball):
        expo = s - kappa - 1
        positive = expo.lower() > 0
        d = float(expo.mid)
    else:
        expo = Fraction(s) - kappa - 1
        positive = expo > 0
        d = float(expo)
        if expo.denominator == 1:
            expo = int(expo)
    if not positive:
        raise TailDiverges(f"{spec.name}: tail diverges for s={s} with kappa={kappa}")
    if cutoff is None:
        logT = (math.log(max(float(C), 1e-300) / d) + prec * math.log(2)) / d
        cutoff = max(1, math.ceil(math.exp(min(logT, math.log(max_terms)))))
    cutoff = min(cutoff, max_terms)
    if spec.horizon is not None:
        cutoff = min(cutoff, spec.horizon)
    total = Ball.exact(0, prec)
    for n in range(1, cutoff + 1):
        f = spec.coeff(n)
        if f:
            total = total + inv_pow(n, s, prec) * Fraction(f)
    if C:
        # sum_{n>T} C n**(kappa-s) < C T**-(s-kappa-1) / (s-kappa-1)
        tail = inv_pow(cutoff, expo, prec) * C / expo
        total = total + Ball.from_bounds(gmpy2.mpfr(0), tail.upper(), prec)
    return total


def eval_series(spec: SeriesSpec, s: Real, prec: int = 128) -> Ball:
    """Certified enclosure of F(s) (or h(s) for explicit sequences)."""
    if isinstance(s, Ball):
        if not s.lower() >= spec.s0:
            raise ValueError(f"{spec.name}: s={s!r} below s0={spec.s0}")
    elif Fraction(s) < spec.s0:
        raise ValueError(f"{spec.name}: s={s} below s0={spec.s0}")
    if spec.kind is SeriesKind.EXPLICIT:
        if not isinstance(s, int):
            raise TypeError("explicit sequences are indexed by integers")
        return Ball.exact(Fraction(spec.term(s)), prec)
    if spec.rational_eval is not None and isinstance(s, int):
        return Ball.exact(Fraction(spec.rational_eval(s)), prec)
    if spec.evaluator is not None:
        return spec.evaluator(s, prec)
    return dirichlet_sum(spec, s, prec)


class ValueCache:
    """Per-call memo of h(k) at a single precision."""

    def __init__(self, spec: SeriesSpec, prec: int):
        self.spec = spec
        self.prec = prec
        self._values: dict[int, Ball] = {}

    def __call__(self, k: int) -> Ball:
        v = self._values.get(k)
        if v is None:
            v = self._values[k] = eval_series(self.spec, k, self.prec)
        return v


# ---------------------------------------------------------------------------
# Minimal indices and ratio asymptotics
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MinimalIndices:
    N: int
    M: int
    fN: Fraction
    fM: Fraction
    alpha: Optional[Ball]
    degenerate: bool


def nonzero_indices(spec: SeriesSpec, horizon: int) -> list[int]:
    if spec.coeff is None:
        raise InvalidSeries(f"{spec.name} is not a Dirichlet series")
    if spec.support is not None:
        return [n for n in spec.support if n <= horizon and spec.coeff(n)]
    if spec.horizon is not None:
        horizon = min(horizon, spec.horizon)
    return [n for n in range(1, horizon + 1) if spec.coeff(n)]


def minimal_indices(spec: SeriesSpec, horizon: int = DEFAULT_HORIZON, prec: int = 128) -> MinimalIndices:
    """The two smallest indices N < M with nonzero coefficient."""
    if horizon < 2:
        raise ValueError("horizon must be at least 2")
    found = []
    for n in nonzero_indices(spec, horizon):
        found.append(n)
        if len(found) == 2:
            break
    if len(found) < 2:
        raise FewerThanTwoNonzero(f"{spec.name}: fewer than two nonzero coefficients up to {horizon}")
    N, M = found
    if spec.nondegenerate is not None:
        degenerate = not spec.nondegenerate
    else:
        degenerate = spec.support is not None
    alpha = None
    if N > 1:
        alpha = Ball.exact(M, prec).log() / Ball.exact(N, prec).log()
    return MinimalIndices(N, M, Fraction(spec.coeff(N)), Fraction(spec.coeff(M)), alpha, degenerate)


def ratio_limit_statistic(spec: SeriesSpec, s: int, prec: int = 256,
                          horizon: int = DEFAULT_HORIZON) -> Ball:
    """The normalised deviation of F(s+1)/F(s) from its limit; tends to 1.

    For N = 1 this is ``M**(s+1) f(1) / ((M-1) f(M)) * (1 - F(s+1)/F(s))``;
    the factor f(1) normalises series with f(1) != 1.  For N > 1 it is
    ``f(N) N**((alpha-1) s) / (f(M) (1 - N**(1-alpha))) * (1 - N F(s+1)/F(s))``
    where ``N**(alpha-1) = M/N`` exactly.
    """
    mi = minimal_indices(spec, horizon)
    ratio = eval_series(spec, s + 1, prec) / eval_series(spec, s, prec)
    N, M = mi.N, mi.M
    if N == 1:
        scale = Fraction(M) ** (s + 1) * mi.fN / ((M - 1) * mi.fM)
        return (1 - ratio) * scale
    scale = mi.fN * Fraction(M, N) ** s / (mi.fM * (1 - Fraction(N, M)))
    return (1 - ratio * N) * scale


@dataclass(frozen=True)
class RatioEnvelope:
    """Functions A(k) <= h(k+1)/h(k) < B(k) and lambda(k) for the envelope bound."""

    case_tag: str
    c: Fraction
    K: int
    A: Callable[[int], Ball] = field(compare=False)
    B: Callable[[int], Ball] = field(compare=False)
    lam: Callable[[int], Ball] = field(compare=False)
    F_s0: Optional[Ball] = None
    N: int = 1
    M: int = 2
    verified_range: tuple[int, int] = (0, 0)
    label: str = "empirically calibrated"


def _round_up_sig(x: Fraction, digits: int = 4) -> Fraction:
    if x <= 0:
        return x
    e = math.floor(math.log10(x)) if x < 10**300 else 300
    scale = Fraction(10) ** (digits - 1 - e)
    return Fraction(math.ceil(x * scale)) / scale


def _upper_fraction(b: Ball) -> Fraction:
    q = gmpy2.mpq(b.upper())
    return Fraction(int(q.numerator), int(q.denominator))


def calibrate_ratio_bounds(spec: SeriesSpec, k_min: int, k_max: int, prec: int = 256,
                           slack: Fraction = Fraction(101, 100)) -> RatioEnvelope:
    """Smallest constant c (with slack, rounded up) making A(k) a ratio lower bound.

    N = 1:  A(k) = 1 - c / M**k,               B = 1,    lambda(k) = 2 F(s0) c / M**(k-2)
    N > 1:  A(k) = 1/N - c (N/M)**k,           B = 1/N,  lambda(k) = 2 N F(s0) c (N/M)**(k-2)
    """
    if k_min < spec.s0:
        raise ValueError(f"k_min={k_min} below s0={spec.s0}")
    if k_max < k_min:
        raise ValueError("empty calibration window")
    mi = minimal_indices(spec)
    N, M = mi.N, mi.M
    vals = ValueCache(spec, prec)
    ratios = {k: vals(k + 1) / vals(k) for k in range(k_min, k_max + 1)}
    if N == 1:
        g = [(1 - ratios[k]) * Fraction(M) ** k for k in ratios]
    else:
        g = [(Fraction(1, N) - ratios[k]) * Fraction(M, N) ** k for k in ratios]
    c = _round_up_sig(max(_upper_fraction(x) for x in g) * slack)
    if c <= 0:
        raise EnvelopeViolated(f"{spec.name}: nonpositive calibration constant")
    s0 = spec.s0
    F_s0 = eval_series(spec, int(s0) if s0.denominator == 1 else s0, prec)

    if N == 1:
        case = "N_eq_1"

        def A(k: int) -> Ball:
            return Ball.exact(1 - c / Fraction(M) ** k, prec)

        def B(k: int) -> Ball:
            return Ball.exact(1, prec)

        def lam(k: int) -> Ball:
            return F_s0 * (2 * c / Fraction(M) ** (k - 2))
    else:
        case = "N_gt_1"
        q = Fraction(N, M)

        def A(k: int) -> Ball:
            return Ball.exact(Fraction(1, N) - c * q ** k, prec)

        def B(k: int) -> Ball:
            return Ball.exact(Fraction(1, N), prec)

        def lam(k: int) -> Ball:
            return F_s0 * (2 * N * c * q ** (k - 2))

    env = RatioEnvelope(case, c, k_min, A, B, lam, F_s0, N, M, (k_min, k_max))
    for k, r in ratios.items():
        a = A(k)
        if a.sign() is not Sign.POSITIVE:
            raise EnvelopeViolated(f"A({k}) is not positive")
        if (B(k + 1) - a).sign() is not Sign.POSITIVE:
            raise EnvelopeViolated(f"A({k}) >= B({k + 1})")
        if (r - a).sign() is not Sign.POSITIVE:
            raise EnvelopeViolated(f"ratio at k={k} not certified above A(k)")
        if (B(k) - r).sign() is not Sign.POSITIVE:
            raise EnvelopeViolated(f"ratio at k={k} not certified below B(k)")
    return env


# ---------------------------------------------------------------------------
# Catalog
# ---------------------------------------------------------------------------


def _is_pow2(n: int) -> bool:
    return n > 0 and n & (n - 1) == 0


def zeta() -> SeriesSpec:
    return SeriesSpec(
        name="zeta", kind=SeriesKind.DIRICHLET, s0=Fraction(2),
        coeff=lambda n: Fraction(1), tail_bound=(1, 0),
        evaluator=zeta_em, nondegenerate=True,
    )


def zeta_ap(a: int, b: int) -> SeriesSpec:
    """k -> zeta(a*k + b) viewed as a Dirichlet series in k."""
    if a < 1 or b < 1:
        raise InvalidSeries("zeta_ap needs positive integers a, b")

    def coeff(n: int) -> Fraction:
        m, exact = gmpy2.iroot(gmpy2.mpz(n), a)
        return Fraction(1, int(m) ** b) if exact else Fraction(0)

    def evaluator(s: Real, prec: int) -> Ball:
        arg = s * a + b if not isinstance(s, int) else a * s + b
        return zeta_em(arg, prec)

    s0 = max(1, math.ceil(Fraction(2 - b, a)))
    return SeriesSpec(
        name=f"zeta_ap({a},{b})", kind=SeriesKind.DIRICHLET, s0=Fraction(s0),
        coeff=coeff, tail_bound=(1, 0), evaluator=evaluator, nondegenerate=True,
    )


def zeta_minus_1() -> SeriesSpec:
    return SeriesSpec(
        name="zeta_minus_1", kind=SeriesKind.DIRICHLET, s0=Fraction(2),
        coeff=lambda n: Fraction(0) if n == 1 else Fraction(1), tail_bound=(1, 0),
        evaluator=lambda s, prec: zeta_em(s, prec, start=2), nondegenerate=True,
    )


def pow2() -> SeriesSpec:
    return SeriesSpec(
        name="pow2", kind=SeriesKind.RATIONAL, s0=Fraction(1),
        coeff=lambda n: Fraction(1) if _is_pow2(n) else Fraction(0), tail_bound=(1, 0),
        rational_eval=lambda k: Fraction(2**k, 2**k - 1),
        nondegenerate=True,
    )


def factorial_seq() -> SeriesSpec:
    return SeriesSpec(
        name="factorial_seq", kind=SeriesKind.EXPLICIT, s0=Fraction(2),
        term=lambda k: Fraction(math.factorial(k - 2)),
        rational_eval=lambda k: Fraction(math.factorial(k - 2)),
    )


def geo2() -> SeriesSpec:
    return SeriesSpec(
        name="geo2", kind=SeriesKind.RATIONAL, s0=Fraction(0),
        coeff=lambda n: Fraction(1) if n in (1, 2) else Fraction(0), tail_bound=(1, 0),
        rational_eval=lambda k: 1 + Fraction(1, 2) ** k,
        support=(1, 2), nondegenerate=False,
    )


def finite_dirichlet(name: str, coeffs: Mapping[int, Fraction], s0: Fraction = Fraction(0)) -> SeriesSpec:
    """Degenerate series with the given finite support; values are exact."""
    coeffs = {int(n): Fraction(v) for n, v in coeffs.items() if Fraction(v) != 0}
    support = tuple(sorted(coeffs))
    C = max(coeffs.values(), default=Fraction(0))

    def rational_eval(k: int) -> Fraction:
        return sum((v * Fraction(1, n) ** k if k >= 0 else v * Fraction(n) ** -k
                    for n, v in coeffs.items()), Fraction(0))

    return SeriesSpec(
        name=name, kind=SeriesKind.RATIONAL, s0=Fraction(s0),
        coeff=lambda n: coeffs.get(n, Fraction(0)), tail_bound=(C, 0),
        rational_eval=rational_eval, support=support, nondegenerate=False,
    )


def from_terms(name: str, terms: Mapping[int, Fraction] | Sequence[Fraction], first: int = 2) -> SeriesSpec:
    """Explicit sequence from a table of exact values h(first), h(first+1), ..."""
    if not isinstance(terms, Mapping):
        terms = {first + i: Fraction(v) for i, v in enumerate(terms)}
    table = {int(k): Fraction(v) for k, v in terms.items()}

    def term(k: int) -> Fraction:
        try:
            return table[k]
        except KeyError:
            raise IndexError(f"{name}: h({k}) not tabulated") from None

    return SeriesSpec(name=name, kind=SeriesKind.EXPLICIT, s0=Fraction(min(table)), term=term,
                      rational_eval=term)


def _parse_fraction(x) -> Fraction:
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        return Fraction(str(x))
    return Fraction(x)


def from_dict(data: Mapping) -> SeriesSpec:
    """Custom series from the JSON schema documented in the README."""
    try:
        name = str(data["name"])
        raw = data["coeffs"]
        s0 = _parse_fraction(data["s0"])
    except KeyError as exc:
        raise InvalidSeries(f"custom series missing key {exc}") from None
    try:
        coeffs = {int(n): _parse_fraction(v) for n, v in raw}
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise InvalidSeries(f"bad coefficient list: {exc}") from None
    if any(n < 1 for n in coeffs):
        raise InvalidSeries("coefficient indices start at 1")
    if any(v < 0 for v in coeffs.values()):
        raise InvalidSeries("coefficients must be nonnegative")
    if bool(data.get("support_finite", False)):
        spec = finite_dirichlet(name, coeffs, s0)
        return spec
    horizon = int(data.get("horizon", max(coeffs, default=1)))
    C = _parse_fraction(data.get("tail_C", 1))
    kappa = _parse_fraction(data.get("tail_kappa", 0))
    return SeriesSpec(
        name=name, kind=SeriesKind.DIRICHLET, s0=s0,
        coeff=lambda n: coeffs.get(n, Fraction(0)) if n <= horizon else Fraction(0),
        tail_bound=(C, kappa), horizon=horizon,
        sample_horizon=min(horizon, 4096),
    )


def from_file(path: str | Path) -> SeriesSpec:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidSeries(f"cannot read series file {path}: {exc}") from None
    return from_dict(data)


CATALOG: dict[str, Callable[[], SeriesSpec]] = {
    "zeta": zeta,
    "zeta_ap(2,1)": lambda: zeta_ap(2, 1),
    "zeta_minus_1": zeta_minus_1,
    "pow2": pow2,
    "factorial_seq": factorial_seq,
    "geo2": geo2,
}

_AP = re.compile(r"^zeta_ap[(:](\d+)[,:](\d+)\)?$")


def get_series(name: str) -> SeriesSpec:
    """Look up a catalog series by name, or load a custom JSON file."""
    name = name.strip()
    m = _AP.match(name.replace(" ", ""))
    if m:
        return zeta_ap(int(m.group(1)), int(m.group(2)))
    if name in CATALOG:
        return CATALOG[name]()
    if name.endswith(".json") or Path(name).is_file():
        return from_file(name)
    raise InvalidSeries(f"unknown series {name!r}; known: {', '.join(CATALOG)}")
