"""Bundled invariant suite, deterministic for a given seed."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

from .bounds import factorial_bound_check
from .hankel import HankelQuery, certify_positive, check_dodgson_identity, engines_agree, hankel_det
from .numerics import Ball
from .sequences import SeriesKind, SeriesSpec, factorial_seq, from_terms, geo2, pow2, zeta, zeta_ap, zeta_em


@dataclass
class SuiteResult:
    name: str
    passed: int = 0
    failed: int = 0
    failures: list[str] = field(default_factory=list)

    def record(self, ok: bool, label: str) -> None:
        if ok:
            self.passed += 1
        else:
            self.failed += 1
            self.failures.append(label)


def noisy_zeta(seed: int = 0, scale: Fraction = Fraction(1, 10**6)) -> SeriesSpec:
    """Zeta with an evaluator that adds fresh noise on every call (fault injection)."""
    rng = random.Random(seed)

    def evaluator(s, prec: int) -> Ball:
        return zeta_em(s, prec) + Fraction(rng.randint(1, 1000), 1000) * scale

    return SeriesSpec(name="zeta[noisy]", kind=SeriesKind.DIRICHLET, s0=Fraction(2),
                      coeff=lambda n: Fraction(1), tail_bound=(1, 0), evaluator=evaluator,
                      nondegenerate=True)


def random_sequence(rng: random.Random, length: int, name: str) -> SeriesSpec:
    terms = [Fraction(rng.randint(-50, 50), rng.randint(1, 20)) for _ in range(length)]
    return from_terms(name, terms, first=2)


def _dodgson_suite(rng: random.Random, zeta_spec: SeriesSpec) -> SuiteResult:
    res = SuiteResult("dodgson")
    for i in range(50):
        n = rng.randint(2, 5)
        r = rng.randint(0, 2)
        spec = random_sequence(rng, 2 * (n + 1) + r + 1, f"random[{i}]")
        exact = check_dodgson_identity(spec, n, r, engine="exact")
        res.record(exact.is_exact() and exact.contains(0), f"{spec.name} exact n={n} r={r}")
        ball = check_dodgson_identity(spec, n, r, prec=128, shared_values=False)
        res.record(ball.contains(0), f"{spec.name} lu n={n} r={r}")
    for spec in (zeta_spec, factorial_seq(), geo2()):
        for n in (2, 3, 4):
            for r in (0, 1, 2):
                ball = check_dodgson_identity(spec, n, r, prec=256, shared_values=False)
                res.record(ball.contains(0), f"{spec.name} n={n} r={r}")
    return res


def _factorial_suite() -> SuiteResult:
    res = SuiteResult("factorial")
    for r in range(0, 3):
        chk = factorial_bound_check(1, r)
        res.record(chk.positive and chk.H == chk.bound, f"n=1 r={r} equality")
    for n in range(2, 7):
        for r in range(0, 3):
            chk = factorial_bound_check(n, r)
            res.record(chk.positive and chk.holds, f"n={n} r={r}")
    res.record(factorial_bound_check(3, 0).H == 4, "H_3 = 4")
    res.record(factorial_bound_check(4, 0).H == 144, "H_4 = 144")
    return res


def _vanishing_suite() -> SuiteResult:
    res = SuiteResult("vanishing")
    g = geo2()
    for n in range(3, 7):
        d = hankel_det(g, n, 0, engine="exact")
        res.record(d.exact == 0, f"geo2 H_{n} = 0")
        cert = certify_positive(HankelQuery(g, n, 0))
        res.record(cert.status == "vanishes_certificate", f"geo2 n={n} certificate")
    for spec in (zeta(), pow2()):
        for n in range(1, 7):
            cert = certify_positive(HankelQuery(spec, n, 0))
            res.record(cert.status == "positive_certificate", f"{spec.name} n={n} certificate")
    return res


def _agreement_suite(zeta_spec: SeriesSpec) -> SuiteResult:
    res = SuiteResult("engines")
    for spec in (zeta_spec, zeta_ap(2, 1), pow2(), factorial_seq(), geo2()):
        r0 = max(0, int(spec.s0) - 2)
        for n in (2, 3, 4):
            for r in (r0, r0 + 1):
                results = [hankel_det(spec, n, r, engine="lu", prec=256),
                           hankel_det(spec, n, r, engine="dodgson", prec=256)]
                if spec.is_rational:
                    results.append(hankel_det(spec, n, r, engine="exact"))
                res.record(engines_agree(results), f"{spec.name} n={n} r={r}")
    return res


def run_selftest(seed: int = 0, zeta_spec: Optional[SeriesSpec] = None) -> list[SuiteResult]:
    """Run every suite; ``zeta_spec`` replaces the zeta series (test hook)."""
    rng = random.Random(seed)
    z = zeta_spec or zeta()
    suites: list[Callable[[], SuiteResult]] = [
        lambda: _dodgson_suite(rng, z),
        _factorial_suite,
        _vanishing_suite,
        lambda: _agreement_suite(z),
    ]
    return [suite() for suite in suites]
