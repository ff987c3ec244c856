"""Acceptance criteria, one test per criterion.

Each test records a single PASS/FAIL line (echoed in the terminal summary)
before asserting. Tolerances are pinned here and nowhere else. The heuristic
reproduction criterion is reported but never asserted.
"""

import random
import time
from fractions import Fraction

from hankel_dirichlet.bounds import (envelope_bound, factorial_bound_check, monien_ratio_check,
                                     verify_quadratic_decay, zagier_fit)
from hankel_dirichlet.hankel import (HankelQuery, certify_positive, check_dodgson_identity,
                                     engines_agree, hankel_det)
from hankel_dirichlet.numerics import PrecisionPolicy, Sign
from hankel_dirichlet.rationality import growth_verifier, integrality_check, rational_values
from hankel_dirichlet.selftest import random_sequence
from hankel_dirichlet.sequences import (CATALOG, calibrate_ratio_bounds, factorial_seq, geo2, pow2,
                                        ratio_limit_statistic, zeta, zeta_ap, zeta_minus_1)

from conftest import ACCEPTANCE_LINES

SEED = 20240611

DODGSON_RANDOM_CASES = 50
DODGSON_MAX_N = 6
DODGSON_RUNTIME_S = 60

FACTORIAL_MAX_N, FACTORIAL_MAX_R = 8, 4

POSITIVITY_MAX_N, POSITIVITY_MAX_R = 12, 3

DECAY_BASE = Fraction(19, 10)
DECAY_NS = range(4, 11)
DECAY_MAX_BITS = 1024
DECAY_RUNTIME_S = 300

RATIO_S10, RATIO_S10_TOL = 10, 5e-4
RATIO_S10_VALUE = 1.0238
RATIO_S40, RATIO_S40_TOL = 40, 1e-3
RATIO_ZM1_S, RATIO_ZM1_TOL = 60, 0.1

ENVELOPE_C_RANGE = (1.0, 1.2)
ENVELOPE_NS, ENVELOPE_RS = range(2, 9), range(0, 5)

GROWTH_BASE = Fraction(19, 10)
GROWTH_MS = range(2, 17)

A0_N, A0_TOL = 12, 1e-3
MONIEN_NS, MONIEN_RESIDUAL = range(8, 15), 50
RATIO_FIT_TOL = 1e-2

AGREEMENT_MAX_N, AGREEMENT_MAX_R = 6, 2


def record(key: int, title: str, ok: bool, detail: str) -> None:
    line = f"[{key}] {'PASS' if ok else 'FAIL'}  {title}: {detail}"
    ACCEPTANCE_LINES[str(key)] = line
    print(line)


def test_1_dodgson_identity():
    start = time.perf_counter()
    rng = random.Random(SEED)
    bad = []
    for i in range(DODGSON_RANDOM_CASES):
        n = rng.randint(2, DODGSON_MAX_N)
        r = rng.randint(0, 2)
        spec = random_sequence(rng, 2 * (n + 1) + r + 1, f"random[{i}]")
        if not check_dodgson_identity(spec, n, r, engine="exact").contains(0):
            bad.append((spec.name, n, r, "exact"))
        if not check_dodgson_identity(spec, n, r, prec=192, shared_values=False).contains(0):
            bad.append((spec.name, n, r, "ball"))
    for spec in (zeta(), factorial_seq(), geo2()):
        for n in (2, 3, 4):
            for r in (0, 1, 2):
                if not check_dodgson_identity(spec, n, r, prec=256, shared_values=False).contains(0):
                    bad.append((spec.name, n, r, "ball"))
    elapsed = time.perf_counter() - start
    ok = not bad and elapsed < DODGSON_RUNTIME_S
    record(1, "Dodgson residual balls contain 0", ok,
           f"{len(bad)} failing cases, {elapsed:.1f}s")
    assert not bad, bad
    assert elapsed < DODGSON_RUNTIME_S


def test_2_factorial_example():
    failures = []
    for n in range(1, FACTORIAL_MAX_N + 1):
        for r in range(0, FACTORIAL_MAX_R + 1):
            chk = factorial_bound_check(n, r)
            if not (chk.positive and chk.holds):
                failures.append((n, r, chk.H, chk.bound))
    h3, h4 = factorial_bound_check(3, 0).H, factorial_bound_check(4, 0).H
    oracle_ok = (h3, h4) == (4, 144)
    ok = not failures and oracle_ok
    record(2, "factorial determinants positive and below closed-form bound", ok,
           f"H3={h3}, H4={h4}; strict-bound failures at (n, r) = {[(n, r) for n, r, *_ in failures]}")
    assert oracle_ok
    # n = 1 gives H = r! = bound, so the strict inequality cannot hold there
    assert not failures, failures


def test_3_positivity_and_vanishing():
    specs = [zeta(), zeta_ap(2, 1), zeta_minus_1(), pow2()]
    missing = []
    for spec in specs:
        for n in range(1, POSITIVITY_MAX_N + 1):
            for r in range(0, POSITIVITY_MAX_R + 1):
                if 2 + r < spec.s0:
                    continue
                cert = certify_positive(HankelQuery(spec, n, r))
                if cert.status != "positive_certificate":
                    missing.append((spec.name, n, r))
    single = certify_positive(HankelQuery(zeta(), 2, 0))
    det = hankel_det(zeta(), 2, 0)
    single_ok = single.term == Fraction(1, 16) and (det.value - single.term).sign() is Sign.POSITIVE
    vanish = [hankel_det(geo2(), n, 0, engine="exact") for n in range(3, 9)]
    vanish_ok = all(d.exact == 0 and d.sign is Sign.EXACTLY_ZERO for d in vanish)
    ok = not missing and single_ok and vanish_ok
    record(3, "positivity certificates and degenerate vanishing", ok,
           f"missing certificates {missing}, single term {single.term}, geo2 n=3..8 zero: {vanish_ok}")
    assert ok


def test_4_quadratic_decay():
    start = time.perf_counter()
    rep = verify_quadratic_decay(zeta(), DECAY_NS, 0, epsilon=Fraction(1, 10), max_bits=DECAY_MAX_BITS)
    elapsed = time.perf_counter() - start
    small = verify_quadratic_decay(zeta(), [2], 0, epsilon=Fraction(1, 10))
    rows_ok = all(row.status == "holds" for row in rep.rows)
    small_fails = small.rows[0].status == "fails"
    bits = max(row.bits for row in rep.rows)
    ok = rows_ok and small_fails and elapsed < DECAY_RUNTIME_S and bits <= DECAY_MAX_BITS
    n4 = rep.rows[0]
    record(4, "log H_n < -n^2 log 1.9 for zeta", ok,
           f"n=4..10 {[row.status for row in rep.rows]}, log H_4 = {float(n4.log_H.mid):.4f}, "
           f"n=2 row {small.rows[0].status} (expected), max bits {bits}, {elapsed:.1f}s")
    assert ok


def test_5_ratio_limits():
    s10 = float(ratio_limit_statistic(zeta(), RATIO_S10).mid)
    s40 = float(ratio_limit_statistic(zeta(), RATIO_S40).mid)
    zm1 = float(ratio_limit_statistic(zeta_minus_1(), RATIO_ZM1_S).mid)
    ok = (abs(s10 - RATIO_S10_VALUE) <= RATIO_S10_TOL and abs(s40 - 1) <= RATIO_S40_TOL
          and abs(zm1 - 1) <= RATIO_ZM1_TOL)
    record(5, "ratio-limit statistics", ok,
           f"zeta s=10 {s10:.6f}, zeta s=40 {s40:.8f}, zeta_minus_1 s=60 {zm1:.8f}")
    assert ok


def test_6_envelope():
    env = calibrate_ratio_bounds(zeta(), 2, 30)
    c_ok = ENVELOPE_C_RANGE[0] <= env.c <= ENVELOPE_C_RANGE[1] and env.K == 2
    above = []
    for n in ENVELOPE_NS:
        for r in ENVELOPE_RS:
            bound = envelope_bound(env, zeta(), n, r)
            det = hankel_det(zeta(), n, r)
            if (bound - det.value).sign() is not Sign.POSITIVE:
                above.append((n, r))
    ok = c_ok and not above
    record(6, "calibrated zeta envelope dominates H", ok,
           f"c1 = {float(env.c)}, K1 = {env.K}, uncertified (n, r): {above}")
    assert ok


def test_7_rationality():
    h = integrality_check(pow2(), 2, 0, 0)
    example_ok = h == 1280
    grid_bad = []
    for n in range(1, 7):
        for r in range(0, 4):
            for R in (r, 0):
                try:
                    v = integrality_check(pow2(), n, r, R)
                except Exception as exc:  # noqa: BLE001 - any failure is a criterion failure
                    grid_bad.append((n, r, R, type(exc).__name__))
                    continue
                if not (isinstance(v, int) and v > 0):
                    grid_bad.append((n, r, R, v))
    growth = growth_verifier(rational_values(pow2(), 0, max(GROWTH_MS)), GROWTH_BASE)
    growth_fail = [row.m for row in growth.rows if row.m in GROWTH_MS and not row.holds]
    ok = example_ok and not grid_bad and not growth_fail
    record(7, "pow2 denominator ledger", ok,
           f"D_4^2 H_2 = {h}, integrality failures {grid_bad}, "
           f"D_m > 1.9^m fails at m = {growth_fail} (D_2 = 3 < 3.61)")
    assert example_ok and not grid_bad
    assert not growth_fail, f"growth fails at m = {growth_fail}"


def test_8_heuristic_reproductions():
    fit = zagier_fit(range(A0_N - 2, A0_N + 3), with_ratios=False)
    a0 = float(dict(fit.A0_estimates)[A0_N].mid)
    a0_ok = abs(a0 - float(fit.A0_reference)) < A0_TOL
    ratio = float(dict(fit.ratio_estimates)[A0_N + 2].mid)
    ratio_ok = abs(ratio - float(fit.ratio_reference.mid)) < RATIO_FIT_TOL
    rows = monien_ratio_check(MONIEN_NS)
    residuals = [row.first.residual for row in rows]
    monien_ok = all(res < MONIEN_RESIDUAL for res in residuals)
    ok = a0_ok and ratio_ok and monien_ok
    record(8, "heuristic asymptotics (soft, not gated)", ok,
           f"A0(n={A0_N}) = {a0:.6f} vs {float(fit.A0_reference)}; "
           f"A1/A0 = {ratio:.6f} vs {float(fit.ratio_reference.mid):.6f}; "
           f"first-ratio residual max {max(residuals):.3g}")


def test_9_cross_engine_agreement():
    disagree = []
    for name, make in CATALOG.items():
        spec = make()
        for n in range(1, AGREEMENT_MAX_N + 1):
            for r in range(0, AGREEMENT_MAX_R + 1):
                if 2 + r < spec.s0:
                    continue
                # fixed precision: enclosures are compared, a sign is not needed
                prec = PrecisionPolicy.hankel_bits(n)
                results = [hankel_det(spec, n, r, engine="lu", prec=prec),
                           hankel_det(spec, n, r, engine="dodgson", prec=prec)]
                if spec.is_rational:
                    results.append(hankel_det(spec, n, r, engine="exact"))
                if not engines_agree(results):
                    disagree.append((name, n, r))
    ok = not disagree
    record(9, "lu, dodgson and exact enclosures intersect", ok,
           f"{len(CATALOG)} catalog series, disagreements {disagree}")
    assert ok
