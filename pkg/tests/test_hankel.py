import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, strategies as st

from hankel_dirichlet.errors import NotDirichletKind, NotRationalSeries, PivotContainsZero
from hankel_dirichlet.hankel import (HankelQuery, bareiss_det, build_hankel, certify_positive,
                                     check_dodgson_identity, det_dodgson, det_exact_rational, det_lu,
                                     engines_agree, exact_det, exact_hankel, hankel_det, monien_sum,
                                     telescoping_decomposition)
from hankel_dirichlet.numerics import Ball, Sign
from hankel_dirichlet.sequences import (factorial_seq, finite_dirichlet, from_terms, geo2, pow2, zeta,
                                        zeta_ap, zeta_minus_1)

from conftest import ORACLE_DPS, contains_mp, hankel_rows, leibniz_det, mp_zeta, zeta_hankel_oracle

small_rationals = st.fractions(min_value=-20, max_value=20, max_denominator=12)


# -- matrices -----------------------------------------------------------------


def test_build_factorial_two_by_two():
    m = build_hankel(HankelQuery(factorial_seq(), 2, 0), 64)
    assert [[x.mid for x in row] for row in m] == [[1, 1], [1, 2]]
    assert all(x.is_exact() for row in m for x in row)


def test_build_zeta_one_by_one():
    m = build_hankel(HankelQuery(zeta(), 1, 0), 128)
    assert contains_mp(m[0][0], mp_zeta(2))


def test_exact_geo2_matrix():
    assert exact_hankel(HankelQuery(geo2(), 2, 0)) == [[Fraction(5, 4), Fraction(9, 8)],
                                                      [Fraction(9, 8), Fraction(17, 16)]]


@pytest.mark.parametrize("n,r", [(3, 0), (5, 2), (6, 1)])
def test_build_is_exactly_symmetric(n, r):
    m = build_hankel(HankelQuery(zeta(), n, r), 128)
    assert all(m[i][j] is m[j][i] for i in range(n) for j in range(n))


def test_offset_below_abscissa_rejected():
    with pytest.raises(ValueError):
        HankelQuery(zeta(), 2, -1)
    with pytest.raises(ValueError):
        HankelQuery(zeta(), 0, 0)


def test_exact_needs_rational_series():
    with pytest.raises(NotRationalSeries):
        exact_hankel(HankelQuery(zeta(), 2, 0))


# -- ball LU ------------------------------------------------------------------


def test_lu_factorial_three():
    d = det_lu(build_hankel(HankelQuery(factorial_seq(), 3, 0), 64))
    assert d.value.contains(4) and d.sign is Sign.POSITIVE


@pytest.mark.parametrize("n,r,approx", [(2, 0, 0.33541), (2, 1, 0.07502)])
def test_lu_zeta_two_by_two(n, r, approx):
    d = det_lu(build_hankel(HankelQuery(zeta(), n, r), 256))
    with mpmath.workdps(ORACLE_DPS):
        oracle = mp_zeta(2 + r) * mp_zeta(4 + r) - mp_zeta(3 + r) ** 2
    assert contains_mp(d.value, oracle)
    assert abs(float(d.value.mid) - approx) < 1e-5


@pytest.mark.parametrize("n", range(1, 8))
def test_lu_zeta_against_mpmath(n):
    d = hankel_det(zeta(), n, 0, engine="lu")
    assert contains_mp(d.value, zeta_hankel_oracle(n, 0))
    assert d.sign is Sign.POSITIVE


def test_lu_geo2_singular_is_unresolved():
    d = det_lu(build_hankel(HankelQuery(geo2(), 3, 0), 128))
    assert d.sign is Sign.ZERO_UNRESOLVED
    assert d.value.contains(0)


def test_lu_strict_pivot_error():
    with pytest.raises(PivotContainsZero):
        det_lu(build_hankel(HankelQuery(geo2(), 4, 0), 128), strict=True)


def test_lu_nonstrict_bounds_singular_tail():
    d = det_lu(build_hankel(HankelQuery(geo2(), 5, 0), 128))
    assert d.value.contains(0) and d.sign is Sign.ZERO_UNRESOLVED


# -- exact --------------------------------------------------------------------


@pytest.mark.parametrize("spec,n,expected", [
    (geo2(), 2, Fraction(1, 16)),
    (geo2(), 3, Fraction(0)),
    (pow2(), 2, Fraction(256, 2205)),
    (factorial_seq(), 3, Fraction(4)),
    (factorial_seq(), 4, Fraction(144)),
])
def test_exact_examples(spec, n, expected):
    value, res = det_exact_rational(HankelQuery(spec, n, 0))
    assert value == expected
    assert res.exact == expected and res.value.contains(expected)
    assert res.sign in (Sign.POSITIVE, Sign.NEGATIVE, Sign.EXACTLY_ZERO)


@given(st.lists(small_rationals, min_size=1, max_size=16).flatmap(
    lambda xs: st.just(xs) if math.isqrt(len(xs)) ** 2 == len(xs) else st.just(xs[:1])))
def test_exact_det_matches_leibniz(flat):
    n = math.isqrt(len(flat))
    rows = [flat[i * n:(i + 1) * n] for i in range(n)]
    assert exact_det(rows) == leibniz_det(rows)


@given(st.lists(st.lists(st.integers(-30, 30), min_size=4, max_size=4), min_size=4, max_size=4))
def test_bareiss_matches_leibniz(rows):
    assert bareiss_det(rows) == leibniz_det([[Fraction(x) for x in row] for row in rows])


def test_factorial_superfactorial_identity():
    # H_n^(0)[(k-2)!] = (0! 1! ... (n-1)!)^2, used here only as an oracle
    for n in range(1, 8):
        sf = math.prod(math.factorial(k) for k in range(n))
        assert det_exact_rational(HankelQuery(factorial_seq(), n, 0))[0] == sf * sf


# -- Dodgson ------------------------------------------------------------------


def test_dodgson_factorial_matches_lu():
    d = det_dodgson(HankelQuery(factorial_seq(), 3, 0), 64)
    assert d.value.contains(4)


@pytest.mark.parametrize("spec", [zeta(), pow2(), factorial_seq()], ids=lambda s: s.name)
def test_dodgson_base_case(spec):
    r = max(0, int(spec.s0) - 2)
    d = det_dodgson(HankelQuery(spec, 1, r), 128)
    assert d.value.overlaps(Ball.exact(0, 128) + build_hankel(HankelQuery(spec, 1, r), 128)[0][0])


def test_dodgson_geo2_vanishing():
    d = det_dodgson(HankelQuery(geo2(), 3, 0), 128)
    assert d.value.contains(0)
    assert d.sign is Sign.ZERO_UNRESOLVED


def test_driver_falls_back_to_lu_on_zero_divisor():
    # the interior divisor H_3 of geo2 is exactly zero
    d = hankel_det(geo2(), 5, 0, engine="dodgson", prec=128)
    assert d.engine == "lu"
    assert d.value.contains(0)


def test_identity_examples():
    assert check_dodgson_identity(factorial_seq(), 2, 0, 64).contains(0)
    res = check_dodgson_identity(zeta(), 2, 0, 256)
    assert res.contains(0) and res.rad < 1e-20
    exact = check_dodgson_identity(geo2(), 2, 0, engine="exact")
    assert exact.is_exact() and exact.contains(0)


@given(st.integers(2, 5), st.integers(0, 2), st.data())
def test_identity_on_random_rational_sequences(n, r, data):
    terms = data.draw(st.lists(small_rationals, min_size=2 * n + r + 3, max_size=2 * n + r + 3))
    spec = from_terms("random", terms)
    assert check_dodgson_identity(spec, n, r, engine="exact").contains(0)
    assert check_dodgson_identity(spec, n, r, prec=128).contains(0)


# -- Monien sum and certificates ----------------------------------------------


def test_monien_single_tuple():
    res = monien_sum(HankelQuery(zeta(), 2, 0), cutoff=2)
    assert res.value == Fraction(1, 16) and res.terms == 1 and not res.exact
    assert Fraction(1, 16) < 0.33541


def test_monien_partial_sums_increase_to_zeta_two():
    q = HankelQuery(zeta(), 1, 0)
    sums = [monien_sum(q, T).value for T in (1, 10, 100, 400)]
    assert sums == sorted(sums)
    assert 0 < math.pi**2 / 6 - float(sums[-1]) < 1 / 399


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_monien_below_determinant(n):
    q = HankelQuery(zeta(), n, 0)
    det = hankel_det(zeta(), n, 0, engine="lu")
    last = Fraction(-1)
    for T in (n, n + 2, n + 6, 14):
        v = monien_sum(q, T).value
        assert v >= last
        assert v <= det.value.to_mpq_bounds()[1]
        last = v


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("r", [0, 1, 2])
def test_monien_exact_on_finite_support(n, r):
    spec = finite_dirichlet("three", {1: 1, 2: Fraction(1, 2), 3: 2})
    res = monien_sum(HankelQuery(spec, n, r), cutoff=3)
    assert res.exact
    assert res.value == leibniz_det(hankel_rows(spec.exact_value, n, r))


def test_monien_geo2_empty():
    res = monien_sum(HankelQuery(geo2(), 3, 0), cutoff=5)
    assert res.value == 0 and res.exact


def test_monien_rejects_explicit_sequence():
    with pytest.raises(NotDirichletKind):
        monien_sum(HankelQuery(factorial_seq(), 2, 0), 4)


def test_monien_engine_is_lower_bound():
    d = hankel_det(zeta(), 2, 0, engine="monien", monien_cutoff=2)
    assert d.lower_bound and d.value.contains(Fraction(1, 16))


def test_certificate_examples():
    cert = certify_positive(HankelQuery(zeta(), 12, 0))
    assert cert.status == "positive_certificate" and cert.tuple == tuple(range(1, 13))
    assert certify_positive(HankelQuery(geo2(), 3, 0)).status == "vanishes_certificate"
    assert certify_positive(HankelQuery(factorial_seq(), 3, 0)).status == "unresolved"


@pytest.mark.parametrize("spec", [geo2(), finite_dirichlet("three", {1: 1, 2: 1, 5: 3})], ids=lambda s: s.name)
def test_finite_support_vanishes_beyond_support_size(spec):
    S = len(spec.support)
    for n in range(S + 1, S + 4):
        for r in range(0, 5):
            assert det_exact_rational(HankelQuery(spec, n, r))[0] == 0


# -- cross-engine ---------------------------------------------------------------


@pytest.mark.parametrize("spec", [zeta(), zeta_ap(2, 1), zeta_minus_1(), pow2(), factorial_seq(), geo2()],
                         ids=lambda s: s.name)
def test_engines_agree(spec):
    r0 = max(0, int(spec.s0) - 2)
    for n in (2, 3, 4):
        results = [hankel_det(spec, n, r0, engine="lu", prec=256),
                   hankel_det(spec, n, r0, engine="dodgson", prec=256)]
        if spec.is_rational:
            results.append(hankel_det(spec, n, r0, engine="exact"))
        assert engines_agree(results)


def test_auto_engine_choice():
    assert hankel_det(pow2(), 2, 0).engine == "exact"
    assert hankel_det(zeta(), 2, 0).engine == "lu"
    with pytest.raises(ValueError):
        hankel_det(zeta(), 2, 0, engine="qr")


def test_relative_target_tightens():
    d = hankel_det(zeta(), 6, 0, target="relative")
    assert d.value.rel_rad() < 2.0**-53


# -- telescoping --------------------------------------------------------------


def test_telescoping_factorial():
    t = telescoping_decomposition(HankelQuery(factorial_seq(), 3, 0))
    assert t.reconstruction.contains(4)
    assert t.correction_factors == 1


@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_telescoping_zeta(n):
    t = telescoping_decomposition(HankelQuery(zeta(), n, 0), prec=512)
    assert t.agrees
    assert t.correction_factors == (n - 1) * (n - 2) // 2
    # the alternative index pattern does not reproduce the determinant
    assert t.printed_agrees is False


def test_telescoping_needs_three():
    with pytest.raises(ValueError):
        telescoping_decomposition(HankelQuery(zeta(), 2, 0))
