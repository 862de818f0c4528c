import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ecstats import family, reduction
from ecstats.reduction import KodairaType, ReductionClass

SMALL_PRIMES = (5, 7, 11, 13)


@pytest.fixture(scope="module")
def curves_1e4():
    return [tuple(c) for c in family.enumerate_family(10**4)]


@pytest.mark.parametrize("n, p, v", [(31, 31, 1), (135, 5, 1), (15625, 5, 6), (7, 5, 0), (-250, 5, 3)])
def test_p_valuation(n, p, v):
    assert reduction.p_valuation(n, p) == v


def test_p_valuation_rejects_zero():
    with pytest.raises(ValueError):
        reduction.p_valuation(0, 5)


def test_trace_examples():
    assert reduction.trace_of_frobenius(1, 1, 5) == -3
    assert reduction.trace_of_frobenius(0, 1, 5) == 0


def test_trace_rejects_bad_reduction_and_small_primes():
    with pytest.raises(ValueError):
        reduction.trace_of_frobenius(3, 1, 5)
    with pytest.raises(ValueError):
        reduction.trace_of_frobenius(1, 1, 3)


def _naive_points(a, b, p):
    return 1 + sum((y * y - x**3 - a * x - b) % p == 0 for x in range(p) for y in range(p))


@given(st.sampled_from((5, 7, 11, 13, 17, 19, 23, 29)), st.integers(-1000, 1000), st.integers(-1000, 1000))
def test_trace_matches_naive_count_and_weil_bound(p, a, b):
    if family.discriminant(a, b) % p == 0:
        return
    ap = reduction.trace_of_frobenius(a, b, p)
    assert ap == p + 1 - _naive_points(a, b, p)
    assert abs(ap) <= math.isqrt(4 * p)


def test_reduction_class_examples():
    assert reduction.reduction_class(1, 1, 5) is ReductionClass.GOOD
    assert reduction.reduction_class(3, 1, 5) is ReductionClass.SPLIT
    assert reduction.smooth_point_count(3, 1, 5) == 4
    assert reduction.reduction_class(1, 1, 31) is ReductionClass.NONSPLIT
    assert reduction.smooth_point_count(1, 1, 31) == 32
    assert reduction.reduction_class(5, 5, 5) is ReductionClass.ADDITIVE


def test_reduction_class_predicates():
    assert not ReductionClass.GOOD.is_bad
    assert all(c.is_bad for c in (ReductionClass.SPLIT, ReductionClass.NONSPLIT, ReductionClass.ADDITIVE))
    assert ReductionClass.SPLIT.is_multiplicative and not ReductionClass.ADDITIVE.is_multiplicative


@pytest.mark.parametrize(
    "a, b, p, expected",
    [(5, 5, 5, "II"), (5, 25, 5, "III"), (25, 125, 5, "I0*"), (1, 1, 31, "I1"), (1, 1, 5, "I0")],
)
def test_kodaira_examples(a, b, p, expected):
    assert reduction.kodaira_type(a, b, p) == KodairaType.parse(expected)
    assert reduction.kodaira_type_standard(a, b, p) == KodairaType.parse(expected)


def test_kodaira_parse_roundtrip():
    for text in ("I0", "I3", "II", "III", "IV", "I0*", "I2*", "IV*", "III*", "II*"):
        assert str(KodairaType.parse(text)) == text
    with pytest.raises(ValueError):
        KodairaType.parse("V")


def test_normalized_coefficients():
    assert reduction.normalized_coefficient(1, 1, 5, 2, "ahat") == pytest.approx(-0.2)
    assert reduction.normalized_coefficient(1, 1, 5, 2, "lambda") == pytest.approx(0.8)
    assert reduction.normalized_coefficient(5, 5, 5, 1, "ahat") == 0
    assert reduction.normalized_coefficient(3, 1, 5, 1) == pytest.approx(1 / math.sqrt(5))
    assert reduction.normalized_coefficient(3, 1, 5, 2) == pytest.approx(1 / 5)
    with pytest.raises(ValueError):
        reduction.normalized_coefficient(1, 1, 5, 3)


@pytest.mark.parametrize("p", SMALL_PRIMES)
def test_kodaira_oracle_on_family(p, curves_1e4):
    for a, b in curves_1e4:
        assert reduction.kodaira_type(a, b, p) == reduction.kodaira_type_standard(a, b, p), (a, b)


@pytest.mark.parametrize("p", SMALL_PRIMES + (31,))
def test_split_oracle_on_family(p, curves_1e4):
    n = 0
    for a, b in curves_1e4:
        cls = reduction.reduction_class(a, b, p)
        if cls.is_multiplicative:
            n += 1
            want = p - 1 if cls is ReductionClass.SPLIT else p + 1
            assert reduction.smooth_point_count(a, b, p) == want, (a, b)
        elif cls is ReductionClass.ADDITIVE:
            assert reduction.smooth_point_count(a, b, p) == p
    assert n > 0


@pytest.mark.parametrize("p", SMALL_PRIMES)
def test_report_invariants(p, curves_1e4):
    for a, b in curves_1e4[::7]:
        r = reduction.reduction_report(a, b, p)
        assert (r.cls is ReductionClass.GOOD) == (r.vdelta == 0) == (r.kodaira.tag == "I0")
        if r.cls.is_multiplicative:
            assert a % p and r.kodaira == KodairaType("Im", r.vdelta)
            assert r.ap == (1 if r.cls is ReductionClass.SPLIT else -1)
        if r.cls is ReductionClass.ADDITIVE:
            assert r.ap == 0


@pytest.mark.parametrize("p", SMALL_PRIMES + (31,))
def test_batch_matches_scalar(p):
    a, b = family.family_arrays(3 * 10**4)
    cols = reduction.classify_arrays(a, b, p)
    for i in range(0, a.size, 3):
        ai, bi = int(a[i]), int(b[i])
        cls, ap, kod = reduction.decode(int(cols["cls"][i]), int(cols["ap"][i]), int(cols["kod"][i]), int(cols["m"][i]))
        assert cls is reduction.reduction_class(ai, bi, p)
        assert ap == reduction.local_trace(ai, bi, p)
        assert kod == reduction.kodaira_type(ai, bi, p)


def test_batch_finds_rare_types():
    # deliberately chosen valuation patterns
    pairs = [(5**4, 5**5), (5**3, 5**5 * 2), (5**3, 5**4), (25, 125), (25, 125 * 2 + 5**4), (5, 5), (5, 25), (25, 25)]
    a = np.array([x for x, _ in pairs], dtype=np.int64)
    b = np.array([y for _, y in pairs], dtype=np.int64)
    cols = reduction.classify_arrays(a, b, 5)
    got = [str(reduction.decode(*(int(cols[k][i]) for k in ("cls", "ap", "kod", "m")))[2]) for i in range(len(pairs))]
    assert got == [str(reduction.kodaira_type(x, y, 5)) for x, y in pairs]
    assert got[:3] == ["II*", "III*", "IV*"]


@pytest.mark.parametrize("p", (5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47))
def test_trace_table_matches_scalar(p):
    table = reduction.local_trace_table(p)
    for alpha in range(p):
        for beta in range(p):
            if (alpha, beta) != (0, 0):
                assert table[alpha, beta] == reduction.local_trace(alpha, beta, p)
    assert table[0, 0] == 0
