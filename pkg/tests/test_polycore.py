import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from kwfeas.polycore import (
    Interval,
    Polynomial,
    RationalMatrix,
    SingularMatrixError,
    clear_laurent,
    content_normalize,
    eval_exact,
    from_text,
    mat_det,
    mat_inverse,
    poly_eval_interval,
    poly_substitute,
    solve_exact,
    to_text,
)


def P(text, n=None):
    return from_text(text, n)


def cofactor_det(rows):
    """Oracle: Laplace expansion along the first row."""
    if not rows:
        return Fraction(1)
    total = Fraction(0)
    for j, a in enumerate(rows[0]):
        if a:
            minor = [r[:j] + r[j + 1:] for r in rows[1:]]
            total += (-1) ** j * Fraction(a) * cofactor_det(minor)
    return total


# strategies -----------------------------------------------------------------

coeffs = st.fractions(min_value=-5, max_value=5, max_denominator=6)


def polys(n=3, max_terms=5, max_exp=2):
    mono = st.tuples(*[st.integers(0, max_exp)] * n)
    return st.dictionaries(mono, coeffs, max_size=max_terms).map(lambda t: Polynomial(n, t))


points = st.lists(st.fractions(min_value=-3, max_value=3, max_denominator=7), min_size=3, max_size=3)


# arithmetic -------------------------------------------------------------------

def test_add_examples():
    assert P("m1 + 1") + P("-1", 1) == P("m1")
    p = P("m1*m2 - 3*m2 + 1/2")
    assert p + Polynomial.zero(2) == p
    assert P("m1*m2") + P("m1*m2") == P("2*m1*m2")


def test_mul_examples():
    assert P("m1 + 1") * P("m1 - 1") == P("m1^2 - 1")
    p = P("4*m1*m2 - 9")
    assert p * Polynomial.constant(2, 1) == p
    assert P("m1", 2) * P("m2", 2) == P("m1*m2", 2)


def test_mismatched_nvars_rejected():
    with pytest.raises(ValueError):
        P("m1", 1) + P("m1", 2)
    with pytest.raises(ValueError):
        P("m1", 1) * P("m2", 2)


def test_zero_coefficients_purged():
    p = Polynomial(2, {(1, 0): 1, (0, 1): 0})
    assert list(p.terms) == [(1, 0)]
    assert (P("m1 + m2") - P("m2", 2)).terms == {(1, 0): 1}


@given(polys(), polys(), polys())
def test_distributive(a, b, c):
    assert a * (b + c) == a * b + a * c


@given(polys(), polys(), points)
def test_evaluation_is_homomorphism(a, b, x):
    assert eval_exact(a * b, x) == eval_exact(a, x) * eval_exact(b, x)
    assert eval_exact(a + b, x) == eval_exact(a, x) + eval_exact(b, x)


def test_eval_examples(benchmark_system):
    first = benchmark_system.constraints[0]
    assert eval_exact(first, [1, 1, 1, 1]) == 2
    assert eval_exact(P("m1*m2 + m1 + m2 - 1"), [Fraction(1, 4), Fraction(1, 4)]) == Fraction(-7, 16)
    assert eval_exact(P("3*m1^2 - 7/2", 2), [0, 0]) == Fraction(-7, 2)
    with pytest.raises(ValueError):
        eval_exact(P("m1 + m2"), [1])


# text form ----------------------------------------------------------------------

def test_canonical_text_order():
    text = "4*m1*m2*m3*m4 - 9*m2*m3*m4 + m1*m2 + m1*m3 + 4*m2*m3 + m4"
    shuffled = "m4 + 4*m2*m3 - 9*m2*m3*m4 + m1*m3 + 4*m1*m2*m3*m4 + m1*m2"
    assert to_text(P(shuffled)) == text


def test_text_forms():
    assert to_text(Polynomial.zero(2)) == "0"
    assert to_text(P("-m1 + 2")) == "-m1 + 2"
    assert to_text(P("2/3*m1^2 - 1/5")) == "2/3*m1^2 - 1/5"


@given(polys(max_exp=3))
def test_text_round_trip(p):
    assert from_text(to_text(p), p.nvars) == p
    assert to_text(from_text(to_text(p), p.nvars)) == to_text(p)


def test_parse_errors():
    for bad in ("", "m1 +", "x1", "m0", "2**m1"):
        with pytest.raises(ValueError):
            from_text(bad)


# substitution and normalization --------------------------------------------------

def test_substitute_examples():
    q, kept = poly_substitute(P("m1*m2 - 1"), {1: ("var", 0)})
    assert q == P("m1^2 - 1", 1) and kept == [0]
    q, kept = poly_substitute(P("m1 + m2"), {1: 3})
    assert q == P("m1 + 3", 1)
    q, kept = poly_substitute(P("m1*m3 + m2"), {2: ("var", 0)})
    assert q == P("m1^2 + m2", 2) and kept == [0, 1]


def test_substitute_cycle_rejected():
    with pytest.raises(ValueError):
        poly_substitute(P("m1 + m2"), {0: ("var", 1), 1: ("var", 0)})


@given(polys(), points)
def test_identification_agrees_with_evaluation(p, x):
    q, _ = poly_substitute(p, {2: ("var", 1)})
    assert eval_exact(q, x[:2]) == eval_exact(p, [x[0], x[1], x[1]])


def test_content_normalize_examples():
    assert content_normalize(P("2/3*m1 + 4/3")) == P("m1 + 2")
    assert content_normalize(P("6*m1 - 9")) == P("2*m1 - 3")
    assert content_normalize(P("-2*m1")) == P("-m1")
    assert content_normalize(Polynomial.zero(1)).is_zero()


@given(polys())
def test_content_normalize_properties(p):
    q = content_normalize(p)
    assert content_normalize(q) == q
    if not p.is_zero():
        ratios = {q.terms[m] / c for m, c in p.terms.items()}
        assert len(ratios) == 1 and ratios.pop() > 0
        assert all(c.denominator == 1 for c in q.terms.values())


def test_clear_laurent():
    p = clear_laurent(2, {(1, -1): 3, (0, 0): -1, (-1, 0): 2})
    assert p == P("3*m1^2 - m1*m2 + 2*m2")


# matrices -----------------------------------------------------------------------

def test_det_examples():
    corner = RationalMatrix([[1, 0, 0, 0], [1, 1, 0, 0], [1, 0, 1, 0], [1, 0, 0, 1]])
    assert mat_det(corner) == 1
    ff_rows = [[1, 0, 0, 0], [1, 1, 1, 0], [1, 1, 0, 1], [1, 0, 1, 1]]
    assert cofactor_det(ff_rows) == -2  # oracle
    assert mat_det(RationalMatrix(ff_rows)) == -2
    eye = RationalMatrix.identity(5)
    assert mat_det(eye) == 1 and mat_inverse(eye) == eye


def test_inverse_singular():
    with pytest.raises(SingularMatrixError):
        mat_inverse(RationalMatrix([[1, 1], [1, 1]]))


@pytest.mark.parametrize("seed", range(30))
def test_random_01_inverse(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 8)
    rows = [[rng.randint(0, 1) for _ in range(n)] for _ in range(n)]
    m = RationalMatrix(rows)
    if n <= 6:
        assert mat_det(m) == cofactor_det(rows)
    if mat_det(m) == 0:
        with pytest.raises(SingularMatrixError):
            mat_inverse(m)
    else:
        assert mat_inverse(m) @ m == RationalMatrix.identity(n)
        assert m @ mat_inverse(m) == RationalMatrix.identity(n)


def test_solve_exact():
    x = solve_exact([[1, 1], [1, -1]], [3, 1])
    assert x == [2, 1]
    assert solve_exact([[1, 1], [1, 1]], [1, 2]) is None


# intervals ----------------------------------------------------------------------

def test_interval_examples():
    box = [Interval(Fraction(3, 5), 2)] * 2
    iv = poly_eval_interval(P("m1 + m2"), box)
    assert iv.lo <= 1.2 and iv.hi >= 4
    five = poly_eval_interval(Polynomial.constant(2, 5), box)
    assert five.lo <= 5 <= five.hi and five.width < 1e-12
    x = Polynomial.var(1, 0)
    cancel = Polynomial(1, {})  # m1 - m1 as separate evaluations
    iv = poly_eval_interval(x, [Interval(0, 1)]) - poly_eval_interval(x, [Interval(0, 1)])
    assert 0 in iv
    assert poly_eval_interval(cancel, [Interval(0, 1)]).lo <= 0


def test_interval_errors():
    with pytest.raises(ValueError):
        Interval(2.0, 1.0)
    with pytest.raises(ValueError):
        Interval(float("nan"), 1.0)
    with pytest.raises(ValueError):
        poly_eval_interval(P("m1 + m2"), [Interval(0, 1)])


def test_interval_rounds_outward():
    third = Interval(Fraction(1, 3))
    assert Fraction(third.lo) < Fraction(1, 3) < Fraction(third.hi)
    s = Interval(0.1) + Interval(0.2)
    assert Fraction(s.lo) <= Fraction(0.1) + Fraction(0.2) <= Fraction(s.hi)


def test_interval_soundness_1000_points():
    rng = random.Random(7)
    for trial in range(10):
        n = 3
        terms = {
            tuple(rng.randint(0, 3) for _ in range(n)): Fraction(rng.randint(-9, 9), rng.randint(1, 4))
            for _ in range(6)
        }
        p = Polynomial(n, terms)
        sides = []
        for _ in range(n):
            lo = Fraction(rng.randint(0, 40), 10)
            sides.append((lo, lo + Fraction(rng.randint(1, 30), 10)))
        iv = poly_eval_interval(p, [Interval(lo, hi) for lo, hi in sides])
        for _ in range(100):
            pt = [lo + (hi - lo) * Fraction(rng.randint(0, 1000), 1000) for lo, hi in sides]
            assert eval_exact(p, pt) in iv


@given(st.fractions(-4, 4, max_denominator=9), st.fractions(0, 3, max_denominator=9),
       st.integers(0, 5), st.fractions(0, 1, max_denominator=20))
def test_interval_power_sound(lo, width, n, t):
    iv = Interval(lo, lo + width)
    x = lo + width * t
    assert x**n in iv**n
