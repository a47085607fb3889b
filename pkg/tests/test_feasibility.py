import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kwfeas.feasibility import (
    FEASIBLE,
    INFEASIBLE,
    UNKNOWN,
    InvalidBoxError,
    OrthantCertificate,
    SearchConfig,
    bnb_region,
    decide,
    find_certificate,
    ladder_box,
    search_witness,
    verify_certificate,
    verify_witness,
)
from kwfeas.feasibility.bnb import CompiledSystem, interval_lower_bound
from kwfeas.feasibility.certificate import certificate_schedule
from kwfeas.feasibility.types import Verdict
from kwfeas.kw import InequalitySystem, Restriction, kw_system, lift_witness, restrict
from kwfeas.model import RegressionSpec, SupportSet, corner_design
from kwfeas.polycore import Polynomial, eval_exact, from_text
from kwfeas.symmetry import act_support, hyperoctahedral_group

FAST = SearchConfig(multistarts=8, degree=2, order=1, box_budget=20000, time_budget=60)


def system(text, n):
    return InequalitySystem.from_text(text, nvars=n)


def planted(seed, n=3, m=4):
    """Random system that holds at a known rational point."""
    rng = random.Random(seed)
    point = [Fraction(rng.randint(1, 20), rng.randint(1, 20)) for _ in range(n)]
    polys = []
    for _ in range(m):
        terms = {
            tuple(rng.randint(0, 2) for _ in range(n)): rng.randint(-6, 6) for _ in range(rng.randint(2, 5))
        }
        g = Polynomial(n, terms)
        g = g - Polynomial.constant(n, eval_exact(g, point) + Fraction(rng.randint(0, 3), 7))
        polys.append(g)
    return InequalitySystem(n, tuple(polys)), point


# witnesses ----------------------------------------------------------------------

def test_verify_witness_examples():
    S = kw_system(corner_design(RegressionSpec(2, 1)), RegressionSpec(2, 1))
    assert verify_witness(S, [Fraction(1, 4), Fraction(1, 4)])
    assert not verify_witness(S, [1, 1])
    assert not verify_witness(S, [0, Fraction(1, 4)])
    with pytest.raises(ValueError):
        verify_witness(S, [1])


def test_search_witness_corner():
    spec = RegressionSpec(4, 1)
    S = kw_system(corner_design(spec), spec)
    w = search_witness(S, FAST)
    assert w is not None and verify_witness(S, w)


# certificates -------------------------------------------------------------------

def test_certificate_trivial_constraint():
    S = system("1 + m1 <= 0", 1)
    cert = find_certificate(S, FAST)
    assert cert is not None and verify_certificate(S, cert)


def test_certificate_two_sided():
    S = system("m1 - 1 <= 0\n2 - m1 <= 0", 1)
    cert = find_certificate(S, FAST, degree=0, order=1)
    assert cert is not None and verify_certificate(S, cert)
    # hand-written version: (1 - m1) + (m1 - 2) = -1
    one = Polynomial.constant(1, 1)
    i = S.constraints.index(from_text("m1 - 1", 1))
    manual = OrthantCertificate((((i,), one), ((1 - i,), one)), one)
    assert verify_certificate(S, manual)
    # corrupted: off by one coefficient
    bad = OrthantCertificate((((i,), one), ((1 - i,), Polynomial.constant(1, 2))), one)
    assert not verify_certificate(S, bad)
    # negative multiplier
    neg = OrthantCertificate((((i,), -one), ((1 - i,), one)), one)
    assert not verify_certificate(S, neg)
    # zero target
    assert not verify_certificate(S, OrthantCertificate(manual.entries, Polynomial.zero(1)))


def test_certificate_index_out_of_range():
    S = system("m1 - 1 <= 0", 1)
    one = Polynomial.constant(1, 1)
    assert not verify_certificate(S, OrthantCertificate((((3,), one),), one))


def test_certificate_schedule_order():
    sched = certificate_schedule(SearchConfig(degree=4, order=2))
    assert sched[0] == (0, 1) and sched[-1] == (4, 2)
    assert all(D <= 4 and r <= 2 for D, r in sched)


@pytest.mark.parametrize("seed", range(8))
def test_no_certificate_for_planted_systems(seed):
    S, point = planted(seed)
    assert verify_witness(S, point)
    cert = find_certificate(S, FAST, degree=2, order=1)
    assert cert is None


def test_certificate_round_trip():
    S = system("m1 - 1 <= 0\n2 - m1 <= 0", 1)
    cert = find_certificate(S, FAST, degree=0, order=1)
    again = OrthantCertificate.from_dict(cert.to_dict(), 1)
    assert verify_certificate(S, again)


# branch and bound ---------------------------------------------------------------

def test_bnb_single_evaluation_prune():
    S = system("m1 + m2 - 1 <= 0", 2)
    res = bnb_region(S, [(Fraction(3, 5), 2)] * 2, FAST)
    assert res.outcome == "ProvenEmpty"
    assert res.trace.evaluations == 1 and res.trace.complete


def test_bnb_finds_point_k2_corner():
    spec = RegressionSpec(2, 1)
    S = kw_system(corner_design(spec), spec)
    box = [(Fraction(1, 10), Fraction(9, 10))] * 2
    res = bnb_region(S, box, FAST)
    assert res.outcome == "FoundPoint"
    assert verify_witness(S, res.witness)
    assert all(lo <= q <= hi for q, (lo, hi) in zip(res.witness, box))


def test_bnb_invalid_boxes():
    S = system("m1 - 1 <= 0", 1)
    with pytest.raises(InvalidBoxError):
        bnb_region(S, [(0, 1)], FAST)
    with pytest.raises(InvalidBoxError):
        bnb_region(S, [(2, 1)], FAST)
    with pytest.raises(InvalidBoxError):
        bnb_region(S, [(1, 2), (1, 2)], FAST)


def test_bnb_budget_exhaustion_reports_unresolved():
    # feasible only on a curve: the search cannot prune or find a rational point on it quickly
    S = system("m1^2 - 2 <= 0\n2 - m1^2 <= 0", 1)
    res = bnb_region(S, [(1, 2)], SearchConfig(box_budget=50))
    assert res.outcome == "Exhausted"
    assert res.trace.unresolved


@pytest.mark.parametrize("seed", range(15))
def test_bnb_never_prunes_planted_point(seed):
    S, point = planted(seed)
    box = [(q / 3, q * 3) for q in point]
    res = bnb_region(S, box, SearchConfig(box_budget=3000))
    assert res.outcome != "ProvenEmpty"
    for (lo, hi), _ in res.trace.pruned:
        assert not all(Fraction(a) <= q <= Fraction(b) for q, a, b in zip(point, lo, hi))


@pytest.mark.parametrize("seed", range(10))
def test_compiled_bounds_are_sound(seed):
    rng = random.Random(seed)
    S, _ = planted(seed, n=3, m=3)
    comp = CompiledSystem(S)
    for _ in range(5):
        box = []
        for _ in range(3):
            lo = Fraction(rng.randint(1, 40), 8)
            box.append((lo, lo + Fraction(rng.randint(1, 40), 8)))
        lo = np.array([[float(a) for a, _ in box]])
        hi = np.array([[float(b) for _, b in box]])
        fast = comp.lower_bounds(lo, hi)[0]
        ref = interval_lower_bound(S, box)
        for _ in range(40):
            pt = [a + (b - a) * Fraction(rng.randint(0, 100), 100) for a, b in box]
            for j, g in enumerate(S.constraints):
                v = eval_exact(g, pt)
                assert Fraction(fast[j]) <= v
                assert Fraction(ref[j]) <= v


def test_ladder_box():
    assert ladder_box(2, 4) == ((Fraction(1, 16), 16), (Fraction(1, 16), 16))


# decide ---------------------------------------------------------------------------

def test_decide_strategies():
    S = system("m1 + m2 - 1 <= 0", 2)
    for strategy in ("auto", "witness", "bnb"):
        v = decide(S, strategy, FAST)
        assert v.status == FEASIBLE and verify_witness(S, v.witness)
    with pytest.raises(ValueError):
        decide(S, "magic", FAST)


def test_decide_trivial_and_dropped():
    v = decide(system("m1 + 2 <= 0\nm1 - 3 <= 0", 1), "auto", FAST)
    assert v.status == INFEASIBLE and v.scope == "global"
    v = decide(system("-m1 - 1 <= 0", 1), "auto", FAST)
    assert v.status == FEASIBLE
    assert any("whole orthant" in d for d in v.diagnostics)


def test_decide_box_scope():
    S = system("m1 + m2 - 1 <= 0", 2)
    v = decide(S, "bnb", FAST, box=[(Fraction(3, 5), 2)] * 2)
    assert v.status == INFEASIBLE and v.scope.startswith("box")
    w = decide(S, "auto", FAST, box=[(Fraction(1, 10), Fraction(1, 2))] * 2)
    assert w.status == FEASIBLE
    assert all(Fraction(1, 10) <= q <= Fraction(1, 2) for q in w.witness)


def test_decide_unknown_when_bnb_exhausts():
    S = system("m1^2 - 2 <= 0\n2 - m1^2 <= 0", 1)
    v = decide(S, "bnb", SearchConfig(box_budget=30))
    assert v.status == UNKNOWN and v.boxlog and v.diagnostics


def test_decide_determinism():
    spec = RegressionSpec(3, 1)
    S = kw_system(SupportSet.parse("000,100,010,111"), spec)
    a, b = decide(S, "auto", FAST).to_dict(), decide(S, "auto", FAST).to_dict()
    a.pop("wall_time"), b.pop("wall_time")
    assert a == b


def test_verdict_round_trip():
    spec = RegressionSpec(3, 1)
    S = kw_system(SupportSet.parse("000,100,010,111"), spec)
    v = decide(S, "auto", FAST)
    again = Verdict.from_dict(v.to_dict(), S.nvars)
    assert again.to_dict() == v.to_dict()


def test_orbit_consistency_k3():
    spec = RegressionSpec(3, 1)
    rng = random.Random(5)
    G = hyperoctahedral_group(3)
    for rep in ("000,100,010,001", "000,110,101,011", "000,100,010,111"):
        X = SupportSet.parse(rep)
        base = decide(kw_system(X, spec), "auto", FAST).status
        for g in rng.sample(G, 3):
            assert decide(kw_system(act_support(g, X), spec), "auto", FAST).status == base


def test_restriction_monotonicity():
    spec = RegressionSpec(4, 1)
    S = kw_system(corner_design(spec), spec)
    r = Restriction.identify(0, 1)
    v = decide(restrict(S, r), "auto", FAST)
    assert v.status == FEASIBLE
    assert verify_witness(S, lift_witness(r, v.witness))


@settings(max_examples=25)
@given(st.lists(st.fractions(Fraction(1, 5), 5, max_denominator=5), min_size=2, max_size=2))
def test_feasible_verdicts_verify(pt):
    # systems that hold at pt by construction: (m1 - a)(m2 - b) shifted
    a, b = pt
    g = from_text("m1*m2", 2) - Polynomial.constant(2, a * b)
    S = InequalitySystem(2, (g, -g))
    v = decide(S, "auto", FAST)
    assert v.status != INFEASIBLE
    if v.status == FEASIBLE:
        assert verify_witness(S, v.witness)


def test_certificate_verdict_corroborated_by_ladder():
    spec = RegressionSpec(3, 1)
    S = kw_system(SupportSet.parse("000,100,010,111"), spec)
    v = decide(S, "auto", FAST)
    assert v.method == "certificate" and len(v.boxlog) == len(FAST.ladder)
    assert all(e["outcome"] == "ProvenEmpty" for e in v.boxlog)
    quiet = decide(S, "auto", SearchConfig(multistarts=8, degree=2, order=1, corroborate=False))
    assert quiet.status == INFEASIBLE and quiet.boxlog == []
