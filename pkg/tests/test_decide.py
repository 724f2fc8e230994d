from math import gcd

import numpy as np
import pytest
from hypothesis import given, strategies as st

from bstriangle.arith import NotPrime
from bstriangle.coset.enumerate import EnumLimits, enumerate_cosets
from bstriangle.decide import (
    DEVELOPABLE, KNOWN_FACTS, NOT_DEVELOPABLE, UNKNOWN, affine_check, affine_report, analyze_Q,
    analyze_Qp, build_Q, build_Qp, check_p_criterion, coprime_classify, decide,
    decide_with_reduction_search, finiteness_verdict, qp_exponents,
)
from bstriangle.triangle import (
    BASIC_MOVES, PreconditionViolated, TriangleParams, all_moves, power_reduce,
)
from bstriangle.words import format_word, parse_word

from expected import COPRIME_TABLE, DECIDE_TABLE, Q_1213, REPORTED_INFINITE
from oracles import affine_word

P = TriangleParams.parse
nonzero = st.integers(-8, 8).filter(bool)
params = st.tuples(*[nonzero] * 6).map(lambda t: TriangleParams(*t))


@pytest.mark.parametrize("text", sorted(DECIDE_TABLE))
def test_decide_table(text):
    outcome, family = DECIDE_TABLE[text]
    v = decide(P(text))
    assert v.outcome == outcome
    assert v.family == family
    assert bool(v.annotations) == (text in REPORTED_INFINITE)


def test_divisibility_evidence():
    v = decide(P("1,2;1,2;1,2"))
    assert v.evidence[0].rule == "divisibility"
    assert decide(P("2,3;2,3;2,3")).evidence[0].rule == "no-divisibility"


@given(params, st.lists(st.sampled_from(BASIC_MOVES), max_size=6))
def test_verdict_invariant_under_moves(p, moves):
    q = p
    for m in moves:
        q = m.apply(q)
    a, b = decide(p), decide(q)
    assert (a.outcome, a.family) == (b.outcome, b.family)


@given(params)
def test_unknown_exactly_when_nothing_divides(p):
    divides = any(v % u == 0 or u % v == 0 for u, v in p.pairs)
    assert (decide(p).outcome == UNKNOWN) == (not divides)


shapes = {
    "SC1": lambda a, b, c, d, e, f: (a, -a, c, -c, e, -e),
    "SC2": lambda a, b, c, d, e, f: (a, b, c, c, e, e),
    "SC3": lambda a, b, c, d, e, f: (a, a + 2 * b, c, c, e, -e),
    "SC4": lambda a, b, c, d, e, f: (a, b, c, -c, 2 * e, 2 * e),
    "SC5": lambda a, b, c, d, e, f: (a, a + 2 * b, c, -c, 2 * e, -2 * e),
}


@given(st.sampled_from(sorted(shapes)), st.tuples(*[nonzero] * 6), st.sampled_from(all_moves()))
def test_families_are_always_developable(tag, vals, move):
    t = shapes[tag](*vals)
    if 0 in t:
        return
    assert decide(move.apply(TriangleParams(*t))).outcome == DEVELOPABLE


coprime_pair = st.tuples(st.integers(-7, 7).filter(bool), st.integers(-7, 7).filter(bool)).filter(
    lambda t: gcd(*t) == 1)


@given(st.tuples(coprime_pair, coprime_pair, coprime_pair), st.sampled_from(range(6)), st.sampled_from([1, -1]))
def test_decide_agrees_with_coprime_classification(pairs, slot, unit):
    vals = [v for pr in pairs for v in pr]
    vals[slot] = unit
    p = TriangleParams(*vals)
    if any(gcd(u, v) != 1 for u, v in p.pairs):
        return
    assert decide(p).outcome == coprime_classify(p).outcome


@pytest.mark.parametrize("text", sorted(COPRIME_TABLE))
def test_coprime_table(text):
    outcome, tag = COPRIME_TABLE[text]
    v = coprime_classify(P(text))
    assert (v.outcome, v.family) == (outcome, tag)


def test_coprime_preconditions():
    with pytest.raises(PreconditionViolated):
        coprime_classify(P("2,4;1,2;1,2"))
    with pytest.raises(PreconditionViolated):
        coprime_classify(P("2,3;2,3;2,3"))


@given(params, st.integers(0, 2), st.sampled_from([2, 3]))
def test_power_reduction_preserves_verdicts(p, pair, l):
    u, v = p.pairs[pair]
    p = TriangleParams.from_pairs([(u * l, v * l) if i == pair else pr for i, pr in enumerate(p.pairs)])
    a, b = decide(p), decide(power_reduce(p, pair, l))
    if a.definitive and b.definitive:
        assert a.outcome == b.outcome


def test_reduction_search():
    v = decide_with_reduction_search(P("2,3;2,3;2,4"), 1)
    assert v.outcome == NOT_DEVELOPABLE
    assert any(s.rule == "power-reduction" and str(s.params_after) == "2,3;4,9;1,2" for s in v.evidence)
    assert decide_with_reduction_search(P("3,-3;5,-5;7,-7"), 2).outcome == DEVELOPABLE
    for d in range(3):
        assert decide_with_reduction_search(P("2,3;2,3;2,3"), d).outcome == UNKNOWN
    with pytest.raises(ValueError):
        decide_with_reduction_search(P("2,3;2,3;2,3"), 99)


def test_reduction_search_reports_frontier_when_unsettled():
    # removing a common factor never creates divisibility, so this stays open
    p = P("6,10;3,5;3,5")
    v = decide_with_reduction_search(p, 2)
    assert v.outcome == UNKNOWN
    assert v.evidence[-1].rule == "search-exhausted" and "3,5;3,5;9,25" in v.evidence[-1].detail


@given(params, st.integers(1, 2))
def test_reduction_search_never_contradicts_decide(p, depth):
    a = decide(p)
    b = decide_with_reduction_search(p, depth)
    if a.definitive:
        assert b.outcome == a.outcome


def test_known_facts_are_annotations_only():
    for key in KNOWN_FACTS:
        assert decide(key).outcome == UNKNOWN


def test_build_Q():
    q = build_Q(P(Q_1213["params"]))
    assert [format_word(r) for r in q.relators] == [
        "y^-1 x y x^-2", "z^-1 y z y^-2", "x^-1 z x z^-3", "x", "y^3", "z^8"]
    assert [format_word(r) for r in build_Q(P("1,4;1,4;1,4")).relators[3:]] == ["x^567", "y^567", "z^567"]
    assert build_Q(P("2,1;1,2;1,3")).relators == q.relators
    with pytest.raises(PreconditionViolated):
        build_Q(P("1,1;1,2;1,2"))
    with pytest.raises(PreconditionViolated):
        build_Q(P("2,4;1,2;1,2"))


def test_build_Qp_recipes():
    p = P("1,4;1,4;1,4")
    assert [format_word(r) for r in build_Qp(p, 3).relators[3:]] == ["x^81", "y^81", "z^81"]
    assert qp_exponents(p, 7, "exponent") == (7, 7, 7)
    assert qp_exponents(p, 7) == (21, 21, 21)
    assert qp_exponents(P("1,2;1,2;1,3"), 2, "exponent") == (1, 1, 8)
    assert qp_exponents(P("1,2;1,2;1,3"), 2) == (1, 1, 8)
    with pytest.raises(NotPrime):
        build_Qp(p, 9)


def test_exponent_recipe_can_lose_the_prime_part():
    # Q(1,2;1,2;1,3) has Q' of order 3, so its 3-quotient is all of Q
    q3 = enumerate_cosets(build_Qp(P("1,2;1,2;1,3"), 3), ())
    assert q3.coset_count == 6
    assert enumerate_cosets(build_Qp(P("1,2;1,2;1,3"), 3, "exponent"), ()).coset_count == 1


def test_analyze_Q_small():
    r = analyze_Q(P(Q_1213["params"]))
    assert r.complete and r.order == Q_1213["order"]
    assert r.element_orders == Q_1213["element_orders"]
    assert r.derived_report.derived_series_orders == Q_1213["derived_series"]
    assert r.abelian_invariants.invariant_factors == Q_1213["abelian_invariants"]
    assert r.bound_check["quotient_ratio"] == Q_1213["ratio"] and r.bound_check["ratio_divides_M"]
    assert r.violations == []
    assert {pr.prime for pr in r.per_prime} == {2, 3}


def test_analyze_Q_trivial_and_overflow():
    r = analyze_Q(P("1,2;1,2;1,2"))
    assert r.order == 1 and r.violations == []
    r = analyze_Q(P("1,3;1,3;1,3"), EnumLimits(max_cosets=10, max_seconds=5))
    assert not r.complete and r.order is None and r.log


def test_check_p_criterion():
    for prime in (2, 3, 5):
        expected, computed = check_p_criterion(P("1,2;1,3;1,5"), prime)
        assert expected and computed
    assert check_p_criterion(P("1,4;1,4;1,4"), 7) == (True, True)


def test_analyze_Qp_nonabelian():
    pr, rep = analyze_Qp(P("1,4;1,4;1,4"), 3)
    assert pr.order == 19683 and pr.derived_abelian is False and not pr.criterion_expected
    assert rep.nilpotency_class_of_derived == 2


@pytest.mark.parametrize("text,status", [
    ("1,2;1,2;1,2", "Finite"),
    ("1,-1;1,-1;1,-1", "Infinite"),
    ("2,3;2,3;2,3", "Unknown"),
    ("2,4;3,5;7,11", "Unknown"),
])
def test_finiteness_verdict(text, status):
    f = finiteness_verdict(P(text))
    assert f.status == status
    if text == "1,2;1,2;1,2":
        assert f.order == 1
    if text == "2,3;2,3;2,3":
        assert f.annotations


def test_affine_model():
    assert affine_check()
    r = affine_report()
    assert r["rank"] == 3 and r["translations"]["x"] == (2, 0, 0)
    # independent check with 4x4 integer matrices
    for rel in ["y^-1 x y x", "z^-1 y z y", "x^-1 z x z"]:
        assert np.array_equal(affine_word(parse_word(rel)), np.eye(4, dtype=np.int64))
    sq = np.array([affine_word(parse_word(f"{g}^2"))[:3, 3] for g in "xyz"])
    assert np.linalg.matrix_rank(sq) == 3
