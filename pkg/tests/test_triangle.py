from math import gcd

import pytest
from hypothesis import given, strategies as st

from bstriangle.arith import OVERFLOW, SizeGuard, is_overflow
from bstriangle.coset.enumerate import element_order, enumerate_cosets, is_trivial_in_quotient
from bstriangle.decide import build_Q
from bstriangle.triangle import (
    BASIC_MOVES, NotADivisor, ParamsSyntaxError, PreconditionViolated, TriangleParams, all_moves,
    canonicalize, conjugation_data, coprime_reduce, finite_order_witness, killer_relation, orbit,
    order_bounds, order_exponents, power_reduce, presentation, reduce_word, relabel, rotated,
    sign_normalize, square_params,
)
from bstriangle.words import Word, commutator, format_word

from expected import KILLER_STRINGS, POWER_REDUCTIONS, Q_1213, Q3_141414
from oracles import naive_orbit

P = TriangleParams.parse
nonzero = st.integers(-6, 6).filter(bool)
params = st.tuples(*[nonzero] * 6).map(lambda t: TriangleParams(*t))


def test_parse_round_trip_and_errors():
    p = P(" 3,-3 ; 5,-5;7,-7")
    assert p.values == (3, -3, 5, -5, 7, -7) and str(p) == "3,-3;5,-5;7,-7"
    for bad in ["1,2;1,2", "1,2;1,x;1,2", "1,0;1,2;1,2", "1,2,3;1,2;1,2"]:
        with pytest.raises(ParamsSyntaxError) as err:
            P(bad)
        assert err.value.pos >= 0


def test_presentation_relators():
    rels = [format_word(r) for r in presentation(P("1,2;1,2;1,3")).relators]
    assert rels == ["y^-1 x y x^-2", "z^-1 y z y^-2", "x^-1 z x z^-3"]


@pytest.mark.parametrize("given_,expected,moves", [
    ("1,2;1,2;1,2", "1,2;1,2;1,2", "(none)"),
    ("2,1;1,2;1,2", "1,2;1,2;1,2", "SwapPartners(0)"),
    ("1,2;1,2;-1,-2", "1,2;1,2;1,2", "NegatePair(2)"),
])
def test_canonicalize_examples(given_, expected, moves):
    c, seq = canonicalize(P(given_))
    assert str(c) == expected and str(seq) == moves


def test_orbit_sizes():
    assert len(orbit(P("1,1;1,1;1,1"))) == 8
    assert len(orbit(P("1,2;1,2;1,2"))) == 64
    assert P("1,2;3,4;5,6") in orbit(P("1,2;3,4;5,6"))
    assert len(orbit(P("1,2;3,4;5,6"))) == 192
    assert len(all_moves()) == 192
    assert len({m.apply(P("2,3;4,5;6,7")) for m in all_moves()}) == 192


@given(params)
def test_orbit_matches_naive_closure(p):
    assert {q.values for q in orbit(p)} == naive_orbit(p.values)


@given(params, st.sampled_from(BASIC_MOVES))
def test_canonical_form_constant_on_orbits(p, move):
    c, seq = canonicalize(p)
    assert canonicalize(move.apply(p))[0] == c
    assert seq.apply(p) == c


@given(params)
def test_sign_normalize_orders_pairs(p):
    q, seq = sign_normalize(p)
    assert seq.apply(p) == q
    assert all(u <= v for u, v in q.pairs)


@pytest.mark.parametrize("key", sorted(POWER_REDUCTIONS))
def test_power_reduce_examples(key):
    text, pair, l = key
    assert str(power_reduce(P(text), pair, l)) == POWER_REDUCTIONS[key]


def test_power_reduce_needs_common_divisor():
    with pytest.raises(NotADivisor):
        power_reduce(P("2,3;1,2;1,2"), 0, 2)


@given(params, st.integers(0, 2))
def test_power_reduce_by_one_is_identity(p, pair):
    assert power_reduce(p, pair, 1) == p


def test_coprime_reduce_example():
    r = coprime_reduce(P("2,4;3,6;5,10"))
    assert (r.l, r.m, r.n) == (2, 3, 5)
    assert str(r.reduced) == "1,8;1,33554432;1,4"
    assert coprime_reduce(P("4,8;3,6;11,22"), SizeGuard(max_bits=64)).overflow


coprime_pair = st.tuples(st.integers(1, 9), nonzero).filter(lambda t: gcd(*t) == 1)


@given(st.tuples(coprime_pair, coprime_pair, coprime_pair))
def test_coprime_reduce_fixes_coprime_tuples(pairs):
    p = TriangleParams.from_pairs(pairs)
    assert coprime_reduce(p).reduced == p


@pytest.mark.parametrize("key", sorted(KILLER_STRINGS))
def test_killer_strings(key):
    text, R, S, T = key
    assert str(killer_relation(P(text), R, S, T)) == KILLER_STRINGS[key]


def test_killer_preconditions_and_overflow():
    with pytest.raises(PreconditionViolated):
        killer_relation(P("2,1;1,2;1,2"))
    assert killer_relation(P("2,3;3,4;1,5"), 3, 3, 3, SizeGuard(max_bits=64)) is OVERFLOW


@pytest.mark.parametrize("text", ["1,2;1,2;1,3", "1,3;1,2;1,3", "1,2;1,3;1,4", "1,3;1,3;1,3"])
@pytest.mark.parametrize("rst", [(1, 1, 1), (2, 1, 1), (1, 2, 1), (1, 1, 2), (2, 2, 3)])
def test_killer_relation_holds_in_Q(text, rst):
    t = enumerate_cosets(build_Q(P(text)), ())
    orders = {g: element_order(t, Word.gen(g)) for g in "xyz"}
    k = killer_relation(P(text), *rst)
    assert is_trivial_in_quotient(t, k.reduced_relator(orders))
    assert is_trivial_in_quotient(t, reduce_word(k.compact_relator(), orders))


def test_order_exponents_and_bounds():
    assert order_exponents(P(Q_1213["params"])) == Q_1213["order_exponents"]
    b = order_bounds(P(Q_1213["params"]))
    assert (b.L, b.M) == (Q_1213["L"], Q_1213["M"])
    assert b.check(6) == (True, 1)
    assert b.check(7) == (False, None)
    assert order_exponents(P(Q3_141414["params"])) == Q3_141414["order_exponents"]
    b = order_bounds(P(Q3_141414["params"]))
    assert (b.L, b.M) == (Q3_141414["L"], Q3_141414["M"])


@given(st.integers(1, 4), st.integers(1, 4), st.integers(1, 4), st.integers(1, 4), st.integers(1, 4), st.integers(1, 4))
def test_order_exponents_rotate_with_parameters(a, k1, c, k2, e, k3):
    p = TriangleParams(a, a + k1, c, c + k2, e, e + k3)
    n = order_exponents(p)
    assert order_exponents(rotated(p, 1)) == n[1:] + n[:1]


def test_conjugation_data_examples():
    cd = conjugation_data(P("1,2;1,2;1,2"))
    assert cd.modulus == 1 and format_word(cd.relators[0]) == "x^-1 y x^2 y^-1"
    cd = conjugation_data(P("1,4;1,4;1,4"))
    assert cd.alpha == 1 and cd.X == Word.gen("x", 3)
    cd = conjugation_data(P("2,5;1,2;1,2"))
    assert (cd.modulus, cd.alpha) == (27, 14)


@pytest.mark.parametrize("text", ["1,2;1,2;1,3", "1,3;1,3;1,3", "1,2;1,4;1,3", "2,3;1,2;1,2"])
def test_conjugation_relators_hold_in_Q(text):
    p = P(text)
    t = enumerate_cosets(build_Q(p), ())
    orders = {g: element_order(t, Word.gen(g)) for g in "xyz"}
    for k in range(3):
        for r in conjugation_data(rotated(p, k)).relators:
            assert is_trivial_in_quotient(t, reduce_word(relabel(r, k), orders))


def test_finite_order_witness_examples():
    w = finite_order_witness(P("1,2;1,2;1,1"))
    assert w.branch == "f=1" and w.x_order_divisor == 2
    w = finite_order_witness(P("1,2;1,2;1,2"))
    assert (w.A, w.B, w.C, w.D, w.E) == (2, 4, 1, 2, 2)
    assert (w.g, w.h, w.y_order_divisor) == (16, 4, 56)
    with pytest.raises(PreconditionViolated):
        finite_order_witness(P("2,2;1,2;1,2"))
    assert is_overflow(finite_order_witness(P("2,3;3,4;1,2")).y_order_divisor)


@pytest.mark.parametrize("text", ["1,2;1,2;1,1", "1,3;1,2;1,1", "2,5;1,2;1,1", "1,3;1,3;1,1"])
@pytest.mark.parametrize("k", [2, 3, 4])
def test_f1_witness_bounds_x_in_finite_quotients(text, k):
    # z has infinite order here, so check in the finite quotients by z^k
    p = P(text)
    assert commutator(Word.gen("x"), Word.gen("z", -1)) == presentation(p).relators[2]
    t = enumerate_cosets(presentation(p).with_relators([Word.gen("z", k)]), ())
    assert t.complete
    assert finite_order_witness(p).x_order_divisor % element_order(t, Word.gen("x")) == 0


@given(params)
def test_square_params(p):
    assert square_params(p).values == tuple(v * v for v in p.values)
