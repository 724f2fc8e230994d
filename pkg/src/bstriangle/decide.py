"""Developability verdicts, the finite quotients Q and Q_p, and their analysis."""

from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass, field
from math import gcd
from typing import Callable

import numpy as np

from .arith import SizeGuard, default_guard, is_overflow, is_prime, p_part, small_prime_factors, NotPrime
from .coset.enumerate import (
    COMPLETE,
    CosetTable,
    EnumLimits,
    TrackedTable,
    element_order as table_element_order,
    enumerate_cosets,
    enumerate_tracked,
    is_trivial_in_quotient,
)
from .structure import (
    AbelianInvariants,
    DegreeLimitExceeded,
    StructureReport,
    abelianization,
    regular_group,
    structure_report,
)
from .triangle import (
    GENERATORS,
    MoveSequence,
    PreconditionViolated,
    TriangleParams,
    canonicalize,
    conjugation_data,
    coprime_reduce,
    find_in_orbit,
    killer_relation,
    order_bounds,
    order_exponents,
    orbit,
    power_reduce,
    presentation,
    reduce_word,
    relabel,
    rotated,
    sign_normalize,
)
from .words import Presentation, Word, format_word

DEVELOPABLE = "Developable"
NOT_DEVELOPABLE = "NotDevelopable"
UNKNOWN = "Unknown"

DEFAULT_STRUCTURE_LIMIT = 2_000_000
_REGULAR_LIMIT = 200_000


# ---------------------------------------------------------------- verdicts


@dataclass(frozen=True)
class Step:
    rule: str
    detail: str
    params_after: TriangleParams | None = None

    def to_dict(self) -> dict:
        return {"rule": self.rule, "detail": self.detail,
                "params_after": str(self.params_after) if self.params_after else None}


@dataclass
class Verdict:
    outcome: str
    evidence: list[Step] = field(default_factory=list)
    annotations: list[str] = field(default_factory=list)
    family: str | None = None

    @property
    def definitive(self) -> bool:
        return self.outcome != UNKNOWN

    def to_dict(self) -> dict:
        return {"outcome": self.outcome, "family": self.family,
                "evidence": [s.to_dict() for s in self.evidence],
                "annotations": list(self.annotations)}


def _same_parity(u: int, v: int) -> bool:
    return (u - v) % 2 == 0


# developable families; each predicate reads a single orbit element
FAMILIES: tuple[tuple[str, str, Callable[[TriangleParams], bool]], ...] = (
    ("SC1", "(a,-a;c,-c;e,-e)", lambda q: q.b == -q.a and q.d == -q.c and q.f == -q.e),
    ("SC2", "(a,b;c,c;e,e)", lambda q: q.d == q.c and q.f == q.e),
    ("SC3", "(a,b;c,c;e,-e), a = b mod 2",
     lambda q: q.d == q.c and q.f == -q.e and _same_parity(q.a, q.b)),
    ("SC4", "(a,b;c,-c;e,e), e even", lambda q: q.d == -q.c and q.f == q.e and q.e % 2 == 0),
    ("SC5", "(a,b;c,-c;e,-e), e even, a = b mod 2",
     lambda q: q.d == -q.c and q.f == -q.e and q.e % 2 == 0 and _same_parity(q.a, q.b)),
)

COPRIME_CASES: tuple[tuple[str, str, Callable[[TriangleParams], bool]], ...] = (
    ("CP1", "(1,-1;1,-1;1,-1)", lambda q: q.values == (1, -1, 1, -1, 1, -1)),
    ("CP2", "(a,b;1,1;1,1)", lambda q: (q.c, q.d, q.e, q.f) == (1, 1, 1, 1)),
    ("CP3", "(a,b;1,1;1,-1), a,b odd",
     lambda q: (q.c, q.d, q.e, q.f) == (1, 1, 1, -1) and q.a % 2 and q.b % 2),
)

_REWRITING_NOTE = ("reported infinite: a confluent rewriting system was found with "
                   "Knuth-Bendix and its irreducible words counted")

# canonical forms -> annotation; informational only, never changes an outcome
KNOWN_FACTS: dict[TriangleParams, str] = {
    canonicalize(TriangleParams(2, 3, 2, 3, 2, 3))[0]: _REWRITING_NOTE,
    canonicalize(TriangleParams(3, 4, 3, 4, 3, 4))[0]: _REWRITING_NOTE,
}


def known_facts(p: TriangleParams) -> list[str]:
    note = KNOWN_FACTS.get(canonicalize(p)[0])
    return [note] if note else []


def _divisibility(p: TriangleParams):
    return find_in_orbit(p, lambda q: q.b % q.a == 0)


def decide(p: TriangleParams, guard: SizeGuard | None = None) -> Verdict:
    """Verdict from the divisibility criterion and its five exceptional families."""
    hit = _divisibility(p)
    if hit is None:
        return Verdict(UNKNOWN, [Step("no-divisibility",
                                      "no parameter divides its partner anywhere in the move orbit")],
                       known_facts(p))
    q, moves = hit
    evidence = [Step("divisibility", f"{q.a} divides its partner {q.b} (moves: {moves})", q)]
    for tag, shape, pred in FAMILIES:
        m = find_in_orbit(p, pred)
        if m is not None:
            evidence.append(Step(tag, f"matches {shape} (moves: {m[1]})", m[0]))
            return Verdict(DEVELOPABLE, evidence, known_facts(p), tag)
    evidence.append(Step("no-family", "no exceptional family occurs in the move orbit"))
    return Verdict(NOT_DEVELOPABLE, evidence, known_facts(p))


def _coprime_pairs(p: TriangleParams) -> bool:
    return all(gcd(u, v) == 1 for u, v in p.pairs)


def coprime_classify(p: TriangleParams) -> Verdict:
    """Classification for coprime pairs with some parameter equal to +-1."""
    if not _coprime_pairs(p):
        raise PreconditionViolated("every pair must be coprime")
    if not any(abs(v) == 1 for v in p.values):
        raise PreconditionViolated("some parameter must be +-1")
    for tag, shape, pred in COPRIME_CASES:
        m = find_in_orbit(p, pred)
        if m is not None:
            return Verdict(DEVELOPABLE, [Step(tag, f"matches {shape} (moves: {m[1]})", m[0])],
                           known_facts(p), tag)
    return Verdict(NOT_DEVELOPABLE,
                   [Step("coprime-classification", "no developable coprime case in the move orbit")],
                   known_facts(p))


def _reductions(q: TriangleParams, guard: SizeGuard):
    """One-step sound reductions: power substitutions and the coprime reduction."""
    for i, (u, v) in enumerate(q.pairs):
        for l in small_prime_factors(gcd(u, v)):
            yield Step("power-reduction", f"pair {i} divided by {l}", power_reduce(q, i, l))
    cr = coprime_reduce(q, guard)
    if not cr.overflow and cr.reduced != q and (cr.l, cr.m, cr.n) != (1, 1, 1):
        yield Step("coprime-reduction", f"l,m,n = {cr.l},{cr.m},{cr.n}", cr.reduced)


def _coprime_decidable(q: TriangleParams) -> bool:
    return _coprime_pairs(q) and any(abs(v) == 1 for v in q.values)


def decide_with_reduction_search(p: TriangleParams, depth: int = 2,
                                 guard: SizeGuard | None = None, max_depth: int = 6) -> Verdict:
    """Like :func:`decide`, but also follows reductions that preserve developability.

    For inputs decide already settles, a reduction chain to a coprime tuple is
    appended as corroborating evidence when one exists within ``depth``.
    """
    if not 0 <= depth <= max_depth:
        raise ValueError(f"depth must be between 0 and {max_depth}")
    guard = guard or default_guard()
    base = decide(p, guard)
    seen = {canonicalize(p)[0]}
    frontier = deque([(p, [])])
    explored = []
    for _ in range(depth):
        nxt = deque()
        for q, chain in frontier:
            for step in _reductions(q, guard):
                r = step.params_after
                key = canonicalize(r)[0]
                if key in seen:
                    continue
                seen.add(key)
                path = chain + [step]
                explored.append(r)
                if base.definitive:
                    if _coprime_decidable(r):
                        v = coprime_classify(r)
                        if v.outcome != base.outcome:
                            raise AssertionError(f"reduction to {r} disagrees with decide on {p}")
                        return Verdict(base.outcome, base.evidence + path + v.evidence,
                                       base.annotations, base.family)
                    continue
                v = decide(r, guard)
                if not v.definitive and _coprime_decidable(r):
                    v = coprime_classify(r)
                if v.definitive:
                    return Verdict(v.outcome, base.evidence + path + v.evidence,
                                   known_facts(p), v.family)
                nxt.append((r, path))
        frontier = nxt
    if base.definitive:
        return base
    detail = "explored: " + (", ".join(map(str, explored)) if explored else "nothing reducible")
    return Verdict(UNKNOWN, base.evidence + [Step("search-exhausted", detail)], base.annotations)


# ---------------------------------------------------------------- finiteness


@dataclass
class FinitenessVerdict:
    status: str  # Finite / Infinite / Unknown
    evidence: list[Step] = field(default_factory=list)
    annotations: list[str] = field(default_factory=list)
    order: int | None = None
    order_range: tuple[int, int] | None = None


def _q_hypotheses(p: TriangleParams) -> str | None:
    """Why Q is not defined for ``p``, or None when it is."""
    if not _coprime_pairs(p):
        return "the pairs must be coprime"
    for i, (u, v) in enumerate(p.pairs):
        if abs(u) == 1 and abs(v) == 1:
            return f"pair {i} is ({u},{v}); none of the three pairs may be (+-1,+-1)"
    return None


def finiteness_verdict(p: TriangleParams) -> FinitenessVerdict:
    v = decide(p)
    if v.outcome == DEVELOPABLE:
        return FinitenessVerdict("Infinite", v.evidence + [Step(
            "developable", "the infinite vertex groups embed in G")], v.annotations)
    why = _q_hypotheses(p)
    if why is None and any(abs(x) == 1 for x in p.values):
        q, moves = sign_normalize(p)
        b = order_bounds(q)
        lo, hi = b.L, b.L * b.M
        ev = [Step("finite", "coprime pairs, no (+-1,+-1) pair and a parameter +-1: "
                   "G equals its universal finite quotient", q)]
        return FinitenessVerdict("Finite", ev, v.annotations, lo if lo == hi else None, (lo, hi))
    ev = [Step("unknown", why or "no parameter is +-1")]
    return FinitenessVerdict("Unknown", ev, v.annotations)


# ---------------------------------------------------------------- Q and Q_p


def normalize_for_Q(p: TriangleParams) -> tuple[TriangleParams, MoveSequence]:
    why = _q_hypotheses(p)
    if why:
        raise PreconditionViolated(why)
    return sign_normalize(p)


def build_Q(p: TriangleParams) -> Presentation:
    """Defining relators plus the three order relators, on sign-normalized parameters."""
    q, _ = normalize_for_Q(p)
    n = order_exponents(q)
    return presentation(q).with_relators(Word.gen(g, k) for g, k in zip(GENERATORS, n))


QP_RECIPES = ("derived", "exponent")


def qp_exponents(p: TriangleParams, prime: int, recipe: str = "derived") -> tuple[int, int, int]:
    """Exponents ``k`` of the relators ``x^k, y^k', z^k''`` defining Q_p.

    ``derived``: ``X = x^(b-a)`` generates the part of Q' seen by x, and its
    order divides ``(b-a)(b^(d-c)-a^(d-c))``; keeping only the p-part gives
    ``x^((b-a) * p-part)``.  ``exponent``: the p-part of the order exponent
    itself, which agrees with ``derived`` when p divides every difference but
    can cut Q_p down further otherwise.
    """
    if not is_prime(prime):
        raise NotPrime(prime)
    if recipe not in QP_RECIPES:
        raise ValueError(f"recipe must be one of {QP_RECIPES}")
    q, _ = normalize_for_Q(p)
    if recipe == "exponent":
        return tuple(p_part(n, prime) for n in order_exponents(q))
    out = []
    for k in range(3):
        r = rotated(q, k)
        diff = r.b - r.a
        out.append(diff * p_part(abs(diff * (r.b ** (r.d - r.c) - r.a ** (r.d - r.c))), prime))
    return tuple(out)


def build_Qp(p: TriangleParams, prime: int, recipe: str = "derived") -> Presentation:
    q, _ = normalize_for_Q(p)
    ks = qp_exponents(p, prime, recipe)
    return presentation(q).with_relators(Word.gen(g, k) for g, k in zip(GENERATORS, ks))


# ---------------------------------------------------------------- analysis


class FiniteQuotient:
    """Uniform view of a completed regular or tracked enumeration."""

    def __init__(self, table, method: str):
        self.table = table
        self.method = method

    @property
    def order(self) -> int:
        return self.table.order if isinstance(self.table, TrackedTable) else self.table.coset_count

    def element_order(self, w: Word) -> int:
        if isinstance(self.table, TrackedTable):
            return self.table.element_order(w)
        return table_element_order(self.table, w)

    def is_trivial(self, w: Word) -> bool:
        if isinstance(self.table, TrackedTable):
            return self.table.is_trivial(w)
        return is_trivial_in_quotient(self.table, w)

    @property
    def stats(self) -> dict:
        return dict(self.table.stats)


def enumerate_finite(pres: Presentation, limits: EnumLimits | None = None, strategy: str = "hlt",
                     size_hint: int | None = None) -> tuple[FiniteQuotient | None, list[str]]:
    """Enumerate a finite group: regular table when small, else cosets of a
    cyclic subgroup with tracking.  Returns (quotient or None, log)."""
    limits = limits or EnumLimits()
    log = []
    t0 = time.perf_counter()

    def left():
        return EnumLimits(limits.max_cosets, max(1e-3, limits.max_seconds - (time.perf_counter() - t0)))

    if size_hint is None or size_hint <= _REGULAR_LIMIT:
        t = enumerate_cosets(pres, (), left(), strategy)
        if t.complete:
            return FiniteQuotient(t, f"regular-{strategy}"), log
        log.append(f"regular {strategy}: {t.reason}")
    for g in pres.generators:
        t = enumerate_tracked(pres, g, left(), strategy=strategy)
        if t.complete:
            return FiniteQuotient(t, f"tracked-{strategy}-<{g}>"), log
        log.append(f"tracked {strategy} <{g}>: {t.reason}")
        if time.perf_counter() - t0 > limits.max_seconds:
            break
    return None, log


@dataclass
class PrimeReport:
    prime: int
    order: int | None
    derived_abelian: bool | None
    criterion_expected: bool
    recipe: str
    exponents: tuple[int, int, int]
    note: str = ""


@dataclass
class QuotientReport:
    params: TriangleParams
    normalized: TriangleParams
    moves: str
    status: str
    order: int | None = None
    abelian_invariants: AbelianInvariants | None = None
    element_orders: dict[str, int] = field(default_factory=dict)
    order_exponents: tuple[int, int, int] | None = None
    derived_report: StructureReport | None = None
    derived_note: str = ""
    bound_check: dict = field(default_factory=dict)
    per_prime: list[PrimeReport] = field(default_factory=list)
    relation_checks: list[tuple[str, bool]] = field(default_factory=list)
    method: str = ""
    stats: dict = field(default_factory=dict)
    log: list[str] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def complete(self) -> bool:
        return self.status == COMPLETE

    @property
    def violations(self) -> list[str]:
        bad = [name for name, ok in self.relation_checks if not ok]
        if self.bound_check and not self.bound_check.get("ratio_divides_M", True):
            bad.append("order bounds")
        return bad


def relation_checks(q: TriangleParams, fq: FiniteQuotient) -> list[tuple[str, bool]]:
    """Every closed-form relation that must hold in Q, evaluated in ``fq``."""
    orders = {g: fq.element_order(Word.gen(g)) for g in GENERATORS}
    checks = []
    for g, n in zip(GENERATORS, order_exponents(q)):
        checks.append((f"order of {g} divides {n}", n % orders[g] == 0))
    try:
        k = killer_relation(q, 1, 1, 1)
    except PreconditionViolated:
        k = None
    if k is not None and not is_overflow(k):
        checks.append(("killer relation R=S=T=1", fq.is_trivial(k.reduced_relator(orders))))
    for shift in range(3):
        cd = conjugation_data(rotated(q, shift))
        for name, r in zip(cd.names, cd.relators):
            label = relabel_name(name, shift)
            checks.append((f"conjugation {label}", fq.is_trivial(reduce_word(relabel(r, shift), orders))))
    return checks


def relabel_name(name: str, shift: int) -> str:
    table = {}
    for i, g in enumerate(GENERATORS):
        h = GENERATORS[(i + shift) % 3]
        table[g], table[g.upper()] = h, h.upper()
    return "".join(table.get(ch, ch) for ch in name)


def _structure(fq: FiniteQuotient, limit: int) -> tuple[StructureReport | None, str]:
    if fq.order > limit:
        return None, f"skipped: order {fq.order} exceeds structure limit {limit}"
    try:
        g, _ = regular_group(fq.table, degree_limit=limit)
    except DegreeLimitExceeded as exc:
        return None, f"skipped: {exc}"
    return structure_report(g), "regular representation"


def _differences(q: TriangleParams) -> tuple[int, int, int]:
    return (q.b - q.a, q.d - q.c, q.f - q.e)


def analyze_Qp(p: TriangleParams, prime: int, limits: EnumLimits | None = None,
               recipe: str = "derived", strategy: str = "hlt",
               structure_limit: int = DEFAULT_STRUCTURE_LIMIT) -> tuple[PrimeReport, StructureReport | None]:
    q, _ = normalize_for_Q(p)
    ks = qp_exponents(q, prime, recipe)
    expected = not all(d % prime == 0 for d in _differences(q))
    fq, log = enumerate_finite(build_Qp(q, prime, recipe), limits, strategy)
    if fq is None:
        return PrimeReport(prime, None, None, expected, recipe, ks, "; ".join(log)), None
    rep, note = _structure(fq, structure_limit)
    abelian = rep.is_derived_abelian if rep else None
    return PrimeReport(prime, fq.order, abelian, expected, recipe, ks, note), rep


def check_p_criterion(p: TriangleParams, prime: int, limits: EnumLimits | None = None,
                      recipe: str = "derived") -> tuple[bool, bool | None]:
    """(expected abelian by the criterion, computed abelian)."""
    rep, _ = analyze_Qp(p, prime, limits, recipe)
    return rep.criterion_expected, rep.derived_abelian


def report_primes(q: TriangleParams, order: int | None, ab: AbelianInvariants) -> list[int]:
    primes = set()
    for d in _differences(q):
        primes.update(small_prime_factors(d))
    if order is not None and ab.order:
        primes.update(small_prime_factors(order // ab.order))
    return sorted(primes)


def analyze_Q(p: TriangleParams, limits: EnumLimits | None = None, strategy: str = "hlt",
              primes: list[int] | None = None, structure_limit: int = DEFAULT_STRUCTURE_LIMIT,
              qp_recipe: str = "derived", with_primes: bool = True) -> QuotientReport:
    t0 = time.perf_counter()
    limits = limits or EnumLimits()
    q, moves = normalize_for_Q(p)
    pres = build_Q(q)
    bounds = order_bounds(q)
    rep = QuotientReport(params=p, normalized=q, moves=str(moves), status="overflowed",
                         abelian_invariants=abelianization(pres), order_exponents=order_exponents(q))
    fq, log = enumerate_finite(pres, limits, strategy, size_hint=bounds.L * bounds.M)
    rep.log = log
    if fq is None:
        rep.seconds = time.perf_counter() - t0
        return rep
    rep.status = COMPLETE
    rep.method = fq.method
    rep.stats = fq.stats
    rep.order = fq.order
    rep.element_orders = {g: fq.element_order(Word.gen(g)) for g in GENERATORS}
    ok, ratio = bounds.check(fq.order)
    rep.bound_check = {"L": bounds.L, "M": bounds.M, "quotient_ratio": ratio,
                       "L_divides_order": ratio is not None, "ratio_divides_M": ok}
    rep.relation_checks = relation_checks(q, fq)
    rep.derived_report, rep.derived_note = _structure(fq, structure_limit)
    if with_primes:
        ab = rep.abelian_invariants
        for prime in (primes if primes is not None else report_primes(q, fq.order, ab)):
            pr, _ = analyze_Qp(q, prime, limits, qp_recipe, strategy, structure_limit)
            rep.per_prime.append(pr)
            if pr.order is not None:
                rep.relation_checks.append((f"|Q_{prime}| divides |Q|", fq.order % pr.order == 0))
        if ab.order and primes is None and all(pr.order for pr in rep.per_prime):
            derived = fq.order // ab.order
            prod = 1
            for pr in rep.per_prime:
                prod *= pr.order // ab.order
            rep.relation_checks.append(("|Q'| is the product of the |Q_p'|", prod == derived))
    rep.seconds = time.perf_counter() - t0
    return rep


# ---------------------------------------------------------------- affine model


def _affine(sign: tuple[int, int, int], shift: tuple[int, int, int]):
    return (sign, shift)


def _apply(m, v):
    sign, shift = m
    return tuple(s * x + t for s, x, t in zip(sign, v, shift))


def _compose(m1, m2):
    """Map doing ``m1`` then ``m2`` (right action, matching words read left to right)."""
    s1, t1 = m1
    s2, t2 = m2
    return (tuple(a * b for a, b in zip(s1, s2)), tuple(a * u + v for a, u, v in zip(s2, t1, t2)))


def _inverse(m):
    sign, shift = m
    return (sign, tuple(-s * t for s, t in zip(sign, shift)))


def affine_generators():
    """Diagonal isometries of R^3: each generator translates one axis, fixes the
    next and reflects the third."""
    x = _affine((1, 1, -1), (1, 0, 0))
    y = _affine((-1, 1, 1), (0, 1, 0))
    z = _affine((1, -1, 1), (0, 0, 1))
    return {"x": x, "y": y, "z": z}


def _eval(w: Word, gens):
    m = ((1, 1, 1), (0, 0, 0))
    for g, e in w.syllables:
        step = gens[g] if e > 0 else _inverse(gens[g])
        for _ in range(abs(e)):
            m = _compose(m, step)
    return m


def affine_report() -> dict:
    gens = affine_generators()
    ident = ((1, 1, 1), (0, 0, 0))
    rels = presentation(TriangleParams(1, -1, 1, -1, 1, -1)).relators
    relations = {format_word(r): _eval(r, gens) == ident for r in rels}
    squares = {g: _eval(Word.gen(g, 2), gens) for g in GENERATORS}
    translations = [sq[1] for sq in squares.values()]
    pure = all(sq[0] == (1, 1, 1) for sq in squares.values())
    rank = int(np.linalg.matrix_rank(np.array(translations, dtype=np.int64)))
    return {"relations": relations, "squares_are_translations": pure,
            "translations": {g: sq[1] for g, sq in squares.items()}, "rank": rank}


def affine_check() -> bool:
    r = affine_report()
    return all(r["relations"].values()) and r["squares_are_translations"] and r["rank"] == 3
