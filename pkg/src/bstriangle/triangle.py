"""Parameter tuples of BS triangles and every closed-form formula about them.

``G(a,b;c,d;e,f) = <x,y,z | (x^a)^y = x^b, (y^c)^z = y^d, (z^e)^x = z^f>``.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

from .arith import OVERFLOW, SizeGuard, default_guard, guarded_pow, is_overflow, mod_inverse
from .words import Presentation, Word, conjugation_relator

GENERATORS = ("x", "y", "z")


class PreconditionViolated(ValueError):
    pass


class NotADivisor(ValueError):
    pass


class ParamsSyntaxError(ValueError):
    def __init__(self, text: str, pos: int, msg: str):
        super().__init__(f"{msg} at position {pos}: {text!r}")
        self.pos = pos


@dataclass(frozen=True, order=True)
class TriangleParams:
    a: int
    b: int
    c: int
    d: int
    e: int
    f: int

    def __post_init__(self):
        for name in "abcdef":
            v = getattr(self, name)
            if not isinstance(v, int) or isinstance(v, bool):
                raise TypeError(f"{name} must be an int")
            if v == 0:
                raise ValueError(f"{name} must be nonzero")

    @classmethod
    def of(cls, *values: int) -> "TriangleParams":
        if len(values) == 1:
            values = tuple(values[0])
        return cls(*(int(v) for v in values))

    @classmethod
    def parse(cls, text: str) -> "TriangleParams":
        """Parse ``a,b;c,d;e,f``."""
        groups = text.split(";")
        if len(groups) != 3:
            raise ParamsSyntaxError(text, len(text), "expected three ';'-separated pairs")
        values = []
        pos = 0
        for g in groups:
            parts = g.split(",")
            if len(parts) != 2:
                raise ParamsSyntaxError(text, pos, "expected a pair 'p,q'")
            for part in parts:
                m = re.fullmatch(r"\s*([+-]?\d+)\s*", part)
                if not m:
                    raise ParamsSyntaxError(text, pos, "expected an integer")
                if int(m.group(1)) == 0:
                    raise ParamsSyntaxError(text, pos, "parameters must be nonzero")
                values.append(int(m.group(1)))
                pos += len(part) + 1
        return cls(*values)

    @property
    def values(self) -> tuple[int, ...]:
        return (self.a, self.b, self.c, self.d, self.e, self.f)

    @property
    def pairs(self) -> tuple[tuple[int, int], ...]:
        v = self.values
        return ((v[0], v[1]), (v[2], v[3]), (v[4], v[5]))

    @classmethod
    def from_pairs(cls, pairs) -> "TriangleParams":
        return cls(*(v for p in pairs for v in p))

    def __iter__(self) -> Iterator[int]:
        return iter(self.values)

    def __str__(self):
        return "{},{};{},{};{},{}".format(*self.values)


def presentation(p: TriangleParams) -> Presentation:
    """The defining presentation of ``G(a,b;c,d;e,f)``."""
    return Presentation(GENERATORS, (
        conjugation_relator("x", p.a, "y", p.b),
        conjugation_relator("y", p.c, "z", p.d),
        conjugation_relator("z", p.e, "x", p.f),
    ))


# ---------------------------------------------------------------- moves


@dataclass(frozen=True)
class Move:
    """``kind`` is ``"cycle"``, ``"swap"`` or ``"negate"``; ``pair`` is unused for cycle."""

    kind: str
    pair: int = 0

    def apply(self, p: TriangleParams) -> TriangleParams:
        pr = list(p.pairs)
        if self.kind == "cycle":
            pr = pr[1:] + pr[:1]
        elif self.kind == "swap":
            u, v = pr[self.pair]
            pr[self.pair] = (v, u)
        elif self.kind == "negate":
            u, v = pr[self.pair]
            pr[self.pair] = (-u, -v)
        else:
            raise ValueError(f"unknown move {self.kind!r}")
        return TriangleParams.from_pairs(pr)

    def __str__(self):
        if self.kind == "cycle":
            return "CyclicPermute"
        return ("SwapPartners" if self.kind == "swap" else "NegatePair") + f"({self.pair})"


CYCLE = Move("cycle")
BASIC_MOVES = (CYCLE,) + tuple(Move("swap", i) for i in range(3)) + tuple(Move("negate", i) for i in range(3))


@dataclass(frozen=True)
class MoveSequence:
    moves: tuple[Move, ...] = ()

    def apply(self, p: TriangleParams) -> TriangleParams:
        for m in self.moves:
            p = m.apply(p)
        return p

    def __len__(self):
        return len(self.moves)

    def __str__(self):
        return " . ".join(map(str, self.moves)) if self.moves else "(none)"


def all_moves() -> list[MoveSequence]:
    """One sequence for each of the 192 elements of the move group."""
    out = []
    for r in range(3):
        for sw in range(8):
            for ng in range(8):
                seq = [CYCLE] * r
                seq += [Move("swap", i) for i in range(3) if sw >> i & 1]
                seq += [Move("negate", i) for i in range(3) if ng >> i & 1]
                out.append(MoveSequence(tuple(seq)))
    return out


def _orbit_tree(p: TriangleParams) -> dict[TriangleParams, MoveSequence]:
    seen = {p: MoveSequence()}
    queue = deque([p])
    while queue:
        q = queue.popleft()
        for m in BASIC_MOVES:
            r = m.apply(q)
            if r not in seen:
                seen[r] = MoveSequence(seen[q].moves + (m,))
                queue.append(r)
    return seen


def orbit(p: TriangleParams) -> set[TriangleParams]:
    return set(_orbit_tree(p))


def sort_key(p: TriangleParams):
    return tuple((abs(v), v < 0) for v in p.values)


def canonicalize(p: TriangleParams) -> tuple[TriangleParams, MoveSequence]:
    """Least tuple of the orbit, with a shortest move sequence reaching it."""
    return _sorted_orbit(p)[0]


@lru_cache(maxsize=4096)
def _sorted_orbit(p: TriangleParams) -> tuple[tuple[TriangleParams, MoveSequence], ...]:
    tree = _orbit_tree(p)
    return tuple((q, tree[q]) for q in sorted(tree, key=sort_key))


def find_in_orbit(p: TriangleParams, predicate) -> tuple[TriangleParams, MoveSequence] | None:
    """First orbit element (in canonical order) satisfying ``predicate``."""
    for q, moves in _sorted_orbit(p):
        if predicate(q):
            return q, moves
    return None


def sign_normalize(p: TriangleParams) -> tuple[TriangleParams, MoveSequence]:
    """Swap partners so that ``a < b``, ``c < d``, ``e < f`` (pairs with equal
    partners are left alone)."""
    moves = []
    for i, (u, v) in enumerate(p.pairs):
        if u > v:
            moves.append(Move("swap", i))
    seq = MoveSequence(tuple(moves))
    return seq.apply(p), seq


# ---------------------------------------------------------------- reductions


def _rotate(p: TriangleParams, k: int) -> TriangleParams:
    pr = p.pairs
    return TriangleParams.from_pairs(pr[k:] + pr[:k])


def power_reduce(p: TriangleParams, pair: int, l: int) -> TriangleParams:
    """Parameters of the group satisfied by ``x^l, y, z`` (pair rotated to the front)."""
    if pair not in (0, 1, 2):
        raise ValueError("pair index must be 0, 1 or 2")
    if l < 1:
        raise NotADivisor("l must be positive")
    r = _rotate(p, pair)
    if r.a % l or r.b % l:
        raise NotADivisor(f"{l} does not divide both of {r.a}, {r.b}")
    h = TriangleParams(r.a // l, r.b // l, r.c, r.d, r.e ** l, r.f ** l)
    return _rotate(h, (3 - pair) % 3)


def square_params(p: TriangleParams) -> TriangleParams:
    return TriangleParams(*(v * v for v in p.values))


@dataclass(frozen=True)
class CoprimeReduction:
    l: int
    m: int
    n: int
    A: int
    B: int
    C: int
    D: int
    E: int
    F: int
    reduced: TriangleParams | object  # TriangleParams or OVERFLOW

    @property
    def overflow(self) -> bool:
        return is_overflow(self.reduced)


def coprime_reduce(p: TriangleParams, guard: SizeGuard | None = None) -> CoprimeReduction:
    """Write the tuple as ``(Al,Bl;Cm,Dm;En,Fn)`` with coprime pairs and return
    ``(A^m,B^m;C^(n^l),D^(n^l);E^l,F^l)``."""
    from math import gcd

    guard = guard or default_guard()
    l, m, n = (gcd(u, v) for u, v in p.pairs)
    A, B, C, D, E, F = p.a // l, p.b // l, p.c // m, p.d // m, p.e // n, p.f // n
    nl = guarded_pow(n, l, guard)
    vals = [guarded_pow(A, m, guard), guarded_pow(B, m, guard),
            guarded_pow(C, nl, guard), guarded_pow(D, nl, guard),
            guarded_pow(E, l, guard), guarded_pow(F, l, guard)]
    reduced = OVERFLOW if any(is_overflow(v) for v in vals) else TriangleParams(*vals)
    return CoprimeReduction(l, m, n, A, B, C, D, E, F, reduced)


# ---------------------------------------------------------------- the killer relation


def _syl(g: str, k: int) -> Word:
    return Word.gen(g, k) if k else Word(())


@dataclass(frozen=True)
class KillerRelationInstance:
    params: TriangleParams
    R: int
    S: int
    T: int
    lhs_exponent: int
    # rhs is z^-B y^-C z^D y^E
    B: int
    C: int
    D: int
    E: int
    P: int
    Qexp: int
    # exponents of f in B = R f^m1 and D = R f^m2
    m1: int
    m2: int

    @property
    def lhs(self) -> Word:
        return _syl("x", self.lhs_exponent)

    @property
    def rhs(self) -> Word:
        return _syl("z", -self.B) * _syl("y", -self.C) * _syl("z", self.D) * _syl("y", self.E)

    def relator(self) -> Word:
        return self.lhs * self.rhs.inverse()

    def compact_relator(self) -> Word:
        """Same element with ``z^(R f^k)`` written as ``x^-k z^R x^k`` (needs e = 1)."""
        zb = _syl("x", -self.m1) * _syl("z", -self.R) * _syl("x", self.m1)
        zd = _syl("x", -self.m2) * _syl("z", self.R) * _syl("x", self.m2)
        rhs = zb * _syl("y", -self.C) * zd * _syl("y", self.E)
        return self.lhs * rhs.inverse()

    def reduced_relator(self, orders: dict[str, int]) -> Word:
        """The relator with every exponent reduced modulo the given element orders."""
        ox, oy, oz = orders["x"], orders["y"], orders["z"]
        f, R = self.params.f, self.R
        b = -(R * pow(f, self.m1, oz)) % oz
        d = (R * pow(f, self.m2, oz)) % oz
        rhs = _syl("z", b) * _syl("y", -self.C % oy) * _syl("z", d) * _syl("y", self.E % oy)
        return _syl("x", self.lhs_exponent % ox) * rhs.inverse()

    def __str__(self):
        from .words import format_word
        return f"{format_word(self.lhs)} = {format_word(self.rhs)}"


def _check_killer(p: TriangleParams):
    if not (0 < p.a <= p.b and 0 < p.c <= p.d and p.e == 1 <= p.f):
        raise PreconditionViolated("need 0<a<=b, 0<c<=d and e=1<=f")


def killer_relation(p: TriangleParams, R: int = 1, S: int = 1, T: int = 1,
                    guard: SizeGuard | None = None):
    """Both sides of the killer relation, or ``OVERFLOW`` if an exponent is too big."""
    _check_killer(p)
    if min(R, S, T) < 1:
        raise PreconditionViolated("R, S, T must be positive")
    guard = guard or default_guard()
    a, b, c, d, f = p.a, p.b, p.c, p.d, p.f

    def pw(x, y):
        return guarded_pow(x, y, guard)

    cR, dR = pw(c, R), pw(d, R)
    if is_overflow(cR) or is_overflow(dR):
        return OVERFLOW
    Qexp = S * cR
    k = S * (dR - cR)
    bq, bk, ak, adr = pw(b, Qexp), pw(b, k), pw(a, k), pw(a, S * dR)
    if any(is_overflow(v) for v in (bq, bk, ak, adr)):
        return OVERFLOW
    A = T * bq * (bk - ak)
    m1 = T * ak * bq
    m2 = T * adr
    B, D = pw(f, m1), pw(f, m2)
    if is_overflow(B) or is_overflow(D):
        return OVERFLOW
    return KillerRelationInstance(p, R, S, T, A, R * B, Qexp, R * D, S * dR, T * adr, Qexp, m1, m2)


# ---------------------------------------------------------------- Q formulas


def _check_increasing(p: TriangleParams):
    if not (p.a < p.b and p.c < p.d and p.e < p.f):
        raise PreconditionViolated("need a<b, c<d and e<f")


def order_exponents(p: TriangleParams) -> tuple[int, int, int]:
    """Exponents ``N`` with ``x^N = y^N' = z^N'' = 1`` in every finite-order quotient."""
    _check_increasing(p)
    a, b, c, d, e, f = p.values
    return (
        abs((b - a) ** 2 * (b ** (d - c) - a ** (d - c))),
        abs((d - c) ** 2 * (d ** (f - e) - c ** (f - e))),
        abs((f - e) ** 2 * (f ** (b - a) - e ** (b - a))),
    )


@dataclass(frozen=True)
class OrderBounds:
    L: int
    M: int

    def check(self, order: int) -> tuple[bool, int | None]:
        """(bound holds, |Q|/L or None when L does not divide)."""
        if order % self.L:
            return False, None
        ratio = order // self.L
        return self.M % ratio == 0, ratio


def order_bounds(p: TriangleParams) -> OrderBounds:
    _check_increasing(p)
    a, b, c, d, e, f = p.values
    L = abs((b ** (d - c) - a ** (d - c)) * (d ** (f - e) - c ** (f - e)) * (f ** (b - a) - e ** (b - a)))
    M = ((b - a) * (d - c) * (f - e)) ** 2
    return OrderBounds(L, M)


@dataclass(frozen=True)
class ConjugationData:
    modulus: int
    alpha: int
    X: Word
    Y: Word
    Z: Word
    relators: tuple[Word, Word, Word]
    names: tuple[str, str, str] = ("y^x", "Y^x", "Y^X")


def conjugation_data(p: TriangleParams) -> ConjugationData:
    """The three conjugation relations between ``x`` and ``y`` as relators with
    exact exponents (reduce them with :func:`reduce_word` before evaluating)."""
    _check_increasing(p)
    a, b, c, d, e, f = p.values
    n = order_exponents(p)[0]
    alpha = 1 if a == 1 else mod_inverse(a, n)
    k = d - c
    x, y = Word.gen("x"), Word.gen("y")
    X, Y, Z = Word.gen("x", b - a), Word.gen("y", k), Word.gen("z", f - e)
    diff = b ** k - a ** k
    # x-exponents of the X-powers on the right-hand sides
    e10 = -alpha * (b - a)
    e11 = -alpha ** k * diff
    e12 = -alpha ** k * diff * (b - a)
    r10 = (x.inverse() * y * x) * (y * _syl("x", e10)).inverse()
    r11 = (x.inverse() * Y * x) * (Y * _syl("x", e11)).inverse()
    r12 = (X.inverse() * Y * X) * (Y * _syl("x", e12)).inverse()
    return ConjugationData(n, alpha, X, Y, Z, (r10, r11, r12))


def reduce_word(w: Word, orders: dict[str, int]) -> Word:
    """Reduce every exponent modulo the order of its generator."""
    out = Word(())
    for g, e in w.syllables:
        m = orders.get(g)
        out = out * _syl(g, e % m if m else e)
    return out


def rotated(p: TriangleParams, k: int) -> TriangleParams:
    """Parameters seen from generator ``GENERATORS[k]`` (x->y->z relabelled)."""
    return _rotate(p, k)


def relabel(w: Word, k: int) -> Word:
    """Rename x,y,z -> the generators ``k`` steps along."""
    names = {g: GENERATORS[(i + k) % 3] for i, g in enumerate(GENERATORS)}
    return Word(tuple((names[g], e) for g, e in w.syllables))


# ---------------------------------------------------------------- finite-order witnesses


@dataclass(frozen=True)
class FiniteOrderWitness:
    branch: str  # "f>1" or "f=1"
    A: int | None = None
    B: int | None = None
    C: int | None = None
    D: int | None = None
    E: int | None = None
    g: object = None
    h: object = None
    y_order_divisor: object = None
    x_order_divisor: int | None = None


def finite_order_witness(p: TriangleParams, guard: SizeGuard | None = None) -> FiniteOrderWitness:
    """Explicit exponents showing that a generator has finite order."""
    guard = guard or default_guard()
    a, b, c, d, e, f = p.values
    if not (0 < a < b and 0 < c < d and e == 1 <= f):
        raise PreconditionViolated("need 0<a<b, 0<c<d and e=1<=f")
    if f == 1:
        return FiniteOrderWitness("f=1", x_order_divisor=b ** d - a ** (d - c) * b ** c)
    k = killer_relation(p, 1, 1, 1, guard)
    if is_overflow(k):
        return FiniteOrderWitness("f>1", g=OVERFLOW, h=OVERFLOW, y_order_divisor=OVERFLOW)
    A, B, C, D, E = k.lhs_exponent, k.B, k.C, k.D, k.E
    if not B > D:
        raise AssertionError(f"expected B > D, got B={B}, D={D}")
    g = guarded_pow(d, B, guard)
    cb, dd = guarded_pow(c, B - D, guard), guarded_pow(d, D, guard)
    h = OVERFLOW if is_overflow(cb) or is_overflow(dd) else cb * dd
    fa = guarded_pow(f, A, guard)
    div = OVERFLOW
    if not is_overflow(fa) and not is_overflow(h):
        u, v = guarded_pow(d, fa - 1, guard), guarded_pow(c, fa - 1, guard)
        if not is_overflow(u) and not is_overflow(v):
            div = h * d * (u - v)
    return FiniteOrderWitness("f>1", A, B, C, D, E, g, h, div)
