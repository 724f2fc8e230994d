"""Abelian invariants and derived-series analysis of finite permutation groups.

Permutations are integer arrays acting on the right: ``p . s = s[p]`` and the
product ``s * t`` (first ``s``) is ``t[s]``.

Two membership engines back :class:`PermGroup`.  Groups known to act
semiregularly (every regular representation and its subgroups) test
membership by a single lookup in the orbit of point 0, which scales to
millions of points.  Anything else goes through a plain Schreier-Sims
stabilizer chain, fine for small degrees.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from ._jit import njit
from .words import Presentation, Word

DEFAULT_DEGREE_LIMIT = 2_000_000
DEFAULT_ORDER_LIMIT = 10**9
_GENERIC_DEGREE_LIMIT = 20_000


class DegreeLimitExceeded(RuntimeError):
    pass


# ---------------------------------------------------------------- SNF


def smith_normal_form(matrix: Sequence[Sequence[int]]) -> list[int]:
    """Diagonal of the Smith normal form of an integer matrix.

    Returns ``min(rows, cols)`` entries ``d_1 | d_2 | ... `` with zeros last.
    """
    a = [[int(v) for v in row] for row in matrix]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    if any(len(r) != cols for r in a):
        raise ValueError("ragged matrix")
    diag = []
    t = 0
    while t < min(rows, cols):
        nz = [(abs(a[i][j]), i, j) for i in range(t, rows) for j in range(t, cols) if a[i][j]]
        if not nz:
            break
        _, i, j = min(nz)
        a[t], a[i] = a[i], a[t]
        for r in a:
            r[t], r[j] = r[j], r[t]
        while True:
            p = a[t][t]
            done = True
            for i in range(t + 1, rows):
                q = a[i][t] // p
                if q:
                    a[i] = [x - q * y for x, y in zip(a[i], a[t])]
                if a[i][t]:
                    done = False
            for j in range(t + 1, cols):
                q = a[t][j] // p
                if q:
                    for r in a:
                        r[j] -= q * r[t]
                if a[t][j]:
                    done = False
            if done:
                # pivot must divide the rest of the block
                bad = next(((i, j) for i in range(t + 1, rows) for j in range(t + 1, cols)
                            if a[i][j] % p), None)
                if bad is None:
                    break
                a[t] = [x + y for x, y in zip(a[t], a[bad[0]])]
                continue
            # move the smallest remaining entry of row/column t into the pivot
            cand = [(abs(a[i][t]), i, t) for i in range(t, rows) if a[i][t]]
            cand += [(abs(a[t][j]), t, j) for j in range(t, cols) if a[t][j]]
            _, i, j = min(cand)
            a[t], a[i] = a[i], a[t]
            for r in a:
                r[t], r[j] = r[j], r[t]
        diag.append(abs(a[t][t]))
        t += 1
    diag += [0] * (min(rows, cols) - len(diag))
    return diag


@dataclass(frozen=True)
class AbelianInvariants:
    """Invariant factors, each dividing the next; 0 stands for a copy of Z."""

    invariant_factors: tuple[int, ...]

    def __post_init__(self):
        f = self.invariant_factors
        if any(v == 1 or v < 0 for v in f):
            raise ValueError("invariant factors must be 0 or at least 2")
        for u, v in zip(f, f[1:]):
            if v % u if u else v:
                raise ValueError("invariant factors must form a divisibility chain")

    @property
    def finite(self) -> bool:
        return 0 not in self.invariant_factors

    @property
    def order(self) -> int | None:
        """Order of the group, or None if infinite."""
        if not self.finite:
            return None
        n = 1
        for v in self.invariant_factors:
            n *= v
        return n

    def __str__(self):
        return "[" + ",".join(map(str, self.invariant_factors)) + "]"


def relation_matrix(pres: Presentation) -> list[list[int]]:
    return [[r.exponent_sum(g) for g in pres.generators] for r in pres.relators]


def abelianization(pres: Presentation) -> AbelianInvariants:
    m = relation_matrix(pres)
    n = len(pres.generators)
    diag = smith_normal_form(m) if m else []
    diag += [0] * (n - len(diag))
    return AbelianInvariants(tuple(d for d in diag if d != 1))


# ---------------------------------------------------------------- permutations


def perm_mul(s: np.ndarray, t: np.ndarray) -> np.ndarray:
    return t[s]


def perm_inv(s: np.ndarray) -> np.ndarray:
    out = np.empty_like(s)
    out[s] = np.arange(s.shape[0], dtype=s.dtype)
    return out


def perm_pow(s: np.ndarray, k: int) -> np.ndarray:
    if k < 0:
        s, k = perm_inv(s), -k
    result = np.arange(s.shape[0], dtype=s.dtype)
    while k:
        if k & 1:
            result = s[result]
        s = s[s]
        k >>= 1
    return result


def commutator_perm(s: np.ndarray, t: np.ndarray) -> np.ndarray:
    """``s^-1 t^-1 s t``."""
    return t[s[perm_inv(t)[perm_inv(s)]]]


def conjugate_perm(s: np.ndarray, by: np.ndarray) -> np.ndarray:
    """``by^-1 s by``."""
    return by[s[perm_inv(by)]]


def is_identity(s: np.ndarray) -> bool:
    return bool(np.array_equal(s, np.arange(s.shape[0])))


@njit(cache=True)
def _sweep(g, mask, orbit, size):
    n = size
    for i in range(size):
        q = g[orbit[i]]
        if not mask[q]:
            mask[q] = True
            orbit[n] = q
            n += 1
    return n


@njit(cache=True)
def _close(gens, k, mask, orbit, lo, size):
    i = lo
    while i < size:
        p = orbit[i]
        for j in range(k):
            q = gens[j, p]
            if not mask[q]:
                mask[q] = True
                orbit[size] = q
                size += 1
        i += 1
    return size


class _OrbitChain:
    """Membership for a group acting semiregularly: ``s`` lies in the group
    iff ``0 . s`` lies in the orbit of 0."""

    def __init__(self, degree: int):
        self.mask = np.zeros(degree, dtype=np.bool_)
        self.orbit = np.zeros(degree, dtype=np.int32)
        self.mask[0] = True
        self.size = 1
        self.gens = np.zeros((4, degree), dtype=np.int32)
        self.k = 0

    def contains(self, s: np.ndarray) -> bool:
        return bool(self.mask[s[0]])

    def add(self, s: np.ndarray):
        if self.k == self.gens.shape[0]:
            grown = np.zeros((2 * self.k, self.gens.shape[1]), dtype=np.int32)
            grown[: self.k] = self.gens
            self.gens = grown
        self.gens[self.k] = s
        self.k += 1
        old = self.size
        self.size = _sweep(s.astype(np.int32), self.mask, self.orbit, self.size)
        self.size = _close(self.gens, self.k, self.mask, self.orbit, old, self.size)

    def order(self) -> int:
        return self.size


class _SchreierSims:
    """Deterministic Schreier-Sims on tuples; small degrees only."""

    def __init__(self, degree: int):
        self.n = degree
        self.ident = tuple(range(degree))
        self.base: list[int] = []
        self.gens: list[list[tuple]] = []
        self.trans: list[dict[int, tuple]] = []

    @staticmethod
    def _mul(s, t):
        return tuple(t[i] for i in s)

    @staticmethod
    def _inv(s):
        out = [0] * len(s)
        for i, v in enumerate(s):
            out[v] = i
        return tuple(out)

    def _sift(self, g, start=0):
        for i in range(start, len(self.base)):
            img = g[self.base[i]]
            t = self.trans[i].get(img)
            if t is None:
                return g, i
            g = self._mul(g, self._inv(t))
        return g, len(self.base)

    def _add(self, level, g):
        if level == len(self.base):
            b = next(i for i in range(self.n) if g[i] != i)
            self.base.append(b)
            self.gens.append([])
            self.trans.append({b: self.ident})
        self.gens[level].append(g)
        # g also lies in every stabilizer above this level
        for i in range(level, -1, -1):
            self._close(i)

    def _close(self, level):
        gens = [s for j in range(level, len(self.gens)) for s in self.gens[j]]
        trans = self.trans[level]
        queue = list(trans)
        for p in queue:
            for s in gens:
                q = s[p]
                if q not in trans:
                    trans[q] = self._mul(trans[p], s)
                    queue.append(q)
        for p in list(trans):
            for s in gens:
                sg = self._mul(self._mul(trans[p], s), self._inv(trans[s[p]]))
                h, j = self._sift(sg, level + 1)
                if h != self.ident:
                    self._add(j, h)

    def contains(self, s: np.ndarray) -> bool:
        h, _ = self._sift(tuple(int(v) for v in s))
        return h == self.ident

    def add(self, s: np.ndarray):
        h, j = self._sift(tuple(int(v) for v in s))
        if h != self.ident:
            self._add(j, h)

    def order(self) -> int:
        n = 1
        for t in self.trans:
            n *= len(t)
        return n


class PermGroup:
    """A permutation group given by generators.

    Pass ``semiregular=True`` only when every element of the group fixes no
    point unless it is the identity (e.g. regular representations).
    """

    def __init__(self, degree: int, generators: Iterable[np.ndarray] = (), *,
                 semiregular: bool = False, degree_limit: int = DEFAULT_DEGREE_LIMIT,
                 order_limit: int = DEFAULT_ORDER_LIMIT):
        if degree < 1:
            raise ValueError("degree must be positive")
        if degree > degree_limit:
            raise DegreeLimitExceeded(f"degree {degree} exceeds limit {degree_limit}")
        if not semiregular and degree > _GENERIC_DEGREE_LIMIT:
            raise DegreeLimitExceeded(
                f"degree {degree} too large for a non-semiregular group")
        self.degree = degree
        self.semiregular = semiregular
        self.degree_limit = degree_limit
        self.order_limit = order_limit
        self._chain = _OrbitChain(degree) if semiregular else _SchreierSims(degree)
        self.generators: list[np.ndarray] = []
        for g in generators:
            self.add_generator(g)

    def _sub(self, gens: Iterable[np.ndarray] = ()) -> "PermGroup":
        return PermGroup(self.degree, gens, semiregular=self.semiregular,
                         degree_limit=self.degree_limit, order_limit=self.order_limit)

    def add_generator(self, g: np.ndarray) -> bool:
        """Adjoin ``g``; False (and no change) if it already lies in the group."""
        g = np.asarray(g, dtype=np.int64)
        if g.shape != (self.degree,):
            raise ValueError("permutation has the wrong degree")
        if self._chain.contains(g):
            return False
        self._chain.add(g)
        self.generators.append(g)
        if self._chain.order() > self.order_limit:
            raise DegreeLimitExceeded(f"group order exceeds {self.order_limit}")
        return True

    def order(self) -> int:
        return self._chain.order()

    def __contains__(self, g: np.ndarray) -> bool:
        return self._chain.contains(np.asarray(g))

    def is_trivial(self) -> bool:
        return not self.generators

    def is_abelian(self) -> bool:
        gs = self.generators
        return all(is_identity(commutator_perm(s, t)) for i, s in enumerate(gs) for t in gs[i + 1:])

    def normal_closure(self, gens: Iterable[np.ndarray]) -> "PermGroup":
        """Smallest subgroup normalised by ``self`` containing ``gens``."""
        k = self._sub(gens)
        i = 0
        while i < len(k.generators):
            s = k.generators[i]
            for h in self.generators:
                k.add_generator(conjugate_perm(s, h))
            i += 1
        return k

    def commutator(self, other: "PermGroup") -> "PermGroup":
        """``[other, self]`` for ``other`` normal in ``self``."""
        cs = [commutator_perm(s, t) for s in other.generators for t in self.generators]
        return self.normal_closure(c for c in cs if not is_identity(c))

    def derived_subgroup(self) -> "PermGroup":
        return self.commutator(self)

    def centralizes(self, other: "PermGroup") -> bool:
        """True when every element of ``other`` commutes with every element of self."""
        return all(is_identity(commutator_perm(s, t))
                   for s in other.generators for t in self.generators)


def derived_subgroup(g: PermGroup) -> PermGroup:
    return g.derived_subgroup()


@dataclass
class StructureReport:
    order: int
    derived_series_orders: list[int]
    nilpotency_class_of_derived: int | str
    is_derived_abelian: bool
    second_derived_central_in_derived: bool
    second_derived_central_in_whole: bool
    lower_central_orders_of_derived: list[int] = field(default_factory=list)

    @property
    def solvable(self) -> bool:
        return self.derived_series_orders[-1] == 1


def structure_report(g: PermGroup) -> StructureReport:
    series = [g]
    while not series[-1].is_trivial():
        nxt = series[-1].derived_subgroup()
        if nxt.order() == series[-1].order():
            break
        series.append(nxt)
    # the series stops at 1 or at a perfect group, which is its own derived group
    derived = series[min(1, len(series) - 1)]
    second = series[min(2, len(series) - 1)]

    lower = [derived]
    while not lower[-1].is_trivial():
        nxt = derived.commutator(lower[-1])
        if nxt.order() == lower[-1].order():
            break
        lower.append(nxt)
    if lower[-1].is_trivial():
        nclass: int | str = len(lower) - 1
    else:
        nclass = "not nilpotent"
    return StructureReport(
        order=g.order(),
        derived_series_orders=[h.order() for h in series],
        nilpotency_class_of_derived=nclass,
        is_derived_abelian=derived.is_abelian(),
        second_derived_central_in_derived=derived.centralizes(second),
        second_derived_central_in_whole=g.centralizes(second),
        lower_central_orders_of_derived=[h.order() for h in lower],
    )


# ---------------------------------------------------------------- from tables


def regular_permutations(table, generators: Sequence[str]) -> dict[str, np.ndarray]:
    """Right regular action of each generator, from a complete table of the
    trivial subgroup or a :class:`~bstriangle.coset.enumerate.TrackedTable`."""
    from .coset.enumerate import TrackedTable

    out = {}
    if isinstance(table, TrackedTable):
        m = table.modulus
        exps = np.arange(m, dtype=np.int64)
        for i, g in enumerate(generators):
            col = 2 * table.generators.index(g)
            tgt = table.table[:, col].astype(np.int64)[:, None] * m
            shift = (exps[None, :] + table.labels[:, col][:, None]) % m
            out[g] = (tgt + shift).reshape(-1)
    else:
        if not table.regular:
            raise ValueError("table is not a regular representation")
        for g in generators:
            out[g] = table.table[:, 2 * table.generators.index(g)].astype(np.int64)
    return out


def regular_group(table, degree_limit: int = DEFAULT_DEGREE_LIMIT) -> tuple[PermGroup, dict[str, np.ndarray]]:
    """The group as a semiregular :class:`PermGroup`, plus the generator images."""
    gens = table.generators
    if isinstance(getattr(table, "modulus", None), int):
        degree = table.order
    else:
        degree = table.coset_count
    if degree > degree_limit:
        raise DegreeLimitExceeded(f"group order {degree} exceeds limit {degree_limit}")
    perms = regular_permutations(table, gens)
    return PermGroup(degree, perms.values(), semiregular=True, degree_limit=degree_limit,
                     order_limit=max(degree, 1)), perms


def word_perm(w: Word, perms: dict[str, np.ndarray]) -> np.ndarray:
    degree = next(iter(perms.values())).shape[0]
    out = np.arange(degree, dtype=np.int64)
    for g, e in w.syllables:
        out = perm_pow(perms[g], e)[out]
    return out


def symmetric_group(n: int) -> PermGroup:
    if n < 2:
        return PermGroup(max(n, 1))
    cycle = np.roll(np.arange(n), -1)
    swap = np.arange(n)
    swap[[0, 1]] = [1, 0]
    return PermGroup(n, [cycle, swap])


def cyclic_regular(n: int) -> PermGroup:
    return PermGroup(n, [np.roll(np.arange(n), -1)], semiregular=True)
