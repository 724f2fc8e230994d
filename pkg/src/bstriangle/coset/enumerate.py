"""Coset enumeration front end: presentations in, coset tables out."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from math import gcd
from typing import Mapping, Sequence

import numpy as np

from ..words import Presentation, Word, cyclic_reduce, free_reduce, letters
from . import kernels as K
from . import tracked as T

COMPLETE = "complete"
OVERFLOWED = "overflowed"

DEFAULT_MAX_COSETS = 6_000_000
DEFAULT_MAX_SECONDS = 600.0
_BUDGET = 200_000
_DED_STACK = 1 << 16
_LOOKAHEAD_CHUNK = 1 << 15   # cosets scanned between clock checks when the table is full


class IncompleteTable(RuntimeError):
    pass


class NotRegular(RuntimeError):
    pass


@dataclass(frozen=True)
class EnumLimits:
    max_cosets: int = DEFAULT_MAX_COSETS
    max_seconds: float = DEFAULT_MAX_SECONDS

    def __post_init__(self):
        if self.max_cosets < 1:
            raise ValueError("max_cosets must be >= 1")
        if self.max_seconds <= 0:
            raise ValueError("max_seconds must be positive")


@dataclass
class CosetTable:
    generators: tuple[str, ...]
    table: np.ndarray
    status: str
    subgroup: tuple[Word, ...] = ()
    strategy: str = "hlt"
    stats: dict = field(default_factory=dict)
    reason: str = ""

    @property
    def complete(self) -> bool:
        return self.status == COMPLETE

    @property
    def coset_count(self) -> int:
        return int(self.table.shape[0])

    @property
    def regular(self) -> bool:
        return all(w.is_identity() for w in self.subgroup)

    def column(self, gen: str, inverse: bool = False) -> np.ndarray:
        i = self.generators.index(gen)
        return self.table[:, 2 * i + int(inverse)]

    def dump(self) -> str:
        """Golden-file text: header, then one 1-based row per coset."""
        lines = [f"cosets: {self.coset_count} status: {self.status}"]
        for row in self.table:
            lines.append(" ".join(str(int(v) + 1) if v >= 0 else "0" for v in row))
        return "\n".join(lines) + "\n"


def _power_orders(relators: Sequence[Word], hints: Mapping[str, int] | None) -> dict[str, int]:
    orders: dict[str, int] = {}
    for r in relators:
        r = cyclic_reduce(r)
        if len(r.syllables) == 1:
            g, e = r.syllables[0]
            orders[g] = gcd(orders.get(g, 0), abs(e))
    for g, n in (hints or {}).items():
        orders[g] = gcd(orders.get(g, 0), abs(int(n)))
    return orders


def _shrink(w: Word, orders: Mapping[str, int]) -> Word:
    """Reduce each exponent to its balanced residue modulo a known generator order."""
    out = []
    for g, e in w.syllables:
        n = orders.get(g, 0)
        if n:
            e %= n
            if e > n // 2:
                e -= n
            if e == 0:
                continue
        out.append((g, e))
    return free_reduce(Word(tuple(out)))


def prepare_relators(pres: Presentation, order_hints: Mapping[str, int] | None = None) -> list[Word]:
    """Cyclically reduce, shorten exponents using known orders, drop duplicates."""
    orders = _power_orders(pres.relators, order_hints)
    out: list[Word] = []
    seen = set()
    for g, n in orders.items():
        if n:
            w = Word(((g, n),))
            out.append(w)
            seen.add(w)
    for r in pres.relators:
        w = cyclic_reduce(r)
        if len(w.syllables) == 1 and orders.get(w.syllables[0][0]):
            continue
        w = cyclic_reduce(_shrink(w, orders))
        if w.syllables and w not in seen:
            seen.add(w)
            out.append(w)
    return out


def _flatten(arrays: Sequence[np.ndarray]) -> tuple[np.ndarray, np.ndarray]:
    start = np.zeros(len(arrays) + 1, dtype=np.int64)
    for i, a in enumerate(arrays):
        start[i + 1] = start[i] + len(a)
    flat = np.concatenate(arrays).astype(np.int32) if arrays else np.zeros(0, dtype=np.int32)
    return flat, start


def _chunked_lookahead(step, st: np.ndarray, deadline: float) -> bool:
    """Run ``step(lo, hi)`` over every live coset, a chunk at a time.

    Returns False if the deadline passed before the pass finished.
    """
    beta = 0
    while beta < st[K.NEXT]:
        beta = int(step(beta, beta + _LOOKAHEAD_CHUNK))
        if time.perf_counter() > deadline:
            return False
    return True


def _felsch_index(rel_arrays: Sequence[np.ndarray], ncols: int):
    """All distinct cyclic conjugates of relators and inverses, bucketed by first letter."""
    seen = {}
    for r in rel_arrays:
        for w in (r, (r[::-1] ^ 1)):
            for k in range(len(w)):
                c = np.concatenate([w[k:], w[:k]])
                key = c.tobytes()
                if key not in seen:
                    seen[key] = c
    conj_list = list(seen.values())
    conj, cstart = _flatten(conj_list)
    buckets = [[] for _ in range(ncols)]
    for i, c in enumerate(conj_list):
        buckets[int(c[0])].append(i)
    bfstart = np.zeros(ncols + 1, dtype=np.int64)
    for x in range(ncols):
        bfstart[x + 1] = bfstart[x] + len(buckets[x])
    byfirst = np.array([i for b in buckets for i in b], dtype=np.int64)
    return conj, cstart, byfirst, bfstart


def enumerate_cosets(
    pres: Presentation,
    subgroup: Sequence[Word] = (),
    limits: EnumLimits | None = None,
    strategy: str = "hlt",
    order_hints: Mapping[str, int] | None = None,
) -> CosetTable:
    """Todd-Coxeter enumeration of the cosets of ``<subgroup>`` in ``pres``.

    ``strategy`` is ``"hlt"`` (relator-based with lookahead) or ``"felsch"``.
    ``order_hints`` maps generators to known multiples of their order and is
    used only to shorten relators.  Running out of room or time gives a table
    with status ``overflowed``; nothing is raised.
    """
    limits = limits or EnumLimits()
    if strategy not in ("hlt", "felsch"):
        raise ValueError(f"unknown strategy {strategy!r}")
    gens = pres.generators
    ncols = 2 * len(gens)
    sub = tuple(free_reduce(w) for w in subgroup)
    for w in sub:
        extra = w.generators() - set(gens)
        if extra:
            raise ValueError(f"subgroup word uses undeclared generators {sorted(extra)}")

    rels = prepare_relators(pres, order_hints)
    too_long = [w for w in rels + list(sub) if len(w) > max(limits.max_cosets, 1024)]
    if too_long:
        return CosetTable(gens, np.zeros((0, ncols), np.int32), OVERFLOWED, sub, strategy,
                          reason=f"relator of length {len(too_long[0])} exceeds coset limit")
    rel_arrays = [letters(w, gens) for w in rels]
    rflat, rstart = _flatten(rel_arrays) if rel_arrays else (np.zeros(0, np.int32), np.zeros(1, np.int64))

    if strategy == "felsch":
        conj, cstart, byfirst, bfstart = _felsch_index(rel_arrays, ncols)
        ded = np.zeros((_DED_STACK, 2), dtype=np.int64)
    else:
        ded = np.zeros((1024, 2), dtype=np.int64)

    cap = min(limits.max_cosets, 1 << 12)
    table = np.full((cap, ncols), -1, dtype=np.int32)
    fwd = np.zeros(cap, dtype=np.int32)
    queue = np.zeros(cap, dtype=np.int32)
    st = np.zeros(K.NSTATE, dtype=np.int64)
    st[K.NEXT] = 1
    st[K.NLIVE] = 1
    t0 = time.perf_counter()
    peak = 1

    def grow():
        nonlocal table, fwd, queue, cap
        new = min(limits.max_cosets, cap * 2)
        t = np.full((new, ncols), -1, dtype=np.int32)
        t[:cap] = table
        f = np.zeros(new, dtype=np.int32)
        f[:cap] = fwd
        table, fwd, queue, cap = t, f, np.zeros(new, dtype=np.int32), new

    status = K.DONE
    # subgroup generators are closed loops at coset 0
    for w in sub:
        arr = letters(w, gens)
        while K.scan(table, fwd, queue, ded, st, 0, arr, 0, len(arr), True) < 0:
            if cap >= limits.max_cosets:
                status = K.FULL
                break
            grow()
        if status == K.FULL:
            break
    reason = ""
    if status != K.FULL:
        if strategy == "hlt":
            # Felsch keeps the deductions made by the subgroup scans
            st[K.DTOP] = 0
        deadline = t0 + limits.max_seconds
        while True:
            can_grow = cap < limits.max_cosets
            if strategy == "hlt":
                status = K.hlt_run(table, fwd, queue, ded, st, rflat, rstart, _BUDGET, can_grow)
            else:
                status = K.felsch_run(table, fwd, queue, ded, st, rflat, rstart,
                                      conj, cstart, byfirst, bfstart, _BUDGET, can_grow)
            peak = max(peak, int(st[K.NEXT]))
            if status == K.GROW:
                grow()
                continue
            if status == K.ROOM:
                def step(lo, hi):
                    return K.lookahead_range(table, fwd, queue, ded, st, rflat, rstart, lo, hi)
                if not _chunked_lookahead(step, st, deadline):
                    status = K.PAUSED
                else:
                    if strategy == "felsch":
                        K._process_deductions(table, fwd, queue, ded, st, conj, cstart, byfirst, bfstart)
                    st[K.DTOP] = 0
                    st[K.DOVER] = 0
                    K.compact(table, fwd, st)
                    status = K.PAUSED if K.has_room(st, cap) else K.FULL
            if status == K.PAUSED:
                if time.perf_counter() > deadline:
                    reason = f"time limit {limits.max_seconds}s reached"
                    break
                continue
            break
    if status == K.FULL:
        reason = f"coset limit {limits.max_cosets} reached"

    K.compact(table, fwd, st)
    n = int(st[K.NLIVE])
    final = np.ascontiguousarray(table[:n])
    stats = {
        "cosets_defined": int(st[K.DEFINED]),
        "cosets_collapsed": int(st[K.COLLAPSED]),
        "deductions": int(st[K.DEDUCED]),
        "peak_cosets": peak,
        "seconds": round(time.perf_counter() - t0, 6),
    }
    if status == K.DONE:
        if not K.relators_close(final, rflat, rstart) or (final < 0).any():
            raise AssertionError("enumeration finished with an invalid table")
        return CosetTable(gens, final, COMPLETE, sub, strategy, stats)
    return CosetTable(gens, final, OVERFLOWED, sub, strategy, stats, reason)


def _require_complete(t: CosetTable):
    if not t.complete:
        raise IncompleteTable(t.reason or "coset table is not complete")


def word_permutation(t: CosetTable, w: Word) -> np.ndarray:
    """Right action of ``w`` on all cosets."""
    _require_complete(t)
    if not w.syllables:
        return np.arange(t.coset_count, dtype=np.int64)
    perm = np.arange(t.coset_count, dtype=np.int64)
    for g, e in free_reduce(w).syllables:
        col = t.column(g, inverse=e < 0)
        step = col.astype(np.int64)
        # fast exponentiation of the generator permutation
        n = abs(e)
        power = step
        while n:
            if n & 1:
                perm = power[perm]
            n >>= 1
            if n:
                power = power[power]
    return perm


def permutation_image(t: CosetTable, gen: str) -> np.ndarray:
    _require_complete(t)
    return t.column(gen).astype(np.int64)


def trace_word(t: CosetTable, w: Word, start: int = 0) -> int:
    _require_complete(t)
    c = start
    for g, e in free_reduce(w).syllables:
        col = t.column(g, inverse=e < 0)
        for _ in range(abs(e)):
            c = int(col[c])
    return c


def is_trivial_in_quotient(t: CosetTable, w: Word) -> bool:
    """Whether ``w`` is the identity in the permutation image of the table.

    For a regular table this is just "``w`` fixes coset 0"; otherwise ``w``
    must fix every coset.
    """
    perm = word_permutation(t, w)
    if t.regular:
        return bool(perm[0] == 0)
    return bool((perm == np.arange(t.coset_count)).all())


def acts_trivially(t: CosetTable, w: Word) -> bool:
    """True iff ``w`` fixes every coset."""
    perm = word_permutation(t, w)
    return bool((perm == np.arange(t.coset_count)).all())


def perm_order(perm: np.ndarray) -> int:
    """Order of a permutation given as an index array (lcm of cycle lengths)."""
    from math import lcm

    n = len(perm)
    seen = np.zeros(n, dtype=bool)
    result = 1
    for s in range(n):
        if seen[s]:
            continue
        length = 0
        c = s
        while not seen[c]:
            seen[c] = True
            c = perm[c]
            length += 1
        result = lcm(result, length)
    return result


def element_order(t: CosetTable, w: Word) -> int:
    """Order of ``w`` in the group enumerated by a regular table."""
    _require_complete(t)
    if not t.regular:
        raise NotRegular("element orders need an enumeration over the trivial subgroup")
    perm = word_permutation(t, w)
    # in the regular action the order is the length of the cycle through coset 0
    c = int(perm[0])
    k = 1
    while c != 0:
        c = int(perm[c])
        k += 1
    return k


@dataclass
class TrackedTable:
    """Cosets of ``<gen>`` together with the exponent labels described in
    :mod:`bstriangle.coset.tracked`.

    When complete, ``modulus`` is the order of ``gen`` and the group has
    ``coset_count * modulus`` elements; ``(coset, exponent)`` pairs address
    them, so word problems are decided without a regular table.
    """

    generators: tuple[str, ...]
    gen: str
    table: np.ndarray
    labels: np.ndarray
    modulus: int
    status: str
    stats: dict = field(default_factory=dict)
    reason: str = ""

    @property
    def complete(self) -> bool:
        return self.status == COMPLETE

    @property
    def index(self) -> int:
        return int(self.table.shape[0])

    @property
    def order(self) -> int:
        _require_complete(self)
        return self.index * self.modulus

    def locate(self, w: Word, start: tuple[int, int] = (0, 0)) -> tuple[int, int]:
        """``(coset, e)`` such that ``g w = gen^e rep(coset)`` where ``g`` is the
        element addressed by ``start``."""
        _require_complete(self)
        arr = letters(free_reduce(w), self.generators)
        c, u = T.trace_pair(self.table, self.labels, start[0], start[1], arr, self.modulus)
        return int(c), int(u)

    def is_trivial(self, w: Word) -> bool:
        return self.locate(w) == (0, 0)

    def element_order(self, w: Word) -> int:
        _require_complete(self)
        arr = letters(free_reduce(w), self.generators)
        state = (0, 0)
        k = 0
        limit = self.order
        while True:
            c, u = T.trace_pair(self.table, self.labels, state[0], state[1], arr, self.modulus)
            state = (int(c), int(u))
            k += 1
            if state == (0, 0):
                return k
            if k > limit:
                raise AssertionError("element order exceeds group order")


def enumerate_tracked(
    pres: Presentation,
    gen: str,
    limits: EnumLimits | None = None,
    order_hints: Mapping[str, int] | None = None,
    strategy: str = "hlt",
) -> TrackedTable:
    """Enumeration of the cosets of the cyclic subgroup ``<gen>``, tracking
    the subgroup element attached to each table entry.  The order of the whole
    group comes out as ``index * order(gen)``.

    ``strategy`` is ``"hlt"`` or ``"felsch"``; either way the modulus is
    recomputed from the finished table, so the result does not depend on it.
    """
    limits = limits or EnumLimits()
    if strategy not in ("hlt", "felsch"):
        raise ValueError(f"unknown strategy {strategy!r}")
    gens = pres.generators
    if gen not in gens:
        raise ValueError(f"unknown generator {gen!r}")
    ncols = 2 * len(gens)
    rels = prepare_relators(pres, order_hints)
    if any(len(w) > max(limits.max_cosets, 1024) for w in rels):
        return TrackedTable(gens, gen, np.zeros((0, ncols), np.int32), np.zeros((0, ncols), np.int64),
                            0, OVERFLOWED, reason="relator exceeds coset limit")
    rel_arrays = [letters(w, gens) for w in rels]
    rflat, rstart = _flatten(rel_arrays) if rel_arrays else (np.zeros(0, np.int32), np.zeros(1, np.int64))
    if strategy == "felsch":
        conj, cstart, byfirst, bfstart = _felsch_index(rel_arrays, ncols)
        ded = np.zeros((_DED_STACK, 2), dtype=np.int64)
    else:
        ded = np.zeros((1024, 2), dtype=np.int64)

    cap = min(limits.max_cosets, 1 << 12)
    table = np.full((cap, ncols), -1, dtype=np.int32)
    labels = np.zeros((cap, ncols), dtype=np.int64)
    fwd = np.zeros(cap, dtype=np.int32)
    off = np.zeros(cap, dtype=np.int64)
    queue = np.zeros(cap, dtype=np.int32)
    st = np.zeros(T.NSTATE, dtype=np.int64)
    st[K.NEXT] = 1
    st[K.NLIVE] = 1
    st[T.MOD] = _power_orders(rels, order_hints).get(gen, 0)
    t0 = time.perf_counter()
    peak = 1

    def grow():
        nonlocal table, labels, fwd, off, queue, cap
        new = min(limits.max_cosets, cap * 2)
        t = np.full((new, ncols), -1, dtype=np.int32)
        t[:cap] = table
        lab = np.zeros((new, ncols), dtype=np.int64)
        lab[:cap] = labels
        f = np.zeros(new, dtype=np.int32)
        f[:cap] = fwd
        o = np.zeros(new, dtype=np.int64)
        o[:cap] = off
        table, labels, fwd, off, queue, cap = t, lab, f, o, np.zeros(new, dtype=np.int32), new

    col = np.array([2 * gens.index(gen)], dtype=np.int32)
    T.tscan(table, labels, fwd, off, queue, ded, st, 0, col, 0, 1, True, 1)
    if strategy == "hlt":
        st[K.DTOP] = 0
    reason = ""
    deadline = t0 + limits.max_seconds
    while True:
        can_grow = cap < limits.max_cosets
        if strategy == "hlt":
            status = T.thlt_run(table, labels, fwd, off, queue, ded, st, rflat, rstart, _BUDGET, can_grow)
        else:
            status = T.tfelsch_run(table, labels, fwd, off, queue, ded, st, rflat, rstart,
                                   conj, cstart, byfirst, bfstart, _BUDGET, can_grow)
        peak = max(peak, int(st[K.NEXT]))
        if status == K.GROW:
            grow()
            continue
        if status == K.ROOM:
            def step(lo, hi):
                return T.tlookahead_range(table, labels, fwd, off, queue, ded, st, rflat, rstart, lo, hi)
            if not _chunked_lookahead(step, st, deadline):
                status = K.PAUSED
            else:
                if strategy == "felsch":
                    T.tprocess_deductions(table, labels, fwd, off, queue, ded, st, conj, cstart, byfirst, bfstart)
                st[K.DTOP] = 0
                st[K.DOVER] = 0
                T.tcompact(table, labels, fwd, off, st)
                status = K.PAUSED if K.has_room(st, cap) else K.FULL
        if status == K.PAUSED:
            if time.perf_counter() > deadline:
                reason = f"time limit {limits.max_seconds}s reached"
                break
            continue
        break
    if status == K.FULL:
        reason = f"coset limit {limits.max_cosets} reached"
    T.tcompact(table, labels, fwd, off, st)
    n = int(st[K.NLIVE])
    table = np.ascontiguousarray(table[:n])
    labels = np.ascontiguousarray(labels[:n])
    stats = {
        "cosets_defined": int(st[K.DEFINED]),
        "cosets_collapsed": int(st[K.COLLAPSED]),
        "deductions": int(st[K.DEDUCED]),
        "peak_cosets": peak,
        "seconds": round(time.perf_counter() - t0, 6),
    }
    if status != K.DONE:
        return TrackedTable(gens, gen, table, labels, 0, OVERFLOWED, stats, reason)
    m = int(st[T.MOD])
    # every relator loop, and the generator loop at coset 0, fixes the modulus
    m = int(T.relator_exponents(table, labels, rflat, rstart, m))
    if m < 0 or (table < 0).any():
        raise AssertionError("tracked enumeration finished with an invalid table")
    c0 = int(table[0, col[0]])
    m = gcd(m, int(labels[0, col[0]]) - 1) if c0 == 0 else m
    if c0 != 0:
        raise AssertionError("subgroup generator does not fix the base coset")
    if m == 0:
        return TrackedTable(gens, gen, table, labels, 0, OVERFLOWED, stats,
                            f"order of {gen} is infinite")
    labels %= m
    return TrackedTable(gens, gen, table, labels, m, COMPLETE, stats)
