"""Slow, independent reference implementations used to check the library.

None of these share code with ``bstriangle`` beyond the ``Word`` type.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from math import gcd

import numpy as np


# ---------------------------------------------------------------- permutation groups


def compose(s: tuple, t: tuple) -> tuple:
    """``s`` then ``t`` (points map i -> t[s[i]])."""
    return tuple(t[i] for i in s)


def inverse(s: tuple) -> tuple:
    out = [0] * len(s)
    for i, j in enumerate(s):
        out[j] = i
    return tuple(out)


def closure(gens: list[tuple], degree: int) -> set[tuple]:
    """Every element of the group generated by ``gens``, by breadth-first search."""
    ident = tuple(range(degree))
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for g in frontier:
            for s in gens:
                h = compose(g, s)
                if h not in seen:
                    seen.add(h)
                    nxt.append(h)
        frontier = nxt
    return seen


def derived_elements(elements: set[tuple], degree: int) -> set[tuple]:
    """Subgroup generated by all commutators of pairs of elements."""
    comms = set()
    for s in elements:
        si = inverse(s)
        for t in elements:
            comms.add(compose(compose(compose(si, inverse(t)), s), t))
    return closure(list(comms), degree)


def derived_orders(gens: list[tuple], degree: int) -> list[int]:
    g = closure(gens, degree)
    out = [len(g)]
    while True:
        d = derived_elements(g, degree)
        if len(d) == len(g):
            return out
        out.append(len(d))
        g = d


# ---------------------------------------------------------------- abelian invariants


def _det(rows: list[list[int]]) -> int:
    m = [[Fraction(v) for v in r] for r in rows]
    n = len(m)
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c] != 0), None)
        if piv is None:
            return 0
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        det *= m[c][c]
        for r in range(c + 1, n):
            f = m[r][c] / m[c][c]
            for k in range(c, n):
                m[r][k] -= f * m[c][k]
    return int(det)


def minor_invariants(matrix: list[list[int]], ncols: int) -> list[int]:
    """Invariant factors of Z^ncols / rowspace, from gcds of k x k minors.

    Trivial factors are dropped and each free summand shows up as 0.
    """
    rows = [list(r) for r in matrix]
    d_prev = 1
    factors = []
    for k in range(1, ncols + 1):
        d = 0
        if len(rows) >= k:
            for rs in combinations(range(len(rows)), k):
                for cs in combinations(range(ncols), k):
                    d = gcd(d, _det([[rows[i][j] for j in cs] for i in rs]))
        if d == 0:
            factors.extend([0] * (ncols - k + 1))
            break
        factors.append(d // d_prev)
        d_prev = d
    return [f for f in factors if f != 1]


# ---------------------------------------------------------------- trivial moves


def naive_orbit(values: tuple[int, ...]) -> set[tuple[int, ...]]:
    """Closure of a tuple under the three generating moves, written out directly."""

    def cyc(t):
        return t[2:] + t[:2]

    def swap0(t):
        return (t[1], t[0]) + t[2:]

    def neg0(t):
        return (-t[0], -t[1]) + t[2:]

    seen = {tuple(values)}
    frontier = [tuple(values)]
    while frontier:
        nxt = []
        for t in frontier:
            for f in (cyc, swap0, neg0):
                u = f(t)
                if u not in seen:
                    seen.add(u)
                    nxt.append(u)
        frontier = nxt
    return seen


# ---------------------------------------------------------------- coset table certificates


def table_is_valid(table: np.ndarray, relator_columns: list[list[int]]) -> bool:
    """Every column is a permutation, inverse columns match, the action is
    transitive and every relator fixes every coset."""
    n, ncols = table.shape
    for c in range(ncols):
        col = table[:, c]
        if col.min() < 0 or len(set(col.tolist())) != n:
            return False
    for c in range(0, ncols, 2):
        if not np.array_equal(table[table[:, c], c + 1], np.arange(n)):
            return False
    reached = {0}
    frontier = [0]
    while frontier:
        nxt = []
        for i in frontier:
            for c in range(ncols):
                j = int(table[i, c])
                if j not in reached:
                    reached.add(j)
                    nxt.append(j)
        frontier = nxt
    if len(reached) != n:
        return False
    for rel in relator_columns:
        pts = np.arange(n)
        for c in rel:
            pts = table[pts, c]
        if not np.array_equal(pts, np.arange(n)):
            return False
    return True


def word_columns(w, generators) -> list[int]:
    idx = {g: i for i, g in enumerate(generators)}
    out = []
    for g, e in w.syllables:
        out += [2 * idx[g] + (0 if e > 0 else 1)] * abs(e)
    return out


# ---------------------------------------------------------------- affine maps as matrices


def affine_matrix(sign, shift) -> np.ndarray:
    m = np.eye(4, dtype=np.int64)
    m[:3, :3] = np.diag(sign)
    m[:3, 3] = shift
    return m


AFFINE = {
    "x": affine_matrix((1, 1, -1), (1, 0, 0)),
    "y": affine_matrix((-1, 1, 1), (0, 1, 0)),
    "z": affine_matrix((1, -1, 1), (0, 0, 1)),
}


def affine_word(w) -> np.ndarray:
    """Matrix of a word acting on the right: the first letter is applied first."""
    m = np.eye(4, dtype=np.int64)
    for g, e in w.syllables:
        step = AFFINE[g] if e > 0 else np.round(np.linalg.inv(AFFINE[g])).astype(np.int64)
        for _ in range(abs(e)):
            m = step @ m
    return m
