"""Enumeration over a cyclic subgroup ``<s>`` that also tracks ``s``.

Besides the coset table we keep, for every entry ``alpha . g = beta``, an
integer ``P[alpha, g]`` with ``rep(alpha) g = s^P rep(beta)``, and for dead
cosets an offset with ``rep(e) = s^off rep(fwd[e])``.  Whenever a loop closes
with a nonzero exponent ``u`` we learn ``s^u = 1`` and fold ``u`` into the
modulus ``st[MOD]``.  At the end the modulus is the order of ``s``, and pairs
``(exponent mod M, coset)`` index the group elements.
"""

import numpy as np

from .._jit import njit
from .kernels import _push, ALPHA, COLLAPSED, DEDUCED, DEFINED, DONE, DOVER, DTOP, GROW, NEXT, NLIVE, PAUSED, ROOM

MOD = 8
NSTATE = 9


@njit(cache=True)
def _red(v, m):
    if m > 0:
        return v % m
    return v


@njit(cache=True)
def _gcd(a, b):
    a = abs(a)
    b = abs(b)
    while b:
        a, b = b, a % b
    return a


@njit(cache=True)
def tfind(fwd, off, i, m):
    r = i
    tot = 0
    while fwd[r] != r:
        tot += off[r]
        r = fwd[r]
    c = i
    acc = tot
    while c != r:
        nxt = fwd[c]
        o = off[c]
        fwd[c] = r
        off[c] = _red(acc, m)
        acc -= o
        c = nxt
    return r, _red(tot, m)


@njit(cache=True)
def _tmerge(fwd, off, queue, qtail, st, k, l, d):
    """Record ``rep(k) = s^d rep(l)``."""
    m = st[MOD]
    rk, ok = tfind(fwd, off, k, m)
    rl, ol = tfind(fwd, off, l, m)
    delta = d + ol - ok
    if rk == rl:
        st[MOD] = _gcd(m, delta)
        return qtail
    if rk < rl:
        fwd[rl] = rk
        off[rl] = _red(-delta, m)
        queue[qtail] = rl
    else:
        fwd[rk] = rl
        off[rk] = _red(delta, m)
        queue[qtail] = rk
    st[NLIVE] -= 1
    st[COLLAPSED] += 1
    return qtail + 1


@njit(cache=True)
def tcoincidence(table, P, fwd, off, queue, ded, st, a, b, d):
    ncols = table.shape[1]
    qhead = 0
    qtail = _tmerge(fwd, off, queue, 0, st, a, b, d)
    while qhead < qtail:
        e = queue[qhead]
        qhead += 1
        for x in range(ncols):
            f = table[e, x]
            if f < 0:
                continue
            p = P[e, x]
            xi = x ^ 1
            table[f, xi] = -1
            m = st[MOD]
            e1, oe = tfind(fwd, off, e, m)
            f1, of = tfind(fwd, off, f, m)
            pp = _red(p + of - oe, m)
            t = table[e1, x]
            if t >= 0:
                qtail = _tmerge(fwd, off, queue, qtail, st, f1, t, P[e1, x] - pp)
            else:
                t = table[f1, xi]
                if t >= 0:
                    qtail = _tmerge(fwd, off, queue, qtail, st, e1, t, pp + P[f1, xi])
                else:
                    table[e1, x] = f1
                    P[e1, x] = pp
                    table[f1, xi] = e1
                    P[f1, xi] = _red(-pp, m)
                    _push(ded, st, e1, x)


@njit(cache=True)
def tdefine(table, P, fwd, off, st, a, x):
    b = st[NEXT]
    if b >= table.shape[0]:
        return -1
    st[NEXT] = b + 1
    st[NLIVE] += 1
    st[DEFINED] += 1
    fwd[b] = b
    off[b] = 0
    for c in range(table.shape[1]):
        table[b, c] = -1
        P[b, c] = 0
    table[a, x] = b
    P[a, x] = 0
    table[b, x ^ 1] = a
    P[b, x ^ 1] = 0
    return b


@njit(cache=True)
def tscan(table, P, fwd, off, queue, ded, st, alpha, word, lo, hi, fill, target):
    """Scan ``word[lo:hi]`` from ``alpha`` expecting ``rep(alpha) w = s^target rep(alpha)``."""
    f = alpha
    b = alpha
    u = 0
    v = target
    i = lo
    j = hi - 1
    while True:
        while i <= j:
            t = table[f, word[i]]
            if t < 0:
                break
            u += P[f, word[i]]
            f = t
            i += 1
        if i > j:
            tcoincidence(table, P, fwd, off, queue, ded, st, alpha, f, u - target)
            return 0
        while j >= i:
            xi = word[j] ^ 1
            t = table[b, xi]
            if t < 0:
                break
            v += P[b, xi]
            b = t
            j -= 1
        if j < i:
            tcoincidence(table, P, fwd, off, queue, ded, st, f, b, v - u)
            return 0
        if i == j:
            m = st[MOD]
            table[f, word[i]] = b
            P[f, word[i]] = _red(v - u, m)
            table[b, word[i] ^ 1] = f
            P[b, word[i] ^ 1] = _red(u - v, m)
            _push(ded, st, f, word[i])
            return 0
        if not fill:
            return 0
        if tdefine(table, P, fwd, off, st, f, word[i]) < 0:
            return -1
        _push(ded, st, f, word[i])


@njit(cache=True)
def tlookahead_range(table, P, fwd, off, queue, ded, st, rels, rstart, lo, hi):
    """Relator scans from cosets ``lo`` up to ``hi``; returns the next coset."""
    nrel = rstart.shape[0] - 1
    beta = lo
    while beta < st[NEXT] and beta < hi:
        for r in range(nrel):
            if fwd[beta] != beta:
                break
            tscan(table, P, fwd, off, queue, ded, st, beta, rels, rstart[r], rstart[r + 1], False, 0)
        beta += 1
    return beta


@njit(cache=True)
def tcompact(table, P, fwd, off, st):
    n = st[NEXT]
    ncols = table.shape[1]
    m = st[MOD]
    newidx = np.full(n, -1, dtype=np.int64)
    k = 0
    for i in range(n):
        if fwd[i] == i:
            newidx[i] = k
            k += 1
    alpha = st[ALPHA]
    new_alpha = k
    for i in range(n):
        if i >= alpha and newidx[i] >= 0:
            new_alpha = newidx[i]
            break
    for i in range(n):
        ni = newidx[i]
        if ni < 0:
            continue
        for c in range(ncols):
            t = table[i, c]
            if t >= 0:
                table[ni, c] = newidx[t]
                P[ni, c] = _red(P[i, c], m)
            else:
                table[ni, c] = -1
                P[ni, c] = 0
    for i in range(k, n):
        for c in range(ncols):
            table[i, c] = -1
            P[i, c] = 0
    for i in range(k):
        fwd[i] = i
        off[i] = 0
    st[NEXT] = k
    st[NLIVE] = k
    st[ALPHA] = new_alpha
    return k


@njit(cache=True)
def thlt_run(table, P, fwd, off, queue, ded, st, rels, rstart, budget, can_grow):
    nrel = rstart.shape[0] - 1
    ncols = table.shape[1]
    stop_at = st[DEFINED] + budget
    while st[ALPHA] < st[NEXT]:
        if st[DEFINED] >= stop_at:
            return PAUSED
        alpha = st[ALPHA]
        full = False
        if fwd[alpha] == alpha:
            for r in range(nrel):
                if fwd[alpha] != alpha:
                    break
                if tscan(table, P, fwd, off, queue, ded, st, alpha, rels, rstart[r], rstart[r + 1], True, 0) < 0:
                    full = True
                    break
            if not full and fwd[alpha] == alpha:
                for c in range(ncols):
                    if table[alpha, c] < 0:
                        if tdefine(table, P, fwd, off, st, alpha, c) < 0:
                            full = True
                            break
        # HLT does not use deductions
        st[DTOP] = 0
        st[DOVER] = 0
        if full:
            if can_grow:
                return GROW
            return ROOM
        st[ALPHA] = alpha + 1
    return DONE


@njit(cache=True)
def tprocess_deductions(table, P, fwd, off, queue, ded, st, conj, cstart, byfirst, bfstart):
    while st[DTOP] > 0:
        st[DTOP] -= 1
        top = st[DTOP]
        a = ded[top, 0]
        x = ded[top, 1]
        if fwd[a] != a:
            continue
        for k in range(bfstart[x], bfstart[x + 1]):
            if fwd[a] != a:
                break
            w = byfirst[k]
            tscan(table, P, fwd, off, queue, ded, st, a, conj, cstart[w], cstart[w + 1], False, 0)
        if fwd[a] != a:
            continue
        b = table[a, x]
        if b < 0:
            continue
        xi = x ^ 1
        for k in range(bfstart[xi], bfstart[xi + 1]):
            if fwd[b] != b:
                break
            w = byfirst[k]
            tscan(table, P, fwd, off, queue, ded, st, b, conj, cstart[w], cstart[w + 1], False, 0)


@njit(cache=True)
def tfelsch_run(table, P, fwd, off, queue, ded, st, rels, rstart, conj, cstart, byfirst, bfstart,
                budget, can_grow):
    """Felsch strategy with tracking: define the first hole, then chase every consequence."""
    ncols = table.shape[1]
    stop_at = st[DEFINED] + budget
    while True:
        tprocess_deductions(table, P, fwd, off, queue, ded, st, conj, cstart, byfirst, bfstart)
        if st[DOVER] != 0:
            st[DOVER] = 0
            tlookahead_range(table, P, fwd, off, queue, ded, st, rels, rstart, 0, st[NEXT])
            continue
        if st[DEFINED] >= stop_at:
            return PAUSED
        alpha = st[ALPHA]
        hole = -1
        while alpha < st[NEXT]:
            if fwd[alpha] == alpha:
                for c in range(ncols):
                    if table[alpha, c] < 0:
                        hole = c
                        break
                if hole >= 0:
                    break
            alpha += 1
        st[ALPHA] = alpha
        if hole < 0:
            before = st[COLLAPSED] + st[DEDUCED]
            tlookahead_range(table, P, fwd, off, queue, ded, st, rels, rstart, 0, st[NEXT])
            if st[COLLAPSED] + st[DEDUCED] == before:
                return DONE
            st[ALPHA] = 0
            continue
        if tdefine(table, P, fwd, off, st, alpha, hole) < 0:
            if can_grow:
                return GROW
            return ROOM
        _push(ded, st, alpha, hole)


@njit(cache=True)
def relator_exponents(table, P, rels, rstart, m):
    """gcd of ``m`` and every loop exponent of every relator at every coset.

    Returns -1 if some relator does not close (invalid table).
    """
    n = table.shape[0]
    nrel = rstart.shape[0] - 1
    for s in range(n):
        for r in range(nrel):
            c = s
            u = 0
            for i in range(rstart[r], rstart[r + 1]):
                u += P[c, rels[i]]
                c = table[c, rels[i]]
            if c != s:
                return -1
            m = _gcd(m, u)
    return m


@njit(cache=True)
def trace_pair(table, P, start_coset, start_exp, word, m):
    c = start_coset
    u = start_exp
    for i in range(word.shape[0]):
        u += P[c, word[i]]
        c = table[c, word[i]]
    if m > 0:
        u %= m
    return c, u
