"""Todd-Coxeter inner loops.

Everything here works on flat numpy arrays so the same code runs under
numba or as plain Python.  Columns are signed generators
``g0, g0^-1, g1, g1^-1, ...`` so the inverse of column ``c`` is ``c ^ 1``.

Mutable scalars live in the int64 array ``st`` (indices below).
"""

import numpy as np

from .._jit import njit

# st[] layout
NEXT = 0        # next unused row
NLIVE = 1       # live coset count
ALPHA = 2       # HLT / Felsch pointer
DEFINED = 3     # total definitions
COLLAPSED = 4   # total cosets killed by coincidences
DEDUCED = 5     # total deductions recorded
DTOP = 6        # deduction stack height
DOVER = 7       # deduction stack overflowed since last full pass
NSTATE = 8

# run() return codes
DONE = 0
PAUSED = 1
FULL = 2
GROW = 3
ROOM = 4        # table full: caller runs a chunked lookahead, then compacts


@njit(cache=True)
def find(fwd, i):
    r = i
    while fwd[r] != r:
        r = fwd[r]
    while fwd[i] != r:
        nxt = fwd[i]
        fwd[i] = r
        i = nxt
    return r


@njit(cache=True)
def _merge(fwd, queue, qtail, st, k, l):
    k = find(fwd, k)
    l = find(fwd, l)
    if k == l:
        return qtail
    if k > l:
        k, l = l, k
    fwd[l] = k
    queue[qtail] = l
    st[NLIVE] -= 1
    st[COLLAPSED] += 1
    return qtail + 1


@njit(cache=True)
def _push(ded, st, a, x):
    st[DEDUCED] += 1
    top = st[DTOP]
    if top < ded.shape[0]:
        ded[top, 0] = a
        ded[top, 1] = x
        st[DTOP] = top + 1
    else:
        st[DOVER] = 1


@njit(cache=True)
def coincidence(table, fwd, queue, ded, st, a, b):
    ncols = table.shape[1]
    qhead = 0
    qtail = _merge(fwd, queue, 0, st, a, b)
    while qhead < qtail:
        e = queue[qhead]
        qhead += 1
        for x in range(ncols):
            f = table[e, x]
            if f < 0:
                continue
            xi = x ^ 1
            table[f, xi] = -1
            e1 = find(fwd, e)
            f1 = find(fwd, f)
            t = table[e1, x]
            if t >= 0:
                qtail = _merge(fwd, queue, qtail, st, f1, t)
            else:
                t = table[f1, xi]
                if t >= 0:
                    qtail = _merge(fwd, queue, qtail, st, e1, t)
                else:
                    table[e1, x] = f1
                    table[f1, xi] = e1
                    _push(ded, st, e1, x)


@njit(cache=True)
def define(table, fwd, st, a, x):
    b = st[NEXT]
    if b >= table.shape[0]:
        return -1
    st[NEXT] = b + 1
    st[NLIVE] += 1
    st[DEFINED] += 1
    fwd[b] = b
    for c in range(table.shape[1]):
        table[b, c] = -1
    table[a, x] = b
    table[b, x ^ 1] = a
    return b


@njit(cache=True)
def scan(table, fwd, queue, ded, st, alpha, word, lo, hi, fill):
    """Scan ``word[lo:hi]`` from ``alpha``.

    With ``fill`` set, gaps are closed by defining new cosets.  Returns -1 when
    a definition was needed but the table is full, else 0.
    """
    f = alpha
    b = alpha
    i = lo
    j = hi - 1
    while True:
        while i <= j:
            t = table[f, word[i]]
            if t < 0:
                break
            f = t
            i += 1
        if i > j:
            if f != alpha:
                coincidence(table, fwd, queue, ded, st, f, alpha)
            return 0
        while j >= i:
            t = table[b, word[j] ^ 1]
            if t < 0:
                break
            b = t
            j -= 1
        if j < i:
            coincidence(table, fwd, queue, ded, st, f, b)
            return 0
        if i == j:
            table[f, word[i]] = b
            table[b, word[i] ^ 1] = f
            _push(ded, st, f, word[i])
            return 0
        if not fill:
            return 0
        if define(table, fwd, st, f, word[i]) < 0:
            return -1
        _push(ded, st, f, word[i])


@njit(cache=True)
def lookahead_range(table, fwd, queue, ded, st, rels, rstart, lo, hi):
    """Relator scans (no definitions) from cosets ``lo`` up to ``hi``.

    Returns the first coset not yet scanned.
    """
    nrel = rstart.shape[0] - 1
    beta = lo
    while beta < st[NEXT] and beta < hi:
        for r in range(nrel):
            if fwd[beta] != beta:
                break
            scan(table, fwd, queue, ded, st, beta, rels, rstart[r], rstart[r + 1], False)
        beta += 1
    return beta


@njit(cache=True)
def lookahead(table, fwd, queue, ded, st, rels, rstart):
    """One pass of relator scans over every live coset; returns the number of
    coincidences and deductions it produced."""
    before = st[COLLAPSED] + st[DEDUCED]
    lookahead_range(table, fwd, queue, ded, st, rels, rstart, 0, st[NEXT])
    return st[COLLAPSED] + st[DEDUCED] - before


@njit(cache=True)
def compact(table, fwd, st):
    """Renumber live cosets 0..nlive-1 keeping their relative order."""
    n = st[NEXT]
    ncols = table.shape[1]
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
            table[ni, c] = newidx[t] if t >= 0 else -1
    for i in range(k, n):
        for c in range(ncols):
            table[i, c] = -1
    for i in range(k):
        fwd[i] = i
    st[NEXT] = k
    st[NLIVE] = k
    st[ALPHA] = new_alpha
    return k


@njit(cache=True)
def has_room(st, cap):
    """After a lookahead: is at least 1% of the table free again?"""
    return st[NEXT] < cap - cap // 100


@njit(cache=True)
def hlt_run(table, fwd, queue, ded, st, rels, rstart, budget, can_grow):
    """HLT; returns DONE, PAUSED, GROW or ROOM."""
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
                if scan(table, fwd, queue, ded, st, alpha, rels, rstart[r], rstart[r + 1], True) < 0:
                    full = True
                    break
            if not full and fwd[alpha] == alpha:
                for c in range(ncols):
                    if table[alpha, c] < 0:
                        if define(table, fwd, st, alpha, c) < 0:
                            full = True
                            break
        st[DTOP] = 0
        if full:
            if can_grow:
                return GROW
            return ROOM
        st[ALPHA] = alpha + 1
    return DONE


@njit(cache=True)
def _process_deductions(table, fwd, queue, ded, st, conj, cstart, byfirst, bfstart):
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
            scan(table, fwd, queue, ded, st, a, conj, cstart[w], cstart[w + 1], False)
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
            scan(table, fwd, queue, ded, st, b, conj, cstart[w], cstart[w + 1], False)


@njit(cache=True)
def felsch_run(table, fwd, queue, ded, st, rels, rstart, conj, cstart, byfirst, bfstart, budget, can_grow):
    """Felsch strategy: define the first hole, then chase every consequence."""
    ncols = table.shape[1]
    stop_at = st[DEFINED] + budget
    while True:
        _process_deductions(table, fwd, queue, ded, st, conj, cstart, byfirst, bfstart)
        if st[DOVER] != 0:
            st[DOVER] = 0
            lookahead(table, fwd, queue, ded, st, rels, rstart)
            continue
        if st[DEFINED] >= stop_at:
            return PAUSED
        # locate the first undefined entry among live cosets
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
            # table is closed; one confirming pass catches anything lost
            if lookahead(table, fwd, queue, ded, st, rels, rstart) == 0:
                return DONE
            st[ALPHA] = 0
            continue
        if define(table, fwd, st, alpha, hole) < 0:
            if can_grow:
                return GROW
            return ROOM
        _push(ded, st, alpha, hole)


@njit(cache=True)
def trace(table, start, word):
    """Follow ``word`` from ``start``; -1 if some entry is undefined."""
    c = start
    for i in range(word.shape[0]):
        c = table[c, word[i]]
        if c < 0:
            return -1
    return c


@njit(cache=True)
def trace_all(table, word):
    """Image of every coset under ``word`` (complete table)."""
    n = table.shape[0]
    out = np.empty(n, dtype=np.int64)
    for s in range(n):
        c = s
        for i in range(word.shape[0]):
            c = table[c, word[i]]
        out[s] = c
    return out


@njit(cache=True)
def relators_close(table, rels, rstart):
    """True when every relator is a closed loop at every coset."""
    n = table.shape[0]
    nrel = rstart.shape[0] - 1
    for s in range(n):
        for r in range(nrel):
            c = s
            for i in range(rstart[r], rstart[r + 1]):
                c = table[c, rels[i]]
                if c < 0:
                    return False
            if c != s:
                return False
    return True
