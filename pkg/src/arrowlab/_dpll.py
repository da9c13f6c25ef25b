"""Chronological DPLL with two-watched-literal unit propagation.

Literal codes: variable v (1-based) is ``2*(v-1)`` positive and
``2*(v-1)+1`` negative.  Variable values: -1 unassigned, 0 false, 1 true.
"""
import numpy as np

from ._accel import njit

SAT = 10
UNSAT = 20


@njit
def _lit_true(val, lit):
    return val[lit >> 1] == 1 - (lit & 1)


@njit
def _lit_false(val, lit):
    return val[lit >> 1] == (lit & 1)


@njit
def dpll(nvars, lits, starts, order, nodes_out):
    """Return (status, values, decision literal codes).

    ``order`` lists variable indices (0-based) in branching priority; the
    first unassigned one is tried true first.  ``nodes_out[0]`` receives the
    number of decisions made.
    """
    nclauses = starts.shape[0] - 1
    val = np.full(nvars, -1, dtype=np.int8)
    trail = np.empty(nvars, dtype=np.int64)
    ntrail = 0
    head = np.full(2 * nvars, -1, dtype=np.int64)
    nxt = np.full(2 * nclauses, -1, dtype=np.int64)
    watch = np.zeros(2 * nclauses, dtype=np.int64)
    dec_start = np.zeros(nvars + 1, dtype=np.int64)
    dec_lit = np.zeros(nvars + 1, dtype=np.int64)
    flipped = np.zeros(nvars + 1, dtype=np.bool_)
    level = 0
    empty_dec = np.empty(0, dtype=np.int64)

    # level-0 units and watch setup
    for c in range(nclauses):
        a = starts[c]
        b = starts[c + 1]
        if b == a:
            return UNSAT, val, empty_dec
        if b - a == 1:
            lit = lits[a]
            if _lit_false(val, lit):
                return UNSAT, val, empty_dec
            if val[lit >> 1] == -1:
                val[lit >> 1] = 1 - (lit & 1)
                trail[ntrail] = lit
                ntrail += 1
            continue
        for s in range(2):
            e = 2 * c + s
            watch[e] = a + s
            lit = lits[a + s]
            nxt[e] = head[lit]
            head[lit] = e

    qhead = 0
    decisions = 0
    while True:
        conflict = False
        while qhead < ntrail and not conflict:
            f = trail[qhead] ^ 1
            qhead += 1
            prev = -1
            e = head[f]
            while e != -1:
                nexte = nxt[e]
                c = e >> 1
                s = e & 1
                other = lits[watch[2 * c + 1 - s]]
                if _lit_true(val, other):
                    prev = e
                    e = nexte
                    continue
                moved = False
                for pos in range(starts[c], starts[c + 1]):
                    if pos == watch[2 * c] or pos == watch[2 * c + 1]:
                        continue
                    lit = lits[pos]
                    if not _lit_false(val, lit):
                        watch[e] = pos
                        if prev == -1:
                            head[f] = nexte
                        else:
                            nxt[prev] = nexte
                        nxt[e] = head[lit]
                        head[lit] = e
                        moved = True
                        break
                if moved:
                    e = nexte
                    continue
                if val[other >> 1] == -1:
                    val[other >> 1] = 1 - (other & 1)
                    trail[ntrail] = other
                    ntrail += 1
                else:
                    conflict = True
                    break
                prev = e
                e = nexte

        if conflict:
            while level > 0 and flipped[level]:
                level -= 1
            if level == 0:
                nodes_out[0] = decisions
                return UNSAT, val, empty_dec
            # undo everything from this level's decision onward, then flip it
            for i in range(dec_start[level], ntrail):
                val[trail[i] >> 1] = -1
            ntrail = dec_start[level]
            lit = dec_lit[level] ^ 1
            dec_lit[level] = lit
            flipped[level] = True
            val[lit >> 1] = 1 - (lit & 1)
            trail[ntrail] = lit
            ntrail += 1
            qhead = ntrail - 1
            continue

        pick = -1
        for i in range(order.shape[0]):
            v = order[i]
            if val[v] == -1:
                pick = v
                break
        if pick == -1:
            out = np.empty(level, dtype=np.int64)
            for i in range(level):
                out[i] = dec_lit[i + 1]
            nodes_out[0] = decisions
            return SAT, val, out
        decisions += 1
        nodes_out[0] = decisions
        level += 1
        lit = 2 * pick
        dec_start[level] = ntrail
        dec_lit[level] = lit
        flipped[level] = False
        val[pick] = 1
        trail[ntrail] = lit
        ntrail += 1
