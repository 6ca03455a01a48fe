"""Compiled kernels for the streaming mediant-tree reductions.

Every kernel walks a chunk of the mediant tree iteratively with an explicit
stack (depth-first, left child first, so each depth streams in ascending
fraction order) and accumulates with compensated Kahan addition.  Chunk
boundaries are a pure function of the level, never of the thread count, so
folding chunk results in plan order gives bit-identical sums no matter how
many workers ran.  All kernels release the GIL.

For beta < 0 the terms grow with the denominator; `sort_terms` switches the
kernels to a gather/sort/sum scheme (ascending magnitude within each chunk
and depth) instead of streaming accumulation.

Kahan pairs (s, c) follow the textbook register convention: the corrected
estimate of the accumulated sum is s - c.  Callers folding chunk results
therefore add s and subtract c.
"""
from __future__ import annotations

import math

import numpy as np
from numba import njit

# ---- compensated accumulation helpers --------------------------------------
# Kahan updates are written inline below: numba inlines them anyway, but the
# explicit form keeps the dependence order obvious and safe from reassociation
# (no fastmath flags anywhere in this module).


@njit(cache=True, nogil=True)
def knauf_chunk(d_left, d_right, depth0, k, beta, sort_terms):
    """Sum new-denominator powers d^(-beta) over one subtree chunk.

    Returns (sums, comps, tot_s, tot_c): per-depth compensated sums for
    absolute depths depth0+1 .. k, plus a single compensated total taken in
    plain traversal order (an independent summation order, which makes the
    telescoping identity a nontrivial cross-check).
    """
    ndepth = k - depth0
    sums = np.zeros(ndepth, np.float64)
    comps = np.zeros(ndepth, np.float64)
    tot_s = 0.0
    tot_c = 0.0
    nb = -beta

    # explicit DFS stack; at most one pending sibling per depth
    cap = ndepth + 2
    sd = np.empty(cap, np.int64)
    sr = np.empty(cap, np.int64)
    sj = np.empty(cap, np.int64)

    if sort_terms:
        # gather per-depth term buffers: relative depth r has 2^(r-1) nodes
        total_nodes = (1 << ndepth) - 1
        buf = np.empty(total_nodes, np.float64)
        offs = np.empty(ndepth + 1, np.int64)
        cnts = np.zeros(ndepth, np.int64)
        for r in range(ndepth):
            offs[r] = (1 << r) - 1
        offs[ndepth] = total_nodes

        sp = 0
        sd[sp] = d_left; sr[sp] = d_right; sj[sp] = depth0
        sp = 1
        while sp > 0:
            sp -= 1
            dl = sd[sp]; dr = sr[sp]; j = sj[sp]
            dm = dl + dr
            r = j - depth0  # relative depth of the new fraction minus one
            buf[offs[r] + cnts[r]] = float(dm) ** nb
            cnts[r] += 1
            j1 = j + 1
            if j1 < k:
                sd[sp] = dm; sr[sp] = dr; sj[sp] = j1
                sp += 1
                sd[sp] = dl; sr[sp] = dm; sj[sp] = j1
                sp += 1
        for r in range(ndepth):
            seg = buf[offs[r]:offs[r] + cnts[r]]
            seg.sort()
            s = 0.0
            c = 0.0
            for t in seg:
                y = t - c; tt = s + y; c = (tt - s) - y; s = tt
            sums[r] = s
            comps[r] = c
        # total: fold the per-depth results in depth order (estimate of a
        # Kahan pair is sum minus compensation)
        for r in range(ndepth):
            y = sums[r] - tot_c; tt = tot_s + y; tot_c = (tt - tot_s) - y; tot_s = tt
            y = -comps[r] - tot_c; tt = tot_s + y; tot_c = (tt - tot_s) - y; tot_s = tt
        return sums, comps, tot_s, tot_c

    sp = 0
    sd[sp] = d_left; sr[sp] = d_right; sj[sp] = depth0
    sp = 1
    while sp > 0:
        sp -= 1
        dl = sd[sp]; dr = sr[sp]; j = sj[sp]
        dm = dl + dr
        term = float(dm) ** nb
        r = j - depth0
        y = term - comps[r]
        tt = sums[r] + y
        comps[r] = (tt - sums[r]) - y
        sums[r] = tt
        y = term - tot_c
        tt = tot_s + y
        tot_c = (tt - tot_s) - y
        tot_s = tt
        j1 = j + 1
        if j1 < k:
            sd[sp] = dm; sr[sp] = dr; sj[sp] = j1
            sp += 1
            sd[sp] = dl; sr[sp] = dm; sj[sp] = j1
            sp += 1
    return sums, comps, tot_s, tot_c


@njit(cache=True, nogil=True)
def chain_chunk(d_left, n_left, d_right, n_right, depth0, k, beta, sort_terms):
    """Sum (d^(n) + n^(n+1))^(-beta) over the level-k pairs in one chunk.

    Each new fraction m of level k bracketed by (L, R) contributes the two
    adjacent level-k pairs (L, m) and (m, R): first (d_L + num_m)^(-beta),
    then (d_m + num_R)^(-beta).  Returns a compensated (sum, comp) pair.
    """
    nb = -beta
    s = 0.0
    c = 0.0
    cap = k - depth0 + 2
    sd = np.empty(cap, np.int64)
    sn = np.empty(cap, np.int64)
    se = np.empty(cap, np.int64)
    sm = np.empty(cap, np.int64)
    sj = np.empty(cap, np.int64)

    n_leaves = 1 << (k - 1 - depth0)
    buf = np.empty(2 * n_leaves if sort_terms else 1, np.float64)
    nbuf = 0

    sp = 0
    sd[sp] = d_left; sn[sp] = n_left; se[sp] = d_right; sm[sp] = n_right
    sj[sp] = depth0
    sp = 1
    target = k - 1
    while sp > 0:
        sp -= 1
        dl = sd[sp]; nl = sn[sp]; dr = se[sp]; nr = sm[sp]; j = sj[sp]
        dm = dl + dr
        nm = nl + nr
        if j == target:
            t1 = float(dl + nm) ** nb
            t2 = float(dm + nr) ** nb
            if sort_terms:
                buf[nbuf] = t1; nbuf += 1
                buf[nbuf] = t2; nbuf += 1
            else:
                y = t1 - c; tt = s + y; c = (tt - s) - y; s = tt
                y = t2 - c; tt = s + y; c = (tt - s) - y; s = tt
        else:
            j1 = j + 1
            sd[sp] = dm; sn[sp] = nm; se[sp] = dr; sm[sp] = nr; sj[sp] = j1
            sp += 1
            sd[sp] = dl; sn[sp] = nl; se[sp] = dm; sm[sp] = nm; sj[sp] = j1
            sp += 1
    if sort_terms:
        seg = buf[:nbuf]
        seg.sort()
        for t in seg:
            y = t - c; tt = s + y; c = (tt - s) - y; s = tt
    return s, c


@njit(cache=True, nogil=True)
def tree_chunk(d_left, n_left, d_right, n_right, depth0, k, beta, sort_terms):
    """Sum ball diameters ^ beta over the level-k balls in one chunk.

    Balls pair consecutive new fractions of level k.  Two independent code
    paths accumulate side by side: path A evaluates the exact rational
    difference via the integer cross product, path B uses the closed form
    3/(d_a * d_b).  Requires depth0 <= k-2 so that pairs never straddle a
    chunk boundary.  Returns (sA, cA, sB, cB).
    """
    sa = 0.0; ca = 0.0
    sb = 0.0; cb = 0.0
    cap = k - depth0 + 2
    sd = np.empty(cap, np.int64)
    sn = np.empty(cap, np.int64)
    se = np.empty(cap, np.int64)
    sm = np.empty(cap, np.int64)
    sj = np.empty(cap, np.int64)

    n_balls = 1 << (k - 2 - depth0)
    bufa = np.empty(n_balls if sort_terms else 1, np.float64)
    bufb = np.empty(n_balls if sort_terms else 1, np.float64)
    nbuf = 0

    pend_n = np.int64(0)
    pend_d = np.int64(0)
    have_pending = False

    sp = 0
    sd[sp] = d_left; sn[sp] = n_left; se[sp] = d_right; sm[sp] = n_right
    sj[sp] = depth0
    sp = 1
    target = k - 1
    while sp > 0:
        sp -= 1
        dl = sd[sp]; nl = sn[sp]; dr = se[sp]; nr = sm[sp]; j = sj[sp]
        dm = dl + dr
        nm = nl + nr
        if j == target:
            if not have_pending:
                pend_n = nm
                pend_d = dm
                have_pending = True
            else:
                idiff = nm * pend_d - pend_n * dm
                prod = float(dm) * float(pend_d)
                ta = (float(idiff) / prod) ** beta
                tb = (3.0 / prod) ** beta
                if sort_terms:
                    bufa[nbuf] = ta
                    bufb[nbuf] = tb
                    nbuf += 1
                else:
                    y = ta - ca; tt = sa + y; ca = (tt - sa) - y; sa = tt
                    y = tb - cb; tt = sb + y; cb = (tt - sb) - y; sb = tt
                have_pending = False
        else:
            j1 = j + 1
            sd[sp] = dm; sn[sp] = nm; se[sp] = dr; sm[sp] = nr; sj[sp] = j1
            sp += 1
            sd[sp] = dl; sn[sp] = nl; se[sp] = dm; sm[sp] = nm; sj[sp] = j1
            sp += 1
    if sort_terms:
        sega = bufa[:nbuf]
        sega.sort()
        for t in sega:
            y = t - ca; tt = sa + y; ca = (tt - sa) - y; sa = tt
        segb = bufb[:nbuf]
        segb.sort()
        for t in segb:
            y = t - cb; tt = sb + y; cb = (tt - sb) - y; sb = tt
    return sa, ca, sb, cb


@njit(cache=True, nogil=True)
def dirichlet_by_depth(k, n_max):
    """Count new denominators equal to n at each depth 1..k, n <= n_max.

    Subtrees are pruned once the mediant denominator exceeds n_max (all
    descendants are strictly larger), so the cost is governed by the number
    of fractions with denominator <= n_max, not by 2^k.  Returns an
    int64 array counts[depth, n]; row 0 is unused except counts[0, 1] which
    records the 0/1 endpoint present at every level.
    """
    counts = np.zeros((k + 1, n_max + 1), np.int64)
    counts[0, 1] = 1  # the 0/1 endpoint, index 1 of every level row
    cap = k + 2
    sd = np.empty(cap, np.int64)
    sr = np.empty(cap, np.int64)
    sj = np.empty(cap, np.int64)
    sp = 0
    sd[sp] = 1; sr[sp] = 1; sj[sp] = 0
    sp = 1
    while sp > 0:
        sp -= 1
        dl = sd[sp]; dr = sr[sp]; j = sj[sp]
        dm = dl + dr
        if dm > n_max:
            continue  # every mediant below here is larger still
        j1 = j + 1
        counts[j1, dm] += 1
        if j1 < k:
            sd[sp] = dm; sr[sp] = dr; sj[sp] = j1
            sp += 1
            sd[sp] = dl; sr[sp] = dm; sj[sp] = j1
            sp += 1
    return counts


@njit(cache=True, nogil=True)
def dirichlet_counts(k, n_max):
    """Cumulative denominator multiplicities at level k: out[n] = number of
    summation-range fractions of level k with denominator n <= n_max.

    Same pruned walk as dirichlet_by_depth, single row of output.
    """
    out = np.zeros(n_max + 1, np.int64)
    if n_max >= 1:
        out[1] = 1  # the 0/1 endpoint
    cap = k + 2
    sd = np.empty(cap, np.int64)
    sr = np.empty(cap, np.int64)
    sj = np.empty(cap, np.int64)
    sp = 0
    sd[sp] = 1; sr[sp] = 1; sj[sp] = 0
    sp = 1
    while sp > 0:
        sp -= 1
        dl = sd[sp]; dr = sr[sp]; j = sj[sp]
        dm = dl + dr
        if dm > n_max:
            continue
        j1 = j + 1
        out[dm] += 1
        if j1 < k:
            sd[sp] = dm; sr[sp] = dr; sj[sp] = j1
            sp += 1
            sd[sp] = dl; sr[sp] = dm; sj[sp] = j1
            sp += 1
    return out


@njit(cache=True, nogil=True)
def approx_tree_sum(m, beta, gap):
    """Sum (gap * product of branch derivatives)^beta over all 2^m symbol
    prefixes of length m, sharing suffix evaluations.

    The state (x, p) carries the composed tail point and the running
    derivative product; prepending branch e maps (x, p) to (F_e(x),
    p * |F'(x)|), where |F'_0| = |F'_1| = (1+x)^(-2).  Compensated sum.
    """
    if m == 0:
        return gap ** beta, 0.0
    s = 0.0
    c = 0.0
    cap = m + 2
    sx = np.empty(cap, np.float64)
    spd = np.empty(cap, np.float64)
    sj = np.empty(cap, np.int64)
    sp = 0
    sx[sp] = 0.5; spd[sp] = 1.0; sj[sp] = 0
    sp = 1
    while sp > 0:
        sp -= 1
        x = sx[sp]; p = spd[sp]; j = sj[sp]
        if j == m:
            term = (gap * p) ** beta
            y = term - c; tt = s + y; c = (tt - s) - y; s = tt
            continue
        dp = p / ((1.0 + x) * (1.0 + x))
        x0 = x / (1.0 + x)
        x1 = 1.0 / (1.0 + x)
        j1 = j + 1
        sx[sp] = x1; spd[sp] = dp; sj[sp] = j1
        sp += 1
        sx[sp] = x0; spd[sp] = dp; sj[sp] = j1
        sp += 1
    return s, c


@njit(cache=True, nogil=True)
def transfer_matrix_entries(beta, M):
    """Dense truncation of the transfer operator on Taylor coefficients
    about x = 1, entry (i, j) = coefficient of u^j in
    2^(-a) * (1 - u/2)^(-a) * (1 + (1-u)^i) with a = 2*beta + i.

    The positive part W_j = 2^(-a-j) * binom(a+j-1, j) comes from a stable
    positive recurrence.  The alternating part is summed term by term with
    the exact term ratio -(i-t)(j-t) / ((t+1)(2*beta+t)); terms and the
    accumulator are tracked as (mantissa, base-2 exponent) pairs so that
    intermediate binomials far beyond double range never overflow, and the
    alternating accumulation is compensated.
    """
    out = np.empty((M, M), np.float64)
    two_beta = 2.0 * beta

    # g_j = 2^(-2*beta - j) * binom(2*beta + j - 1, j), scaled pairs
    gm = np.empty(M, np.float64)
    ge = np.empty(M, np.int64)
    m = 2.0 ** (-two_beta)
    e = 0
    for j in range(M):
        gm[j] = m
        ge[j] = e
        m *= (two_beta + j) / (2.0 * (j + 1))
        while m < 2.0 ** -500:
            m *= 2.0 ** 500
            e -= 500
        while m > 2.0 ** 500:
            m *= 2.0 ** -500
            e += 500

    wm = np.empty(M, np.float64)
    we = np.empty(M, np.int64)
    for i in range(M):
        alpha = two_beta + i
        # W_j for this row, scaled: W_0 = 2^(-2*beta) * 2^(-i)
        m = 2.0 ** (-two_beta)
        e = -i
        for j in range(M):
            wm[j] = m
            we[j] = e
            m *= (alpha + j) / (2.0 * (j + 1))
            while m < 2.0 ** -500:
                m *= 2.0 ** 500
                e -= 500
            while m > 2.0 ** 500:
                m *= 2.0 ** -500
                e += 500
        for j in range(M):
            # accumulator starts at W_j, then the alternating sum joins
            acc_m = wm[j]
            acc_c = 0.0
            acc_e = we[j]
            # term t=0 of the alternating part: g_j * 2^(-i)
            t_m = gm[j]
            t_e = ge[j] - i
            n_terms = min(i, j) + 1
            for t in range(n_terms):
                # fold term into accumulator at a shared exponent
                de = t_e - acc_e
                if de > 0:
                    # rebase accumulator to the larger term exponent
                    shift = 2.0 ** -de if de < 1060 else 0.0
                    acc_m *= shift
                    acc_c *= shift
                    acc_e = t_e
                    add = t_m
                elif de > -1060:
                    add = t_m * 2.0 ** de
                else:
                    add = 0.0
                y = add - acc_c
                tt = acc_m + y
                acc_c = (tt - acc_m) - y
                acc_m = tt
                am = abs(acc_m)
                if am > 2.0 ** 500:
                    acc_m *= 2.0 ** -500
                    acc_c *= 2.0 ** -500
                    acc_e += 500
                elif 0.0 < am < 2.0 ** -500:
                    acc_m *= 2.0 ** 500
                    acc_c *= 2.0 ** 500
                    acc_e -= 500
                if t + 1 < n_terms:
                    den = (t + 1) * (two_beta + t)
                    if den == 0.0:
                        # beta == 0, t == 0: the leading term vanished and
                        # the ratio is indeterminate; seed the series at its
                        # first surviving term instead.
                        t_m = -float(i)
                        t_e = -i - j
                    else:
                        t_m *= -((i - t) * (j - t)) / den
                    atm = abs(t_m)
                    if atm > 2.0 ** 500:
                        t_m *= 2.0 ** -500
                        t_e += 500
                    elif 0.0 < atm < 2.0 ** -500:
                        t_m *= 2.0 ** 500
                        t_e -= 500
            acc_m -= acc_c
            out[i, j] = math.ldexp(acc_m, int(acc_e)) if acc_m != 0.0 else 0.0
    return out
