"""Hot numeric kernels: exhaustive allocation scan and local search.

All kernels work on the integer-scaled data of an instance. Objective values
are computed in scaled log units; only differences matter for the argmax, and
callers re-evaluate the winner in true (unscaled) units. Each kernel is
deterministic: ties are resolved by enumeration/scan order.
"""

import numpy as np

from ._accel import njit


@njit(cache=True)
def oracle_scan_nw(vals, ends):
    """Enumerate every owner vector, return the one maximizing sum of
    log2(bundle_i + e_i). First (lexicographically smallest) optimum wins."""
    n, m = vals.shape
    owner = np.zeros(m, np.int64)
    best_owner = np.zeros(m, np.int64)
    bundle = np.zeros(n, np.int64)
    for g in range(m):
        bundle[0] += vals[0, g]
    best = -1.0e300
    while True:
        score = 0.0
        for i in range(n):
            score += np.log2(float(bundle[i] + ends[i]))
        if score > best:
            best = score
            for g in range(m):
                best_owner[g] = owner[g]
        # odometer: last good is the fastest digit, so enumeration order is
        # lexicographic over owner vectors
        g = m - 1
        while g >= 0:
            a = owner[g]
            bundle[a] -= vals[a, g]
            if a + 1 < n:
                owner[g] = a + 1
                bundle[a + 1] += vals[a + 1, g]
                break
            owner[g] = 0
            bundle[0] += vals[0, g]
            g -= 1
        if g < 0:
            break
    return best_owner


@njit(cache=True)
def oracle_scan_goods(vals):
    """Like oracle_scan_nw but for the goods-only objective: lexicographic
    (number of agents with positive bundle value, sum of their log2 values)."""
    n, m = vals.shape
    owner = np.zeros(m, np.int64)
    best_owner = np.zeros(m, np.int64)
    bundle = np.zeros(n, np.int64)
    for g in range(m):
        bundle[0] += vals[0, g]
    best_count = -1
    best_slog = -1.0e300
    while True:
        count = 0
        slog = 0.0
        for i in range(n):
            if bundle[i] > 0:
                count += 1
                slog += np.log2(float(bundle[i]))
        if count > best_count or (count == best_count and slog > best_slog):
            best_count = count
            best_slog = slog
            for g in range(m):
                best_owner[g] = owner[g]
        g = m - 1
        while g >= 0:
            a = owner[g]
            bundle[a] -= vals[a, g]
            if a + 1 < n:
                owner[g] = a + 1
                bundle[a + 1] += vals[a + 1, g]
                break
            owner[g] = 0
            bundle[0] += vals[0, g]
            g -= 1
        if g < 0:
            break
    return best_owner


@njit(cache=True)
def local_search_nw(vals, ends, owner, max_steps):
    """Steepest-ascent local search on sum of log2(bundle_i + e_i).

    Moves: shift one good to another agent, or swap two goods between two
    agents. Applies the best strictly-improving move until none exists.
    Mutates `owner` in place; returns the number of moves applied.
    """
    n, m = vals.shape
    bundle = np.zeros(n, np.int64)
    for g in range(m):
        bundle[owner[g]] += vals[owner[g], g]
    tol = 1e-12
    steps = 0
    while steps < max_steps:
        best_delta = tol
        kind = -1
        mg = -1
        mb = -1
        mh = -1
        for g in range(m):
            a = owner[g]
            va = vals[a, g]
            da = np.log2(float(bundle[a] - va + ends[a])) - np.log2(
                float(bundle[a] + ends[a])
            )
            for b in range(n):
                if b == a:
                    continue
                vb = vals[b, g]
                delta = da + np.log2(float(bundle[b] + vb + ends[b])) - np.log2(
                    float(bundle[b] + ends[b])
                )
                if delta > best_delta:
                    best_delta = delta
                    kind = 0
                    mg = g
                    mb = b
        for g in range(m):
            a = owner[g]
            for h in range(g + 1, m):
                b = owner[h]
                if b == a:
                    continue
                na = bundle[a] - vals[a, g] + vals[a, h]
                nb = bundle[b] - vals[b, h] + vals[b, g]
                delta = (
                    np.log2(float(na + ends[a]))
                    - np.log2(float(bundle[a] + ends[a]))
                    + np.log2(float(nb + ends[b]))
                    - np.log2(float(bundle[b] + ends[b]))
                )
                if delta > best_delta:
                    best_delta = delta
                    kind = 1
                    mg = g
                    mh = h
        if kind < 0:
            break
        if kind == 0:
            a = owner[mg]
            bundle[a] -= vals[a, mg]
            bundle[mb] += vals[mb, mg]
            owner[mg] = mb
        else:
            a = owner[mg]
            b = owner[mh]
            bundle[a] += vals[a, mh] - vals[a, mg]
            bundle[b] += vals[b, mg] - vals[b, mh]
            owner[mg] = b
            owner[mh] = a
        steps += 1
    return steps


@njit(cache=True)
def local_search_goods(vals, owner, max_steps):
    """Steepest-ascent local search on the goods-only lexicographic objective
    (positive-bundle count first, then sum of log2 bundle values)."""
    n, m = vals.shape
    bundle = np.zeros(n, np.int64)
    for g in range(m):
        bundle[owner[g]] += vals[owner[g], g]
    tol = 1e-12
    steps = 0
    while steps < max_steps:
        best_dc = 0
        best_ds = tol
        found = False
        kind = -1
        mg = -1
        mb = -1
        mh = -1
        for g in range(m):
            a = owner[g]
            na = bundle[a] - vals[a, g]
            ca_old = 1 if bundle[a] > 0 else 0
            sa_old = np.log2(float(bundle[a])) if bundle[a] > 0 else 0.0
            ca_new = 1 if na > 0 else 0
            sa_new = np.log2(float(na)) if na > 0 else 0.0
            for b in range(n):
                if b == a:
                    continue
                nb = bundle[b] + vals[b, g]
                dc = (
                    ca_new
                    - ca_old
                    + (1 if nb > 0 else 0)
                    - (1 if bundle[b] > 0 else 0)
                )
                ds = (
                    sa_new
                    - sa_old
                    + (np.log2(float(nb)) if nb > 0 else 0.0)
                    - (np.log2(float(bundle[b])) if bundle[b] > 0 else 0.0)
                )
                if dc > best_dc or (dc == best_dc and ds > best_ds):
                    best_dc = dc
                    best_ds = ds
                    found = True
                    kind = 0
                    mg = g
                    mb = b
        for g in range(m):
            a = owner[g]
            for h in range(g + 1, m):
                b = owner[h]
                if b == a:
                    continue
                na = bundle[a] - vals[a, g] + vals[a, h]
                nb = bundle[b] - vals[b, h] + vals[b, g]
                dc = (
                    (1 if na > 0 else 0)
                    - (1 if bundle[a] > 0 else 0)
                    + (1 if nb > 0 else 0)
                    - (1 if bundle[b] > 0 else 0)
                )
                ds = (
                    (np.log2(float(na)) if na > 0 else 0.0)
                    - (np.log2(float(bundle[a])) if bundle[a] > 0 else 0.0)
                    + (np.log2(float(nb)) if nb > 0 else 0.0)
                    - (np.log2(float(bundle[b])) if bundle[b] > 0 else 0.0)
                )
                if dc > best_dc or (dc == best_dc and ds > best_ds):
                    best_dc = dc
                    best_ds = ds
                    found = True
                    kind = 1
                    mg = g
                    mh = h
        if not found:
            break
        if kind == 0:
            a = owner[mg]
            bundle[a] -= vals[a, mg]
            bundle[mb] += vals[mb, mg]
            owner[mg] = mb
        else:
            a = owner[mg]
            b = owner[mh]
            bundle[a] += vals[a, mh] - vals[a, mg]
            bundle[b] += vals[b, mg] - vals[b, mh]
            owner[mg] = b
            owner[mh] = a
        steps += 1
    return steps
