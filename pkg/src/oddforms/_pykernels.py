"""Pure-Python (numpy) implementations of the enumeration kernels.

Same signatures and results as the compiled ``_ckernels`` module.  Points are
visited in lexicographic order in both, so collected samples agree exactly.
The Jacobian rank test here goes through maximal minors (Leibniz expansion)
while the compiled core row-reduces; the two are cross-checked in the tests.
"""

from __future__ import annotations

from itertools import combinations, permutations, product

import numpy as np

CHUNK = 1 << 17


def _perm_sign(perm) -> int:
    sign = 1
    seen = list(perm)
    for i in range(len(seen)):
        while seen[i] != i:
            j = seen[i]
            seen[i], seen[j] = seen[j], seen[i]
            sign = -sign
    return sign


def _power_table(p: int, maxdeg: int) -> np.ndarray:
    pw = np.ones((p, maxdeg + 1), dtype=np.int64)
    base = np.arange(p, dtype=np.int64)
    for e in range(1, maxdeg + 1):
        pw[:, e] = pw[:, e - 1] * base % p
    return pw


def _chunks(s: int, values: np.ndarray):
    """Yield point blocks of ``values^s`` in lexicographic order."""
    n = len(values)
    suffix = 0
    while suffix < s and n ** (suffix + 1) <= CHUNK:
        suffix += 1
    suffix = max(suffix, min(s, 1))
    grid = np.array(list(product(range(n), repeat=suffix)), dtype=np.int64).reshape(-1, suffix)
    tail = values[grid]
    for prefix in product(values.tolist(), repeat=s - suffix):
        head = np.broadcast_to(np.array(prefix, dtype=np.int64), (len(tail), s - suffix))
        yield np.concatenate([head, tail], axis=1)


def _eval_mod(co, ex, a, b, X, pw, p):
    out = np.zeros(len(X), dtype=np.int64)
    for k in range(a, b):
        t = np.full(len(X), co[k] % p, dtype=np.int64)
        for j in range(X.shape[1]):
            e = ex[k, j]
            if e:
                t = t * pw[X[:, j], e] % p
        out = (out + t) % p
    return out


def _jacobian_mod(jco, jex, jst, R, s, X, pw, p):
    J = np.zeros((len(X), R, s), dtype=np.int64)
    for i in range(R):
        for j in range(s):
            k = i * s + j
            J[:, i, j] = _eval_mod(jco, jex, jst[k], jst[k + 1], X, pw, p)
    return J


def _full_rank_mask(J, R, s, p):
    """True where some R x R minor is non-zero mod p."""
    n = J.shape[0]
    if R == 0:
        return np.ones(n, dtype=bool)
    if R > s:
        return np.zeros(n, dtype=bool)
    ok = np.zeros(n, dtype=bool)
    perms = [(perm, _perm_sign(perm)) for perm in permutations(range(R))]
    for cols in combinations(range(s), R):
        det = np.zeros(n, dtype=np.int64)
        for perm, sign in perms:
            term = np.ones(n, dtype=np.int64)
            for i in range(R):
                term = term * J[:, i, cols[perm[i]]] % p
            det = (det + sign * term) % p
        ok |= det != 0
        if ok.all():
            break
    return ok


def fp_scan(co, ex, st, jco, jex, jst, s, p, maxdeg, units_only, need_jac, limit, stop_at_limit):
    R = len(st) - 1
    pw = _power_table(p, maxdeg)
    values = np.arange(1 if units_only else 0, p, dtype=np.int64)
    total = unit_total = ns_total = 0
    found = []
    complete = True
    if s == 0:
        blocks = [np.zeros((1, 0), dtype=np.int64)]
    else:
        blocks = _chunks(s, values)
    for X in blocks:
        zero = np.ones(len(X), dtype=bool)
        for i in range(R):
            idx = np.flatnonzero(zero)
            if not len(idx):
                break
            v = _eval_mod(co, ex, st[i], st[i + 1], X[idx], pw, p)
            zero[idx[v != 0]] = False
        total += int(zero.sum())
        unit = zero & np.all(X != 0, axis=1)
        unit_total += int(unit.sum())
        if need_jac:
            idx = np.flatnonzero(unit)
            if len(idx):
                J = _jacobian_mod(jco, jex, jst, R, s, X[idx], pw, p)
                good = idx[_full_rank_mask(J, R, s, p)]
                for row in good:
                    if len(found) < limit:
                        found.append(X[row].tolist())
                    ns_total += 1
                    if stop_at_limit and len(found) >= limit:
                        complete = False
                        break
                if not complete:
                    break
    return total, unit_total, ns_total, np.array(found, dtype=np.int64).reshape(-1, s), complete


def fp_deficient(jco, jex, jst, nrows, s, p, maxdeg):
    pw = _power_table(p, maxdeg)
    values = np.arange(p, dtype=np.int64)
    count = 0
    for X in _chunks(s, values):
        J = _jacobian_mod(jco, jex, jst, nrows, s, X, pw, p)
        count += int((~_full_rank_mask(J, nrows, s, p)).sum())
    return count


def fp_value_counts(co, ex, s, p, maxdeg):
    pw = _power_table(p, maxdeg)
    values = np.arange(p, dtype=np.int64)
    counts = np.zeros(p, dtype=np.int64)
    for X in _chunks(s, values):
        v = _eval_mod(co, ex, 0, len(co), X, pw, p)
        counts += np.bincount(v, minlength=p)
    return counts


# -- integer box enumeration --------------------------------------------------


def _eval_int(co, ex, a, b, X, dtype):
    out = np.zeros(len(X), dtype=dtype)
    for k in range(a, b):
        t = np.full(len(X), int(co[k]), dtype=dtype)
        for j in range(X.shape[1]):
            e = int(ex[k, j])
            if e:
                t = t * X[:, j] ** e
        out = out + t
    return out


def box_count(vals, wts, vst, co, ex, st, skip, has_solve, gco, gex, hco, hex_, last_w, N, limit, exact=False):
    dtype = object if exact else np.int64
    s = ex.shape[1]
    m = len(vst) - 1
    R = len(st) - 1
    lists = [vals[vst[j]:vst[j + 1]] for j in range(m)]
    wlists = [wts[vst[j]:vst[j + 1]] for j in range(m)]
    count = 0
    wsum = 0.0
    samples: list[list[int]] = []
    if any(len(v) == 0 for v in lists):
        return 0, 0.0, np.zeros((0, s), dtype=np.int64)
    allowed_last = np.flatnonzero(last_w >= 0) - N if has_solve else None
    others = [i for i in range(R) if i != skip]

    def check(X, mask):
        for i in others:
            idx = np.flatnonzero(mask)
            if not len(idx):
                break
            v = _eval_int(co, ex, st[i], st[i + 1], X[idx], dtype)
            mask[idx[v != 0]] = False
        return mask

    if m == 0:
        prefixes = [()]
        last = np.zeros(1, dtype=np.int64)
        last_wt = np.ones(1)
    else:
        prefixes = product(*[range(len(v)) for v in lists[:-1]])
        last = lists[-1]
        last_wt = wlists[-1]
    nlast = len(last)
    for pidx in prefixes:
        head = [int(lists[j][i]) for j, i in enumerate(pidx)]
        hw = 1.0
        for j, i in enumerate(pidx):
            hw *= wlists[j][i]
        X = np.zeros((nlast, s), dtype=dtype)
        for j, v in enumerate(head):
            X[:, j] = v
        if m > 0:
            X[:, m - 1] = last.astype(dtype) if exact else last
        rw = hw * last_wt
        if not has_solve:
            ok = check(X, np.ones(nlast, dtype=bool))
            idx = np.flatnonzero(ok)
            count += len(idx)
            wsum += float(rw[idx].sum())
            for r in idx[: max(0, limit - len(samples))]:
                samples.append([int(v) for v in X[r]])
            continue
        g = _eval_int(gco, gex, 0, len(gco), X, dtype)
        h = _eval_int(hco, hex_, 0, len(hco), X, dtype)
        rows, lastv = [], []
        nz = np.flatnonzero(g != 0)
        if len(nz):
            gn, hn = g[nz], h[nz]
            div = (hn % gn) == 0
            nz, gn, hn = nz[div], gn[div], hn[div]
            v = -(hn // gn)
            inr = (v >= -N) & (v <= N)
            nz, v = nz[inr], v[inr]
            v = np.asarray(v, dtype=np.int64)
            okw = last_w[v + N] >= 0
            rows.append(nz[okw])
            lastv.append(v[okw])
        degen = np.flatnonzero((g == 0) & (h == 0))
        if len(degen) and len(allowed_last):
            rows.append(np.repeat(degen, len(allowed_last)))
            lastv.append(np.tile(allowed_last, len(degen)))
        if not rows:
            continue
        rows = np.concatenate(rows).astype(np.int64)
        lastv = np.concatenate(lastv).astype(np.int64)
        if not len(rows):
            continue
        order = np.lexsort((lastv, rows))
        rows, lastv = rows[order], lastv[order]
        Y = X[rows].copy()
        Y[:, s - 1] = lastv.astype(dtype) if exact else lastv
        ok = check(Y, np.ones(len(rows), dtype=bool))
        idx = np.flatnonzero(ok)
        count += len(idx)
        wsum += float((rw[rows[idx]] * last_w[lastv[idx] + N]).sum())
        for r in idx[: max(0, limit - len(samples))]:
            samples.append([int(v) for v in Y[r]])
    return count, wsum, np.array(samples, dtype=np.int64).reshape(-1, s)
