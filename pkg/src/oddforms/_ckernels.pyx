# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled enumeration kernels; see ``_pykernels`` for the reference semantics."""

import numpy as np
cimport numpy as cnp
from libc.stdlib cimport malloc, free

ctypedef long long i64


cdef inline i64 _eval_mod(const i64[:] co, const i64[:, :] ex, Py_ssize_t a, Py_ssize_t b,
                          const i64* x, const i64* pw, int stride, int s, i64 p) noexcept nogil:
    cdef i64 total = 0
    cdef i64 t
    cdef Py_ssize_t k
    cdef int j, e
    for k in range(a, b):
        t = co[k]
        for j in range(s):
            e = <int> ex[k, j]
            if e:
                t = t * pw[x[j] * stride + e] % p
        total += t
    return total % p


cdef inline i64 _eval_int(const i64[:] co, const i64[:, :] ex, Py_ssize_t a, Py_ssize_t b,
                          const i64* x, int s) noexcept nogil:
    cdef i64 total = 0
    cdef i64 t
    cdef Py_ssize_t k
    cdef int j, e, r
    for k in range(a, b):
        t = co[k]
        for j in range(s):
            e = <int> ex[k, j]
            for r in range(e):
                t *= x[j]
        total += t
    return total


cdef int _rank_mod(i64* m, int R, int s, i64 p, const i64* inv) noexcept nogil:
    cdef int r = 0
    cdef int c, i, j, piv
    cdef i64 f, iv, tmp
    for c in range(s):
        piv = -1
        for i in range(r, R):
            if m[i * s + c] != 0:
                piv = i
                break
        if piv < 0:
            continue
        if piv != r:
            for j in range(s):
                tmp = m[r * s + j]
                m[r * s + j] = m[piv * s + j]
                m[piv * s + j] = tmp
        iv = inv[m[r * s + c]]
        for j in range(c, s):
            m[r * s + j] = m[r * s + j] * iv % p
        for i in range(r + 1, R):
            f = m[i * s + c]
            if f:
                for j in range(c, s):
                    m[i * s + j] = (m[i * s + j] - f * m[r * s + j] % p + p) % p
        r += 1
        if r == R:
            break
    return r


cdef void _fill_jac(const i64[:] jco, const i64[:, :] jex, const i64[:] jst, int R, int s,
                    const i64* x, const i64* pw, int stride, i64 p, i64* m) noexcept nogil:
    cdef int i, j, k
    for i in range(R):
        for j in range(s):
            k = i * s + j
            m[k] = _eval_mod(jco, jex, jst[k], jst[k + 1], x, pw, stride, s, p)


def _tables(i64 p, int maxdeg):
    cdef int stride = maxdeg + 1
    pw = np.ones(p * stride, dtype=np.int64)
    inv = np.zeros(p, dtype=np.int64)
    cdef i64[:] pwv = pw
    cdef i64 v
    cdef int e
    for v in range(p):
        for e in range(1, stride):
            pwv[v * stride + e] = pwv[v * stride + e - 1] * v % p
        if v:
            inv[v] = pow(int(v), -1, int(p))
    return pw, inv


def fp_scan(const i64[:] co, const i64[:, :] ex, const i64[:] st,
            const i64[:] jco, const i64[:, :] jex, const i64[:] jst,
            int s, i64 p, int maxdeg, bint units_only, bint need_jac,
            Py_ssize_t limit, bint stop_at_limit):
    cdef int R = st.shape[0] - 1
    cdef int stride = maxdeg + 1
    pw_arr, inv_arr = _tables(p, maxdeg)
    cdef i64[:] pwv = pw_arr
    cdef i64[:] invv = inv_arr
    cdef const i64* pw = &pwv[0]
    cdef const i64* inv = &invv[0]
    found = np.zeros((max(limit, 0), s), dtype=np.int64)
    cdef i64[:, :] fv = found
    cdef i64 start = 1 if units_only else 0
    cdef i64* x = <i64*> malloc((s + 1) * sizeof(i64))
    cdef i64* m = <i64*> malloc((R * s + 1) * sizeof(i64))
    cdef i64 total = 0, unit_total = 0, ns_total = 0
    cdef Py_ssize_t nfound = 0
    cdef bint complete = True
    cdef bint zero, unit
    cdef int i, j
    if start >= p and s > 0:
        free(x); free(m)
        return 0, 0, 0, found[:0], True
    with nogil:
        for j in range(s):
            x[j] = start
        while True:
            zero = True
            for i in range(R):
                if _eval_mod(co, ex, st[i], st[i + 1], x, pw, stride, s, p) != 0:
                    zero = False
                    break
            if zero:
                total += 1
                unit = True
                for j in range(s):
                    if x[j] == 0:
                        unit = False
                        break
                if unit:
                    unit_total += 1
                    if need_jac:
                        _fill_jac(jco, jex, jst, R, s, x, pw, stride, p, m)
                        if _rank_mod(m, R, s, p, inv) == R:
                            ns_total += 1
                            if nfound < limit:
                                for j in range(s):
                                    fv[nfound, j] = x[j]
                                nfound += 1
                            if stop_at_limit and nfound >= limit:
                                complete = False
                                break
            j = s - 1
            while j >= 0:
                x[j] += 1
                if x[j] < p:
                    break
                x[j] = start
                j -= 1
            if j < 0:
                break
    free(x)
    free(m)
    return total, unit_total, ns_total, found[:nfound], complete


def fp_deficient(const i64[:] jco, const i64[:, :] jex, const i64[:] jst,
                 int nrows, int s, i64 p, int maxdeg):
    cdef int stride = maxdeg + 1
    pw_arr, inv_arr = _tables(p, maxdeg)
    cdef i64[:] pwv = pw_arr
    cdef i64[:] invv = inv_arr
    cdef const i64* pw = &pwv[0]
    cdef const i64* inv = &invv[0]
    cdef i64* x = <i64*> malloc((s + 1) * sizeof(i64))
    cdef i64* m = <i64*> malloc((nrows * s + 1) * sizeof(i64))
    cdef i64 count = 0
    cdef int j
    with nogil:
        for j in range(s):
            x[j] = 0
        while True:
            _fill_jac(jco, jex, jst, nrows, s, x, pw, stride, p, m)
            if _rank_mod(m, nrows, s, p, inv) < nrows:
                count += 1
            j = s - 1
            while j >= 0:
                x[j] += 1
                if x[j] < p:
                    break
                x[j] = 0
                j -= 1
            if j < 0:
                break
    free(x)
    free(m)
    return count


def fp_value_counts(const i64[:] co, const i64[:, :] ex, int s, i64 p, int maxdeg):
    cdef int stride = maxdeg + 1
    pw_arr, _ = _tables(p, maxdeg)
    cdef i64[:] pwv = pw_arr
    cdef const i64* pw = &pwv[0]
    counts = np.zeros(p, dtype=np.int64)
    cdef i64[:] cv = counts
    cdef i64* x = <i64*> malloc((s + 1) * sizeof(i64))
    cdef Py_ssize_t nterms = co.shape[0]
    cdef int j
    with nogil:
        for j in range(s):
            x[j] = 0
        while True:
            cv[_eval_mod(co, ex, 0, nterms, x, pw, stride, s, p)] += 1
            j = s - 1
            while j >= 0:
                x[j] += 1
                if x[j] < p:
                    break
                x[j] = 0
                j -= 1
            if j < 0:
                break
    free(x)
    return counts


def box_count(const i64[:] vals, const double[:] wts, const i64[:] vst,
              const i64[:] co, const i64[:, :] ex, const i64[:] st, int skip,
              bint has_solve, const i64[:] gco, const i64[:, :] gex,
              const i64[:] hco, const i64[:, :] hex_, const double[:] last_w,
              i64 N, Py_ssize_t limit, bint exact=False):
    if exact:
        raise ValueError("the compiled kernel only handles int64-safe inputs")
    cdef int s = ex.shape[1]
    cdef int m = vst.shape[0] - 1
    cdef int R = st.shape[0] - 1
    samples = np.zeros((max(limit, 0), s), dtype=np.int64)
    cdef i64[:, :] sv = samples
    cdef int j, i
    for j in range(m):
        if vst[j + 1] == vst[j]:
            return 0, 0.0, samples[:0]
    cdef i64* x = <i64*> malloc((s + 1) * sizeof(i64))
    cdef Py_ssize_t* idx = <Py_ssize_t*> malloc((m + 1) * sizeof(Py_ssize_t))
    cdef i64 count = 0
    cdef double wsum = 0.0
    cdef double w, lw
    cdef Py_ssize_t nsamp = 0
    cdef i64 g, h, v, lo, hi
    cdef bint ok
    with nogil:
        for j in range(m):
            idx[j] = 0
        for j in range(s):
            x[j] = 0
        while True:
            w = 1.0
            for j in range(m):
                x[j] = vals[vst[j] + idx[j]]
                w *= wts[vst[j] + idx[j]]
            if not has_solve:
                ok = True
                for i in range(R):
                    if _eval_int(co, ex, st[i], st[i + 1], x, s) != 0:
                        ok = False
                        break
                if ok:
                    count += 1
                    wsum += w
                    if nsamp < limit:
                        for j in range(s):
                            sv[nsamp, j] = x[j]
                        nsamp += 1
            else:
                x[s - 1] = 0
                g = _eval_int(gco, gex, 0, gco.shape[0], x, s)
                h = _eval_int(hco, hex_, 0, hco.shape[0], x, s)
                lo = 1
                hi = 0
                if g != 0:
                    if h % g == 0:
                        v = -(h / g)
                        if -N <= v <= N and last_w[v + N] >= 0:
                            lo = v
                            hi = v
                elif h == 0:
                    lo = -N
                    hi = N
                v = lo
                while v <= hi:
                    lw = last_w[v + N]
                    if lw >= 0:
                        x[s - 1] = v
                        ok = True
                        for i in range(R):
                            if i != skip and _eval_int(co, ex, st[i], st[i + 1], x, s) != 0:
                                ok = False
                                break
                        if ok:
                            count += 1
                            wsum += w * lw
                            if nsamp < limit:
                                for j in range(s):
                                    sv[nsamp, j] = x[j]
                                nsamp += 1
                    v += 1
            j = m - 1
            while j >= 0:
                idx[j] += 1
                if idx[j] < vst[j + 1] - vst[j]:
                    break
                idx[j] = 0
                j -= 1
            if j < 0:
                break
    free(x)
    free(idx)
    return count, wsum, samples[:nsamp]
