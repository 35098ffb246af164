# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled enumeration kernel, same contract as ``_kernels_py.enumerate_prefix``.

Works in 64-bit integers; callers must route inputs whose power-sum bounds
could overflow to the pure-Python kernel (see ``kernels.fits_int64``).
"""

cdef inline long long _fdiv(long long a, long long b):
    cdef long long q = a / b
    if (a % b != 0) and ((a < 0) != (b < 0)):
        q -= 1
    return q


cdef inline long long _cdiv(long long a, long long b):
    return -_fdiv(-a, b)


def enumerate_prefix(int d, sum_bounds, coeff_bounds, prefix):
    cdef int K = len(sum_bounds)
    cdef long long c[64]
    cdef long long s[256]
    cdef long long sb[256]
    cdef long long cb[64]
    cdef long long lo[64]
    cdef long long hi[64]
    cdef long long tk[64]
    cdef int k, i, p, p2
    cdef long long t, ck, sk
    cdef long long nodes = 0
    cdef bint ok
    out = []
    if d > 63 or K > 255:
        raise ValueError("degree or horizon too large for the compiled kernel")
    for k in range(K):
        sb[k + 1] = sum_bounds[k]
    for k in range(d):
        cb[k + 1] = coeff_bounds[k]
    p = len(prefix)
    for k in range(1, p + 1):
        ck = prefix[k - 1]
        t = 0
        for i in range(1, k):
            t += c[i] * s[k - i]
        sk = -t - k * ck
        if ck > cb[k] or -ck > cb[k] or sk > sb[k] or -sk > sb[k]:
            return out, nodes
        c[k] = ck
        s[k] = sk
    if p == d:
        # leaf-only check
        ok = True
        for k in range(d + 1, K + 1):
            t = 0
            for i in range(1, d + 1):
                t += c[i] * s[k - i]
            if t > sb[k] or -t > sb[k]:
                ok = False
                break
            s[k] = -t
        if ok:
            out.append(tuple([c[i] for i in range(1, d + 1)]))
        return out, nodes

    # iterative depth-first search over levels p+1..d
    k = p + 1
    t = 0
    for i in range(1, k):
        t += c[i] * s[k - i]
    tk[k] = t
    lo[k] = max(-cb[k], _cdiv(-sb[k] - t, k))
    hi[k] = min(cb[k], _fdiv(sb[k] - t, k))
    c[k] = lo[k] - 1
    while k > p:
        c[k] += 1
        if c[k] > hi[k]:
            k -= 1
            continue
        nodes += 1
        s[k] = -tk[k] - k * c[k]
        if k == d:
            ok = True
            for i in range(d + 1, K + 1):
                t = 0
                for p2 in range(1, d + 1):
                    t += c[p2] * s[i - p2]
                if t > sb[i] or -t > sb[i]:
                    ok = False
                    break
                s[i] = -t
            if ok:
                out.append(tuple([c[i] for i in range(1, d + 1)]))
            continue
        k += 1
        t = 0
        for i in range(1, k):
            t += c[i] * s[k - i]
        tk[k] = t
        lo[k] = max(-cb[k], _cdiv(-sb[k] - t, k))
        hi[k] = min(cb[k], _fdiv(sb[k] - t, k))
        c[k] = lo[k] - 1
    return out, nodes
