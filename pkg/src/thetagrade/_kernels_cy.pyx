# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled mod-p matrix kernels.

Same contracts as _kernels_py; selected at import by thetagrade.kernels.
Entries are int64 reduced into [0, p); p is a small odd prime, so all
intermediate products fit int64.
"""

import numpy as np

BACKEND = "cython"


cdef long long _invmod(long long a, long long p):
    # Fermat inverse; p prime, a != 0 mod p.
    cdef long long result = 1
    cdef long long base = a % p
    cdef long long e = p - 2
    while e:
        if e & 1:
            result = (result * base) % p
        base = (base * base) % p
        e >>= 1
    return result


def matmul(a, b, long long p):
    cdef long long[:, :] av = np.ascontiguousarray(a, dtype=np.int64)
    cdef long long[:, :] bv = np.ascontiguousarray(b, dtype=np.int64)
    cdef Py_ssize_t n = av.shape[0], k = av.shape[1], m = bv.shape[1]
    out = np.zeros((n, m), dtype=np.int64)
    cdef long long[:, :] ov = out
    cdef Py_ssize_t i, j, l
    cdef long long acc
    for i in range(n):
        for j in range(m):
            acc = 0
            for l in range(k):
                acc += av[i, l] * bv[l, j] % p
            ov[i, j] = acc % p
    return out


def matpow(a, e, long long p):
    cdef Py_ssize_t n = a.shape[0]
    out = np.eye(n, dtype=np.int64)
    base = np.asarray(a, dtype=np.int64) % p
    e = int(e)
    while e:
        if e & 1:
            out = matmul(out, base, p)
        base = matmul(base, base, p)
        e >>= 1
    return out


def rref(a, long long p):
    R = (np.asarray(a, dtype=np.int64) % p).copy()
    cdef long long[:, :] rv = R
    cdef Py_ssize_t rows = rv.shape[0], cols = rv.shape[1]
    cdef Py_ssize_t r = 0, c, i, j, pr
    cdef long long inv, factor
    pivots = []
    for c in range(cols):
        if r == rows:
            break
        pr = -1
        for i in range(r, rows):
            if rv[i, c]:
                pr = i
                break
        if pr < 0:
            continue
        if pr != r:
            for j in range(cols):
                rv[r, j], rv[pr, j] = rv[pr, j], rv[r, j]
        inv = _invmod(rv[r, c], p)
        for j in range(cols):
            rv[r, j] = (rv[r, j] * inv) % p
        for i in range(rows):
            if i != r and rv[i, c]:
                factor = rv[i, c]
                for j in range(cols):
                    rv[i, j] = (rv[i, j] - factor * rv[r, j]) % p
                    if rv[i, j] < 0:
                        rv[i, j] += p
        pivots.append(c)
        r += 1
    return R, pivots


def charpoly(a, long long p):
    cdef long long[:, :] av = np.ascontiguousarray(np.asarray(a, dtype=np.int64) % p)
    cdef Py_ssize_t n = av.shape[0]
    coeffs = np.zeros(n + 1, dtype=np.int64)
    cdef long long[:] cv = coeffs
    cv[0] = 1
    M = np.eye(n, dtype=np.int64)
    cdef long long[:, :] mv = M
    scratch = np.zeros((n, n), dtype=np.int64)
    cdef long long[:, :] sv = scratch
    cdef Py_ssize_t i, j, l, k
    cdef long long acc, tr, c
    for k in range(1, n + 1):
        for i in range(n):
            for j in range(n):
                acc = 0
                for l in range(n):
                    acc += av[i, l] * mv[l, j] % p
                sv[i, j] = acc % p
        tr = 0
        for i in range(n):
            tr += sv[i, i]
        c = (-_invmod(k, p) * (tr % p)) % p
        if c < 0:
            c += p
        cv[k] = c
        for i in range(n):
            for j in range(n):
                mv[i, j] = sv[i, j]
            mv[i, i] = (mv[i, i] + c) % p
    return coeffs
