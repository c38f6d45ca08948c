"""Pure numpy implementations of the exact mod-p matrix kernels.

All matrices are 2-d int64 arrays with entries reduced into [0, p).
Entries never exceed p**2 * ncols < 2**63 in intermediate products, so
int64 arithmetic is exact.
"""

import numpy as np

BACKEND = "python"


def matmul(a, b, p):
    return (a @ b) % p


def matpow(a, e, p):
    """a**e mod p by square-and-multiply; e is any non-negative int."""
    n = a.shape[0]
    out = np.eye(n, dtype=np.int64)
    base = np.asarray(a, dtype=np.int64) % p
    e = int(e)
    while e:
        if e & 1:
            out = (out @ base) % p
        base = (base @ base) % p
        e >>= 1
    return out


def rref(a, p):
    """Reduced row echelon form with lexicographic pivot choice.

    Returns (R, pivots) where pivots lists the pivot column of each
    nonzero row.  Deterministic: the first nonzero entry in scan order
    is always taken as pivot.
    """
    R = (np.asarray(a, dtype=np.int64) % p).copy()
    rows, cols = R.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        pr = -1
        for i in range(r, rows):
            if R[i, c]:
                pr = i
                break
        if pr < 0:
            continue
        if pr != r:
            R[[r, pr]] = R[[pr, r]]
        inv = pow(int(R[r, c]), p - 2, p)
        R[r] = (R[r] * inv) % p
        col = R[:, c].copy()
        col[r] = 0
        R -= np.outer(col, R[r])
        R %= p
        pivots.append(c)
        r += 1
    return R, pivots


def charpoly(a, p):
    """Characteristic polynomial of a, monic, highest degree first.

    Faddeev-LeVerrier recurrence; requires p > n so the divisions by
    1..n are invertible.
    """
    n = a.shape[0]
    a = np.asarray(a, dtype=np.int64) % p
    coeffs = np.zeros(n + 1, dtype=np.int64)
    coeffs[0] = 1
    M = np.eye(n, dtype=np.int64)
    eye = np.eye(n, dtype=np.int64)
    for k in range(1, n + 1):
        M = (a @ M) % p
        c = (-pow(k, p - 2, p) * int(np.trace(M))) % p
        coeffs[k] = c
        M = (M + c * eye) % p
    return coeffs
