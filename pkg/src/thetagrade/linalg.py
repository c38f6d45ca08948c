"""Dense exact linear algebra over F_p on top of the mod-p kernels.

Matrices are int64 numpy arrays reduced into [0, p).  Univariate
polynomials appear as python int lists, lowest degree first, with no
trailing zeros.
"""

from __future__ import annotations

from math import gcd, lcm

import numpy as np

from . import kernels


def mod(a, p):
    return np.asarray(a, dtype=np.int64) % p


def zeros(r, c=None):
    return np.zeros((r, r if c is None else c), dtype=np.int64)


def eye(n):
    return np.eye(n, dtype=np.int64)


def matmul(a, b, p):
    return kernels.matmul(mod(a, p), mod(b, p), p)


def matpow(a, e, p):
    return kernels.matpow(mod(a, p), e, p)


def bracket(a, b, p):
    return (kernels.matmul(a, b, p) - kernels.matmul(b, a, p)) % p


def rref(a, p):
    return kernels.rref(a, p)


def rank(a, p) -> int:
    if a.size == 0:
        return 0
    return len(kernels.rref(a, p)[1])


def row_space(a, p):
    """Canonical reduced-echelon basis of the row space (zero rows dropped)."""
    R, piv = kernels.rref(a, p)
    return R[: len(piv)]


def kernel_basis(a, p):
    """Reduced-echelon basis of the right null space of a.

    Deterministic: built from the lexicographic RREF, then re-echelonized
    so the output is the canonical reduced basis of the kernel.
    """
    a = mod(a, p)
    rows, cols = a.shape
    R, piv = kernels.rref(a, p)
    pivset = set(piv)
    free = [c for c in range(cols) if c not in pivset]
    if not free:
        return np.zeros((0, cols), dtype=np.int64)
    basis = np.zeros((len(free), cols), dtype=np.int64)
    for k, c in enumerate(free):
        basis[k, c] = 1
        for r, pc in enumerate(piv):
            basis[k, pc] = (-R[r, c]) % p
    return row_space(basis, p)


def solve(a, b, p):
    """One solution x of a @ x = b, or None if inconsistent."""
    a = mod(a, p)
    b = mod(b, p).reshape(-1)
    rows, cols = a.shape
    aug = np.concatenate([a, b.reshape(-1, 1)], axis=1)
    R, piv = kernels.rref(aug, p)
    if cols in piv:
        return None
    x = np.zeros(cols, dtype=np.int64)
    for r, c in enumerate(piv):
        x[c] = R[r, cols]
    return x


def in_row_space(v, basis, p) -> bool:
    """Membership of v in the row space spanned by basis (echelon or not)."""
    if basis.shape[0] == 0:
        return not np.any(mod(v, p))
    stacked = np.vstack([basis, v.reshape(1, -1)])
    return rank(stacked, p) == rank(basis, p)


def same_row_space(a, b, p) -> bool:
    return np.array_equal(row_space(a, p), row_space(b, p))


def intersect_row_spaces(a, b, p):
    """Canonical basis of rowspace(a) & rowspace(b) (kernel trick)."""
    a = row_space(a, p)
    b = row_space(b, p)
    if a.shape[0] == 0 or b.shape[0] == 0:
        return np.zeros((0, a.shape[1] if a.size else b.shape[1]), dtype=np.int64)
    stacked = np.vstack([a, b])
    ker = kernel_basis(stacked.T, p)  # coefficient vectors (u, v) with u*a = -v*b... sign folded below
    out = (ker[:, : a.shape[0]] @ a) % p
    return row_space(out, p)


# ---------------------------------------------------------------------------
# univariate polynomials over F_p, coefficient lists lowest degree first


def pol_trim(f):
    while f and f[-1] == 0:
        f.pop()
    return f


def pol_deg(f):
    return len(f) - 1


def pol_add(f, g, p):
    n = max(len(f), len(g))
    out = [0] * n
    for i, c in enumerate(f):
        out[i] = c
    for i, c in enumerate(g):
        out[i] = (out[i] + c) % p
    return pol_trim(out)


def pol_scale(f, s, p):
    return pol_trim([c * s % p for c in f])


def pol_mul(f, g, p):
    if not f or not g:
        return []
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                out[i + j] = (out[i + j] + a * b) % p
    return pol_trim(out)


def pol_divmod(f, g, p):
    f = list(f)
    if not g:
        raise ZeroDivisionError("polynomial division by zero")
    dg = len(g) - 1
    inv_lead = pow(g[-1], p - 2, p)
    q = [0] * max(0, len(f) - dg)
    while len(f) - 1 >= dg and f:
        c = f[-1] * inv_lead % p
        d = len(f) - 1 - dg
        q[d] = c
        for i, b in enumerate(g):
            f[d + i] = (f[d + i] - c * b) % p
        pol_trim(f)
        if not f:
            break
    return pol_trim(q), f


def pol_gcd(f, g, p):
    f, g = list(f), list(g)
    while g:
        f, g = g, pol_divmod(f, g, p)[1]
    if f:
        f = pol_scale(f, pow(f[-1], p - 2, p), p)  # monic
    return f


def pol_lcm(f, g, p):
    if not f or not g:
        return []
    d = pol_gcd(f, g, p)
    q, r = pol_divmod(pol_mul(f, g, p), d, p)
    assert not r
    return pol_scale(q, pow(q[-1], p - 2, p), p)


def pol_deriv(f, p):
    return pol_trim([i * c % p for i, c in enumerate(f)][1:])


def pol_eval(f, x, p):
    acc = 0
    for c in reversed(f):
        acc = (acc * x + c) % p
    return acc


def pol_eval_matrix(f, a, p):
    """f(a) for a square matrix a (Horner)."""
    n = a.shape[0]
    acc = zeros(n)
    for c in reversed(f):
        acc = kernels.matmul(acc, a, p)
        acc = (acc + c * eye(n)) % p
    return acc


def pol_squarefree_part(f, p):
    d = pol_gcd(f, pol_deriv(f, p), p)
    q, r = pol_divmod(f, d, p)
    assert not r
    return pol_scale(q, pow(q[-1], p - 2, p), p)


def pol_powmod(base, e, mod_poly, p):
    """base**e mod mod_poly in F_p[x]."""
    result = [1]
    base = pol_divmod(base, mod_poly, p)[1]
    e = int(e)
    while e:
        if e & 1:
            result = pol_divmod(pol_mul(result, base, p), mod_poly, p)[1]
        base = pol_divmod(pol_mul(base, base, p), mod_poly, p)[1]
        e >>= 1
    return result


def pol_factor_degrees(f, p):
    """Multiset of degrees of the distinct irreducible factors of
    squarefree f (distinct-degree factorization, degrees only)."""
    f = pol_scale(f, pow(f[-1], p - 2, p), p)
    degrees = []
    d = 1
    h = [0, 1]  # x
    while len(f) - 1 >= 2 * d:
        h = pol_powmod(h, p, f, p)
        g = pol_gcd(pol_add(h, [0, p - 1], p), f, p)
        if len(g) > 1:
            degrees.extend([d] * ((len(g) - 1) // d))
            f = pol_divmod(f, g, p)[0]
            h = pol_divmod(h, f, p)[1]
        d += 1
    if len(f) > 1:
        degrees.append(len(f) - 1)
    return degrees


# ---------------------------------------------------------------------------
# spectral operations on square matrices


def char_poly(a, p):
    """Characteristic polynomial, coefficient list lowest degree first."""
    c = kernels.charpoly(mod(a, p), p)  # monic, highest first
    return pol_trim([int(x) for x in c[::-1]])


def min_poly(a, p):
    """Minimal polynomial via per-vector Krylov annihilators, lcm'd."""
    a = mod(a, p)
    n = a.shape[0]
    out = [1]
    for start in range(n):
        v = np.zeros(n, dtype=np.int64)
        v[start] = 1
        krylov = [v]
        cur = v
        while True:
            cur = (a @ cur) % p
            stacked = np.vstack(krylov + [cur])
            R, piv = kernels.rref(stacked.T, p)
            if len(piv) < stacked.shape[0]:
                coeffs = solve(np.vstack(krylov).T, cur, p)
                local = [(-int(c)) % p for c in coeffs] + [1]
                out = pol_lcm(out, local, p)
                break
            krylov.append(cur)
        if pol_deg(out) == n:
            break
    return out


def is_semisimple(a, p) -> bool:
    """Squarefree minimal polynomial, i.e. gcd(mu, mu') = 1."""
    mu = min_poly(a, p)
    return pol_deg(pol_gcd(mu, pol_deriv(mu, p), p)) == 0


def is_nilpotent(a, p) -> bool:
    n = a.shape[0]
    return not np.any(matpow(a, n, p))


def semisimple_part(a, p):
    """Jordan-Chevalley semisimple part by Newton iteration on the
    squarefree part of the minimal polynomial (exact; the iteration
    lives in F_p[a])."""
    a = mod(a, p)
    mu = min_poly(a, p)
    sf = pol_squarefree_part(mu, p)
    if pol_deg(sf) == pol_deg(mu):
        return a.copy()
    n = a.shape[0]
    y = a.copy()
    dsf = pol_deriv(sf, p)
    steps = 0
    while True:
        val = pol_eval_matrix(sf, y, p)
        if not np.any(val):
            return y
        deriv = pol_eval_matrix(dsf, y, p)
        inv = invert(deriv, p)
        y = (y - kernels.matmul(val, inv, p)) % p
        steps += 1
        if steps > n.bit_length() + 2:
            raise ArithmeticError("Jordan-Chevalley iteration failed to converge")


def nilpotent_part(a, p):
    return (mod(a, p) - semisimple_part(a, p)) % p


def invert(a, p):
    n = a.shape[0]
    aug = np.concatenate([mod(a, p), eye(n)], axis=1)
    R, piv = kernels.rref(aug, p)
    if piv[:n] != list(range(n)):
        raise ZeroDivisionError("matrix not invertible")
    return R[:, n:]


def multiplicative_order_matrix(a, p, cap):
    """Exact order of a as an invertible matrix, or None past cap."""
    n = a.shape[0]
    cur = mod(a, p)
    for k in range(1, cap + 1):
        if np.array_equal(cur, eye(n)):
            return k
        cur = kernels.matmul(cur, mod(a, p), p)
    return None
