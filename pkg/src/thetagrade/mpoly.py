"""Sparse multivariate polynomials with coefficients in F_p.

Terms are stored as a dict mapping exponent tuples to nonzero
coefficients.  Degrees stay below p throughout the package (the field
is chosen with p larger than every invariant degree), so formal
derivatives are faithful.
"""

from __future__ import annotations

import numpy as np

from .linalg import pol_divmod, pol_mul, pol_trim


class MPoly:
    __slots__ = ("nvars", "p", "terms")

    def __init__(self, nvars, p, terms=None):
        self.nvars = nvars
        self.p = p
        self.terms = {}
        if terms:
            for e, c in terms.items():
                c %= p
                if c:
                    if len(e) != nvars:
                        raise ValueError("exponent vector has wrong length")
                    self.terms[tuple(e)] = c

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, nvars, p):
        return cls(nvars, p)

    @classmethod
    def const(cls, value, nvars, p):
        return cls(nvars, p, {(0,) * nvars: value % p})

    @classmethod
    def var(cls, i, nvars, p):
        e = [0] * nvars
        e[i] = 1
        return cls(nvars, p, {tuple(e): 1})

    # -- predicates ---------------------------------------------------

    def is_zero(self):
        return not self.terms

    def degree(self):
        """Total degree; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def __eq__(self, other):
        return (
            isinstance(other, MPoly)
            and self.nvars == other.nvars
            and self.p == other.p
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.nvars, self.p, frozenset(self.terms.items())))

    # -- arithmetic ---------------------------------------------------

    def _like(self, terms):
        out = MPoly(self.nvars, self.p)
        out.terms = terms
        return out

    def __add__(self, other):
        p = self.p
        terms = dict(self.terms)
        for e, c in other.terms.items():
            v = (terms.get(e, 0) + c) % p
            if v:
                terms[e] = v
            else:
                terms.pop(e, None)
        return self._like(terms)

    def __sub__(self, other):
        return self + other.scale(-1)

    def __mul__(self, other):
        p = self.p
        terms = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                v = (terms.get(e, 0) + c1 * c2) % p
                if v:
                    terms[e] = v
                else:
                    terms.pop(e, None)
        return self._like(terms)

    def scale(self, s):
        s %= self.p
        if s == 0:
            return MPoly(self.nvars, self.p)
        return self._like({e: c * s % self.p for e, c in self.terms.items()})

    def pow(self, k):
        out = MPoly.const(1, self.nvars, self.p)
        for _ in range(k):
            out = out * self
        return out

    # -- calculus and evaluation ---------------------------------------

    def partial(self, i):
        if not 0 <= i < self.nvars:
            raise IndexError(f"variable index {i} out of range")
        terms = {}
        for e, c in self.terms.items():
            if e[i]:
                e2 = list(e)
                e2[i] -= 1
                v = c * e[i] % self.p
                if v:
                    terms[tuple(e2)] = v
        return self._like(terms)

    def evaluate(self, point):
        if len(point) != self.nvars:
            raise ValueError("point has wrong length")
        p = self.p
        acc = 0
        for e, c in self.terms.items():
            t = c
            for x, k in zip(point, e):
                if k:
                    t = t * pow(int(x) % p, k, p) % p
            acc = (acc + t) % p
        return acc

    def compose_linear(self, mat):
        """Substitute x_i -> sum_j mat[i][j] x_j (mat acts on the
        variables; entries in F_p)."""
        p = self.p
        images = []
        for i in range(self.nvars):
            t = {}
            for j in range(self.nvars):
                c = int(mat[i][j]) % p
                if c:
                    e = [0] * self.nvars
                    e[j] = 1
                    t[tuple(e)] = c
            images.append(self._like(t))
        out = MPoly(self.nvars, p)
        for e, c in self.terms.items():
            term = MPoly.const(c, self.nvars, p)
            for i, k in enumerate(e):
                for _ in range(k):
                    term = term * images[i]
            out = out + term
        return out

    def __repr__(self):
        if not self.terms:
            return "0"
        bits = []
        for e in sorted(self.terms, key=lambda t: (sum(t), t), reverse=True):
            c = self.terms[e]
            mono = "*".join(f"x{i}^{k}" if k > 1 else f"x{i}" for i, k in enumerate(e) if k)
            bits.append(f"{c}*{mono}" if mono else f"{c}")
        return " + ".join(bits)


def jacobian_at(polys, point, p):
    """Matrix of partial derivatives of the given polynomials at a point."""
    if not polys:
        return np.zeros((0, 0), dtype=np.int64)
    n = polys[0].nvars
    out = np.zeros((len(polys), n), dtype=np.int64)
    for i, f in enumerate(polys):
        for j in range(n):
            out[i, j] = f.partial(j).evaluate(point)
    return out


def directional_derivative_by_interpolation(f, x, v, p):
    """Derivative of t -> f(x + t v) at t = 0, recovered exactly by
    Lagrange interpolation from deg(f)+1 sample values.  Independent
    of the formal-derivative code path; used as its oracle."""
    d = max(f.degree(), 1)
    ts = list(range(1, d + 2))
    # g(t) = f(x + t v) has degree <= d; interpolate and read the linear coefficient.
    vals = [f.evaluate([(a + t * b) % p for a, b in zip(x, v)]) for t in ts]
    coeff = 0
    for i, ti in enumerate(ts):
        num, den = 1, 1
        lin = 0
        # product over j != i of (t - tj)/(ti - tj); we need the t^1 coefficient
        # of the full Lagrange basis times value, assembled via polynomial math.
        basis = [1]
        for j, tj in enumerate(ts):
            if j == i:
                continue
            basis = pol_mul(basis, [(-tj) % p, 1], p)
            den = den * (ti - tj) % p
        inv_den = pow(den % p, p - 2, p)
        if len(basis) > 1:
            lin = basis[1] * inv_den % p
        coeff = (coeff + vals[i] * lin) % p
    return coeff


# ---------------------------------------------------------------------------
# symbolic matrices over MPoly


def poly_matrix_mul(a, b, p):
    n, k, m = len(a), len(b), len(b[0])
    nvars = a[0][0].nvars
    out = [[MPoly.zero(nvars, p) for _ in range(m)] for _ in range(n)]
    for i in range(n):
        for j in range(m):
            acc = MPoly.zero(nvars, p)
            for l in range(k):
                if not a[i][l].is_zero() and not b[l][j].is_zero():
                    acc = acc + a[i][l] * b[l][j]
            out[i][j] = acc
    return out


def charpoly_symbolic(mat, p):
    """Coefficients [c_1, ..., c_n] of the characteristic polynomial
    x^n + c_1 x^(n-1) + ... + c_n of a matrix of MPoly entries
    (Faddeev-LeVerrier; needs p > n)."""
    n = len(mat)
    nvars = mat[0][0].nvars
    M = [[MPoly.const(1 if i == j else 0, nvars, p) for j in range(n)] for i in range(n)]
    coeffs = []
    for k in range(1, n + 1):
        M = poly_matrix_mul(mat, M, p)
        tr = MPoly.zero(nvars, p)
        for i in range(n):
            tr = tr + M[i][i]
        ck = tr.scale(-pow(k, p - 2, p))
        coeffs.append(ck)
        for i in range(n):
            M[i][i] = M[i][i] + ck
    return coeffs


def pfaffian_symbolic(mat, p):
    """Pfaffian of a skew-symmetric matrix of MPoly entries, by
    expansion along the first row."""
    n = len(mat)
    nvars = mat[0][0].nvars
    if n == 0:
        return MPoly.const(1, nvars, p)
    if n % 2 == 1:
        return MPoly.zero(nvars, p)

    def rec(rows):
        if not rows:
            return MPoly.const(1, nvars, p)
        i = rows[0]
        acc = MPoly.zero(nvars, p)
        for idx in range(1, len(rows)):
            j = rows[idx]
            rest = [r for r in rows[1:] if r != j]
            sub = rec(rest)
            sign = 1 if idx % 2 == 1 else -1
            acc = acc + (mat[i][j] * sub).scale(sign)
        return acc

    return rec(list(range(n)))


def pfaffian_numeric(a, p):
    """Pfaffian of a skew-symmetric int matrix over F_p."""
    n = a.shape[0]
    if n % 2 == 1:
        return 0

    a = a % p

    def rec(rows):
        if not rows:
            return 1
        i = rows[0]
        acc = 0
        for idx in range(1, len(rows)):
            j = rows[idx]
            if a[i, j] == 0:
                continue
            rest = [r for r in rows[1:] if r != j]
            sign = 1 if idx % 2 == 1 else -1
            acc = (acc + sign * int(a[i, j]) * rec(rest)) % p
        return acc

    return rec(list(range(n)))


def cyclotomic_mod_p(d, F):
    """Phi_d(x) with integer coefficients reduced mod p, as a coefficient
    list lowest degree first.  Squarefree over F_p exactly when p does
    not divide d."""
    p = F.p
    if d % p == 0:
        raise ValueError(f"Phi_{d} has repeated roots mod {p}")
    f = [p - 1] + [0] * (d - 1) + [1]  # x^d - 1
    for e in range(1, d):
        if d % e == 0:
            g = cyclotomic_mod_p(e, F)
            f, r = pol_divmod(f, g, p)
            assert not r
    return pol_trim(f)
