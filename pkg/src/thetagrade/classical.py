"""Matrix realizations of the classical groups and their Lie algebras.

SO(N) is split, defined by the antidiagonal form; Sp(2n) by the
antidiagonal symplectic form [[0, J_n], [-J_n, 0]].  The diagonal
subgroup is then a maximal torus in every family, Weyl groups are
(signed) permutations of the torus coordinates, and their monomial
lifts can be written down entry by entry.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations, product

import numpy as np

from . import linalg
from .field import PrimeField

FAMILIES = ("SL", "GL", "SO_odd", "SO_even", "Sp")

WEYL_RANK_CAP_SIGNED = 7
WEYL_RANK_CAP_PLAIN = 8


class GroupError(ValueError):
    pass


@dataclass(frozen=True)
class GroupType:
    family: str
    n: int  # rank parameter (torus coordinates)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise GroupError(f"unknown family {self.family}")
        if self.n < 1:
            raise GroupError("rank must be positive")

    @property
    def N(self) -> int:
        if self.family in ("SL", "GL"):
            return self.n
        if self.family == "SO_odd":
            return 2 * self.n + 1
        return 2 * self.n

    @property
    def signed(self) -> bool:
        return self.family in ("SO_odd", "SO_even", "Sp")

    @property
    def rank(self) -> int:
        """Rank of the group (dimension of a maximal torus)."""
        if self.family == "SL":
            return self.n - 1
        return self.n

    @classmethod
    def from_name(cls, name: str, size: int) -> "GroupType":
        """GroupType from the usual group symbol, e.g. ("SO", 8) -> SO_even rank 4,
        ("Sp", 6) -> Sp rank 3, ("SL", 3) -> SL rank 3."""
        if name in ("SL", "GL"):
            if size < 2:
                raise GroupError(f"{name}({size}) too small")
            return cls(name, size)
        if name == "SO":
            if size < 3:
                raise GroupError(f"SO({size}) too small")
            if size % 2:
                return cls("SO_odd", size // 2)
            return cls("SO_even", size // 2)
        if name == "Sp":
            if size % 2 or size < 2:
                raise GroupError(f"Sp({size}) must have even size >= 2")
            return cls("Sp", size // 2)
        raise GroupError(f"unknown group name {name}")

    def __str__(self):
        base = {"SL": "SL", "GL": "GL", "SO_odd": "SO", "SO_even": "SO", "Sp": "Sp"}[self.family]
        return f"{base}({self.N})"


def form_matrix(gt: GroupType, p: int):
    """Gram matrix of the defining bilinear form, or None for SL/GL."""
    N = gt.N
    if gt.family in ("SL", "GL"):
        return None
    J = np.zeros((N, N), dtype=np.int64)
    if gt.family in ("SO_odd", "SO_even"):
        for i in range(N):
            J[i, N - 1 - i] = 1
    else:
        n = gt.n
        for i in range(n):
            J[i, N - 1 - i] = 1
            J[n + i, N - 1 - (n + i)] = p - 1
    return J


def in_group(gt: GroupType, g, p, allow_full_orthogonal=False) -> bool:
    """Exact membership test: form preservation plus the determinant
    condition.  allow_full_orthogonal admits O(2n) for SO_even."""
    g = linalg.mod(g, p)
    det = _det_mod(g, p)
    J = form_matrix(gt, p)
    if J is not None:
        if not np.array_equal(linalg.matmul(linalg.matmul(g, J, p), g.T % p, p), J):
            return False
    if gt.family == "GL":
        return det != 0
    if gt.family == "SO_even" and allow_full_orthogonal:
        return det in (1, p - 1)
    return det == 1


def _det_mod(a, p):
    a = linalg.mod(a, p)
    n = a.shape[0]
    det = 1
    a = a.copy()
    for c in range(n):
        pr = -1
        for r in range(c, n):
            if a[r, c]:
                pr = r
                break
        if pr < 0:
            return 0
        if pr != c:
            a[[c, pr]] = a[[pr, c]]
            det = -det
        det = det * int(a[c, c]) % p
        inv = pow(int(a[c, c]), p - 2, p)
        for r in range(c + 1, n):
            if a[r, c]:
                a[r] = (a[r] - int(a[r, c]) * inv % p * a[c]) % p
    return det % p


# ---------------------------------------------------------------------------
# algebra bases


@dataclass
class RootVector:
    """Basis root vector with leading matrix position (i, j), 0-indexed.
    The root acts on a diagonal h as h[i] - h[j]."""

    i: int
    j: int
    index: int  # position in the algebra basis


class ClassicalAlgebra:
    """Ordered basis of the Lie algebra together with coordinate charts,
    the diagonal torus, and the root vectors it determines."""

    def __init__(self, gt: GroupType, F: PrimeField):
        self.gt = gt
        self.F = F
        self.p = F.p
        self.J = form_matrix(gt, F.p)
        self.basis = []
        self.roots = []
        self.torus_indices = []
        self._build()
        self.dim = len(self.basis)
        self._prepare_coords()

    # -- construction ---------------------------------------------------

    def _build(self):
        gt, p = self.gt, self.p
        N = gt.N
        if gt.family in ("SL", "GL"):
            for i in range(N):
                for j in range(N):
                    if i != j:
                        e = np.zeros((N, N), dtype=np.int64)
                        e[i, j] = 1
                        self.roots.append(RootVector(i, j, len(self.basis)))
                        self.basis.append(e)
            if gt.family == "SL":
                for i in range(N - 1):
                    h = np.zeros((N, N), dtype=np.int64)
                    h[i, i] = 1
                    h[i + 1, i + 1] = p - 1
                    self.torus_indices.append(len(self.basis))
                    self.basis.append(h)
            else:
                for i in range(N):
                    h = np.zeros((N, N), dtype=np.int64)
                    h[i, i] = 1
                    self.torus_indices.append(len(self.basis))
                    self.basis.append(h)
            return

        s = lambda i: N - 1 - i  # mirror slot
        sp = gt.family == "Sp"
        eps = lambda i: 1 if i < gt.n else -1
        for i in range(N):
            for j in range(N):
                if i == j:
                    continue
                mi, mj = s(j), s(i)
                if (mi, mj) == (i, j):
                    # antidiagonal position: forced zero for SO, free for Sp
                    if sp:
                        e = np.zeros((N, N), dtype=np.int64)
                        e[i, j] = 1
                        self.roots.append(RootVector(i, j, len(self.basis)))
                        self.basis.append(e)
                    continue
                if (mi, mj) < (i, j):
                    continue  # mirror partner already emitted
                e = np.zeros((N, N), dtype=np.int64)
                e[i, j] = 1
                coeff = -(eps(i) * eps(j)) if sp else -1
                e[mi, mj] = coeff % p
                self.roots.append(RootVector(i, j, len(self.basis)))
                self.basis.append(e)
        for i in range(gt.n):
            h = np.zeros((N, N), dtype=np.int64)
            h[i, i] = 1
            h[s(i), s(i)] = p - 1
            self.torus_indices.append(len(self.basis))
            self.basis.append(h)

    def _prepare_coords(self):
        N2 = self.gt.N ** 2
        B = np.stack([b.reshape(-1) for b in self.basis]).T  # N^2 x dim
        aug = np.concatenate([B, linalg.eye(N2)], axis=1)
        R, piv = linalg.rref(aug, self.p)
        if piv[: self.dim] != list(range(self.dim)):
            raise GroupError("basis is not linearly independent")
        self._coord_map = R[: self.dim, self.dim :]
        self._residual_map = R[self.dim :, self.dim :]
        self._pivot_rows = None

    # -- charts ----------------------------------------------------------

    def coords(self, X):
        """Coordinates of X in the basis; raises if X is outside the algebra."""
        v = self.try_coords(X)
        if v is None:
            raise GroupError("matrix is not in the algebra")
        return v

    def try_coords(self, X):
        v = linalg.mod(X, self.p).reshape(-1)
        residual = (self._residual_map @ v) % self.p
        if np.any(residual):
            return None
        return (self._coord_map @ v) % self.p

    def contains(self, X) -> bool:
        return self.try_coords(X) is not None

    def from_coords(self, v):
        N = self.gt.N
        out = np.zeros((N, N), dtype=np.int64)
        for c, b in zip(v, self.basis):
            if c:
                out = (out + int(c) * b) % self.p
        return out

    def bracket(self, X, Y):
        return linalg.bracket(X, Y, self.p)

    def torus_element(self, h):
        """Diagonal algebra element from n torus parameters."""
        gt, p = self.gt, self.p
        N = gt.N
        out = np.zeros((N, N), dtype=np.int64)
        if gt.family == "GL":
            for i, c in enumerate(h):
                out[i, i] = c % p
        elif gt.family == "SL":
            if len(h) != N or sum(h) % p:
                raise GroupError("SL torus element needs a traceless diagonal")
            for i, c in enumerate(h):
                out[i, i] = c % p
        else:
            for i, c in enumerate(h):
                out[i, i] = c % p
                out[N - 1 - i, N - 1 - i] = (-c) % p
        return out

    def torus_subspace(self):
        """Echelon coordinate basis of the diagonal torus subalgebra."""
        rows = np.zeros((len(self.torus_indices), self.dim), dtype=np.int64)
        for k, idx in enumerate(self.torus_indices):
            rows[k, idx] = 1
        return rows

    def root_index_at(self, i, j):
        for rv in self.roots:
            if (rv.i, rv.j) == (i, j):
                return rv.index
        return None

    def opposite_root(self, rv: RootVector):
        idx = self.root_index_at(rv.j, rv.i)
        if idx is None:
            # paired basis: the opposite leading position may be the mirror
            N = self.gt.N
            idx = self.root_index_at(N - 1 - rv.i, N - 1 - rv.j)
        for other in self.roots:
            if other.index == idx:
                return other
        raise GroupError("opposite root not found")


def build_algebra(gt: GroupType, F: PrimeField) -> ClassicalAlgebra:
    if gt.N > 16:
        raise GroupError("matrix size capped at 16")
    return ClassicalAlgebra(gt, F)


def expected_dim(gt: GroupType) -> int:
    n = gt.n
    return {
        "SL": n * n - 1,
        "GL": n * n,
        "SO_odd": n * (2 * n + 1),
        "Sp": n * (2 * n + 1),
        "SO_even": 2 * n * n - n,
    }[gt.family]


def trace_form(X, Y, p) -> int:
    return int(np.trace(linalg.matmul(X, Y, p))) % p


def trace_form_gram(alg: ClassicalAlgebra):
    d = alg.dim
    G = np.zeros((d, d), dtype=np.int64)
    for i in range(d):
        for j in range(i, d):
            v = trace_form(alg.basis[i], alg.basis[j], alg.p)
            G[i, j] = v
            G[j, i] = v
    return G


def nondegeneracy_check(alg: ClassicalAlgebra) -> bool:
    return linalg.rank(trace_form_gram(alg), alg.p) == alg.dim


def center_elements(gt: GroupType, F: PrimeField):
    """Scalar matrices in the group."""
    p, N = F.p, gt.N
    if gt.family == "SL":
        out = []
        for k in range(p - 1):
            w = pow(F.generator, k, p)
            if pow(w, N, p) == 1:
                out.append(w * linalg.eye(N) % p)
        return out
    if gt.family == "GL":
        return [pow(F.generator, k, p) * linalg.eye(N) % p for k in range(p - 1)]
    if gt.family == "SO_odd":
        return [linalg.eye(N)]
    return [linalg.eye(N), (p - 1) * linalg.eye(N) % p]


# ---------------------------------------------------------------------------
# Weyl groups as (signed) permutations


class WeylElement:
    """Signed permutation of 1..n: images[i-1] = w(i), negative for a sign
    flip.  Plain permutations have all images positive."""

    __slots__ = ("images",)

    def __init__(self, images):
        self.images = tuple(images)

    @property
    def n(self):
        return len(self.images)

    def __call__(self, i: int) -> int:
        """Image of i, for i in -n..-1, 1..n."""
        if i > 0:
            return self.images[i - 1]
        return -self.images[-i - 1]

    def compose(self, other: "WeylElement") -> "WeylElement":
        """self after other: (self*other)(i) = self(other(i))."""
        return WeylElement(tuple(self(other(i)) for i in range(1, self.n + 1)))

    def inverse(self) -> "WeylElement":
        img = [0] * self.n
        for i in range(1, self.n + 1):
            j = self.images[i - 1]
            if j > 0:
                img[j - 1] = i
            else:
                img[-j - 1] = -i
        return WeylElement(tuple(img))

    def is_identity(self) -> bool:
        return self.images == tuple(range(1, self.n + 1))

    def order(self) -> int:
        w = self
        k = 1
        while not w.is_identity():
            w = w.compose(self)
            k += 1
            if k > 4 ** self.n:
                raise GroupError("order computation ran away")
        return k

    def flip_count(self) -> int:
        return sum(1 for v in self.images if v < 0)

    def is_plain(self) -> bool:
        return all(v > 0 for v in self.images)

    def signed_cycles(self):
        """List of (cycle tuple of coordinates, sign) with sign the product
        of the flips met around the cycle."""
        seen = set()
        out = []
        for start in range(1, self.n + 1):
            if start in seen:
                continue
            cyc = []
            sign = 1
            i = start
            while i not in seen:
                seen.add(i)
                cyc.append(i)
                j = self(i)
                if j < 0:
                    sign = -sign
                i = abs(j)
            out.append((tuple(cyc), sign))
        return out

    def cycle_type(self):
        """Sorted multiset of (length, sign)."""
        return tuple(sorted((len(c), s) for c, s in self.signed_cycles()))

    def __eq__(self, other):
        return isinstance(other, WeylElement) and self.images == other.images

    def __hash__(self):
        return hash(self.images)

    def __repr__(self):
        return f"WeylElement{self.images}"


def identity_weyl(n: int) -> WeylElement:
    return WeylElement(range(1, n + 1))


def enumerate_weyl(gt: GroupType):
    """Full Weyl group as WeylElements.

    For SO_even returns (full hyperoctahedral group of O(2n), rotation
    subgroup with an even number of sign flips); for other families
    (W, W)."""
    n = gt.n
    if gt.family in ("SL", "GL"):
        if n > WEYL_RANK_CAP_PLAIN:
            raise GroupError(f"rank {n} above the enumeration cap {WEYL_RANK_CAP_PLAIN}")
        full = [WeylElement(p) for p in permutations(range(1, n + 1))]
        return full, full
    if n > WEYL_RANK_CAP_SIGNED:
        raise GroupError(f"rank {n} above the enumeration cap {WEYL_RANK_CAP_SIGNED}")
    full = []
    for perm in permutations(range(1, n + 1)):
        for signs in product((1, -1), repeat=n):
            full.append(WeylElement(tuple(s * v for s, v in zip(signs, perm))))
    if gt.family == "SO_even":
        rotation = [w for w in full if w.flip_count() % 2 == 0]
        return full, rotation
    return full, full


def weyl_action_on_diag(gt: GroupType, w: WeylElement, diag, p):
    """Image of a diagonal algebra element (as a length-N vector) under w."""
    N = gt.N
    n = gt.n
    out = np.zeros(N, dtype=np.int64)
    if gt.family in ("SL", "GL"):
        for i in range(1, n + 1):
            out[w(i) - 1] = diag[i - 1]
        return out % p
    if gt.family == "SO_odd":
        out[n] = diag[n]  # middle slot fixed
    for i in range(1, n + 1):
        j = w(i)
        if j > 0:
            out[j - 1] = diag[i - 1]
            out[N - j] = diag[N - i]
        else:
            out[-j - 1] = diag[N - i]
            out[N + j] = diag[i - 1]
    return out % p


class LiftError(GroupError):
    pass


def lift_weyl(gt: GroupType, w: WeylElement, torus_part, F: PrimeField, middle_sign=1):
    """Monomial matrix inducing w on the diagonal torus.

    torus_part gives the free entry attached to each torus coordinate;
    mirror entries are forced by the bilinear form.  For SO_odd the
    middle entry is middle_sign (+-1), used to fix the determinant.
    Raises LiftError when no monomial matrix with these entries lies in
    the group (for SO_even, O(2n) membership is accepted and the caller
    inspects the determinant)."""
    p = F.p
    N = gt.N
    n = gt.n
    torus_part = [t % p for t in torus_part]
    if len(torus_part) != n or any(t == 0 for t in torus_part):
        raise LiftError("torus_part must give a nonzero entry per coordinate")
    M = np.zeros((N, N), dtype=np.int64)
    if gt.family in ("SL", "GL"):
        for i in range(1, n + 1):
            M[w(i) - 1, i - 1] = torus_part[i - 1]
        det = _det_mod(M, p)
        if gt.family == "SL" and det != 1:
            raise LiftError(f"lift has determinant {det}, not 1")
        return M
    J = form_matrix(gt, p)
    if gt.family == "SO_odd":
        if middle_sign not in (1, -1):
            raise LiftError("middle_sign must be +-1")
        M[n, n] = middle_sign % p
    for i in range(1, n + 1):
        j = w(i)
        src, dst = i - 1, (j - 1) if j > 0 else (N + j)
        M[dst, src] = torus_part[i - 1]
        # mirror entry forced by M J M^T = J
        msrc, mdst = N - i, N - 1 - dst
        num = int(J[dst, N - 1 - dst])
        den = int(J[src, N - 1 - src]) * torus_part[i - 1] % p
        M[mdst, msrc] = num * pow(den, p - 2, p) % p
    if not np.array_equal(linalg.matmul(linalg.matmul(M, J, p), M.T % p, p), J):
        raise LiftError("constructed lift does not preserve the form")
    det = _det_mod(M, p)
    if gt.family in ("SO_odd", "Sp") and det != 1:
        if gt.family == "SO_odd":
            raise LiftError("determinant -1; retry with the other middle_sign")
        raise LiftError("symplectic lift with determinant != 1")
    return M


def weyl_element_of_monomial(gt: GroupType, M, p) -> WeylElement:
    """Signed permutation induced by a monomial matrix on the torus
    coordinates."""
    N = gt.N
    n = gt.n
    col_to_row = {}
    for c in range(N):
        rows = np.nonzero(M[:, c] % p)[0]
        if len(rows) != 1:
            raise GroupError("matrix is not monomial")
        col_to_row[c] = int(rows[0])
    images = []
    for i in range(1, n + 1):
        r = col_to_row[i - 1]
        if gt.family in ("SL", "GL"):
            images.append(r + 1)
        elif r < n:
            images.append(r + 1)
        elif gt.family == "SO_odd" and r == n:
            raise GroupError("coordinate maps to the middle slot")
        else:
            images.append(-(N - r))
    return WeylElement(images)
