"""Finite-order automorphisms as exact operators on the algebra, the
eigenspace grading they induce, root-orbit constants, and the case
classification driven by cycle shapes and exact matrix powers."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .classical import (
    ClassicalAlgebra,
    GroupError,
    GroupType,
    WeylElement,
    in_group,
    weyl_element_of_monomial,
)
from .field import PrimeField, root_of_unity


class SpecError(ValueError):
    """Invalid automorphism or scenario data."""


class CheckError(AssertionError):
    """An exact mathematical check failed."""


CASE_LABELS = ("1", "2I", "2II", "2III", "3I", "3II", "3III", "4I", "4II", "4III")


@dataclass
class AutomorphismSpec:
    gt: GroupType
    kind: str  # "inner" | "outer"
    n_w: np.ndarray
    m: int

    def __post_init__(self):
        if self.kind not in ("inner", "outer"):
            raise SpecError(f"unknown automorphism kind {self.kind}")
        if self.kind == "outer" and self.gt.family not in ("SL", "GL"):
            raise SpecError("outer automorphisms only occur for SL/GL here")
        if self.kind == "outer" and self.m % 2:
            raise SpecError("outer automorphisms have even order")

    def weyl_image(self, p) -> WeylElement:
        return weyl_element_of_monomial(self.gt, self.n_w, p)


def gamma_transpose_inverse(g, p):
    """The outer involution at group level, g -> (g^T)^{-1}."""
    return linalg.invert(linalg.mod(g, p).T, p)


def apply_dtheta(spec: AutomorphismSpec, X, p):
    n_inv = linalg.invert(spec.n_w, p)
    if spec.kind == "inner":
        return linalg.matmul(linalg.matmul(spec.n_w, X, p), n_inv, p)
    return (-linalg.matmul(linalg.matmul(spec.n_w, linalg.mod(X, p).T, p), n_inv, p)) % p


def apply_theta_group(spec: AutomorphismSpec, g, p):
    """The automorphism on group elements."""
    n_inv = linalg.invert(spec.n_w, p)
    if spec.kind == "inner":
        return linalg.matmul(linalg.matmul(spec.n_w, g, p), n_inv, p)
    return linalg.matmul(linalg.matmul(spec.n_w, gamma_transpose_inverse(g, p), p), n_inv, p)


def dtheta_operator(spec: AutomorphismSpec, alg: ClassicalAlgebra):
    """Matrix of the differential on the algebra basis; verified to be a
    Lie algebra automorphism preserving the trace form."""
    p = alg.p
    if not in_group(alg.gt, spec.n_w, p, allow_full_orthogonal=True):
        raise SpecError("n_w is not in the group (or O(2n) for SO_even)")
    dim = alg.dim
    op = np.zeros((dim, dim), dtype=np.int64)
    images = []
    for k, b in enumerate(alg.basis):
        img = apply_dtheta(spec, b, p)
        v = alg.try_coords(img)
        if v is None:
            raise SpecError("automorphism does not preserve the algebra")
        op[:, k] = v
        images.append(img)
    # automorphism property on all basis pairs, and trace-form invariance
    for i in range(dim):
        for j in range(i + 1, dim):
            lhs = alg.coords(linalg.bracket(images[i], images[j], p))
            rhs = (op @ alg.coords(linalg.bracket(alg.basis[i], alg.basis[j], p))) % p
            if not np.array_equal(lhs, rhs):
                raise CheckError("operator is not a Lie algebra automorphism")
    for i in range(dim):
        for j in range(i, dim):
            a = int(np.trace(linalg.matmul(images[i], images[j], p))) % p
            b = int(np.trace(linalg.matmul(alg.basis[i], alg.basis[j], p))) % p
            if a != b:
                raise CheckError("operator does not preserve the trace form")
    return op


def order_of(op, p, cap) -> int:
    """Exact multiplicative order of an invertible operator, capped."""
    order = linalg.multiplicative_order_matrix(op, p, cap)
    if order is None:
        raise SpecError(f"operator order exceeds the cap {cap}")
    return order


@dataclass
class Grading:
    m: int
    zeta: int
    pieces: list  # echelon coordinate bases, index i = eigenvalue zeta^i

    def dims(self):
        return [int(b.shape[0]) for b in self.pieces]

    def piece(self, i):
        return self.pieces[i % self.m]


def compute_grading(op, m, F: PrimeField, alg: ClassicalAlgebra) -> Grading:
    p = F.p
    zeta = root_of_unity(F, m)
    dim = op.shape[0]
    pieces = []
    for i in range(m):
        ev = pow(zeta, i, p)
        pieces.append(linalg.kernel_basis((op - ev * linalg.eye(dim)) % p, p))
    g = Grading(m, zeta, pieces)
    if sum(g.dims()) != dim:
        raise CheckError("eigenspace dimensions do not sum to dim g (bad field or p | m)")
    return g


def verify_bracket_compatibility(alg: ClassicalAlgebra, grading: Grading) -> bool:
    """[g(i), g(j)] contained in g(i+j), exactly, on all basis pairs."""
    p = alg.p
    m = grading.m
    mats = [[alg.from_coords(v) for v in piece] for piece in grading.pieces]
    for i in range(m):
        for j in range(i, m):
            target = grading.piece(i + j)
            for X in mats[i]:
                for Y in mats[j]:
                    v = alg.coords(linalg.bracket(X, Y, p))
                    if not linalg.in_row_space(v, target, p):
                        return False
    return True


def sample_from(piece, rng, p):
    """Random element (coordinate vector) of a subspace."""
    if piece.shape[0] == 0:
        return np.zeros(piece.shape[1], dtype=np.int64)
    coeffs = np.array([rng.randrange(p) for _ in range(piece.shape[0])], dtype=np.int64)
    return (coeffs @ piece) % p


# ---------------------------------------------------------------------------
# Kawanaka constants


@dataclass
class RootOrbit:
    roots: list  # basis indices along the orbit
    length: int
    constants: list  # c(alpha) along the orbit
    orbit_product: int  # C(alpha)
    product_order: int  # n(alpha)
    predicted_dim: int  # 1 iff C(alpha) = zeta^l (the exact criterion)
    predicted_dim_order_rule: int  # 1 iff n(alpha) = m / l(alpha)
    actual_dim: int


@dataclass
class KawanakaReport:
    orbits: list
    identities_hold: bool
    order_rule_exact: bool  # the order-form rule matched on every orbit too


def kawanaka_constants(spec, alg: ClassicalAlgebra, grading: Grading, F: PrimeField) -> KawanakaReport:
    """Constants c(alpha) with d(theta) e_alpha = c(alpha) e_{gamma(alpha)},
    their orbit products, and the predicted vs actual dimension of
    (orbit span) meet g(1)."""
    p = alg.p
    m = grading.m
    image_of = {}
    const_of = {}
    index_to_root = {rv.index: rv for rv in alg.roots}
    for rv in alg.roots:
        img = apply_dtheta(spec, alg.basis[rv.index], p)
        v = alg.coords(img)
        support = [k for k in np.nonzero(v)[0] if k in index_to_root]
        if len(support) != 1 or np.count_nonzero(v) != 1:
            raise CheckError("automorphism does not permute root vectors up to scalars")
        target = support[0]
        image_of[rv.index] = target
        const_of[rv.index] = int(v[target])
    identities = True
    seen = set()
    orbits = []
    for rv in alg.roots:
        if rv.index in seen:
            continue
        orbit = [rv.index]
        seen.add(rv.index)
        cur = image_of[rv.index]
        while cur != rv.index:
            orbit.append(cur)
            seen.add(cur)
            cur = image_of[cur]
        consts = [const_of[i] for i in orbit]
        C = 1
        for c in consts:
            C = C * c % p
        n_alpha = F.element_order(C)
        l_alpha = len(orbit)
        if m % l_alpha != 0 or pow(C, m // l_alpha, p) != 1:
            identities = False
        # c(alpha) c(-alpha) = 1
        for idx in orbit:
            opp = alg.opposite_root(index_to_root[idx])
            if const_of[idx] * const_of[opp.index] % p != 1:
                identities = False
        # span of the orbit meet g(1)
        span = np.zeros((l_alpha, alg.dim), dtype=np.int64)
        for k, idx in enumerate(orbit):
            span[k, idx] = 1
        meet = linalg.intersect_row_spaces(span, grading.piece(1), p)
        # the eigenvalues of dtheta on the orbit span are the l-th roots of
        # C(alpha), so the span meets g(1) exactly when C(alpha) = zeta^l;
        # the order form n(alpha) = m/l follows from that but not conversely
        predicted = 1 if C == pow(grading.zeta, l_alpha, p) else 0
        predicted_order_rule = 1 if n_alpha == m // l_alpha else 0
        orbits.append(
            RootOrbit(orbit, l_alpha, consts, C, n_alpha, predicted, predicted_order_rule, int(meet.shape[0]))
        )
        if orbits[-1].predicted_dim != orbits[-1].actual_dim:
            identities = False
        if orbits[-1].actual_dim == 1 and n_alpha != m // l_alpha:
            identities = False
    order_rule_exact = all(o.predicted_dim_order_rule == o.actual_dim for o in orbits)
    return KawanakaReport(orbits, identities, order_rule_exact)


# ---------------------------------------------------------------------------
# case classification


def _scalar_of(mat, p):
    """Return s if mat == s*I, else None."""
    n = mat.shape[0]
    s = int(mat[0, 0]) % p
    if np.array_equal(mat % p, s * linalg.eye(n) % p):
        return s
    return None


def sign_of_power(spec: AutomorphismSpec, p):
    """For inner SO/Sp: n_w^m as +-1.  For outer SL: (n_w gamma(n_w))^{m/2}
    as +-1.  None when the power is not a scalar."""
    if spec.kind == "inner":
        power = linalg.matpow(spec.n_w, spec.m, p)
    else:
        g2 = linalg.matmul(spec.n_w, gamma_transpose_inverse(spec.n_w, p), p)
        power = linalg.matpow(g2, spec.m // 2, p)
    s = _scalar_of(power, p)
    if s == 1:
        return 1
    if s == p - 1:
        return -1
    return None


def cycle_shape_summary(gt: GroupType, w: WeylElement, m: int, outer: bool):
    """Split the signed cycles of w into the maximal cycles the case
    normal forms allow and the trivial rest; raises SpecError on shapes
    the cycle-shape lemma forbids."""
    cycles = w.signed_cycles()
    pos_m = [c for c, s in cycles if s > 0 and len(c) == m and m > 1]
    half = m // 2
    neg_half = [c for c, s in cycles if s < 0 and len(c) == half and m % 2 == 0]
    neg_one = [c for c, s in cycles if s < 0 and len(c) == 1 and (m == 2 or half == 1)]
    if m % 2 == 0 and half == 1:
        # negative 1-cycles are the maximal negative cycles when m = 2
        neg_one = []
    fixed = [c for c, s in cycles if s > 0 and len(c) == 1]
    accounted = len(pos_m) + len(neg_half) + len(fixed)
    extra_neg_one = []
    if gt.family == "SO_even" and m > 2 and m % 2 == 0:
        extra_neg_one = [c for c, s in cycles if s < 0 and len(c) == 1]
        accounted += len(extra_neg_one)
    if outer:
        # outer SL: plain cycles of length m (or m/2 when m/2 is odd)
        pos_half = [c for c, s in cycles if s > 0 and len(c) == half and half > 1]
        if len(pos_m) * m + len(fixed) == gt.n and not neg_half:
            return {"kind": "m", "count": len(pos_m), "cycles": pos_m}
        if half % 2 == 1 and len(pos_half) * half + len(fixed) == gt.n:
            return {"kind": "m2", "count": len(pos_half), "cycles": pos_half}
        raise SpecError("outer cycle shape not of the allowed form")
    if accounted != len(cycles):
        raise SpecError("cycle shape violates the classification lemma")
    if pos_m and (neg_half or extra_neg_one):
        raise SpecError("mixed positive and negative maximal cycles are forbidden")
    if len(extra_neg_one) > 1:
        raise SpecError("at most one extra negative 1-cycle is allowed")
    if pos_m:
        return {"kind": "positive", "count": len(pos_m), "cycles": pos_m}
    if neg_half or extra_neg_one:
        return {"kind": "negative", "count": len(neg_half), "cycles": neg_half}
    return {"kind": "trivial", "count": 0, "cycles": []}


def classify_case(gt: GroupType, spec: AutomorphismSpec, p) -> str:
    """Table-style case label from family, parity of m, cycle shape and
    the exact sign of the distinguished matrix power."""
    m = spec.m
    w = spec.weyl_image(p)
    if spec.kind == "outer":
        shape = cycle_shape_summary(gt, w, m, outer=True)
        sign = sign_of_power(spec, p)
        if sign is None:
            raise SpecError("(n_w gamma(n_w))^(m/2) is not +-I")
        if (m // 2) % 2 == 1:
            if sign == 1 and shape["kind"] in ("m2", "trivial"):
                return "4I"
            if sign == -1 and shape["kind"] in ("m", "trivial"):
                return "4II"
            raise SpecError("outer cycle shape inconsistent with the power sign")
        return "4III"
    if gt.family in ("SL", "GL"):
        shape = cycle_shape_summary(gt, w, m, outer=False)
        if shape["kind"] == "negative":
            raise SpecError("negative cycles cannot occur for inner SL/GL")
        return "1"
    shape = cycle_shape_summary(gt, w, m, outer=False)
    sign = sign_of_power(spec, p)
    if sign is None:
        raise SpecError("n_w^m is not +-I")
    if gt.family == "Sp":
        if m % 2 == 1:
            # for odd m the sign is a choice of n_w vs -n_w, both give Int n_w
            if shape["kind"] == "negative":
                raise SpecError("odd-order symplectic case needs positive cycles")
            return "3III"
        if shape["kind"] == "negative":
            if sign != -1:
                raise SpecError("negative symplectic cycles force n_w^m = -I")
            return "3I"
        if shape["kind"] == "positive":
            if sign != 1:
                raise SpecError("positive symplectic m-cycles force n_w^m = I")
            return "3II"
        return "3I" if sign == -1 else "3II"
    if gt.family == "SO_odd":
        if m % 2 == 1:
            if shape["kind"] == "negative":
                raise SpecError("odd-order orthogonal case needs positive cycles")
            return "2III"
        if shape["kind"] == "positive":
            raise SpecError("SO(2n+1) with even m only admits negative cycles")
        if sign != 1:
            raise SpecError("orthogonal negative cycles force n_w^m = I")
        return "2I"
    # SO_even
    if m % 2 == 1:
        if shape["kind"] == "negative":
            raise SpecError("odd-order orthogonal case needs positive cycles")
        return "2III"
    if shape["kind"] == "positive":
        if sign != -1:
            raise SpecError("positive orthogonal m-cycles force n_w^m = -I")
        return "2II"
    if sign != 1:
        raise SpecError("orthogonal negative cycles force n_w^m = I")
    return "2I"


def eigenvalue_multiplicities(mat, p):
    """Multiplicity of each eigenvalue in F_p in the characteristic
    polynomial (by repeated synthetic division)."""
    f = linalg.char_poly(mat, p)
    out = {}
    for lam in range(p):
        mult = 0
        g = list(f)
        while True:
            q, r = linalg.pol_divmod(g, [(-lam) % p, 1], p)
            if r:
                break
            mult += 1
            g = q
        if mult:
            out[lam] = mult
    return out
