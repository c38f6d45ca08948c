"""Invariant polynomial families, reduction to the S-regular subgroup L,
explicit regular nilpotents in normalized position, associated
cocharacters, and construction/verification of Kostant-Weierstrass
sections e + u."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import linalg
from .cartan import ad_matrix, centralizer_in, full_space
from .classical import ClassicalAlgebra, GroupType, build_algebra, form_matrix, in_group
from .field import PrimeField, root_of_unity
from .grading import (
    AutomorphismSpec,
    CheckError,
    Grading,
    SpecError,
    apply_dtheta,
    compute_grading,
    dtheta_operator,
    order_of,
    sample_from,
)
from .mpoly import MPoly, charpoly_symbolic, pfaffian_numeric, pfaffian_symbolic


# ---------------------------------------------------------------------------
# invariant families


@dataclass
class InvariantFamily:
    """Generators of the invariant ring evaluated exactly: characteristic
    polynomial coefficients in the family's degree list, plus a Pfaffian
    for even orthogonal algebras.  Symbolic restrictions to affine
    subspaces are produced on demand (full expansion in dim-g variables
    is intractable beyond tiny ranks and never needed)."""

    gt: GroupType
    F: PrimeField
    degrees: list
    pfaff_form: np.ndarray | None  # skew pairing matrix for the Pfaffian slot
    extra_pfaff_form: np.ndarray | None = None  # embedded even-orthogonal subalgebra

    def labels(self):
        out = [f"c{d}" for d in self.degrees]
        if self.pfaff_form is not None:
            out.append("pf")
        if self.extra_pfaff_form is not None:
            out.append("pf_sub")
        return out

    def all_degrees(self):
        out = list(self.degrees)
        if self.pfaff_form is not None:
            out.append(self.gt.n)
        if self.extra_pfaff_form is not None:
            out.append(self.extra_pfaff_form.shape[0] // 2)
        return out

    def evaluate(self, X):
        p = self.F.p
        N = X.shape[0]
        cp = linalg.char_poly(X, p)
        cp = cp + [0] * (N + 1 - len(cp))
        vals = [cp[N - d] % p for d in self.degrees]
        if self.pfaff_form is not None:
            vals.append(pfaffian_numeric(linalg.matmul(X, self.pfaff_form, p), p))
        if self.extra_pfaff_form is not None:
            vals.append(_sub_pfaffian_numeric(X, self.extra_pfaff_form, p))
        return tuple(int(v) for v in vals)

    def restrict_affine(self, base, dirs):
        """Restrictions to base + sum s_k dirs[k] as polynomials in the
        s variables."""
        p = self.F.p
        N = base.shape[0]
        nv = len(dirs)
        sym = [[MPoly.const(int(base[i, j]), nv, p) for j in range(N)] for i in range(N)]
        for k, d in enumerate(dirs):
            for i in range(N):
                for j in range(N):
                    c = int(d[i, j]) % p
                    if c:
                        e = [0] * nv
                        e[k] = 1
                        sym[i][j] = sym[i][j] + MPoly(nv, p, {tuple(e): c})
        coeffs = charpoly_symbolic(sym, p)  # c_1 .. c_N
        out = [coeffs[d - 1] for d in self.degrees]
        if self.pfaff_form is not None:
            out.append(_symbolic_pfaff(sym, self.pfaff_form, p, nv))
        if self.extra_pfaff_form is not None:
            out.append(_symbolic_sub_pfaff(sym, self.extra_pfaff_form, p, nv))
        return out


def _symbolic_pfaff(sym, J, p, nv):
    N = len(sym)
    prod = [[MPoly.zero(nv, p) for _ in range(N)] for _ in range(N)]
    for i in range(N):
        for j in range(N):
            acc = MPoly.zero(nv, p)
            for l in range(N):
                c = int(J[l, j])
                if c and not sym[i][l].is_zero():
                    acc = acc + sym[i][l].scale(c)
            prod[i][j] = acc
    return pfaffian_symbolic(prod, p)


def _sub_pfaffian_numeric(X, Q, p):
    return pfaffian_numeric(linalg.matmul(X, Q, p), p)


def _symbolic_sub_pfaff(sym, Q, p, nv):
    return _symbolic_pfaff(sym, Q, p, nv)


def invariant_generators(gt: GroupType, F: PrimeField) -> InvariantFamily:
    """Degrees: SL(n) 2..n, GL(n) 1..n, SO(2n+1)/Sp(2n) 2,4,..,2n,
    SO(2n) 2,4,..,2n-2 plus the Pfaffian."""
    if gt.N > 12:
        raise SpecError("symbolic invariant generators capped at N = 12")
    n = gt.n
    if gt.family == "SL":
        return InvariantFamily(gt, F, list(range(2, n + 1)), None)
    if gt.family == "GL":
        return InvariantFamily(gt, F, list(range(1, n + 1)), None)
    if gt.family in ("SO_odd", "Sp"):
        return InvariantFamily(gt, F, [2 * i for i in range(1, n + 1)], None)
    if n > 6:
        raise SpecError("Pfaffian expansion capped at rank 6")
    return InvariantFamily(gt, F, [2 * i for i in range(1, n)], form_matrix(gt, F.p))


# ---------------------------------------------------------------------------
# Table-1 subgroup


@dataclass
class TableOneSubgroup:
    label: str  # e.g. "SO(7)"
    model_kind: str  # which normalized model runs the KW construction
    model_param: int  # k for SL models, n' for SO/Sp models
    m_eff: int
    theta_column: str  # the case of theta restricted to L
    sub_basis: np.ndarray | None  # coordinate basis of l in g (None = identity)
    sub_form: np.ndarray | None  # even-orthogonal form of an embedded l
    verified: bool


def table1_subgroup(session, r: int) -> TableOneSubgroup:
    """The S-regular subgroup L of the reduction table: its abstract type,
    the normalized model used for the KW construction, and (when L is
    proper) an embedded realization verified to be theta-stable and to
    contain the Cartan subspace."""
    gt = session.gt
    m = session.scenario.m
    case = session.case
    p = session.F.p
    if r == 0:
        return TableOneSubgroup("trivial", "zero_rank", 0, m, case, None, None, True)
    if m == 1:
        return TableOneSubgroup(str(gt), "sl_inner" if gt.family in ("SL", "GL") else _m1_kind(gt), gt.N if gt.family in ("SL", "GL") else gt.n, 1, case, None, None, True)
    if case == "1":
        k = r * m
        sub = _levi_sl(session) if k < gt.N else None
        return TableOneSubgroup(f"SL({k})", "sl_inner", k, m, "1", sub, None, sub is None or _verify_embedding(session, sub))
    if case in ("2II", "3II"):
        k = r * m
        sub = _gl_block_levi(session)
        return TableOneSubgroup(f"SL({k})", "sl_inner", k, m, "1", sub, None, _verify_embedding(session, sub))
    if case == "3I":
        return _identity_or_levi_signed(session, r, f"Sp({r * m})", "sp_c", r * m // 2, m, "3")
    if case == "3III":
        return _identity_or_levi_signed(session, r, f"Sp({2 * r * m})", "sp_c", r * m, m, "3")
    if case == "2I":
        if gt.family == "SO_odd":
            return _identity_or_levi_signed(session, r, f"SO({r * m + 1})", "so_a", r * m // 2, m, "2")
        from .littleweyl import predicted_label

        pred = predicted_label(session, r)
        if pred.q == 1:
            sub = _h_reduction(session)
            return TableOneSubgroup(f"SO({r * m + 1})", "so_a", r * m // 2, m, "2", sub, None, _verify_embedding(session, sub))
        kind = "so_b" if r % 2 == 0 else "so_bj"
        return _identity_or_levi_signed(session, r, f"SO({r * m})", kind, r * m // 2, m, "2")
    if case == "2III":
        from .littleweyl import predicted_label

        pred = predicted_label(session, r)
        if pred.q == 1:
            if gt.family == "SO_odd":
                return _identity_or_levi_signed(session, r, f"SO({2 * r * m + 1})", "so_a", r * m, m, "2")
            sub = _h_reduction(session)
            return TableOneSubgroup(f"SO({2 * r * m + 1})", "so_a", r * m, m, "2", sub, None, _verify_embedding(session, sub))
        return _identity_or_levi_signed(session, r, f"SO({2 * r * m})", "so_b", r * m, m, "2")
    if case == "4I":
        k = r * m // 2
        sub = _levi_sl(session) if k < gt.N else None
        return TableOneSubgroup(f"SL({k})", "sl_outer", k, m, "4", sub, None, sub is None or _verify_embedding(session, sub))
    if case == "4II":
        k = r * m // 2
        return TableOneSubgroup(f"SL({k})^2", "sl_inner", k, m // 2, "1", None, None, True)
    if case == "4III":
        from .grading import sign_of_power

        sign = sign_of_power(session.spec, p)
        if sign == -1:
            sub, form = _outer_fixpoint(session)
            return TableOneSubgroup(f"Sp({r * m})", "sp_c", r * m // 2, m, "3", sub, None, _verify_embedding(session, sub))
        from .littleweyl import predicted_label

        pred = predicted_label(session, r)
        if pred.q == 2:
            sub, form = _outer_fixpoint(session)
            kind = "so_b" if r % 2 == 0 else "so_bj"
            t = TableOneSubgroup(f"SO({r * m})", kind, r * m // 2, m, "2", sub, form, _verify_embedding(session, sub))
            return t
        raise SpecError("outer case with s0 > 0 is not supported by the reduction table builder")
    raise SpecError(f"no reduction entry for case {case}")


def _m1_kind(gt):
    return {"SO_odd": "so_a", "SO_even": "so_b", "Sp": "sp_c"}[gt.family]


def _identity_or_levi_signed(session, r, label, kind, nprime, m, column):
    gt = session.gt
    target_N = 2 * nprime + 1 if kind == "so_a" else 2 * nprime
    if target_N == gt.N:
        return TableOneSubgroup(label, kind, nprime, m, column, None, None, True)
    sub = _levi_signed(session, target_N)
    return TableOneSubgroup(label, kind, nprime, m, column, sub, None, _verify_embedding(session, sub))


def _cycle_slots(session):
    """Matrix slots (0-indexed) covered by the maximal cycles."""
    from .scenario import weyl_from_cycles

    gt = session.gt
    m = session.scenario.m
    half = m // 2
    w, placed = weyl_from_cycles(gt, session.scenario.cycles)
    slots = []
    for coords, sign in placed:
        maximal = (
            (sign == "+" and len(coords) == m)
            or (sign == "-" and len(coords) == half)
            or (session.scenario.outer and len(coords) in (m, half) and len(coords) > 1)
        )
        if not maximal:
            continue
        for c in coords:
            slots.append(c - 1)
    return sorted(slots)


def _span_of_slots(session, slot_blocks, traceless):
    """Coordinate basis of the subalgebra of elements supported inside the
    union of the S x S blocks, S running over slot_blocks; optionally cut
    to block-trace zero (trace over the first block)."""
    alg = session.alg
    p = alg.p
    blocks = [set(S) for S in slot_blocks]
    rows = []
    for k, b in enumerate(alg.basis):
        support = list(zip(*np.nonzero(b)))
        if all(any(i in S and j in S for S in blocks) for i, j in support):
            v = np.zeros(alg.dim, dtype=np.int64)
            v[k] = 1
            rows.append(v)
    basis = np.stack(rows)
    if traceless:
        first = blocks[0]
        tr = np.zeros(alg.dim, dtype=np.int64)
        for k, b in enumerate(alg.basis):
            tr[k] = sum(int(b[i, i]) for i in first) % p
        coeffs = (basis @ tr) % p
        ker = linalg.kernel_basis(coeffs.reshape(-1, 1).T, p)
        basis = linalg.row_space((ker @ basis) % p, p)
    return linalg.row_space(basis, p)


def _levi_sl(session):
    return _span_of_slots(session, [_cycle_slots(session)], traceless=True)


def _levi_signed(session, target_N):
    gt = session.gt
    N = gt.N
    slots = _cycle_slots(session)
    slots = sorted(set(slots) | {N - 1 - s for s in slots})
    if gt.family == "SO_odd":
        slots = sorted(set(slots) | {gt.n})
    if len(slots) != target_N:
        raise SpecError("cycle slots do not carve out the expected subgroup size")
    return _span_of_slots(session, [slots], traceless=False)


def _gl_block_levi(session):
    """The gl-block Levi of SO(2n)/Sp(2n) cut to block-trace zero:
    elements supported on the cycle block and its mirror block."""
    gt = session.gt
    N = gt.N
    slots = _cycle_slots(session)
    mirror = [N - 1 - s for s in slots]
    return _span_of_slots(session, [slots, mirror], traceless=True)


def _fixed_coordinate(session):
    from .scenario import weyl_from_cycles

    w, placed = weyl_from_cycles(session.gt, session.scenario.cycles)
    for coords, sign in placed:
        if len(coords) == 1 and sign == "+":
            return coords[0] - 1
        if len(coords) == 1 and sign == "-":
            return coords[0] - 1
    raise SpecError("h-reduction needs a fixed coordinate or a negative 1-cycle")


def _h_reduction(session):
    """SO(2k) -> SO(2k-1) as the fixed algebra of Ad(h), h the swap of a
    theta-fixed coordinate pair, composed with the Levi cut to the cycle
    slots plus that pair."""
    alg = session.alg
    gt = session.gt
    p = alg.p
    N = gt.N
    j = _fixed_coordinate(session)
    slots = sorted(set(_cycle_slots(session)) | {j} | {N - 1 - s for s in _cycle_slots(session)} | {N - 1 - j})
    big = _span_of_slots(session, [slots], traceless=False)
    h = linalg.eye(N)
    h[j, j] = 0
    h[N - 1 - j, N - 1 - j] = 0
    h[j, N - 1 - j] = 1
    h[N - 1 - j, j] = 1
    # verify h is theta-fixed and orthogonal
    from .grading import apply_theta_group

    if not np.array_equal(apply_theta_group(session.spec, h, p), h % p):
        raise SpecError("swap element is not theta-fixed")
    ad_h = np.zeros((alg.dim, alg.dim), dtype=np.int64)
    h_inv = linalg.invert(h, p)
    for k, b in enumerate(alg.basis):
        ad_h[:, k] = alg.coords(linalg.matmul(linalg.matmul(h, b, p), h_inv, p))
    fixed = linalg.kernel_basis((ad_h - linalg.eye(alg.dim)) % p, p)
    out = linalg.intersect_row_spaces(fixed, big, p)
    return out


def _outer_fixpoint(session):
    """Fixed algebra of phi = Int(n_w^{m/2}) o gamma inside sl(n): an
    so/sp subalgebra for the form h0-related pairing."""
    alg = session.alg
    p = alg.p
    m = session.scenario.m
    h0 = linalg.matpow(session.spec.n_w, m // 2, p)
    dphi = np.zeros((alg.dim, alg.dim), dtype=np.int64)
    h0_inv = linalg.invert(h0, p)
    for k, b in enumerate(alg.basis):
        img = (-linalg.matmul(linalg.matmul(h0, b.T % p, p), h0_inv, p)) % p
        v = alg.try_coords(img)
        if v is None:
            raise SpecError("phi does not preserve the algebra")
        dphi[:, k] = v
    fixed = linalg.kernel_basis((dphi - linalg.eye(alg.dim)) % p, p)
    # X in fixed iff X = -Q X^T Q^{-1} with Q = h0 (up to scalars): the form
    sym = (h0 + h0.T) % p
    form = h0 if np.array_equal(h0 % p, h0.T % p) else None
    return fixed, form


def _verify_embedding(session, sub_basis) -> bool:
    """l is theta-stable and contains the explicit Cartan subspace."""
    from .cartan import explicit_cartan

    alg = session.alg
    p = alg.p
    if sub_basis is None:
        return True
    op = session.operator
    for v in sub_basis:
        if not linalg.in_row_space((op @ v) % p, sub_basis, p):
            return False
    c = explicit_cartan(session)
    for v in c.basis:
        if not linalg.in_row_space(v, sub_basis, p):
            return False
    return True


# ---------------------------------------------------------------------------
# normalized KW models


@dataclass
class KWModel:
    """Standard realization of L with theta in the diagonal normal
    position, its grading, and the case regular nilpotent."""

    gt: GroupType
    F: PrimeField
    alg: ClassicalAlgebra
    operator: np.ndarray
    grading: Grading
    m: int
    zeta: int
    e: np.ndarray
    normalizer: np.ndarray  # the matrix t (or tJ / J'-form) realizing theta
    outer: bool


def _diag_from_ratios(N, start_exponents, p):
    return np.diag(np.array(start_exponents, dtype=np.int64) % p)


def kw_model(kind: str, param: int, m: int, F: PrimeField, session=None) -> KWModel:
    if kind == "zero_rank":
        return _zero_rank_model(session)
    build = {
        "sl_inner": _model_sl_inner,
        "so_a": _model_so_a,
        "so_b": _model_so_b,
        "so_bj": _model_so_bj,
        "sp_c": _model_sp_c,
        "sl_outer": _model_sl_outer,
    }[kind]
    return build(param, m, F)


def _finish_model(gt, F, t_matrix, e, m, outer):
    p = F.p
    alg = build_algebra(gt, F)
    if outer:
        op = np.zeros((alg.dim, alg.dim), dtype=np.int64)
        t_inv = linalg.invert(t_matrix, p)
        for k, b in enumerate(alg.basis):
            img = (-linalg.matmul(linalg.matmul(t_matrix, b.T % p, p), t_inv, p)) % p
            op[:, k] = alg.coords(img)
    else:
        op = np.zeros((alg.dim, alg.dim), dtype=np.int64)
        t_inv = linalg.invert(t_matrix, p)
        for k, b in enumerate(alg.basis):
            op[:, k] = alg.coords(linalg.matmul(linalg.matmul(t_matrix, b, p), t_inv, p))
    order = order_of(op, p, 4 * gt.N)
    if order != m:
        raise CheckError(f"normalized model has order {order}, expected {m}")
    grading = compute_grading(op, m, F, alg)
    zeta = grading.zeta
    ev = alg.coords(e)
    if not linalg.in_row_space(ev, grading.piece(1), p):
        raise CheckError("model nilpotent is not in l(1)")
    if not linalg.is_nilpotent(e, p):
        raise CheckError("model element is not nilpotent")
    z_dim = centralizer_in(alg, [e], full_space(alg)).shape[0]
    if z_dim != gt.rank:
        raise CheckError(f"model nilpotent is not regular: dim z = {z_dim}, rank = {gt.rank}")
    return KWModel(gt, F, alg, op, grading, m, zeta, e, t_matrix, outer)


def _model_sl_inner(k, m, F):
    p = F.p
    gt = GroupType("SL", k)
    zeta = root_of_unity(F, m)
    t = np.diag(np.array([pow(zeta, (k - 1 - j) % m, p) for j in range(k)], dtype=np.int64))
    e = np.zeros((k, k), dtype=np.int64)
    for i in range(k - 1):
        e[i, i + 1] = 1
    return _finish_model(gt, F, t, e, m, outer=False)


def _model_so_a(nprime, m, F):
    p = F.p
    N = 2 * nprime + 1
    gt = GroupType("SO_odd", nprime)
    zeta = root_of_unity(F, m)
    t = np.diag(np.array([pow(zeta, (nprime - j) % m, p) for j in range(N)], dtype=np.int64))
    e = np.zeros((N, N), dtype=np.int64)
    for i in range(nprime):
        e[i, i + 1] = 1
    for i in range(nprime, 2 * nprime):
        e[i, i + 1] = p - 1
    return _finish_model(gt, F, t, e, m, outer=False)


def _so_b_nilpotent(nprime, p):
    N = 2 * nprime
    e = np.zeros((N, N), dtype=np.int64)
    for i in range(nprime - 1):
        e[i, i + 1] = 1
    e[nprime - 2, nprime] = 1  # e_{n'-1, n'+1}, 1-indexed
    e[nprime - 1, nprime + 1] = p - 1  # -e_{n', n'+2}
    for i in range(nprime, 2 * nprime - 1):
        e[i, i + 1] = p - 1
    return e


def _model_so_b(nprime, m, F):
    p = F.p
    N = 2 * nprime
    gt = GroupType("SO_even", nprime)
    zeta = root_of_unity(F, m)
    diag = [pow(zeta, (nprime - 1 - j) % m, p) for j in range(nprime)]
    diag += [pow(int(v), p - 2, p) for v in reversed(diag)]
    t = np.diag(np.array(diag, dtype=np.int64))
    return _finish_model(gt, F, t, _so_b_nilpotent(nprime, p), m, outer=False)


def _model_so_bj(nprime, m, F):
    p = F.p
    N = 2 * nprime
    gt = GroupType("SO_even", nprime)
    zeta = root_of_unity(F, m)
    M = np.zeros((N, N), dtype=np.int64)
    for j in range(1, nprime):
        val = (-pow(zeta, (-j) % (p - 1), p)) % p  # -zeta^{-j}
        M[j - 1, j - 1] = val
        M[N - j, N - j] = pow(val, p - 2, p)
    M[nprime - 1, nprime] = 1
    M[nprime, nprime - 1] = 1
    J = form_matrix(gt, p)
    if not np.array_equal(linalg.matmul(linalg.matmul(M, J, p), M.T % p, p), J):
        raise CheckError("J'-normalizer does not preserve the form")
    return _finish_model(gt, F, M, _so_b_nilpotent(nprime, p), m, outer=False)


def _model_sp_c(nprime, m, F):
    p = F.p
    N = 2 * nprime
    gt = GroupType("Sp", nprime)
    xi = root_of_unity(F, 2 * m)
    t = np.diag(
        np.array([pow(xi, (2 * (nprime - 1 - j) + 1) % (2 * m), p) for j in range(N)], dtype=np.int64)
    )
    e = np.zeros((N, N), dtype=np.int64)
    for i in range(nprime):
        e[i, i + 1] = 1
    for i in range(nprime, 2 * nprime - 1):
        e[i, i + 1] = p - 1
    return _finish_model(gt, F, t, e, m, outer=False)


def _model_sl_outer(k, m, F):
    p = F.p
    gt = GroupType("SL", k)
    zeta = root_of_unity(F, m)
    zinv = pow(zeta, p - 2, p)
    if k % 2 == 1:
        a = (m - 2) // 4
        diag = [pow(zeta, (a - j) % m, p) for j in range(k)]
    else:
        diag = [pow(zeta, (k // 2 - 1 - j) % m, p) for j in range(k // 2)]
        diag += [(-pow(zinv, j + 1, p)) % p for j in range(k // 2)]
    t = np.diag(np.array(diag, dtype=np.int64))
    J = np.zeros((k, k), dtype=np.int64)
    for i in range(k):
        J[i, k - 1 - i] = 1
    tJ = linalg.matmul(t, J, p)
    e = np.zeros((k, k), dtype=np.int64)
    if k % 2 == 1:
        for i in range((k - 1) // 2):
            e[i, i + 1] = 1
        for i in range((k - 1) // 2, k - 1):
            e[i, i + 1] = p - 1
    else:
        for i in range(k // 2):
            e[i, i + 1] = 1
        for i in range(k // 2, k - 1):
            e[i, i + 1] = p - 1
    return _finish_model(gt, F, tJ, e, m, outer=True)


def _zero_rank_model(session):
    """Rank 0: the section is {e} for an N-regular nilpotent of g(1),
    found among nilpotent parts of sampled elements."""
    alg, grading, F = session.alg, session.grading, session.F
    p = F.p
    rng = random.Random(session.scenario.seed * 7919 + 11)
    for _ in range(500):
        v = sample_from(grading.piece(1), rng, p)
        e = linalg.nilpotent_part(alg.from_coords(v), p)
        if not np.any(e):
            continue
        if centralizer_in(alg, [e], full_space(alg)).shape[0] == session.gt.rank:
            return KWModel(
                session.gt, F, alg, session.operator, grading, grading.m, session.zeta, e,
                session.spec.n_w, session.scenario.outer,
            )
    raise CheckError("no regular nilpotent found in g(1) for the zero-rank section")


# ---------------------------------------------------------------------------
# associated cocharacter and the section


def associated_cocharacter(model: KWModel):
    """Integer diagonal h with [h, e] = 2e, trace 0 and compatible with
    the torus of the model's family; returned as an integer vector of
    diagonal entries, verified in the field."""
    gt, F, e = model.gt, model.F, model.e
    p = F.p
    N = gt.N
    support = list(zip(*np.nonzero(e)))
    # difference constraints h_i - h_j = 2 on the support graph
    values = {}
    adj = {}
    for i, j in support:
        adj.setdefault(int(i), []).append((int(j), -2))
        adj.setdefault(int(j), []).append((int(i), 2))
    comps = []
    for start in range(N):
        if start in values or start not in adj:
            continue
        comp = []
        stack = [(start, Fraction(0))]
        while stack:
            node, val = stack.pop()
            if node in values:
                if values[node] != val:
                    raise CheckError("inconsistent cocharacter constraints")
                continue
            values[node] = val
            comp.append(node)
            for nxt, off in adj.get(node, []):
                stack.append((nxt, val + off))
        comps.append(comp)
    for i in range(N):
        if i not in values:
            values[i] = Fraction(0)
            comps.append([i])
    # per-component offsets fixed by the family constraint
    offsets = {}
    if gt.family in ("SL", "GL"):
        if len(comps) != 1:
            raise CheckError("regular nilpotent support must connect all slots")
        total = sum(values[i] for i in range(N))
        shift = -total / N
        h = [values[i] + shift for i in range(N)]
    else:
        # mirror antisymmetry h_i + h_{N-1-i} = 0 pins each component pair
        comp_of = {}
        for ci, comp in enumerate(comps):
            for node in comp:
                comp_of[node] = ci
        shifts = [None] * len(comps)
        changed = True
        while changed:
            changed = False
            for i in range(N):
                ci, cj = comp_of[i], comp_of[N - 1 - i]
                s = values[i] + values[N - 1 - i]
                if ci == cj:
                    if shifts[ci] is None:
                        shifts[ci] = -s / 2
                        changed = True
                    elif shifts[ci] != -s / 2:
                        raise CheckError("mirror constraints are inconsistent")
                else:
                    if shifts[ci] is not None and shifts[cj] is None:
                        shifts[cj] = -s - shifts[ci]
                        changed = True
                    elif shifts[cj] is not None and shifts[ci] is None:
                        shifts[ci] = -s - shifts[cj]
                        changed = True
        for ci in range(len(comps)):
            if shifts[ci] is None:
                shifts[ci] = Fraction(0)
        h = [values[i] + shifts[comp_of[i]] for i in range(N)]
        for i in range(N):
            if h[i] + h[N - 1 - i] != 0:
                raise CheckError("cocharacter is not mirror-antisymmetric")
    out = []
    for v in h:
        if v.denominator != 1:
            raise CheckError("cocharacter entries are not integers")
        out.append(int(v))
    h_mat = np.diag(np.array([v % p for v in out], dtype=np.int64))
    if not np.array_equal(linalg.bracket(h_mat, e, p), (2 * e) % p):
        raise CheckError("[h, e] != 2e")
    img = apply_dtheta_model(model, h_mat)
    if not np.array_equal(img, h_mat):
        raise CheckError("cocharacter is not theta-fixed")
    return out


def apply_dtheta_model(model: KWModel, X):
    p = model.F.p
    t_inv = linalg.invert(model.normalizer, p)
    if model.outer:
        return (-linalg.matmul(linalg.matmul(model.normalizer, X.T % p, p), t_inv, p)) % p
    return linalg.matmul(linalg.matmul(model.normalizer, X, p), t_inv, p)


@dataclass
class KWSection:
    e: np.ndarray
    h: list  # integer diagonal entries
    u_basis: list  # matrices
    u_weights: list  # integer ad-h weights
    r: int
    dims: tuple  # (dim l(1), dim [l(0), e])


def build_section(model: KWModel, r: int) -> KWSection:
    """u = weight-homogeneous echelon complement of [l(0), e] in l(1)."""
    alg, grading = model.alg, model.grading
    p = model.F.p
    piece0, piece1 = grading.piece(0), grading.piece(1)
    e = model.e
    rows = []
    for v in piece0:
        rows.append(alg.coords(linalg.bracket(alg.from_coords(v), e, p)))
    image = linalg.row_space(np.stack(rows), p) if rows else np.zeros((0, alg.dim), dtype=np.int64)
    if not all(linalg.in_row_space(v, piece1, p) for v in image):
        raise CheckError("[l(0), e] is not inside l(1)")
    h_int = associated_cocharacter(model)
    h_mat = np.diag(np.array([v % p for v in h_int], dtype=np.int64))
    ad_h = ad_matrix(alg, h_mat)
    # weight spaces of l(1) under ad h
    weights = {}
    op1 = _restrict(alg, ad_h, piece1, p)
    u_vectors = []
    u_weights = []
    seen_eigen = set()
    for lam in range(p):
        ker = linalg.kernel_basis((op1 - lam * linalg.eye(piece1.shape[0])) % p, p)
        if ker.shape[0] == 0:
            continue
        seen_eigen.add(lam)
        wspace = linalg.row_space((ker @ piece1) % p, p)
        im_w = linalg.intersect_row_spaces(image, wspace, p)
        chosen = [row for row in im_w]
        for row in wspace:
            stacked = np.stack(chosen + [row]) if chosen else row.reshape(1, -1)
            if linalg.rank(stacked, p) == len(chosen) + 1:
                chosen.append(row)
                u_vectors.append(row)
                u_weights.append(lam)
    if sum(
        linalg.kernel_basis((op1 - lam * linalg.eye(piece1.shape[0])) % p, p).shape[0]
        for lam in seen_eigen
    ) != piece1.shape[0]:
        raise CheckError("ad h is not diagonalizable on l(1)")
    if len(u_vectors) != r:
        raise CheckError(f"dim u = {len(u_vectors)}, expected r = {r}")
    u_mats = [alg.from_coords(v) for v in u_vectors]
    int_weights = []
    for mat, lam in zip(u_mats, u_weights):
        iw = _integer_weight(mat, h_int)
        if iw is None or iw % p != lam:
            raise CheckError("u vector mixes integer ad-h weights")
        int_weights.append(iw)
    return KWSection(e, h_int, u_mats, int_weights, r, (int(piece1.shape[0]), int(image.shape[0])))


def _integer_weight(mat, h_int):
    support = list(zip(*np.nonzero(mat)))
    vals = {h_int[i] - h_int[j] for i, j in support}
    if len(vals) != 1:
        return None
    return vals.pop()


def _restrict(alg, op, subspace, p):
    from .cartan import restrict_operator

    return restrict_operator(alg, op, subspace, p)


@dataclass
class SectionReport:
    selected: list  # indices of the r generators used
    jacobian_at_e: bool
    jacobian_good_points: int
    jacobian_points_total: int
    collision_points: int
    collision_tuples: int
    degrees_ok: bool
    weighted_degrees_ok: bool
    passed: bool


def verify_section(model: KWModel, section: KWSection, family: InvariantFamily, seed: int) -> SectionReport:
    """(a) r differentials independent at e; (b) Jacobian of the selected
    restrictions nonsingular at e and at >= 95 of 100 seeded points;
    (c) distinct sampled points of e + u give distinct invariant tuples
    (10^4 seeded draws); (d) plain and lambda-weighted degree bounds."""
    p = model.F.p
    r = section.r
    restrictions = family.restrict_affine(section.e, section.u_basis)
    degrees = family.all_degrees()
    if r == 0:
        return SectionReport([], True, 100, 100, 1, 1, True, True, True)
    from .mpoly import jacobian_at

    # (a) select r restrictions with independent differentials at e (= 0)
    order = sorted(range(len(restrictions)), key=lambda i: degrees[i])
    selected = []
    zero = [0] * r
    for i in order:
        trial = selected + [i]
        Jm = jacobian_at([restrictions[t] for t in trial], zero, p)
        if linalg.rank(Jm, p) == len(trial):
            selected = trial
        if len(selected) == r:
            break
    jac_at_e = len(selected) == r
    good = 0
    total = 100
    rng = random.Random(seed)
    if jac_at_e:
        sel_polys = [restrictions[i] for i in selected]
        for _ in range(total):
            pt = [rng.randrange(p) for _ in range(r)]
            Jm = jacobian_at(sel_polys, pt, p)
            if linalg.rank(Jm, p) == r:
                good += 1
    # (c) injectivity on sampled points
    rng2 = random.Random(seed + 1)
    points = set()
    tuples = {}
    collide = False
    for _ in range(10**4):
        pt = tuple(rng2.randrange(p) for _ in range(r))
        points.add(pt)
    for pt in sorted(points):
        val = tuple(f.evaluate(list(pt)) for f in restrictions)
        if val in tuples and tuples[val] != pt:
            collide = True
        tuples[val] = pt
    # (d) degrees
    degrees_ok = all(
        restrictions[i].degree() <= degrees[i] for i in range(len(restrictions))
    )
    weighted_ok = True
    for i, f in enumerate(restrictions):
        for expo in f.terms:
            wdeg = sum(k * (2 - a) for k, a in zip(expo, section.u_weights))
            if (wdeg - 2 * degrees[i]) % (p - 1):
                weighted_ok = False
    passed = (
        jac_at_e
        and good >= 95
        and not collide
        and len(tuples) == len(points)
        and degrees_ok
        and weighted_ok
    )
    return SectionReport(
        selected, jac_at_e, good, total, len(points), len(tuples), degrees_ok, weighted_ok, passed
    )


# ---------------------------------------------------------------------------
# checks running in the scenario picture


def restrict_family_to_cartan(session, family: InvariantFamily, cartan):
    alg = session.alg
    dirs = [alg.from_coords(v) for v in cartan.basis]
    base = np.zeros((session.gt.N, session.gt.N), dtype=np.int64)
    return family.restrict_affine(base, dirs)


@dataclass
class ChevalleyReport:
    invariant_under_wc: bool
    selected: list
    jacobian_rank_ok: bool
    degree_multiset: list
    expected_degrees: list
    degrees_match: bool
    passed: bool


def chevalley_check(session, family: InvariantFamily, cartan, wc_matrices, expected_degrees, seed=0) -> ChevalleyReport:
    """Restriction to the Cartan subspace: exact W_c-invariance of every
    restriction, algebraic independence of r of them (Jacobian rank at an
    exhibited point), and the degree multiset against the
    pseudoreflection degrees."""
    p = session.F.p
    r = cartan.r
    if r == 0:
        return ChevalleyReport(True, [], True, [], list(expected_degrees), expected_degrees == [], expected_degrees == [])
    restrictions = restrict_family_to_cartan(session, family, cartan)
    degrees = family.all_degrees()
    invariant = True
    for f in restrictions:
        for Wm in wc_matrices:
            if f.compose_linear([[int(Wm[i, j]) for j in range(r)] for i in range(r)]) != f:
                invariant = False
    nonzero = [i for i, f in enumerate(restrictions) if not f.is_zero()]
    expected = sorted(expected_degrees)
    selected = []
    used_degrees = []
    from .mpoly import jacobian_at

    for d in expected:
        pick = None
        for i in nonzero:
            if i in selected or degrees[i] != d:
                continue
            pick = i
            break
        if pick is not None:
            selected.append(pick)
            used_degrees.append(d)
    rank_ok = False
    if len(selected) == r:
        sel = [restrictions[i] for i in selected]
        rng = random.Random(seed)
        for _ in range(50):
            pt = [rng.randrange(p) for _ in range(r)]
            if linalg.rank(jacobian_at(sel, pt, p), p) == r:
                rank_ok = True
                break
        if not rank_ok and p ** r <= 20000:
            from itertools import product as iproduct

            for pt in iproduct(range(p), repeat=r):
                if linalg.rank(jacobian_at(sel, list(pt), p), p) == r:
                    rank_ok = True
                    break
    degrees_match = sorted(used_degrees) == expected and len(selected) == r
    passed = invariant and rank_ok and degrees_match
    return ChevalleyReport(invariant, selected, rank_ok, sorted(used_degrees), expected, degrees_match, passed)


def truncated_exponential(x, p):
    """sum x^k / k! for k < N; exact for nilpotent x with x^N = 0 and
    p > N."""
    N = x.shape[0]
    out = linalg.eye(N)
    term = linalg.eye(N)
    fact_inv = 1
    for k in range(1, N):
        term = linalg.matmul(term, x, p)
        fact_inv = fact_inv * pow(k, p - 2, p) % p
        out = (out + fact_inv * term) % p
    return out


def g0_invariance_sampler(session, family: InvariantFamily, seed: int, conj_samples=50, points=50):
    """Invariance of the generators along truncated-exponential
    conjugations by nilpotent parts of random g(0) elements."""
    alg, grading = session.alg, session.grading
    p = alg.p
    rng = random.Random(seed)
    checked = 0
    for _ in range(conj_samples):
        v = sample_from(grading.piece(0), rng, p)
        x = linalg.nilpotent_part(alg.from_coords(v), p)
        if linalg.matpow(x, session.gt.N, p).any():
            raise CheckError("sampler produced a non-nilpotent direction")
        U = truncated_exponential(x, p)
        if not in_group(session.gt, U, p):
            raise CheckError("truncated exponential left the group")
        U_inv = linalg.invert(U, p)
        for _ in range(max(1, points // conj_samples)):
            w = sample_from(grading.piece(1), rng, p)
            Y = alg.from_coords(w)
            conj = linalg.matmul(linalg.matmul(U, Y, p), U_inv, p)
            if family.evaluate(conj) != family.evaluate(Y):
                return False, checked
            checked += 1
    return True, checked


def nilpotent_vanishing(session, family: InvariantFamily, seed: int, samples=100):
    """All generators vanish on nilpotent parts of sampled g(1) elements."""
    alg, grading = session.alg, session.grading
    p = alg.p
    rng = random.Random(seed)
    for _ in range(samples):
        v = sample_from(grading.piece(1), rng, p)
        x = linalg.nilpotent_part(alg.from_coords(v), p)
        if any(val % p for val in family.evaluate(x)):
            return False
    return True


def bracket_image_dim(session, x) -> int:
    """dim [g(0), x]."""
    alg, grading = session.alg, session.grading
    p = alg.p
    rows = []
    for v in grading.piece(0):
        rows.append(alg.coords(linalg.bracket(alg.from_coords(v), x, p)))
    if not rows:
        return 0
    return linalg.rank(np.stack(rows), p)


def fiber_dimension_check(session, cartan, seed: int, samples=20):
    """dim [g(0), x] = dim g(1) - r for sampled x whose semisimple part is
    in general position."""
    from .cartan import centralizer_in as cz, full_space as fs

    alg, grading = session.alg, session.grading
    p = alg.p
    r = cartan.r
    expect = grading.piece(1).shape[0] - r
    target = None
    if r:
        mats = [alg.from_coords(v) for v in cartan.basis]
        target = cz(alg, mats, fs(alg)).shape[0]
    rng = random.Random(seed)
    found = 0
    tried = 0
    while found < samples and tried < samples * 50:
        tried += 1
        v = sample_from(grading.piece(1), rng, p)
        if not np.any(v):
            continue
        x = alg.from_coords(v)
        xs = linalg.semisimple_part(x, p)
        if r:
            if cz(alg, [xs], fs(alg)).shape[0] != target:
                continue
        elif np.any(xs):
            continue
        found += 1
        if bracket_image_dim(session, x) != expect:
            return False, found
    return found == samples, found
