"""Cartan subspaces of g(1): explicit per-case bases, a randomized
oracle, Fitting and torus decompositions, centralizers, general-position
elements and the zero-rank test."""

from __future__ import annotations

import random
from dataclasses import dataclass
from math import gcd

import numpy as np

from . import linalg
from .classical import ClassicalAlgebra
from .grading import CheckError, SpecError, sample_from
from .mpoly import cyclotomic_mod_p
from .scenario import weyl_from_cycles


@dataclass
class CartanSubspace:
    basis: list  # algebra coordinate vectors
    r: int
    maximal: bool  # centralizer certificate result


def centralizer_in(alg: ClassicalAlgebra, elements, target):
    """Coordinate basis of {y in target : [y, s] = 0 for all s in elements}.

    elements are matrices; target an echelon coordinate basis."""
    p = alg.p
    if target.shape[0] == 0 or not len(elements):
        return target
    mats = [alg.from_coords(v) for v in target]
    blocks = []
    for s in elements:
        block = np.zeros((alg.dim, len(mats)), dtype=np.int64)
        for k, y in enumerate(mats):
            block[:, k] = alg.coords(linalg.bracket(y, s, p))
        blocks.append(block)
    stacked = np.concatenate(blocks, axis=0)
    ker = linalg.kernel_basis(stacked, p)
    if ker.shape[0] == 0:
        return np.zeros((0, alg.dim), dtype=np.int64)
    return linalg.row_space((ker @ target) % p, p)


def full_space(alg):
    return linalg.eye(alg.dim)


def algebra_center(alg: ClassicalAlgebra):
    return centralizer_in(alg, alg.basis, full_space(alg))


def explicit_cartan(session) -> CartanSubspace:
    """Per-case diagonal Cartan basis, one element per maximal cycle.

    Positive m-cycles carry zeta^{-j} down the cycle, negative
    (m/2)-cycles zeta^{1-j}, outer cycles (-zeta)^{-j}; mirror slots get
    the negated entries.  Everything is certified afterwards."""
    alg, F = session.alg, session.F
    gt = session.gt
    p = F.p
    m = session.scenario.m
    zeta = session.zeta
    if m == 1:
        return _verified_cartan(session, [v for v in alg.torus_subspace()])
    w, placed = weyl_from_cycles(gt, session.scenario.cycles)
    half = m // 2
    vectors = []
    for coords, sign in placed:
        N = gt.N
        diag = np.zeros(N, dtype=np.int64)
        if session.scenario.outer:
            if len(coords) == 1 or len(coords) not in (m, half):
                continue
            base = (-zeta) % p
            L = len(coords)
            for q, c in enumerate(coords, start=1):
                diag[c - 1] = pow(base, (L - q) % L, p)
        elif sign == "+" and len(coords) == m:
            zinv = pow(zeta, p - 2, p)
            for q, c in enumerate(coords, start=1):
                diag[c - 1] = pow(zinv, q, p)
        elif sign == "-" and len(coords) == half:
            zinv = pow(zeta, p - 2, p)
            for q, c in enumerate(coords, start=1):
                diag[c - 1] = pow(zinv, q - 1, p)
        else:
            continue
        if gt.signed:
            for c in coords:
                diag[N - c] = (-diag[c - 1]) % p
        vectors.append(alg.coords(np.diag(diag) % p))
    return _verified_cartan(session, vectors)


def _verified_cartan(session, vectors) -> CartanSubspace:
    alg, grading = session.alg, session.grading
    p = alg.p
    for v in vectors:
        if not linalg.in_row_space(v, grading.piece(1), p):
            raise CheckError("explicit Cartan element is not in g(1)")
    mats = [alg.from_coords(v) for v in vectors]
    for i in range(len(mats)):
        if not linalg.is_semisimple(mats[i], p):
            raise CheckError("explicit Cartan element is not semisimple")
        for j in range(i + 1, len(mats)):
            if np.any(linalg.bracket(mats[i], mats[j], p)):
                raise CheckError("explicit Cartan elements do not commute")
    if vectors:
        basis = linalg.row_space(np.stack(vectors), p)
    else:
        basis = np.zeros((0, alg.dim), dtype=np.int64)
    maximal = maximality_certificate(session, basis)
    return CartanSubspace([row for row in basis], int(basis.shape[0]), maximal)


def maximality_certificate(session, basis) -> bool:
    """Certify maximality: the semisimple parts of an echelon spanning set
    of z_{g(1)}(c) all lie in span(c) + z(g)."""
    alg = session.alg
    p = alg.p
    mats = [alg.from_coords(v) for v in basis]
    zc = centralizer_in(alg, mats, session.grading.piece(1)) if len(mats) else session.grading.piece(1)
    center = algebra_center(alg)
    parts = [b for b in (basis, center) if b.shape[0]]
    ambient = linalg.row_space(np.vstack(parts), p) if parts else np.zeros((0, alg.dim), dtype=np.int64)
    for v in zc:
        sv = alg.coords(linalg.semisimple_part(alg.from_coords(v), p))
        if ambient.shape[0] == 0:
            if np.any(sv):
                return False
        elif not linalg.in_row_space(sv, ambient, p):
            return False
    return True


def brute_cartan(session, seed: int, budget: int) -> CartanSubspace:
    """Greedy randomized Cartan search: extend a commuting semisimple
    family by semisimple parts of random elements of the current
    centralizer, until `budget` consecutive failures."""
    alg, grading = session.alg, session.grading
    p = alg.p
    rng = random.Random(seed)
    family = []
    fam_mats = []
    current = grading.piece(1)
    failures = 0
    while failures < budget and current.shape[0] > 0:
        v = sample_from(current, rng, p)
        S = linalg.semisimple_part(alg.from_coords(v), p)
        sv = alg.coords(S)
        span = np.stack(family + [sv]) if family else sv.reshape(1, -1)
        if np.any(sv) and linalg.rank(span, p) == len(family) + 1:
            family.append(sv)
            fam_mats.append(S)
            current = centralizer_in(alg, fam_mats, grading.piece(1))
            failures = 0
        else:
            failures += 1
    if family:
        basis = linalg.row_space(np.stack(family), p)
    else:
        basis = np.zeros((0, alg.dim), dtype=np.int64)
    maximal = maximality_certificate(session, basis)
    return CartanSubspace([row for row in basis], int(basis.shape[0]), maximal)


@dataclass
class FittingPair:
    zero_part: np.ndarray
    one_part: np.ndarray
    witness: np.ndarray  # the generic element used


def ad_matrix(alg, X):
    p = alg.p
    out = np.zeros((alg.dim, alg.dim), dtype=np.int64)
    for k, b in enumerate(alg.basis):
        out[:, k] = alg.coords(linalg.bracket(X, b, p))
    return out


def restrict_operator(alg, op, subspace, p):
    """Matrix of op restricted to the row space `subspace`, in that basis.
    op must stabilize the subspace."""
    k = subspace.shape[0]
    out = np.zeros((k, k), dtype=np.int64)
    for i in range(k):
        img = (op @ subspace[i]) % p
        coeffs = linalg.solve(subspace.T, img, p)
        if coeffs is None:
            raise CheckError("operator does not stabilize the subspace")
        out[:, i] = coeffs
    return out


def fitting(session, h_basis, seed=0, attempts=100) -> FittingPair:
    """Fitting decomposition of g(1) under a commutative h.

    zero part = kernel of (ad x)^K on g(1) and one part its image, K a
    multiple of m at least dim g, for a sampled x in h certified generic:
    every element of h acts nilpotently on the zero part."""
    alg, grading = session.alg, session.grading
    p = alg.p
    m = grading.m
    dim = alg.dim
    piece1 = grading.piece(1)
    h_mats = [alg.from_coords(v) for v in h_basis]
    for i in range(len(h_mats)):
        for j in range(i + 1, len(h_mats)):
            if np.any(linalg.bracket(h_mats[i], h_mats[j], p)):
                raise SpecError("h is not commutative")
    if len(h_mats) == 0 or piece1.shape[0] == 0:
        return FittingPair(piece1, np.zeros((0, dim), dtype=np.int64), np.zeros(dim, dtype=np.int64))
    K = m * ((dim + m - 1) // m)
    rng = random.Random(seed)
    ad_pows = [linalg.matpow(ad_matrix(alg, X), K, p) for X in h_mats]
    for _ in range(attempts):
        hv = sample_from(np.stack(h_basis), rng, p)
        B = restrict_operator(alg, linalg.matpow(ad_matrix(alg, alg.from_coords(hv)), K, p), piece1, p)
        ker = linalg.kernel_basis(B, p)
        zero_part = linalg.row_space((ker @ piece1) % p, p) if ker.shape[0] else np.zeros((0, dim), dtype=np.int64)
        img = linalg.row_space(B.T, p)
        one_part = linalg.row_space((img @ piece1) % p, p) if img.shape[0] else np.zeros((0, dim), dtype=np.int64)
        if zero_part.shape[0] + one_part.shape[0] != piece1.shape[0]:
            continue
        # generic iff the whole family acts nilpotently on the zero part
        generic = all(
            not np.any((adK @ zero_part.T) % p) for adK in ad_pows
        )
        if generic:
            return FittingPair(zero_part, one_part, hv)
    raise CheckError("no generic element found for the Fitting decomposition")


@dataclass
class TorusDecomposition:
    pieces: dict  # divisor d -> echelon basis of ker Phi_{m/d}(dtheta) on t
    refinement_ok: bool
    rank_identity_ok: bool


def euler_phi(m):
    return sum(1 for i in range(1, m + 1) if gcd(i, m) == 1)


def torus_decomposition(session, cartan_rank=None) -> TorusDecomposition:
    """Divisor decomposition of the diagonal torus under dtheta, with the
    eigenspace refinement piece_d = sum over gcd(i, m) = d of t(i) and
    the rank identity dim piece_1 = r * phi(m)."""
    alg, grading, F = session.alg, session.grading, session.F
    p = F.p
    m = grading.m
    t = alg.torus_subspace()
    op = restrict_operator(alg, session.operator, t, p)
    pieces = {}
    total = 0
    refinement_ok = True
    for d in _divisors(m):
        phi = cyclotomic_mod_p(m // d, F)
        ker = linalg.kernel_basis(linalg.pol_eval_matrix(phi, op, p), p)
        pieces[d] = (
            linalg.row_space((ker @ t) % p, p)
            if ker.shape[0]
            else np.zeros((0, alg.dim), dtype=np.int64)
        )
        total += pieces[d].shape[0]
        rows = [
            linalg.intersect_row_spaces(t, grading.piece(i), p)
            for i in range(m)
            if gcd(i, m) == d  # gcd(0, m) = m covers the fixed piece
        ]
        rows = [r for r in rows if r.shape[0]]
        ref = linalg.row_space(np.vstack(rows), p) if rows else np.zeros((0, alg.dim), dtype=np.int64)
        if ref.shape[0] != pieces[d].shape[0] or (
            ref.shape[0] and not linalg.same_row_space(ref, pieces[d], p)
        ):
            refinement_ok = False
    if total != t.shape[0]:
        raise CheckError("divisor pieces do not decompose the torus (is p | m?)")
    rank_ok = True
    if cartan_rank is not None:
        rank_ok = pieces[1].shape[0] == cartan_rank * euler_phi(m)
    return TorusDecomposition(pieces, refinement_ok, rank_ok)


def _divisors(m):
    return [d for d in range(1, m + 1) if m % d == 0]


def general_position(session, cartan: CartanSubspace, seed: int, attempts=200):
    """Element c0 of the Cartan subspace with z_g(c0) = z_g(c), found by
    seeded sampling and certified by exact centralizer comparison."""
    alg = session.alg
    p = alg.p
    if cartan.r < 1:
        raise SpecError("general position needs rank >= 1")
    basis = np.stack(cartan.basis)
    mats = [alg.from_coords(v) for v in cartan.basis]
    target = centralizer_in(alg, mats, full_space(alg))
    rng = random.Random(seed)
    for _ in range(attempts):
        v = sample_from(basis, rng, p)
        if not np.any(v):
            continue
        z = centralizer_in(alg, [alg.from_coords(v)], full_space(alg))
        if z.shape[0] == target.shape[0] and linalg.same_row_space(z, target, p):
            return v
    raise CheckError("no general-position element found; field too small?")


@dataclass
class ZeroRankReport:
    center_part_dim: int
    samples_nilpotent: bool
    zero_rank: bool


def zero_rank_check(session, seed: int, samples=200) -> ZeroRankReport:
    """s = g(1) meet z(g) exactly; then sampled nilpotency of
    g(1) meet [g, g] (a complement of s there consists of nilpotents
    precisely in the zero-rank case)."""
    alg, grading = session.alg, session.grading
    p = alg.p
    piece1 = grading.piece(1)
    center = algebra_center(alg)
    s = (
        linalg.intersect_row_spaces(piece1, center, p)
        if center.shape[0]
        else np.zeros((0, alg.dim), dtype=np.int64)
    )
    rows = []
    for i in range(alg.dim):
        for j in range(i + 1, alg.dim):
            rows.append(alg.coords(linalg.bracket(alg.basis[i], alg.basis[j], p)))
    derived = linalg.row_space(np.stack(rows), p)
    test_space = linalg.intersect_row_spaces(piece1, derived, p)
    rng = random.Random(seed)
    all_nilpotent = True
    for _ in range(samples if test_space.shape[0] else 0):
        v = sample_from(test_space, rng, p)
        if not linalg.is_nilpotent(alg.from_coords(v), p):
            all_nilpotent = False
            break
    zero_rank = all_nilpotent and s.shape[0] == 0
    return ZeroRankReport(int(s.shape[0]), all_nilpotent, zero_rank)
