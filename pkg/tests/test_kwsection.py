import random

import numpy as np
import pytest

from thetagrade import linalg
from thetagrade.cartan import explicit_cartan
from thetagrade.classical import GroupType, center_elements
from thetagrade.field import PrimeField, choose_field
from thetagrade.kwsection import (
    associated_cocharacter,
    build_section,
    chevalley_check,
    fiber_dimension_check,
    g0_invariance_sampler,
    invariant_generators,
    kw_model,
    nilpotent_vanishing,
    table1_subgroup,
    truncated_exponential,
    verify_section,
)
from thetagrade.littleweyl import action_on_cartan, certified_subgroups, identify_gmqr, w_theta
from thetagrade.mpoly import MPoly, pfaffian_numeric
from thetagrade.scenario import Scenario, open_session


def test_family_degrees():
    F = PrimeField(13)
    assert invariant_generators(GroupType("SL", 3), F).all_degrees() == [2, 3]
    assert invariant_generators(GroupType("Sp", 2), F).all_degrees() == [2, 4]
    so6 = invariant_generators(GroupType("SO_even", 3), F)
    assert so6.all_degrees() == [2, 4, 3]  # c2, c4 and the degree-3 Pfaffian


def test_pfaffian_squared_is_determinant_on_so6():
    gt = GroupType("SO_even", 3)
    F = choose_field(gt, 6, 3)
    p = F.p
    from thetagrade.classical import build_algebra, form_matrix
    from thetagrade.grading import sample_from

    alg = build_algebra(gt, F)
    J = form_matrix(gt, p)
    rng = random.Random(2)
    for _ in range(20):
        X = alg.from_coords(sample_from(linalg.eye(alg.dim), rng, p))
        S = linalg.matmul(X, J, p)
        pf = pfaffian_numeric(S, p)
        det = linalg.char_poly(S, p)[0] % p  # (-1)^6 det = constant coeff
        assert pf * pf % p == det


def test_odd_symplectic_coefficients_vanish():
    gt = GroupType("Sp", 2)
    F = choose_field(gt, 4, 2)
    p = F.p
    from thetagrade.classical import build_algebra
    from thetagrade.grading import sample_from

    alg = build_algebra(gt, F)
    rng = random.Random(5)
    for _ in range(20):
        X = alg.from_coords(sample_from(linalg.eye(alg.dim), rng, p))
        cp = linalg.char_poly(X, p)
        cp = cp + [0] * (5 - len(cp))
        assert cp[4 - 1] % p == 0 and cp[4 - 3] % p == 0  # c1 = c3 = 0


def test_restriction_to_zero_subspace():
    F = PrimeField(13)
    fam = invariant_generators(GroupType("SL", 3), F)
    base = np.zeros((3, 3), dtype=np.int64)
    restrictions = fam.restrict_affine(base, [])
    assert all(f.is_zero() for f in restrictions)


def test_restriction_c3_frozen_f13():
    """c_3 of sl(3) restricted to the line through diag(9, 3, 1) over
    F_13: the determinant is 27 = 1, so c_3 = -det = 12 and the
    restriction is 12 s^3."""
    ses = open_session(Scenario("SL", 3, 3, [(3, "+")], prime=13, seed=1))
    fam = invariant_generators(ses.gt, ses.F)
    c1 = np.diag(np.array([9, 3, 1], dtype=np.int64))
    base = np.zeros((3, 3), dtype=np.int64)
    c2_r, c3_r = fam.restrict_affine(base, [c1])
    assert c2_r.is_zero()  # e_2 of the cube roots of 1 vanishes
    assert c3_r.terms == {(3,): 12}
    # homogeneous scaling: c3(s c1) = s^3 c3(c1)
    for s in range(13):
        assert c3_r.evaluate([s]) == pow(s, 3, 13) * 12 % 13
    # and the restriction is invariant under s -> zeta s (zeta = 3)
    assert c3_r.compose_linear([[3]]) == c3_r


@pytest.mark.parametrize(
    "key,L,kind",
    [
        ("sl3", "SL(3)", "sl_inner"),
        ("sl6", "SL(6)", "sl_inner"),
        ("sp6", "Sp(6)", "sp_c"),
        ("sp4", "Sp(4)", "sp_c"),
        ("so5", "SO(5)", "so_a"),
        ("so7", "SO(7)", "so_a"),
        ("so6", "SO(6)", "so_b"),
        ("so8", "SO(7)", "so_a"),
        ("sl3_outer", "SL(3)", "sl_outer"),
        ("sl4_outer", "SO(4)", "so_bj"),
        ("zero_rank", "trivial", "zero_rank"),
    ],
)
def test_table1_subgroup(session_for, key, L, kind):
    ses = session_for(key)
    r = explicit_cartan(ses).r
    t1 = table1_subgroup(ses, r)
    assert t1.label == L
    assert t1.model_kind == kind
    assert t1.verified


def test_table1_so8_embedding_is_so7(session_for):
    ses = session_for("so8")
    t1 = table1_subgroup(ses, 1)
    assert t1.sub_basis is not None and t1.sub_basis.shape[0] == 21
    # theta-stable and contains the Cartan subspace (checked in verified);
    # additionally closed under brackets
    p = ses.F.p
    alg = ses.alg
    mats = [alg.from_coords(v) for v in t1.sub_basis]
    rng = random.Random(0)
    for _ in range(20):
        a = mats[rng.randrange(len(mats))]
        b = mats[rng.randrange(len(mats))]
        br = alg.coords(linalg.bracket(a, b, p))
        assert linalg.in_row_space(br, t1.sub_basis, p)


def test_regular_nilpotent_sl_inner_first_superdiagonal(session_for):
    """Case-1 normalized model: t = diag(zeta^{k-1}, ..., 1) and e the
    first superdiagonal; d(theta) e = zeta e."""
    ses = session_for("sl3")
    model = kw_model("sl_inner", 3, 3, ses.F)
    p = ses.F.p
    assert np.array_equal(model.e, np.array([[0, 1, 0], [0, 0, 1], [0, 0, 0]], dtype=np.int64))
    t = model.normalizer
    zeta = model.zeta
    assert int(t[0, 0]) == pow(zeta, 2, p) and int(t[1, 1]) == zeta and int(t[2, 2]) == 1
    e12 = np.zeros((3, 3), dtype=np.int64)
    e12[0, 1] = 1
    conj = linalg.matmul(linalg.matmul(t, e12, p), linalg.invert(t, p), p)
    assert np.array_equal(conj, zeta * e12 % p)


def test_regular_nilpotent_so_a_sign_pattern(session_for):
    ses = session_for("so7")
    model = kw_model("so_a", 3, 3, ses.F)
    p = ses.F.p
    e = model.e
    for i in range(3):
        assert e[i, i + 1] == 1
    for i in range(3, 6):
        assert e[i, i + 1] == p - 1
    # membership in so(7) and regularity are verified by the model builder


def test_regular_nilpotent_sp_c_xi_powers(session_for):
    """Case (c): t = diag(xi^{2m-1}, ..., xi) with xi^2 = zeta."""
    ses = session_for("sp4")
    model = kw_model("sp_c", 2, 4, ses.F)
    p = ses.F.p
    xi = None
    from thetagrade.field import root_of_unity

    xi = root_of_unity(ses.F, 8)
    t = model.normalizer
    assert [int(t[j, j]) for j in range(4)] == [pow(xi, k, p) for k in (3, 1, -1 % 8, -3 % 8)]
    assert pow(xi, 2, p) == model.zeta


def test_associated_cocharacter_values(session_for):
    ses3 = session_for("sl3")
    m3 = kw_model("sl_inner", 3, 3, ses3.F)
    assert associated_cocharacter(m3) == [2, 0, -2]
    ses6 = session_for("sl6")
    m6 = kw_model("sl_inner", 6, 3, ses6.F)
    assert associated_cocharacter(m6) == [5, 3, 1, -1, -3, -5]
    ses4 = session_for("sp4")
    m4 = kw_model("sp_c", 2, 4, ses4.F)
    assert associated_cocharacter(m4) == [3, 1, -1, -3]


def test_build_section_sl3_dims(session_for):
    ses = session_for("sl3")
    model = kw_model("sl_inner", 3, 3, ses.F)
    sec = build_section(model, 1)
    assert sec.dims == (3, 2) and len(sec.u_basis) == 1
    # u is ad-h stable: a single weight vector
    assert sec.u_weights == [-4]


def test_build_section_sl6_dims(session_for):
    ses = session_for("sl6")
    model = kw_model("sl_inner", 6, 3, ses.F)
    sec = build_section(model, 2)
    assert sec.dims == (12, 10) and len(sec.u_basis) == 2


def test_build_section_zero_rank(session_for):
    ses = session_for("zero_rank")
    model = kw_model("zero_rank", 0, 3, ses.F, ses)
    sec = build_section(model, 0)
    assert sec.u_basis == [] and sec.dims[1] == sec.dims[0]


def test_verify_section_sl3_linear_restriction(session_for):
    """F_3 restricted to e + u is linear in the slice coordinate with a
    nonzero linear term, so the Jacobian is nonsingular everywhere."""
    ses = session_for("sl3")
    model = kw_model("sl_inner", 3, 3, ses.F)
    sec = build_section(model, 1)
    fam = invariant_generators(model.gt, model.F)
    restrictions = fam.restrict_affine(sec.e, sec.u_basis)
    deg3 = restrictions[1]
    assert deg3.degree() == 1 and not deg3.partial(0).is_zero()
    rep = verify_section(model, sec, fam, seed=9)
    assert rep.passed
    assert rep.jacobian_good_points == rep.jacobian_points_total == 100


@pytest.mark.parametrize("key", ["sl3", "sl6", "sp6", "sp4", "so5", "so7", "so6", "so8", "sl3_outer", "sl4_outer", "zero_rank"])
def test_sections_verify_on_grid(session_for, key):
    ses = session_for(key)
    r = explicit_cartan(ses).r
    t1 = table1_subgroup(ses, r)
    model = kw_model(t1.model_kind, t1.model_param, t1.m_eff, ses.F, ses)
    sec = build_section(model, r)
    fam = invariant_generators(model.gt, model.F)
    rep = verify_section(model, sec, fam, seed=20240800)
    assert rep.passed
    assert sec.dims[1] == sec.dims[0] - r


def test_chevalley_sl3(session_for):
    ses = session_for("sl3")
    c = explicit_cartan(ses)
    fam = invariant_generators(ses.gt, ses.F)
    w1 = action_on_cartan(ses, w_theta(ses), c)
    wc, _ = certified_subgroups(ses, w1, c, center_elements(ses.gt, ses.F))
    lab = identify_gmqr(wc.actions, ses.F, c.r)
    rep = chevalley_check(ses, fam, c, wc.actions, lab.degrees(), seed=1)
    assert rep.passed
    assert rep.degree_multiset == [3]


def test_chevalley_m1_classical_degrees():
    """m = 1: restrictions of the sl(3) generators to the full Cartan are
    the elementary symmetric functions, degrees {2, 3} = the S_3
    degrees."""
    ses = open_session(Scenario("SL", 3, 1, [(1, "+")] * 3, seed=5))
    c = explicit_cartan(ses)
    fam = invariant_generators(ses.gt, ses.F)
    rep = chevalley_check(ses, fam, c, [], [2, 3], seed=1)
    assert rep.degrees_match and rep.jacobian_rank_ok
    assert rep.degree_multiset == [2, 3]


def test_chevalley_sp6_degree_six(session_for):
    ses = session_for("sp6")
    c = explicit_cartan(ses)
    fam = invariant_generators(ses.gt, ses.F)
    rep = chevalley_check(ses, fam, c, [], [6], seed=1)
    assert rep.degrees_match and rep.jacobian_rank_ok


def test_truncated_exponential_is_group_element(session_for):
    ses = session_for("so6")
    p = ses.F.p
    from thetagrade.classical import in_group
    from thetagrade.grading import sample_from

    rng = random.Random(3)
    for _ in range(10):
        v = sample_from(ses.grading.piece(0), rng, p)
        x = linalg.nilpotent_part(ses.alg.from_coords(v), p)
        U = truncated_exponential(x, p)
        assert in_group(ses.gt, U, p)
        # U is unipotent: (U - 1)^N = 0
        assert linalg.is_nilpotent((U - linalg.eye(ses.gt.N)) % p, p)


@pytest.mark.parametrize("key", ["sl3", "sp4", "so6", "sl4_outer"])
def test_g0_invariance_and_nilpotent_vanishing(session_for, key):
    ses = session_for(key)
    fam = invariant_generators(ses.gt, ses.F)
    ok, checked = g0_invariance_sampler(ses, fam, seed=31)
    assert ok and checked >= 50
    assert nilpotent_vanishing(ses, fam, seed=37)


@pytest.mark.parametrize("key", ["sl3", "sl6", "so8", "zero_rank"])
def test_fiber_dimension(session_for, key):
    ses = session_for(key)
    c = explicit_cartan(ses)
    ok, found = fiber_dimension_check(ses, c, seed=41)
    assert ok and found == 20
