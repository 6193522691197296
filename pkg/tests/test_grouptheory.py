"""Coset fixed-point criteria against hand-checked small groups."""

import pytest

from excov.errors import CapExceededError, ValidationError
from excov.frobset import from_residues
from excov.grouptheory import (
    MonodromyData,
    PairedMonodromy,
    Perm,
    PermGroup,
    analyze_rep,
    block_swap,
    component_count,
    coset_exceptionality,
    cyclic_cover_model,
    davenport_trace_test,
    dickson_cover_model,
    fano_actions,
    fiber_tensor,
    group_from_gens,
    idp_trace_test,
    monodromy_from_json,
    parse_perm,
    sdp_check,
)


def C(text, degree=None):
    return Perm.from_cycles(text, degree)


# -- permutations -------------------------------------------------------------


def test_right_action_composition_order():
    # apply (1 2) first, then (2 3): 1 -> 2 -> 3
    p = C("(1 2)", 3) * C("(2 3)", 3)
    assert p == C("(1 3 2)", 3)
    assert p.act(0) == 2


def test_cycle_string_round_trip():
    for text in ["(1 2 3)(4 5)", "(2 7)", "(1 4)(2 5)(3 6)"]:
        p = C(text, 7)
        assert C(p.cycle_string(), 7) == p


def test_parse_one_line():
    assert parse_perm("2,3,1") == C("(1 2 3)", 3)
    assert parse_perm("[2,1,3]") == C("(1 2)", 3)
    with pytest.raises(ValidationError):
        parse_perm("2,2,1")


def test_perm_inverse_power_order():
    p = C("(1 2 3 4 5)(6 7)", 7)
    assert p * p.inverse() == Perm.identity(7)
    assert p ** 10 == (p ** 5) * (p ** 5)
    assert p.order() == 10
    assert (p ** -3) * (p ** 3) == Perm.identity(7)
    assert p.cycle_type() == (5, 2)


# -- groups -------------------------------------------------------------------


def test_cyclic_group_order():
    G = group_from_gens([C("(1 2 3 4 5)")])
    assert G.order == 5


def test_dihedral_from_involution_pair():
    # two involutions whose product is a 5-cycle generate a 10-element group
    g1 = C("(2 5)(3 4)", 5)
    g2 = C("(1 2)(3 5)", 5)
    assert (g1 * g2).cycle_type() == (5,)
    assert group_from_gens([g1, g2]).order == 10


def test_fano_group_order():
    points, lines = fano_actions()
    assert group_from_gens(points).order == 168
    assert group_from_gens(lines).order == 168


def test_fano_generators_preserve_incidence():
    points, lines = fano_actions()

    def bits(label):
        return ((label >> 2) & 1, (label >> 1) & 1, label & 1)

    for gp, gl in zip(points, lines):
        for v in range(7):
            for w in range(7):
                before = sum(a * b for a, b in zip(bits(v + 1), bits(w + 1))) % 2
                gv, gw = gp.act(v), gl.act(w)
                after = sum(a * b for a, b in zip(bits(gv + 1), bits(gw + 1))) % 2
                assert before == after


def test_group_cap():
    with pytest.raises(CapExceededError):
        group_from_gens([C("(1 2 3 4 5 6 7 8)"), C("(1 2)", 8)], cap=100)


def test_analyze_dihedral_5():
    info = analyze_rep(dickson_cover_model(5, 3).group)
    assert info["transitive"]
    assert info["primitive"]
    assert not info["doubly_transitive"]
    assert info["self_normalizing"]


def test_analyze_cyclic_4_regular():
    info = analyze_rep(group_from_gens([C("(1 2 3 4)")]))
    assert info["transitive"]
    assert not info["primitive"]  # blocks {1,3},{2,4}
    assert not info["self_normalizing"]  # regular abelian centralizes itself


def test_analyze_affine_sign_group_on_nine_points():
    # maps x -> +-x + v on pairs over Z/3; parallel lines form blocks
    def aff(mult, v0, v1):
        images = []
        for i in range(9):
            x, y = divmod(i, 3)
            images.append(((mult * x + v0) % 3) * 3 + ((mult * y + v1) % 3))
        return Perm(tuple(images))

    G = group_from_gens([aff(1, 1, 0), aff(1, 0, 1), aff(-1, 0, 0)])
    assert G.order == 18
    info = analyze_rep(G)
    assert info["transitive"]
    assert not info["primitive"]


def test_analyze_fano_points_two_transitive():
    points, _ = fano_actions()
    info = analyze_rep(group_from_gens(points))
    assert info["doubly_transitive"]
    assert info["primitive"]
    assert info["self_normalizing"]


# -- coset exceptionality -----------------------------------------------------


def test_cyclic_model_matches_gcd_law():
    M = cyclic_cover_model(5, 3)
    assert M.d == 4
    assert coset_exceptionality(M) == from_residues(4, {1, 2, 3})


def test_dickson_model_odd_exponents():
    M = dickson_cover_model(5, 3)
    # multiplication by 9 = -1 already lies in the signed translations
    assert M.d == 2
    assert coset_exceptionality(M) == from_residues(2, {1})


def test_cyclic_model_various():
    # q^t = 1 mod n exactly when ord_n(q) | t
    M = cyclic_cover_model(7, 3)  # ord_7(3) = 6
    got = coset_exceptionality(M)
    for t in range(1, 19):
        assert got.contains(t) == (pow(3, t, 7) != 1)


def test_pr_mode_with_global_fixed_point():
    # append a letter fixed by everything: pr-exceptionality at every t
    base = cyclic_cover_model(5, 2)
    gens = [Perm(g.images + (5,)) for g in base.group.generators]
    tau = Perm(base.tau.images + (5,))
    M = MonodromyData(group_from_gens(gens), tau)
    assert coset_exceptionality(M, "pr-exceptional") == from_residues(1, {0})
    # but exact-one fails at t = 0 since the identity fixes all six
    assert not coset_exceptionality(M, "exceptional").contains(M.d)


def test_doubly_transitive_with_trivial_tau_is_never_exceptional():
    points, _ = fano_actions()
    M = MonodromyData(group_from_gens(points), Perm.identity(7))
    assert M.d == 1
    assert coset_exceptionality(M).is_empty()


def test_tau_must_normalize():
    G = group_from_gens([C("(1 2)", 3)])
    with pytest.raises(ValidationError):
        MonodromyData(G, C("(1 3)", 3))


def test_declared_d_checked():
    G = group_from_gens([C("(1 2 3 4 5)")])
    tau = Perm(tuple((i * 2) % 5 for i in range(5)))
    with pytest.raises(ValidationError):
        MonodromyData(G, tau, d=3)


# -- fiber products -----------------------------------------------------------


def shift5():
    return Perm(tuple((i + 1) % 5 for i in range(5)))


def mult5(c):
    return Perm(tuple((i * c) % 5 for i in range(5)))


def test_component_count_cyclic_geometric():
    diag = fiber_tensor([shift5()], [shift5()])
    assert component_count(diag, off_diagonal=True) == 4
    assert component_count(diag) == 5  # diagonal included


def test_components_fuse_under_frobenius():
    diag = fiber_tensor([shift5()], [shift5()])
    tau = fiber_tensor([mult5(3)], [mult5(3)])
    assert component_count(diag + tau, off_diagonal=True) == 1


def test_component_count_dihedral():
    flip = Perm(tuple((-i) % 5 for i in range(5)))
    diag = fiber_tensor([shift5(), flip], [shift5(), flip])
    assert component_count(diag, off_diagonal=True) == 2


def test_component_count_rejects_diagonal_leak():
    leak = fiber_tensor([shift5()], [Perm.identity(5)])
    with pytest.raises(ValidationError):
        component_count(leak, off_diagonal=True)


def test_fiber_tensor_length_mismatch():
    with pytest.raises(ValidationError):
        fiber_tensor([shift5()], [])


# -- paired trace tests ---------------------------------------------------------


def test_identical_pair_passes_everything():
    g = C("(1 2 3 4 5)")
    P = PairedMonodromy.from_parallel([g], [g], mult5(2), mult5(2))
    assert davenport_trace_test(P) == from_residues(1, {0})
    assert idp_trace_test(P) == from_residues(1, {0})
    assert sdp_check(P)


def test_regular_versus_quotient_fails_range_test():
    # order-2 element: no fixed points regularly, two on the quotient
    P = PairedMonodromy.from_parallel(
        [C("(1 2 3 4)")], [C("(1 2)")], Perm.identity(4), Perm.identity(2)
    )
    assert P.d == 1
    assert davenport_trace_test(P).is_empty()
    assert idp_trace_test(P).is_empty()
    assert not sdp_check(P)


def test_fano_pair_is_isovalent_as_plain_pair():
    points, lines = fano_actions()
    P = PairedMonodromy.from_parallel(
        points, lines, Perm.identity(7), Perm.identity(7)
    )
    assert P.d == 1
    assert idp_trace_test(P) == from_residues(1, {0})
    assert sdp_check(P)


def test_fano_pair_with_duality_swap_is_not_strong():
    points, lines = fano_actions()
    P = PairedMonodromy.from_combined(points, lines, block_swap(7))
    assert P.swaps
    assert P.d == 2
    got = idp_trace_test(P)
    assert got == from_residues(2, {0})
    assert not sdp_check(P)


def test_partial_swap_rejected():
    points, lines = fano_actions()
    bad = Perm(tuple([7] + list(range(1, 7)) + [0] + list(range(8, 14))))
    with pytest.raises(ValidationError):
        PairedMonodromy.from_combined(points, lines, bad)


# -- JSON ----------------------------------------------------------------------


def test_monodromy_from_json_single():
    M = monodromy_from_json(
        {
            "degree": 5,
            "geomGens": ["(1 2 3 4 5)"],
            "tau": "1,3,5,2,4",
        }
    )
    assert isinstance(M, MonodromyData)
    assert M.d == 4
    assert coset_exceptionality(M) == from_residues(4, {1, 2, 3})


def test_monodromy_from_json_checks_declared_d():
    with pytest.raises(ValidationError):
        monodromy_from_json(
            {"degree": 5, "geomGens": ["(1 2 3 4 5)"], "tau": "1,3,5,2,4", "d": 2}
        )


def test_monodromy_from_json_paired():
    P = monodromy_from_json(
        {
            "degree": 4,
            "geomGens": ["(1 2 3 4)"],
            "action2": {"degree": 2, "geomGens": ["(1 2)"]},
        }
    )
    assert isinstance(P, PairedMonodromy)
    assert not sdp_check(P)
