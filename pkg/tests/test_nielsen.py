import pytest

from excov.errors import ValidationError
from excov.grouptheory import Perm, group_from_gens
from excov.nielsen import (
    NielsenTuple,
    braid_act,
    braid_orbit,
    braid_unact,
    cyclic_branch_pair,
    dickson_branch_triple,
    dickson_tower_cycles,
    difference_sets,
    modular_nielsen,
    modular_tuple_perms,
    q2_reduced_orbit,
    rational_union_check,
    rh_genus,
    validate_tuple,
)


def C(text, n):
    return Perm.from_cycles(text, n)


# -- validation -----------------------------------------------------------------


def test_dickson_triple_entries():
    t = dickson_branch_triple(5)
    assert t.perms[0] == C("(1 5)(2 4)", 5)
    assert t.perms[1] == C("(5 2)(4 3)", 5)
    assert (t.perms[0] * t.perms[1]) == C("(1 2 3 4 5)", 5)
    assert t.group.order == 10


def test_dickson_triple_validates():
    assert validate_tuple(dickson_branch_triple(5)) == []
    assert validate_tuple(dickson_branch_triple(7)) == []


def test_product_one_violation():
    g = C("(1 2)", 2)
    t = NielsenTuple((g, g, g), group_from_gens([g]))
    problems = validate_tuple(t)
    assert len(problems) == 1 and "product-one" in problems[0]


def test_generation_violation():
    s4 = group_from_gens([C("(1 2 3 4)", 4), C("(1 2)", 4)])
    g = C("(1 2)(3 4)", 4)
    problems = validate_tuple(NielsenTuple((g, g), s4))
    assert any("generation" in p for p in problems)
    assert not any("product-one" in p for p in problems)


def test_outside_group_flagged_without_blowup():
    z2 = group_from_gens([C("(1 2)", 4)])
    t = NielsenTuple((C("(1 2 3 4)", 4), C("(1 4 3 2)", 4)), z2)
    assert any("generation" in p for p in validate_tuple(t))


def test_class_membership_violation():
    s3 = group_from_gens([C("(1 2 3)", 3), C("(1 2)", 3)])
    t = NielsenTuple(
        (C("(1 2 3)", 3), C("(1 3 2)", 3)),
        s3,
        class_reps=(C("(1 2)", 3), C("(1 2)", 3)),
    )
    assert any("class-membership" in p for p in validate_tuple(t))


def test_class_membership_needs_conjugacy_not_just_cycle_type():
    # inside an abelian group distinct 3-cycles are not conjugate
    s = C("(1 2 3)", 3)
    z3 = group_from_gens([s])
    ok = NielsenTuple((s, s, s), z3, class_reps=(s, s, s))
    assert validate_tuple(ok) == []
    bad = NielsenTuple((s, s, s), z3, class_reps=(s, s, s.inverse()))
    assert any("class-membership" in p for p in validate_tuple(bad))


# -- genus ----------------------------------------------------------------------


def test_genus_dickson_triples_zero():
    for n in range(3, 16, 2):
        assert rh_genus(dickson_branch_triple(n)) == 0


def test_genus_cyclic_pairs_zero():
    for n in range(2, 12):
        assert rh_genus(cyclic_branch_pair(n)) == 0


def test_genus_point_reflection_tuples_zero():
    # each involution on p^2 letters keeps one point, giving index p^2-1-...
    for p in (3, 5):
        t = modular_tuple_perms(p, 0, (1, 0), (0, 1))
        n = p * p
        for g in t.perms:
            assert g.fixed_count() == 1
            assert n - len(g.cycles()) - g.fixed_count() == (n - 1) // 2
        assert rh_genus(t) == 0


def test_genus_intransitive_rejected():
    g = C("(1 2)", 4)
    with pytest.raises(ValidationError, match="transitive"):
        rh_genus(NielsenTuple((g, g), group_from_gens([g])))


def test_genus_odd_index_sum_rejected():
    t = NielsenTuple(
        (C("(1 2)", 3), C("(1 2 3)", 3)),
        group_from_gens([C("(1 2)", 3), C("(1 2 3)", 3)]),
    )
    with pytest.raises(ValidationError, match="odd index"):
        rh_genus(t)


def test_genus_negative_rejected():
    s = C("(1 2 3)", 3)
    with pytest.raises(ValidationError, match="negative"):
        rh_genus(NielsenTuple((s,), group_from_gens([s])))


# -- braid moves ----------------------------------------------------------------


def test_braid_twist_formula():
    a, b, c = C("(1 2)", 3), C("(2 3)", 3), C("(1 3)", 3)
    t = NielsenTuple((a, b, c), group_from_gens([a, b]))
    out = braid_act(t, 1)
    assert out.perms == (a * b * a.inverse(), a, c)
    out2 = braid_act(t, 2)
    assert out2.perms == (a, b * c * b.inverse(), b)


def test_braid_inverse_roundtrip():
    t = dickson_branch_triple(7)
    for i in (1, 2):
        assert braid_unact(braid_act(t, i), i).perms == t.perms
        assert braid_act(braid_unact(t, i), i).perms == t.perms


def test_braid_index_range():
    t = dickson_branch_triple(5)
    with pytest.raises(ValidationError):
        braid_act(t, 0)
    with pytest.raises(ValidationError):
        braid_act(t, 3)


def test_two_twist_composite_on_tower_tuple():
    # apply the middle twist then the first: the third slot inherits the
    # original second entry and the head picks up a double conjugate
    tower = dickson_tower_cycles(3, 2).tuple
    g11, g12, g21, g22, ginf = tower.perms
    out = braid_act(braid_act(tower, 2), 1)
    g2p = g12 * g21 * g12.inverse()
    g1p = g11 * g2p * g11.inverse()
    assert out.perms == (g1p, g11, g12, g22, ginf)


def test_braid_preserves_validity():
    t = dickson_branch_triple(5)
    for member in braid_orbit(t, equivalence="inner"):
        assert validate_tuple(member) == []
        assert {g.cycle_type() for g in member.perms} == {
            g.cycle_type() for g in t.perms
        }


def test_braid_orbit_representative_independent():
    t = dickson_branch_triple(5)
    orbit = braid_orbit(t, equivalence="inner")
    again = braid_orbit(orbit[-1], equivalence="inner")
    assert len(orbit) == len(again)
    key = lambda m: tuple(g.images for g in m.perms)
    assert sorted(map(key, orbit)) == sorted(map(key, again))


def test_plain_orbit_at_least_as_fine():
    t = dickson_branch_triple(5)
    plain = braid_orbit(t, equivalence="none")
    inner = braid_orbit(t, equivalence="inner")
    assert len(plain) >= len(inner)


def test_reduced_orbit_requires_length_four():
    with pytest.raises(ValidationError):
        q2_reduced_orbit(dickson_branch_triple(5))


def test_reduced_orbit_partitions_the_braid_orbit():
    t = modular_tuple_perms(3, 0, (1, 0), (0, 1))
    sub = q2_reduced_orbit(t, equivalence="inner")
    full = braid_orbit(t, equivalence="inner")
    assert 1 <= len(sub) <= len(full)


# -- towers ---------------------------------------------------------------------


def test_tower_level_one_matches_base_triple():
    tower = dickson_tower_cycles(5, 1)
    assert tower.degree == 5
    assert tower.tuple.perms == dickson_branch_triple(5).perms


def test_tower_level_two_shape():
    tower = dickson_tower_cycles(3, 2)
    assert tower.degree == 9 and tower.levels == 2
    t = tower.tuple
    assert t.r == 5
    assert validate_tuple(t) == []
    closing = t.perms[-1]
    assert sorted(len(c) for c in closing.cycles()) == [3, 3, 3]
    # diagonal staircase: the full product advances both digits together
    forward = closing.inverse()
    assert forward.act(0) == 4 and forward.act(4) == 8 and forward.act(8) == 0


def test_tower_accepts_a_list_for_levels():
    tower = dickson_tower_cycles(3, [2, 7])
    assert tower.levels == 2 and tower.degree == 9


def test_tower_genus_from_index_sum():
    # derived expectation: m levels of (n-1)/2-transposition pairs plus the
    # n-cycle closing entry
    for n, m in ((3, 2), (5, 2), (3, 3)):
        got = rh_genus(dickson_tower_cycles(n, m).tuple)
        ind = m * (n - 1) * n ** (m - 1) + n ** m - n ** (m - 1)
        assert got == ind // 2 - n ** m + 1
        assert got >= 0


def test_tower_rejects_even_or_tiny():
    with pytest.raises(ValidationError):
        dickson_tower_cycles(4, 2)
    with pytest.raises(ValidationError):
        dickson_tower_cycles(5, 0)


# -- point-reflection classification ---------------------------------------------


def test_modular_sizes_are_guarded():
    with pytest.raises(ValidationError):
        modular_nielsen(5, 1)  # 25 letters per coordinate is past the guard
    with pytest.raises(ValidationError):
        modular_nielsen(9)
    with pytest.raises(ValidationError):
        modular_nielsen(2)


def test_modular_class_counts():
    out = modular_nielsen(3)
    # |GL2(F3)| / 2 distinct normalized spanning pairs
    assert out.inner_class_count == 48 // 2
    assert out.abs_class_count == 1
    assert out.inner_braid_orbit_count == 2


def test_modular_braid_orbits_grow_with_p():
    assert modular_nielsen(5).inner_braid_orbit_count == 4
    assert modular_nielsen(7).inner_braid_orbit_count == 6
    assert modular_nielsen(3, 1).inner_braid_orbit_count == 6


def test_modular_abs_always_single():
    for p, k in ((3, 0), (5, 0), (7, 0), (3, 1)):
        assert modular_nielsen(p, k).abs_class_count == 1


def test_modular_tuples_are_normalized():
    out = modular_nielsen(3, 1)
    m = 9
    assert out.inner_class_count == len(out.tuples)
    for v1, v2, v3, v4 in out.tuples:
        assert v1 == (0, 0)
        assert v4 == ((v3[0] - v2[0]) % m, (v3[1] - v2[1]) % m)
        assert (v2[0] * v3[1] - v2[1] * v3[0]) % 3 != 0


def _symbol_of(perms, m):
    """Recover the normalized (v2, v3) symbol from point-reflection perms."""
    raw = []
    for g in perms:
        v = g.act(0)  # reflection sends the origin to its vector
        raw.append((v // m, v % m))
    v1 = raw[0]
    shifted = [((a - v1[0]) % m, (b - v1[1]) % m) for a, b in raw]
    v2, v3 = shifted[1], shifted[2]
    neg = ((-v2[0]) % m, (-v2[1]) % m), ((-v3[0]) % m, (-v3[1]) % m)
    return min((v2, v3), neg)


def test_symbol_braid_maps_match_real_twists():
    # independent check of the symbol algebra: act on genuine permutations,
    # renormalize, and compare with the closed-form maps
    for p in (3, 5):
        m = p
        samples = [((1, 0), (0, 1)), ((1, 2 % m), (1, 1)), ((0, 1), (1, 0))]
        for v2, v3 in samples:
            t = modular_tuple_perms(p, 0, v2, v3)

            def expect_q1():
                return min(
                    (v2, ((v3[0] + v2[0]) % m, (v3[1] + v2[1]) % m)),
                    (
                        ((-v2[0]) % m, (-v2[1]) % m),
                        ((-v3[0] - v2[0]) % m, (-v3[1] - v2[1]) % m),
                    ),
                )

            def expect_q2():
                w2 = ((2 * v2[0] - v3[0]) % m, (2 * v2[1] - v3[1]) % m)
                return min(
                    (w2, v2),
                    (((-w2[0]) % m, (-w2[1]) % m), ((-v2[0]) % m, (-v2[1]) % m)),
                )

            assert _symbol_of(braid_act(t, 1).perms, m) == expect_q1()
            assert _symbol_of(braid_act(t, 2).perms, m) == expect_q2()
            assert _symbol_of(braid_act(t, 3).perms, m) == expect_q1()


def test_modular_tuple_perms_validate():
    t = modular_tuple_perms(3, 0, (1, 0), (0, 1))
    assert t.group.order == 2 * 9
    assert validate_tuple(t) == []
    assert t.product().is_identity()


def test_modular_braid_count_against_generic_orbits():
    # the symbol count for p=3 must match orbits computed on raw tuples
    out = modular_nielsen(3)
    seen = set()
    orbits = 0
    for (_, v2, v3, _) in out.tuples:
        if (v2, v3) in seen:
            continue
        orbits += 1
        t = modular_tuple_perms(3, 0, v2, v3)
        for member in braid_orbit(t, equivalence="inner"):
            seen.add(_symbol_of(member.perms, 3))
    assert orbits == out.inner_braid_orbit_count


# -- class rationality ------------------------------------------------------------


def test_rational_union_symmetric_group():
    s4 = group_from_gens([C("(1 2 3 4)", 4), C("(1 2)", 4)])
    reps = [C("(1 2 3 4)", 4), C("(1 2)", 4)]
    report = rational_union_check(reps, s4, s4.elements)
    assert report.ok and report.failing == ()


def test_rational_union_fails_for_bare_seven_cycle():
    s = C("(1 2 3 4 5 6 7)", 7)
    z7 = group_from_gens([s])
    report = rational_union_check([s], z7, z7.elements)
    assert not report.ok
    assert 3 in report.failing


def test_rational_union_dihedral_rotation():
    rot = Perm(tuple((i + 1) % 7 for i in range(7)))
    flip = Perm(tuple((-i) % 7 for i in range(7)))
    d7 = group_from_gens([rot, flip])
    assert d7.order == 14
    report = rational_union_check([rot], d7, d7.elements)
    assert not report.ok
    assert 3 in report.failing
    assert 6 not in report.failing  # inversion is realized by a reflection


def test_rational_union_larger_normalizer_can_fix():
    # inside S7 conjugation reaches every power of a 7-cycle
    s = C("(1 2 3 4 5 6 7)", 7)
    z7 = group_from_gens([s])
    s7_gens = [C("(1 2)", 7), C("(1 2 3 4 5 6 7)", 7)]
    s7 = group_from_gens(s7_gens)
    report = rational_union_check([s], z7, s7.elements)
    assert report.ok


# -- difference sets ---------------------------------------------------------------


def test_difference_sets_fano():
    out = difference_sets(7, 3, 1)
    assert (0, 1, 3) in out
    assert len(out) == 2  # two translation classes, mirror images
    for rep in out:
        counts = [0] * 7
        for a in rep:
            for b in rep:
                if a != b:
                    counts[(a - b) % 7] += 1
        assert counts[1:] == [1] * 6


def test_difference_sets_thirteen():
    out = difference_sets(13, 4, 1)
    assert (0, 1, 3, 9) in out
    for rep in out:
        assert rep == min(
            tuple(sorted((a + t) % 13 for a in rep)) for t in range(13)
        )


def test_difference_sets_counting_obstruction():
    assert difference_sets(5, 2, 1) == []
    assert difference_sets(7, 3, 2) == []


def test_difference_sets_validation():
    with pytest.raises(ValidationError):
        difference_sets(1, 1, 1)
    with pytest.raises(ValidationError):
        difference_sets(7, 8, 1)
