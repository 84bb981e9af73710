import pytest

from postnikov.acceptance import e_beta
from postnikov.enriched import (HomHint, PreconditionNotCertified, augmented_monoid_category, bimodule_category,
                                catwise_tower, check_cube_lemma, coskeleton_tower, full_subcategory,
                                functor_from_keys, group_category, homotopy_category, identity_functor,
                                is_dk_equivalence, is_fibration, is_isofibration, negative_cube_control,
                                point_category, quotient_functor, total_group_category, unit_functor)
from postnikov.groupoid import FiniteGroup

G = FiniteGroup.cyclic(2)


def test_group_category_is_a_simplicial_category():
    C = group_category(G, 2, 3)
    assert C.n == 2
    assert C.check() == []


def test_identity_is_dk_equivalence():
    cert = is_dk_equivalence(identity_functor(group_category(G, 1, 4)), 3)
    assert cert.ok is True and cert.level == 3


def test_full_subcategory_of_codiscrete_objects_is_dk_equivalence():
    _, inc = full_subcategory(group_category(G, 2, 4), [0])
    assert inc.check() == []
    assert is_dk_equivalence(inc, 3).ok is True


def test_quotient_from_total_category_is_fibration():
    C = group_category(G, 1, 4)
    E, _ = total_group_category(G, 4)
    q = quotient_functor(E, C, G)
    assert is_isofibration(q).ok is True
    assert is_fibration(q, 3).ok is True


def test_unit_functor_detects_hom_homotopy():
    cert = is_dk_equivalence(unit_functor(group_category(G, 1, 4)), 3)
    assert cert.ok is False
    assert "pi_1" in cert.details[0]


def test_unit_into_discrete_objects_is_not_essentially_surjective():
    cert = is_dk_equivalence(unit_functor(point_category(4, 2, codiscrete=False)), 3)
    assert cert.ok is False
    assert "essentially surjective refuted" in cert.details[1]


def test_homotopy_category_of_group_nerve_is_trivial():
    H = homotopy_category(group_category(G, 1, 4))
    assert H.is_monoid_trivial()
    assert H.isomorphisms(0, 0) == [0]


def test_negative_cube_fails_conclusion():
    rep = check_cube_lemma(*negative_cube_control(3), D=3, strict=False)
    assert not rep.hypotheses_hold
    assert rep.conclusion is not None and rep.conclusion.ok is False


def test_strict_cube_check_refuses_uncertified_hypotheses():
    with pytest.raises(PreconditionNotCertified):
        check_cube_lemma(*negative_cube_control(3), D=3, strict=True)


def test_coskeleton_tower_stabilizes():
    TA = coskeleton_tower(group_category(G, 1, 4), 2, 4)
    assert sorted(TA.stages) == [2, 3, 4]
    gamma = functor_from_keys(TA.stages[2], TA.stages[2], [0], lambda x, y, s: s)
    assert gamma.check() == []


def test_catwise_tower_recovers_class():
    T = e_beta()
    mat = T.materialize(3)
    C = augmented_monoid_category(mat.sset)
    CT = catwise_tower(C, 2, 3, hints=[HomHint((0, 0), 0, T, mat)])
    assert CT.ok
    assert CT.system.check() == []
    assert all(w == g and any(w) for w, g in CT.recovered.values())


def test_bimodule_category_local_system():
    T = e_beta()
    mat = T.materialize(3)
    C = bimodule_category(mat.sset, G, 3)
    assert C.check(2) == []
    CT = catwise_tower(C, 2, 3, hints=[HomHint((0, 1), 0, T, mat)])
    assert CT.ok
