import pytest

from postnikov.acceptance import sign_module, trivial_module
from postnikov.chains import Presentation, TwistedCohomology
from postnikov.em import (GroupoidModule, InfiniteCoefficients, OverBase, cocycle_to_map, em_minimal_model,
                          em_paper_model, enumerate_maps_over, map_to_cocycle)
from postnikov.groupoid import FiniteGroup, FiniteGroupoid
from postnikov.models import circle, simplex
from postnikov.sset import BudgetExceeded, validate


def point_module(m):
    return GroupoidModule.trivial(FiniteGroupoid.from_group(FiniteGroup.trivial()), Presentation.cyclic(m))


def over_point(Y):
    return OverBase(Y, lambda s: ((0,) * len(s[0]), (0,) * (len(s[0]) - 1)))


def test_module_action_is_a_right_action():
    A = sign_module(Presentation.cyclic(3))
    assert A.check() == []
    assert A.act(0, 1, (1,)) == (2,)


def test_k_z2_1_is_rp_infinity():
    K = em_minimal_model(point_module(2), 1, 4)
    assert K.sset.counts() == [1, 1, 1, 1, 1]
    assert [str(g) for g in K.homology()] == ["Z", "Z/2", "0", "Z/2"]
    assert validate(K.sset) == []


@pytest.mark.parametrize("A,n", [(point_module(3), 1), (point_module(2), 2), (trivial_module(FiniteGroup.cyclic(2), 2), 1)])
def test_minimal_and_bar_models_agree(A, n):
    D = 4 if n == 1 else 3
    assert [str(g) for g in em_minimal_model(A, n, D).homology()] == \
           [str(g) for g in em_paper_model(A, n, D).homology()]


def test_projection_and_zero_section():
    K = em_minimal_model(sign_module(Presentation.cyclic(3)), 1, 3)
    p, z = K.projection, K.zero_section
    assert p.validate() == [] and z.validate() == []
    assert p.compose(z).is_identity_like()


def test_fiber_is_nonparametrized_em_space():
    K = em_minimal_model(sign_module(Presentation.cyclic(3)), 1, 3)
    assert [str(g) for g in K.fiber_homology(0)][:3] == ["Z", "Z/3", "0"]


def test_maps_into_em_space_are_cocycles():
    Y, A = circle(), point_module(3)
    base = over_point(Y)
    K = em_minimal_model(A, 1, 2)
    H = TwistedCohomology(Y, base.local_system(A), 1)
    maps = enumerate_maps_over(K, base)
    assert len(maps) == 3
    for c in H.classes():
        assert map_to_cocycle(K, cocycle_to_map(K, base, c.cocycle, H), H) == c.cocycle


def test_cocycle_map_on_simplex_has_no_classes():
    Y, A = simplex(2), point_module(2)
    base = over_point(Y)
    H = TwistedCohomology(Y, base.local_system(A), 1)
    assert H.group.is_zero()
    assert len(enumerate_maps_over(em_minimal_model(A, 1, 2), base)) == 4   # cocycles = coboundaries of 3 vertices


def test_infinite_coefficients_are_not_materialized():
    with pytest.raises(InfiniteCoefficients):
        em_minimal_model(sign_module(), 1, 3)


def test_budget_is_enforced():
    with pytest.raises(BudgetExceeded):
        em_minimal_model(point_module(3), 2, 4, budget=20)
