import pytest

from postnikov.chains import ordinary_homology
from postnikov.models import boundary, circle, from_simplicial_complex, rp2, torus
from postnikov.pi1 import NotCertified, certify_finite, classifying_map, fundamental_groupoid, pi1_at, universal_cover
from postnikov.todd_coxeter import EnumerationExhausted, enumerate_cosets, free_reduce


def certified(X, bound=64):
    P = fundamental_groupoid(X)
    return certify_finite(P, bound)


def test_rp2_has_order_two_at_every_vertex():
    X = rp2()
    P = certified(X)
    assert [pi1_at(P, v).order for v in range(X.count(0))] == [2] * 6


def test_simply_connected_sphere():
    P = certified(boundary(3))
    assert pi1_at(P, 0).order == 1


@pytest.mark.parametrize("X", [circle(), torus()])
def test_infinite_groups_are_not_certified(X):
    with pytest.raises(NotCertified):
        certified(X, 16)


def test_components_are_separate_objects():
    X = from_simplicial_complex([[0, 1], [2, 3]])
    P = certified(X)
    assert len(P.roots) == 2
    assert P.comp_index(0) != P.comp_index(2)


def test_universal_cover_of_rp2_is_a_sphere():
    X = rp2()
    cov = universal_cover(X, certified(X))
    assert cov.sset.counts() == [12, 30, 20]
    assert [str(g) for g in ordinary_homology(cov.sset)] == ["Z", "0", "Z"]
    for h in range(cov.group.order):
        assert cov.deck(h).validate() == []


def test_classifying_map_is_simplicial():
    X = rp2()
    cl = classifying_map(X, certified(X), 2)
    assert cl.map.validate() == []


def test_coset_enumeration():
    table = enumerate_cosets(2, [[1, 1, 1], [2, 2], [1, 2, 1, 2]], 100)   # S_3
    assert len(table) == 6
    with pytest.raises(EnumerationExhausted):
        enumerate_cosets(1, [], 10)
    assert free_reduce([1, -1, 2]) == [2]
