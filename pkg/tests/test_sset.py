import pytest

from postnikov.acceptance import simplicial_identity_violations
from postnikov.constructions import coskeleton, product, skeleton
from postnikov.models import boundary, circle, from_simplicial_complex, point, rp2, simplex, torus
from postnikov.sset import (BudgetExceeded, SimplicialError, SimplicialMap, SimplicialSet, eta_to_word,
                            identity_map, surjections, validate, word_to_eta)


@pytest.mark.parametrize("build", [point, circle, rp2, torus, lambda: simplex(3), lambda: boundary(3)])
def test_models_satisfy_simplicial_identities(build):
    X = build()
    assert validate(X) == []
    assert simplicial_identity_violations(X, min(X.max_dim, 3)) == 0


def test_counts_of_standard_models():
    assert simplex(2).counts() == [3, 3, 1]
    assert boundary(3).counts() == [4, 6, 4]
    assert rp2().counts() == [6, 15, 10]
    assert circle().counts() == [1, 1]


def test_degeneracy_word_round_trip():
    for k in range(1, 5):
        for m in range(k + 1):
            for eta in surjections(k, m):
                assert word_to_eta(eta_to_word(eta), k) == eta


def test_face_of_degeneracy_is_identity():
    X = rp2()
    for s in X.full_level(1):
        assert X.face(X.degeneracy(s, 0), 0) == s
        assert X.face(X.degeneracy(s, 0), 1) == s


def test_json_round_trip_preserves_structure():
    X = torus()
    Y = SimplicialSet.from_json(X.to_json())
    assert Y.counts() == X.counts()
    assert Y.faces == X.faces


def test_face_pointing_outside_level_rejected():
    data = rp2().to_json()
    data["faces"][1][0][0] = [[], 99]
    with pytest.raises(SimplicialError):
        SimplicialSet.from_json(data)


def test_inconsistent_faces_reported_by_validate():
    data = rp2().to_json()
    data["faces"][2][0] = [[[], 0], [[], 0], [[], 0]]
    assert validate(SimplicialSet.from_json(data))


def test_identity_map_is_bijective():
    X = rp2()
    f = identity_map(X)
    assert f.validate() == []
    assert f.is_bijective()


def test_map_from_function_collapses_to_point():
    X, P = boundary(2), point()
    f = SimplicialMap.from_function(X, P, lambda s: P.degeneracy(P.nd(0, 0), 0) if X.dim(s) == 1 else P.nd(0, 0),
                                    upto=1)
    assert f.validate() == []
    assert not f.is_bijective()


def test_product_of_intervals_has_two_triangles():
    I = simplex(1)
    assert product(I, I).sset.counts()[:3] == [4, 5, 2]


def test_skeleton_and_coskeleton():
    X = simplex(2)
    assert skeleton(X, 1).counts() == [3, 3]
    C = coskeleton(skeleton(X, 1), 1, 3)
    assert C.sset.counts()[2] == 1       # the hollow triangle is filled
    assert C.unit.validate() == []


def test_coskeleton_budget():
    with pytest.raises(BudgetExceeded):
        coskeleton(from_simplicial_complex([[0, 1, 2, 3, 4]]), 1, 4, budget=10)
