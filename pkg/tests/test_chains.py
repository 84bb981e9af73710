import pytest

from postnikov.chains import (ChainComplex, LocalSystem, Presentation, TwistedCohomology, chains_of,
                              ordinary_homology, twisted_cochain_complex, twisted_homology_all)
from postnikov.models import boundary, circle, rp2, torus
from postnikov.pi1 import certify_finite, fundamental_groupoid


def groups(gs):
    return [str(g) for g in gs]


@pytest.mark.parametrize("X,expected", [(circle(), ["Z", "Z"]), (rp2(), ["Z", "Z/2", "0"]),
                                        (torus(), ["Z", "Z^2", "Z"]), (boundary(3), ["Z", "0", "Z"])])
def test_ordinary_homology(X, expected):
    assert groups(ordinary_homology(X)) == expected


def test_boundary_squares_to_zero():
    C = chains_of(torus())
    assert C.check() == []
    assert C.euler() == 0


def test_chain_complex_json_round_trip():
    C = chains_of(rp2())
    D = ChainComplex.from_json(C.to_json())
    assert D.ranks == C.ranks
    assert groups(D.homology_all()) == groups(C.homology_all())


def test_dense_constructor_checks_shape():
    C = ChainComplex.from_dense([1, 1], {1: [[0]]})
    assert groups(C.homology_all()) == ["Z", "Z"]
    C = ChainComplex.from_dense([1, 1], {1: [[2]]})
    assert groups(C.homology_all()) == ["Z/2", "0"]


def test_constant_cohomology_with_finite_coefficients():
    X = rp2()
    L = LocalSystem.constant(X, Presentation.cyclic(2))
    assert [str(TwistedCohomology(X, L, n).group) for n in range(3)] == ["Z/2"] * 3


def test_universal_coefficients_for_integral_cohomology():
    X = rp2()
    L = LocalSystem.constant(X, Presentation.free(1))
    assert [str(TwistedCohomology(X, L, n).group) for n in range(3)] == ["Z", "0", "Z/2"]


def sign_system(X, P=None):
    P = P or Presentation.free(1)
    return LocalSystem.from_edges(X, P, lambda e: ([[-1]], [[-1]]))


def test_twisted_homology_of_circle():
    X = circle()
    assert groups(twisted_homology_all(X, sign_system(X), 1)) == ["Z/2", "0"]


def rp2_sign_system(P_):
    X = rp2()
    P = certify_finite(fundamental_groupoid(X), 8)
    rho = {g: [[1 if g == 0 else -1]] for g in range(2)}
    return X, LocalSystem.from_representation(X, P_, P.edge_class, rho, lambda g: g)


def test_non_flat_system_is_rejected():
    X = rp2()
    assert sign_system(X).check()


def test_twisted_cochain_differential_squares_to_zero():
    X, L = rp2_sign_system(Presentation.cyclic(4))
    assert L.check() == []
    assert twisted_cochain_complex(X, L, 2).check() == []


def test_orientation_twisted_cohomology_of_rp2():
    X, L = rp2_sign_system(Presentation.free(1))
    assert [str(TwistedCohomology(X, L, n).group) for n in range(3)] == ["0", "Z/2", "Z"]


def test_cocycle_classes_are_well_defined():
    X = rp2()
    H = TwistedCohomology(X, LocalSystem.constant(X, Presentation.cyclic(2)), 1)
    classes = H.classes()
    assert len(classes) == 2
    for c in classes:
        H.check_cocycle(c.cocycle)
        assert H.class_of(c.cocycle).coords == c.coords
    assert H.zero().is_zero()
