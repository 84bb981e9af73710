import pytest

from postnikov.acceptance import sign_module, trivial_module
from postnikov.chains import Presentation, TwistedCohomology
from postnikov.groupoid import FiniteGroup
from postnikov.linalg import identity
from postnikov.oracles import bar_cohomology, bar_cohomology_of, bar_homology
from postnikov.tower import nerve_base


def trivial_rho(G, r=1):
    return {g: identity(r) for g in G.elements()}


@pytest.mark.parametrize("m,n,expected", [(2, 1, "0"), (2, 2, "Z/2"), (2, 3, "0"), (2, 4, "Z/2"),
                                          (3, 2, "Z/3"), (4, 2, "Z/4")])
def test_integral_cohomology_of_cyclic_groups(m, n, expected):
    G = FiniteGroup.cyclic(m)
    assert str(bar_cohomology(G, trivial_rho(G), Presentation.free(1), n)) == expected


@pytest.mark.parametrize("m,n,expected", [(4, 1, "Z/4"), (4, 2, "0"), (3, 3, "Z/3"), (2, 0, "Z")])
def test_integral_homology_of_cyclic_groups(m, n, expected):
    G = FiniteGroup.cyclic(m)
    assert str(bar_homology(G, trivial_rho(G), Presentation.free(1), n)) == expected


def test_sign_homology_is_shifted():
    A = sign_module()
    G = A.groupoid.groups[0]
    got = [str(bar_homology(G, A.rho[0], A.fibers[0], n)) for n in range(4)]
    assert got == ["Z/2", "0", "Z/2", "0"]


def test_finite_coefficients_use_relations():
    G = FiniteGroup.cyclic(2)
    assert str(bar_cohomology(G, trivial_rho(G), Presentation.cyclic(2), 3)) == "Z/2"


@pytest.mark.parametrize("A", [sign_module(), trivial_module(FiniteGroup.cyclic(3), 3)])
def test_oracle_agrees_with_simplicial_cochains(A):
    base, _ = nerve_base(A, 5)
    L = base.local_system(A)
    for n in range(4):
        assert str(TwistedCohomology(base.Y, L, n).group) == str(bar_cohomology_of(A, n))
