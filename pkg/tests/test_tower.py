import pytest

from postnikov.acceptance import e_beta, sign_module, trivial_module
from postnikov.chains import TwistedCohomology, chains_of
from postnikov.groupoid import FiniteGroup
from postnikov.models import boundary, rp2, torus
from postnikov.pi1 import NotCertified, certify_finite, fundamental_groupoid
from postnikov.tower import (STRICT, HurewiczError, build_space_tower, extract_k_invariant, extract_pi2,
                             k_invariant_in_coefficients, nerve_base, reconstruct, round_trip, serre_homology,
                             twisted_product, twisted_product_k_invariant, validate_tower)


def test_pi2_of_rp2_is_integers_with_sign_action():
    X = rp2()
    pi2 = extract_pi2(X, certify_finite(fundamental_groupoid(X), 8))
    assert str(pi2.group) == "Z"
    assert pi2.module.rho[0][1] == [[-1]]


def test_pi2_of_sphere():
    assert str(extract_pi2(boundary(3)).group) == "Z"


def test_infinite_fundamental_group_is_refused():
    with pytest.raises((HurewiczError, NotCertified)):
        extract_pi2(torus(), bound=16)


def test_nonzero_class_survives_extraction():
    T = e_beta()
    mat = T.materialize(4)
    pi2 = extract_pi2(mat.sset)
    kinv = extract_k_invariant(mat.sset, 2, 4, carrier=T.carrier(mat), pi2=pi2)
    cls, ident = k_invariant_in_coefficients(T, mat, kinv, pi2)
    assert ident.bijective and ident.equivariant
    assert cls.coords == (1,)
    assert twisted_product_k_invariant(T).coords == (1,)


def test_zero_class_gives_product():
    A = trivial_module(FiniteGroup.cyclic(2), 2)
    base, _ = nerve_base(A, 4)
    H = TwistedCohomology(base.Y, base.local_system(A), 3)
    T = twisted_product(base, A, 2, H.zero().cocycle)
    assert twisted_product_k_invariant(T).is_zero()


@pytest.mark.parametrize("beta", [(0,), (1,)])
def test_round_trip_over_z2(beta):
    A = trivial_module(FiniteGroup.cyclic(2), 2)
    base, _ = nerve_base(A, 4)
    H = TwistedCohomology(base.Y, base.local_system(A), 3)
    rt, R, _ = round_trip(A, H.representative(beta).cocycle, 4)
    assert rt.ok and rt.recovered == beta
    assert rt.square == STRICT


def test_reconstruction_square_commutes():
    A = trivial_module(FiniteGroup.cyclic(2), 2)
    base, _ = nerve_base(A, 4)
    H = TwistedCohomology(base.Y, base.local_system(A), 3)
    R = reconstruct(base, A, 2, H.representative((1,)).cocycle, 3)
    assert R.square.commutes() == []
    assert [str(g) for g in chains_of(R.sset, 3).homology_all(1)] == ["Z", "Z/2"]


def test_serre_model_matches_simplicial_homology():
    T = e_beta()
    direct = [str(h) for h in chains_of(T.materialize(4).sset, 4).homology_all(3)]
    assert direct == [str(h) for h in serre_homology(T, 3)]


def test_integral_coefficients_stay_intensional():
    A = sign_module()
    base, _ = nerve_base(A, 5)
    H = TwistedCohomology(base.Y, base.local_system(A), 3)
    T = twisted_product(base, A, 2, H.representative((1,)).cocycle)
    assert twisted_product_k_invariant(T).coords == (1,)


def test_space_tower_of_rp2():
    T = build_space_tower(rp2(), 2, 4)
    assert T.ok
    assert all(e.ok for e in validate_tower(T, heart=False))
    assert set(T.stages) == {1, 2}


def test_space_tower_rejects_bad_stage():
    with pytest.raises(ValueError):
        build_space_tower(rp2(), 0, 4)
