from pathlib import Path

import pytest

from postnikov.estimators import ChainPostnikovTower, PostnikovTower
from postnikov.models import rp2, torus

EX = Path(__file__).resolve().parent.parent / "examples"


def test_params_round_trip():
    est = PostnikovTower(stages=1, max_dim=3)
    assert est.get_params() == {"stages": 1, "max_dim": 3, "budget": None, "group_bound": 64, "extract": True}
    assert est.set_params(stages=2) is est and est.stages == 2
    with pytest.raises(ValueError):
        est.set_params(colour="red")


def test_unfitted_access_raises():
    with pytest.raises(RuntimeError):
        PostnikovTower().report()


def test_fit_rp2():
    est = PostnikovTower().fit(rp2())
    assert est.ok_ and est.errors_ == []
    assert sorted(est.stages_) == [1, 2]
    assert est.k_invariant(2).is_zero()


def test_fit_records_extraction_failure_instead_of_raising():
    est = PostnikovTower(group_bound=8).fit(torus())
    assert est.errors_ and not est.ok_
    assert sorted(est.stages_) == [1, 2]
    with pytest.raises(KeyError):
        est.k_invariant(2)


def test_chain_tower_estimator_from_path():
    est = ChainPostnikovTower().fit(str(EX / "chain_complex.json"))
    assert est.ok_
    assert len(est.squares_) == len(est.stages_) - 1
    assert "[ok]" in est.report()


def test_chain_tower_estimator_type_check():
    with pytest.raises(TypeError):
        ChainPostnikovTower().fit(42)
