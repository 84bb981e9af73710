import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from postnikov.chain_tower import (NonConnective, chain_postnikov_tower, good_truncation, homology_signature,
                                   is_quasi_iso, mapping_cone, random_chain_complex, truncation_map)
from postnikov.chains import ChainComplex
from postnikov.tower import validate_tower


def test_truncation_kills_higher_homology():
    C = ChainComplex.from_dense([1, 2, 1], {1: [[0, 0]], 2: [[1], [0]]})
    assert homology_signature(C) == ["Z", "Z", "0"]
    T = good_truncation(C, 0)
    assert homology_signature(T.complex, 2) == ["Z", "0", "0"]
    f = truncation_map(C, good_truncation(C, 2))
    assert f.check() == [] and is_quasi_iso(f)


def test_mapping_cone_of_identity_is_acyclic():
    C = ChainComplex.from_dense([1, 1], {1: [[2]]})
    T = good_truncation(C, 1)
    assert homology_signature(mapping_cone(truncation_map(C, T)), 3) == ["0"] * 4


def test_negative_stage_rejected():
    C = ChainComplex.from_dense([1], {})
    with pytest.raises(NonConnective):
        chain_postnikov_tower(C, -1)


def test_non_complex_rejected():
    with pytest.raises(ValueError):
        chain_postnikov_tower(ChainComplex.from_dense([1, 1, 1], {1: [[1]], 2: [[1]]}), 1)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_random_towers_are_certified(seed):
    C = random_chain_complex(random.Random(seed), 5, 6, 3)
    T = chain_postnikov_tower(C, C.top + 1)
    assert T.ok
    assert all(e.ok for e in validate_tower(T, heart=False))
    for a, sq in T.squares.items():
        assert sq.homotopy_ok()
        cert = sq.certify()
        assert cert["pullback"] and cert["pushout"]


def test_stage_homology_agrees_below_cut():
    C = random_chain_complex(random.Random(7), 5, 6, 3)
    T = chain_postnikov_tower(C, C.top)
    full = homology_signature(C)
    for a, stage in T.stages.items():
        assert homology_signature(stage, a)[: a + 1] == full[: a + 1]
