import json

import pytest

from postnikov.chains import ChainComplex
from postnikov.enriched import full_subcategory, group_category
from postnikov.groupoid import FiniteGroup
from postnikov.io import (BUILTIN_SPACES, InputError, TowerRecord, TwistedProductSpec, builtin_sset,
                          category_from_json, category_to_json, detect_kind, functor_from_json, functor_to_json,
                          load_chain_complex, load_json, load_sset, tower_record)
from postnikov.chain_tower import chain_postnikov_tower
from postnikov.models import rp2


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_parse_error_reports_line_and_column(tmp_path):
    path = write(tmp_path, "garbage.json", '{"faces": [1,\n  oops]}')
    with pytest.raises(InputError, match=r"garbage.json:2:3"):
        load_json(path)


def test_missing_file(tmp_path):
    with pytest.raises(InputError, match="cannot read"):
        load_json(str(tmp_path / "absent.json"))


@pytest.mark.parametrize("data,kind", [({"faces": []}, "sset"), ({"ranks": [1]}, "chain-complex"),
                                       ({"builtin": "rp2"}, "sset"), ({"type": "cube"}, "cube")])
def test_kind_detection(data, kind):
    assert detect_kind(data) == kind


def test_unknown_kind_rejected():
    with pytest.raises(InputError):
        detect_kind({"hello": 1})


@pytest.mark.parametrize("name", BUILTIN_SPACES)
def test_builtin_spaces_load(name):
    X = builtin_sset(name, 3)
    assert X.count(0) >= 1
    assert load_sset({"builtin": name}, 3).counts() == X.counts()


def test_sset_round_trip_through_text():
    X = rp2()
    Y = load_sset(json.loads(json.dumps(X.to_json())))
    assert Y.faces == X.faces


def test_chain_complex_integers_as_strings():
    big = str(10 ** 40)
    C = load_chain_complex({"ranks": [1, 1], "matrices": {"1": [[big]]}})
    assert str(C.homology(0)) == f"Z/{big}"
    D = load_chain_complex(C.to_json())
    assert D.ranks == C.ranks and str(D.homology(0)) == str(C.homology(0))


def test_non_complex_rejected():
    with pytest.raises(InputError):
        load_chain_complex({"ranks": [1, 1, 1], "matrices": {"1": [["1"]], "2": [["1"]]}})


def test_twisted_product_spec_round_trip():
    spec = TwistedProductSpec.from_json({"type": "twisted-product", "group": 2, "coefficients": 2, "beta": ["1"]})
    assert TwistedProductSpec.from_json(spec.to_json()) == spec
    T, H = spec.build(4)
    assert str(H.group) == "Z/2"


@pytest.mark.parametrize("bad", [{"group": 3, "coefficients": 2, "action": "sign"},
                                 {"group": 2, "coefficients": 2, "degree": 3},
                                 {"group": 2, "coefficients": 2, "beta": "1"},
                                 {"group": 2}])
def test_twisted_product_spec_errors(bad):
    with pytest.raises(InputError):
        TwistedProductSpec.from_json({"type": "twisted-product", **bad})


def test_category_round_trip():
    C = group_category(FiniteGroup.cyclic(2), 2, 3)
    D = category_from_json(json.loads(json.dumps(category_to_json(C))))
    assert D.n == C.n and D.check() == []
    for x in range(C.n):
        for y in range(C.n):
            assert D.hom(x, y).counts() == C.hom(x, y).counts()
            for g in C.hom(x, y).nondegenerate(2):
                for f in C.hom(x, x).nondegenerate(2):
                    assert D.compose(x, x, y, g, f) == C.compose(x, x, y, g, f)


def test_functor_round_trip():
    _, inc = full_subcategory(group_category(FiniteGroup.cyclic(2), 2, 3), [0])
    F = functor_from_json(json.loads(json.dumps(functor_to_json(inc))))
    assert F.on_objects == inc.on_objects
    assert F.check() == []


def test_tower_record_round_trip():
    C = ChainComplex.from_dense([2, 2, 1], {1: [[1, 0], [0, 0]], 2: [[0], [2]]})
    rec = tower_record(chain_postnikov_tower(C, 2))
    again = TowerRecord.from_json(json.loads(json.dumps(rec.to_json())))
    assert again.to_json() == rec.to_json()
    assert again.stage(1) is not None
