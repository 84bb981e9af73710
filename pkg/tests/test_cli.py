import json
from pathlib import Path

import pytest

from postnikov.cli import EXIT_BUDGET, EXIT_MALFORMED, EXIT_OK, EXIT_REFUSED, RunConfig, build_parser, dispatch
from postnikov.io import InputError

EX = Path(__file__).resolve().parent.parent / "examples"


def run(capsys, *argv, env=None):
    code = dispatch([str(a) for a in argv], env or {})
    out, err = capsys.readouterr()
    return code, out.strip(), err.strip()


def test_homology_of_rp2(capsys):
    assert run(capsys, "homology", EX / "rp2.json") == (EXIT_OK, "H0=Z H1=Z/2 H2=0", "")


def test_k_invariant_of_e_beta(capsys):
    code, out, _ = run(capsys, "kinv", EX / "e_beta.json", "--stage", "2")
    assert code == EXIT_OK and out == "(1) in Z/2"


def test_garbage_is_malformed(capsys, tmp_path):
    bad = tmp_path / "garbage.json"
    bad.write_text("{not json")
    code, _, err = run(capsys, "validate", bad)
    assert code == EXIT_MALFORMED
    assert "garbage.json:1:2" in err


def test_json_format_is_machine_readable(capsys):
    code, out, _ = run(capsys, "--format", "json", "homology", EX / "rp2.json")
    data = json.loads(out)
    assert code == EXIT_OK and data["homology"] == ["Z", "Z/2", "0"] and data["status"] == 0


def test_reports_are_deterministic(capsys):
    first = run(capsys, "--format", "json", "pi1", EX / "rp2.json")
    assert run(capsys, "--format", "json", "pi1", EX / "rp2.json") == first


def test_twisted_cohomology(capsys):
    code, out, _ = run(capsys, "cohomology", EX / "rp2.json", "--twisted")
    assert code == EXIT_OK and out == "H^0=0 H^1=Z/2 H^2=Z"


def test_twisted_cohomology_needs_order_two(capsys):
    code, out, _ = run(capsys, "cohomology", "--twisted", EX / "e_beta.json", "--max-dim", "3")
    assert code == EXIT_OK
    code, out, _ = run(capsys, "--group-bound", "1", "cohomology", "--twisted", EX / "rp2.json")
    assert code == EXIT_REFUSED


def test_cover_of_rp2(capsys):
    code, out, _ = run(capsys, "cover", EX / "rp2.json", "--base", "0")
    assert code == EXIT_OK and out.endswith("H0=Z H1=0 H2=Z")


def test_em_space(capsys):
    code, out, _ = run(capsys, "em", "--group", "Z/2", "--degree", "1", "--base", "1")
    assert code == EXIT_OK and out.endswith("H0=Z H1=Z/2 H2=0 H3=Z/2")


def test_budget_exhaustion(capsys):
    code, _, err = run(capsys, "--budget", "10", "em", "--group", "Z/3", "--degree", "2")
    assert code == EXIT_BUDGET and "budget" in err


def test_chain_tower(capsys):
    code, out, _ = run(capsys, "chain-tower", EX / "chain_complex.json")
    assert code == EXIT_OK and "[FAIL]" not in out


def test_tower_bundle_saved_and_validated(capsys, tmp_path):
    out_file = tmp_path / "tower.json"
    assert run(capsys, "tower", EX / "rp2.json", "--save", out_file)[0] == EXIT_OK
    assert run(capsys, "validate", out_file) == (EXIT_OK, "valid tower bundle", "")


def test_reconstruct(capsys):
    code, out, _ = run(capsys, "reconstruct", EX / "e_beta.json")
    assert code == EXIT_OK and out.startswith("square strict-pullback")


def test_category_commands(capsys):
    assert run(capsys, "cat-tower", EX / "e_beta_category.json")[0] == EXIT_OK
    assert run(capsys, "dk-check", EX / "inclusion_functor.json")[0] == EXIT_OK
    assert run(capsys, "cube-check", EX / "cube_positive.json")[0] == EXIT_OK
    assert run(capsys, "cube-check", EX / "cube_negative.json")[0] == EXIT_REFUSED


def test_wrong_kind_is_malformed(capsys):
    code, _, err = run(capsys, "cat-tower", EX / "rp2.json")
    assert code == EXIT_MALFORMED and "expected a category" in err


def test_unknown_subcommand(capsys):
    assert run(capsys, "frobnicate")[0] == EXIT_MALFORMED


def test_flags_override_environment_which_overrides_defaults():
    args = build_parser().parse_args(["--max-dim", "3", "homology", "x"])
    cfg = RunConfig.resolve(args, {"POSTNIKOV_MAX_DIM": "5", "POSTNIKOV_BUDGET": "77"})
    assert cfg.max_dim == 3 and cfg.budget == 77 and cfg.group_bound == 64


def test_config_invariants():
    with pytest.raises(InputError):
        RunConfig(max_dim=1)
    with pytest.raises(InputError):
        RunConfig(budget=0)


def test_environment_error_is_malformed(capsys):
    code, _, err = run(capsys, "homology", EX / "rp2.json", env={"POSTNIKOV_MAX_DIM": "many"})
    assert code == EXIT_MALFORMED and "POSTNIKOV_MAX_DIM" in err


def test_selftest_subset(capsys):
    code, out, _ = run(capsys, "selftest", "--only", "1,6")
    assert code == EXIT_OK
    assert out.splitlines() == [l for l in out.splitlines() if l.startswith("[PASS]")]
