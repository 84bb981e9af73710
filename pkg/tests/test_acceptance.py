"""The eleven acceptance criteria at their stated tolerances; one pass/fail line each."""
import pytest

from postnikov.acceptance import CRITERIA, run_criterion


@pytest.mark.parametrize("number", range(1, len(CRITERIA) + 1), ids=lambda n: f"criterion_{n}")
def test_criterion(number):
    r = run_criterion(number)
    print()
    print(r.line())
    for d in r.details:
        print(f"    {d}")
    assert r.ok, "\n".join(r.details)
