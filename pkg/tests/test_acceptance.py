"""Acceptance suite: every criterion runs at its stated tolerance and budget
and prints one pass/fail line. The checks themselves live in
meandim.acceptance so the `verify` subcommand runs exactly the same code.
"""

import pytest

from meandim import acceptance


@pytest.mark.parametrize("cid,title", [(c, t) for c, t, _, _ in acceptance.CRITERIA])
def test_criterion(cid, title, capsys):
    record = acceptance.run_one(cid)
    with capsys.disabled():
        status = "PASS" if record["passed"] else "FAIL"
        print(f"\n[{status}] criterion {cid}: {title} "
              f"({record['elapsed_s']}s / budget {record['budget_s']}s)")
    assert record["passed"], record["details"]
    assert record["within_budget"], (
        f"criterion {cid} took {record['elapsed_s']}s, budget {record['budget_s']}s"
    )
