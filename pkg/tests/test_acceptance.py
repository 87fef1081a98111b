"""Acceptance criteria 1-17, each at its stated tolerance.

Every test prints the one-line report of its criterion (``criterion NN PASS
...`` or ``FAIL``) straight to the terminal, so ``pytest -v`` doubles as the
acceptance report. The same checks back ``lab verify``.
"""

import pytest

from eulerlab.runner.criteria import CRITERIA, SUITES, evaluate


def suite_of(cid):
    return next(name for name, ids in SUITES.items() if cid in ids)


class TestAcceptance:
    @pytest.mark.parametrize("cid", sorted(CRITERIA), ids=lambda c: f"criterion_{c:02d}")
    def test_criterion(self, cid, capsys):
        r = evaluate(cid)
        with capsys.disabled():
            print(f"\n[{suite_of(cid)}] {r.line()}")
        assert r.id == cid
        assert r.passed, r.line()
