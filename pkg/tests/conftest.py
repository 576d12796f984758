import sys
import time
from pathlib import Path

import numpy as np
import pytest
from hypothesis import settings

sys.path.insert(0, str(Path(__file__).parent))

from oracles import kkt_failures  # noqa: E402

import hybridcap.cli
import hybridcap.scenarios
import hybridcap.simplex

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

SOLVE_LOG: list[tuple[str, dict]] = []


_ORIGINAL_SOLVE = hybridcap.simplex.solve
_PATCHED = (hybridcap.simplex, hybridcap.scenarios, hybridcap.cli)


def _checked(tag: str):
    def wrapper(lp, options=None):
        sol = _ORIGINAL_SOLVE(lp, options)
        if sol.optimal:
            bad = kkt_failures(sol, float(np.max(np.abs(lp.cost), initial=1.0)))
            SOLVE_LOG.append((tag, dict(sol.residuals)))
            assert not bad, f"KKT check failed for {lp.name}: {bad}"
        return sol
    return wrapper


@pytest.fixture(autouse=True)
def checked_solve(monkeypatch, request):
    """Every optimal solve in the suite must satisfy strong duality and CS."""
    for mod in _PATCHED:
        monkeypatch.setattr(mod, "solve", _checked(request.node.nodeid))
    yield


@pytest.fixture(scope="session")
def toy_matrix(tmp_path_factory):
    """The 24-run manifest on the two-zone toy, solved once per session."""
    from hybridcap.scenarios import standard_manifest, run_matrix
    from hybridcap.toy import two_zone_toy

    out = tmp_path_factory.mktemp("runs")
    with pytest.MonkeyPatch.context() as mp:
        for mod in _PATCHED:
            mp.setattr(mod, "solve", _checked("toy_matrix"))
        start = time.perf_counter()
        results = run_matrix(two_zone_toy(), standard_manifest(), out)
        elapsed = time.perf_counter() - start
    return out, results, elapsed


def pytest_terminal_summary(terminalreporter):
    lines = []
    for key in ("passed", "failed"):
        for rep in terminalreporter.stats.get(key, []):
            if rep.when == "call":
                lines += [v for k, v in rep.user_properties if k == "acceptance"]
    if lines:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
    if SOLVE_LOG:
        terminalreporter.write_line(
            f"KKT-checked optimal solves: {len(SOLVE_LOG)} (strong duality and "
            "complementary slackness asserted on each)")
