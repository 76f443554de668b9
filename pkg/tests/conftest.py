from collections import defaultdict

import pytest

CRITERIA = {
    1: "constants exactness",
    2: "iteration lemma property suite",
    3: "exact-solution residual order",
    4: "solver convergence",
    5: "inequality suite on numerical traces",
    6: "decay exponent",
    7: "sharpness of the Gaussian exponent",
    8: "envelope control pair",
    9: "mean-value scale invariance",
    10: "determinism",
}

_outcomes = defaultdict(list)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion the test belongs to")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    n = marker.args[0]
    if rep.when == "call":
        _outcomes[n].append(rep.passed)
    elif rep.failed or rep.skipped:
        _outcomes[n].append(False)


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n, name in CRITERIA.items():
        results = _outcomes.get(n)
        if not results:
            tr.write_line(f"criterion {n:2d} {name}: NOT RUN")
            continue
        status = "PASS" if all(results) else "FAIL"
        tr.write_line(f"criterion {n:2d} {name}: {status} ({sum(results)}/{len(results)} tests)")
