import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_RESULTS = {}

CRITERIA = {
    1: "simulator matches statevector oracle",
    2: "PKE-SKL pipelines",
    3: "forged-certificate rate",
    4: "certified-deletion strategies",
    5: "TEPRF equality and difference",
    6: "leased evaluation correctness",
    7: "lattice identities",
    8: "Gaussian tails and coset oracle",
    9: "constrained signatures",
    10: "DS-SKL static keys",
    11: "parameter validator",
    12: "determinism",
}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(k): acceptance criterion k")
    config.addinivalue_line("markers", "slow: long-running statistical check")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    k = mark.args[0]
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        ok = rep.passed
        prev = _RESULTS.get(k)
        detail = "; ".join(str(v) for name, v in item.user_properties if name == "detail")
        if prev is not None:
            ok = ok and prev[0]
            detail = "; ".join(x for x in (prev[1], detail) if x)
        _RESULTS[k] = (ok, detail)


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for k, title in CRITERIA.items():
        if k in _RESULTS:
            ok, detail = _RESULTS[k]
            tag = "PASS" if ok else "FAIL"
        else:
            tag, detail = "NOT RUN", ""
        tr.write_line(f"criterion {k:2d} {tag}: {title}" + (f" ({detail})" if detail else ""))


@pytest.fixture
def detail(record_property):
    """Attach a short human-readable measurement to the acceptance line."""
    def add(text):
        record_property("detail", text)
    return add
