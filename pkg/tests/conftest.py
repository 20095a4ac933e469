from collections import defaultdict

import pytest

CRITERIA = {
    1: "Shapley-Shubik index of [3;2,1,1,1]",
    2: "nucleolus of [3;2,1,1,1]",
    3: "(3,2) worked example",
    4: "SSI of (x1^2+2x2^2+3x3^2)/6 with per-queue tables",
    5: "SSI of x1 x2^2 x3^3 with per-queue tables",
    6: "continuous Banzhaf values",
    7: "weighted median (5,3,2,1) by Monte Carlo",
    8: "nucleolus of (x1^2+2x2^2+3x3^2)/6",
    9: "nucleolus of x1 x2^2",
    10: "property suites",
    11: "three-voter median density integrals",
}

_RESULTS = defaultdict(list)


class Recorder:
    def check(self, criterion, label, ok, detail=""):
        _RESULTS[criterion].append((label, bool(ok), detail))
        assert ok, f"criterion {criterion}: {label} {detail}"


@pytest.fixture(scope="session")
def accept():
    return Recorder()


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n, title in CRITERIA.items():
        checks = _RESULTS.get(n)
        if not checks:
            tr.write_line(f"criterion {n:2d}: NOT RUN  {title}")
            continue
        failed = [c for c in checks if not c[1]]
        status = "PASS" if not failed else "FAIL"
        tr.write_line(f"criterion {n:2d}: {status}  {title} ({len(checks) - len(failed)}/{len(checks)} checks)")
        for label, _, detail in failed:
            tr.write_line(f"    failed: {label} {detail}".rstrip())
