import re

import pytest

import combclt as c
from combclt.quasimorphism import counting_qm, make_pattern


@pytest.fixture(scope="session")
def f2():
    return c.fixture("F2_standard")


@pytest.fixture(scope="session")
def f2_enlarged():
    return c.fixture("F2_enlarged")


@pytest.fixture(scope="session")
def phi_ab_fn(f2):
    """Synthesized counting quasimorphism phi_ab on the reduced-word combing,
    with spectral data on its refined acceptor (shared across tests)."""
    phi = counting_qm(f2.oracle, make_pattern(f2.oracle, "ab"))
    fn = c.synthesize_dphi(f2.combing, phi, refine_depth=3, verify_radius=7)
    assert isinstance(fn, c.CombableFunction)
    data = c.analyze(fn.combing.digraph)
    return fn, data


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One pass/fail line per acceptance criterion."""
    lines = {}
    for status in ("passed", "failed", "error"):
        for report in terminalreporter.stats.get(status, []):
            m = re.search(r"test_acceptance.*test_criterion_(\d+)", getattr(report, "nodeid", ""))
            if m:
                num = int(m.group(1))
                ok = status == "passed"
                lines[num] = (ok, report.nodeid.split("::")[-1])
    if not lines:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for num in sorted(lines):
        ok, name = lines[num]
        terminalreporter.write_line(
            f"criterion {num:2d}: {'PASS' if ok else 'FAIL'}  ({name})")
