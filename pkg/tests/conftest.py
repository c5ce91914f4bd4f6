import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from symflat.presets import t4_yang_mills_example

settings.register_profile("default", max_examples=25, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

CRITERIA = {
    1: "T4 example reproduction",
    2: "A' construction",
    3: "BPST reproduction",
    4: "Pythagoras on every preset",
    5: "gradient and Hessian consistency",
    6: "cone flatness equivalence",
    7: "cone critical-point propositions",
    8: "flows",
    9: "Chern-Simons identities",
    10: "classification",
    11: "calculus substrate",
}
_RESULTS = {}


@pytest.fixture
def criterion():
    """Record the outcome of an acceptance criterion for the terminal summary."""

    def record(number: int, ok: bool, detail: str = ""):
        _RESULTS.setdefault(number, []).append((bool(ok), detail))
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n, title in CRITERIA.items():
        rows = _RESULTS.get(n)
        if rows is None:
            tr.write_line(f"criterion {n:2d} {title}: NOT RUN")
            continue
        ok = all(r[0] for r in rows)
        detail = "; ".join(d for _, d in rows if d)
        tr.write_line(f"criterion {n:2d} {title}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture(scope="session")
def t4():
    return t4_yang_mills_example(32)


@pytest.fixture(scope="session")
def t4_small():
    return t4_yang_mills_example(16)


@pytest.fixture(scope="session")
def a_prime(t4):
    from symflat.flows import make_pym_from_ym
    return make_pym_from_ym(t4.connection, t4.metric)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
