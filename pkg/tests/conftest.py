import numpy as np
import pytest

from multigroup.instance import (
    FiniteDomain,
    FiniteInstance,
    GroupFamily,
    Hypothesis,
    HypothesisClass,
    LabeledSample,
)


def constants(domain):
    return HypothesisClass((
        Hypothesis("neg", {x: -1 for x in domain}),
        Hypothesis("pos", {x: 1 for x in domain}),
    ))


def all_functions(domain):
    n = len(domain)
    rows = [[1 if (k >> (n - 1 - i)) & 1 else -1 for i in range(n)] for k in range(2**n)]
    return HypothesisClass.from_rows(domain, rows)


def sample(*pairs):
    return LabeledSample(tuple(pairs))


@pytest.fixture
def abc():
    return FiniteDomain(("a", "b", "c"))


@pytest.fixture
def overlapping(abc):
    """g1 = {a, b}, g2 = {b, c} with the two constants."""
    G = GroupFamily.from_dict({"g1": ["a", "b"], "g2": ["b", "c"]})
    return abc, G, constants(abc)


@pytest.fixture
def singletons4():
    dom = FiniteDomain(("p0", "p1", "p2", "p3"))
    G = GroupFamily.from_dict({f"s{x}": [x] for x in dom})
    return dom, G, constants(dom)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def uniform_instance(domain, groups, hypotheses, target):
    mass = {x: 1.0 / len(domain) for x in domain}
    return FiniteInstance(domain, groups, hypotheses, mass=mass, target=target)


ACCEPTANCE_RESULTS = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS):
        passed, name, detail = ACCEPTANCE_RESULTS[key]
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] {key:>2}. {name}: {detail}")
