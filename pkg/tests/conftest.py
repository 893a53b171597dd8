import json
from importlib import resources

import numpy as np
import pytest
from hypothesis import strategies as st

from quatquot._lattice import det2
from quatquot.toric_data import ToricInput, parse_input

FIXTURE_NAMES = ("k3", "k4", "k5", "nonconvex", "sublattice")
VALID = ("k3", "k4", "k5")


def load_fixture(name: str) -> ToricInput:
    path = resources.files("quatquot") / "fixtures" / f"{name}.json"
    return parse_input(json.loads(path.read_text()))


@pytest.fixture(params=FIXTURE_NAMES)
def any_fixture(request):
    return request.param, load_fixture(request.param)


@pytest.fixture(params=VALID)
def valid_fixture(request):
    return request.param, load_fixture(request.param)


def random_S(rng: np.random.Generator, k: int, span: int = 4, require_generating: bool = True) -> list[tuple[int, int]]:
    """Random S passing the sector and independence checks (and generating Z^2 if asked)."""
    from quatquot.toric_data import validate_S

    while True:
        S = [(int(rng.integers(1, 3)), 0)]
        while len(S) < k:
            u = (int(rng.integers(-span, span + 1)), int(rng.integers(1, span + 1)))
            if det2(S[-1], u) != 0:
                S.append(u)
        rep = validate_S(S)
        if rep.checks["sector"] and rep.checks["consecutive_independent"]:
            if rep.checks["generates"] or not require_generating:
                return S


@st.composite
def lattice_data(draw, min_k: int = 3, max_k: int = 7, span: int = 5):
    """Hypothesis strategy for S with u_1 = (p, 0) and independent consecutive vectors."""
    k = draw(st.integers(min_k, max_k))
    S = [(draw(st.integers(1, 3)), 0)]
    coord = st.tuples(st.integers(-span, span), st.integers(1, span))
    for _ in range(k - 1):
        u = draw(coord.filter(lambda w, prev=S[-1]: det2(prev, w) != 0))
        S.append(u)
    return S


@st.composite
def angles(draw, k: int):
    gaps = draw(st.lists(st.floats(0.05, 1.0), min_size=k, max_size=k))
    cum = np.cumsum(gaps)
    th = np.pi * cum[:-1] / cum[-1]
    return (0.0,) + tuple(float(t) for t in th)


def random_upoints(rng: np.random.Generator, n: int, k: int) -> tuple[np.ndarray, np.ndarray]:
    x = rng.normal(size=(n, k)) + 1j * rng.normal(size=(n, k))
    y = rng.normal(size=(n, k)) + 1j * rng.normal(size=(n, k))
    return x, y


def pytest_terminal_summary(terminalreporter):
    from . import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(test_acceptance.RESULTS):
            terminalreporter.write_line(test_acceptance.RESULTS[n])
