import random

import pytest
from hypothesis import strategies as st

from origami_kz import fixtures as F
from origami_kz.homology import Homology
from origami_kz.kz import KZCocycle
from origami_kz.origami import Origami, sl2z_orbit
from origami_kz.perm import Permutation


@pytest.fixture(scope="session")
def graph():
    return sl2z_orbit(F.o1())


@pytest.fixture(scope="session")
def cocycle(graph):
    return KZCocycle(graph)


@pytest.fixture(scope="session")
def basis(graph):
    return F.bases_on_graph(graph)[graph.base]


@pytest.fixture(scope="session")
def omega(cocycle, graph, basis):
    return cocycle.homology(graph.base).intersection_matrix(basis.zero_part)


@st.composite
def permutations(draw, min_n=1, max_n=12, n=None):
    size = n if n is not None else draw(st.integers(min_n, max_n))
    return Permutation(tuple(draw(st.permutations(range(size)))))


@st.composite
def origamis(draw, min_n=1, max_n=12):
    """Random connected origamis: v is rejection-sampled until the pair is transitive."""
    n = draw(st.integers(min_n, max_n))
    h = draw(permutations(n=n))
    seed = draw(st.integers(0, 2**32 - 1))
    rng = random.Random(seed)
    while True:
        img = list(range(n))
        rng.shuffle(img)
        o = Origami(h, Permutation(tuple(img)))
        if o.is_transitive():
            return o


def random_origami(rng: random.Random, n: int) -> Origami:
    while True:
        h, v = list(range(n)), list(range(n))
        rng.shuffle(h)
        rng.shuffle(v)
        o = Origami(Permutation(tuple(h)), Permutation(tuple(v)))
        if o.is_transitive():
            return o


# criterion number -> (title, passed); filled by test_acceptance.py
ACCEPTANCE_RESULTS: dict[int, tuple[str, bool]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_RESULTS):
        title, ok = ACCEPTANCE_RESULTS[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {title}")
