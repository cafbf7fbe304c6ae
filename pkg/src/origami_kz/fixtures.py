"""Data for the flagship genus-3 origami O1 = ((1)(2,3,4,5)(6,7,8,9), (1,2,3,6)(4,7,9,8)(5)).

The four members of its SL(2,Z)-orbit are O_k = T^(k-1) O1, k = 1..4,
all sharing h.  Each O_k carries the basis

    Sigma_0, Z_0, Sigma_1, Sigma_2, Z_1, Z_2

where Sigma_i are h-rows minus four times sigma_1 and Z_i are the two
4-cycles of v_{O_k} (through squares 1 and 4) minus four times zeta at the
square fixed by v_{O_k}.  For every k the rows and columns are those of
v_{O_k} itself, with fixed squares 5, 3, 9, 8.
"""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources

from origami_kz import matrices as mx
from origami_kz.homology import HomologyBasis, chain_add, sigma, zeta
from origami_kz.origami import OrbitGraph, Origami, apply_generator, canonical_form
from origami_kz.perm import parse_cycles
from origami_kz.words import Word

O1_H = "(1)(2,3,4,5)(6,7,8,9)"
O1_V = "(1,2,3,6)(4,7,9,8)(5)"

WORD_A = Word.parse("N T S^-1")
WORD_B = Word.parse("S T^-3")
WORD_P1 = Word.parse("S T^-4 S^-1 T^4")
WORD_P2 = Word.parse("S T^-4 S T^6")
NAMED_WORDS = {"a": WORD_A, "b": WORD_B, "p1": WORD_P1, "p2": WORD_P2}

BASIS_NAMES = ("Sigma0", "Z0", "Sigma1", "Sigma2", "Z1", "Z2")


def o1() -> Origami:
    return Origami.from_cycles(O1_H, O1_V, 9)


def orbit_member(k: int) -> Origami:
    """O_k = T^(k-1)(O1) with its original square labels."""
    if k not in (1, 2, 3, 4):
        raise ValueError(f"k must be 1..4, got {k}")
    o = o1()
    for _ in range(k - 1):
        o = apply_generator(o, "T")
    return o


def fixed_square(k: int) -> int:
    fixed = [c[0] for c in orbit_member(k).v.cycles() if len(c) == 1]
    assert len(fixed) == 1
    return fixed[0]


def formula_basis(k: int) -> HomologyBasis:
    """The basis B_k on O_k (original labels)."""
    o = orbit_member(k)
    n = o.n
    h, v = o.h, o.v
    f = fixed_square(k)
    s0 = tuple([1] * n + [0] * n)
    z0 = tuple([0] * n + [1] * n)

    def row(start):
        return chain_add(*[sigma((h ** j)(start), n) for j in range(1, 5)], sigma(1, n, -4))

    def col(start):
        return chain_add(*[zeta((v ** j)(start), n) for j in range(1, 5)], zeta(f, n, -4))

    return HomologyBasis(o, (s0, z0, row(2), row(6), col(1), col(4)), BASIS_NAMES)


def node_of(graph: OrbitGraph, k: int):
    """(node index, relabeling) identifying O_k with a canonical orbit node."""
    canon, r = canonical_form(orbit_member(k))
    return graph.nodes.index(canon), r


def bases_on_graph(graph: OrbitGraph) -> dict[int, HomologyBasis]:
    """B_1..B_4 transported to the canonical labels of their orbit nodes."""
    out = {}
    for k in (1, 2, 3, 4):
        node, r = node_of(graph, k)
        out[node] = load_basis(k).relabeled(r)
    return out


@lru_cache(maxsize=None)
def _data() -> dict:
    return json.loads(resources.files("origami_kz").joinpath("data/o1.json").read_text())


def load_basis(k: int) -> HomologyBasis:
    """B_k from the versioned fixture file."""
    return HomologyBasis.from_json(_data()["bases"][str(k)])


def relabelings() -> dict[str, object]:
    """phi_2, phi_3, phi_4, psi_3, psi_4 as permutations."""
    return {name: parse_cycles(c, 9) for name, c in _data()["relabelings"].items()}


def theta() -> mx.Matrix:
    return mx.mat(_data()["theta"])


def perm_matrix_p() -> mx.Matrix:
    return mx.mat(_data()["P"])


def pingpong_fixture() -> dict:
    return json.loads(resources.files("origami_kz").joinpath("data/pingpong_o1.json").read_text())


def named_word(name: str) -> Word:
    return NAMED_WORDS[name]


# (generator, source k, target k) for the elementary maps between the O_k
ELEMENTARY_EDGES = (
    ("T", 1, 2), ("T", 2, 3), ("T", 3, 4), ("T", 4, 1),
    ("S", 1, 4), ("S", 4, 3), ("S", 3, 2), ("S", 2, 1),
    ("N", 1, 3), ("N", 2, 4),
)


def elementary_label(g: str, i: int, j: int) -> str:
    return f"{'-Id' if g == 'N' else g}_{{{i},{j}}}"


def elementary_matrices(cocycle) -> dict[str, mx.Matrix]:
    """The 6x6 matrices of T, S, -Id between the O_k in the bases B_k."""
    graph = cocycle.graph
    bases = bases_on_graph(graph)
    nodes = {k: node_of(graph, k)[0] for k in (1, 2, 3, 4)}
    out = {}
    for g, i, j in ELEMENTARY_EDGES:
        hmap = cocycle.elementary(g, nodes[i])
        if hmap.target != nodes[j]:
            raise ValueError(f"{g} does not take O_{i} to O_{j}")
        out[elementary_label(g, i, j)] = cocycle.matrix_in_bases(hmap, bases[nodes[i]], bases[nodes[j]])
    return out


def unipotent_words() -> dict[str, Word]:
    """x, y, z as words in A, B (the P conjugation stripped)."""
    out = {}
    for k, text in _data()["unipotent_words"].items():
        syl = Word.parse(text).syllables
        if syl[0] != ("P", 1) or syl[-1] != ("P", 1):
            raise ValueError(f"{k} is not of the form P w P")
        out[k] = Word(syl[1:-1]).reduced_mod({"A": 3, "B": 3})
    return out
