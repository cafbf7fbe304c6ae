"""Origamis (square-tiled surfaces) as transitive pairs of permutations.

``h`` sends a square to its right neighbour and ``v`` to the square on top.
The generators of SL(2,Z) act by

    T(h, v) = (h, v h^-1),   S(h, v) = (h v^-1, v),   -Id(h, v) = (h^-1, v^-1)

and two pairs describe the same surface when they are simultaneously
conjugate.  The SL(2,Z)-orbit is explored with canonical forms, and every
orbit edge remembers the relabeling that identifies the raw image with the
canonical target, which is what the homology maps need.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from origami_kz import matrices as mx
from origami_kz.perm import (
    Permutation,
    PermutationError,
    commutator,
    compose,
    conjugate,
    format_cycles,
    parse_cycles,
)
from origami_kz.words import SL2_GENERATORS, Word, sl2_matrix

GENERATORS = ("T", "S", "N")


class OrigamiError(ValueError):
    pass


@dataclass(frozen=True)
class Origami:
    h: Permutation
    v: Permutation

    def __post_init__(self):
        if self.h.n != self.v.n:
            raise OrigamiError(f"h and v act on different sets ({self.h.n} vs {self.v.n})")

    @classmethod
    def from_cycles(cls, h: str, v: str, n: int | None = None, *, check: bool = True) -> "Origami":
        if n is None:
            n = max([int(t) for t in _numbers(h) + _numbers(v)] or [1])
        o = cls(parse_cycles(h, n), parse_cycles(v, n))
        if check:
            o.check_transitive()
        return o

    @property
    def n(self) -> int:
        return self.h.n

    def is_transitive(self) -> bool:
        return len(_component(self.h, self.v, 0)) == self.n

    def check_transitive(self) -> "Origami":
        if not self.is_transitive():
            raise OrigamiError(f"{self} is not connected (h, v do not act transitively)")
        return self

    def commutator(self) -> Permutation:
        return commutator(self.h, self.v)

    def transposed(self) -> "Origami":
        """Reflection in the diagonal: rows become columns."""
        return Origami(self.v, self.h)

    def relabel(self, c: Permutation) -> "Origami":
        """Rename square ``i`` as ``c(i)``."""
        return Origami(conjugate(self.h, c), conjugate(self.v, c))

    def to_text(self) -> str:
        return f"h={format_cycles(self.h)}; v={format_cycles(self.v)}; n={self.n}"

    def __str__(self) -> str:
        return self.to_text()

    def to_json(self) -> dict:
        return {"h": format_cycles(self.h), "v": format_cycles(self.v), "n": self.n}

    @classmethod
    def from_json(cls, d: dict) -> "Origami":
        return cls.from_cycles(d["h"], d["v"], d["n"])


def _numbers(text: str) -> list[str]:
    return [t for t in text.replace("(", ",").replace(")", ",").split(",") if t.strip()]


def _component(h: Permutation, v: Permutation, start: int) -> set[int]:
    seen = {start}
    stack = [start]
    hi, vi = h.images, v.images
    while stack:
        x = stack.pop()
        for y in (hi[x], vi[x]):
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return seen


def parse_origami(text: str) -> Origami:
    """Parse ``h=<cycles>; v=<cycles>; n=<int>`` (``n`` optional)."""
    fields: dict[str, str] = {}
    for part in text.replace("\n", ";").split(";"):
        if not part.strip():
            continue
        if "=" not in part:
            raise OrigamiError(f"expected key=value, got {part.strip()!r}")
        key, value = part.split("=", 1)
        fields[key.strip().lower()] = value.strip()
    if "h" not in fields or "v" not in fields:
        raise OrigamiError("origami text needs both h= and v=")
    n = int(fields["n"]) if "n" in fields else None
    try:
        return Origami.from_cycles(fields["h"], fields["v"], n)
    except PermutationError as exc:
        raise OrigamiError(str(exc)) from exc


# ---------------------------------------------------------------- stratum

@dataclass(frozen=True)
class Stratum:
    zero_orders: tuple[int, ...]
    genus: int

    def __str__(self) -> str:
        return "H(" + ",".join(map(str, self.zero_orders)) + ")" if self.zero_orders else "H(0)"


def stratum(o: Origami) -> Stratum:
    o.check_transitive()
    corners = o.commutator().cycles()
    orders = tuple(sorted((len(c) - 1 for c in corners if len(c) > 1), reverse=True))
    genus, rem = divmod(sum(orders) + 2, 2)
    assert rem == 0, "zero orders of a translation surface sum to an even number"
    # Euler characteristic: V - E + F = #corners - 2n + n
    if len(corners) - o.n != 2 - 2 * genus:
        raise OrigamiError("Euler characteristic check failed")
    return Stratum(orders, genus)


# ---------------------------------------------------------------- SL(2,Z) action

def apply_generator(o: Origami, g: str) -> Origami:
    """Raw image of ``o`` under T, S or N (= -Id); not canonicalized."""
    if g == "T":
        return Origami(o.h, compose(o.v, o.h.inverse()))
    if g == "S":
        return Origami(compose(o.h, o.v.inverse()), o.v)
    if g == "N":
        return Origami(o.h.inverse(), o.v.inverse())
    raise OrigamiError(f"unknown generator {g!r}")


def apply_inverse_generator(o: Origami, g: str) -> Origami:
    if g == "T":
        return Origami(o.h, compose(o.v, o.h))
    if g == "S":
        return Origami(compose(o.h, o.v), o.v)
    return apply_generator(o, g)


def apply_word(o: Origami, word: Word) -> Origami:
    """Raw image of ``o`` under a word (rightmost letter first)."""
    for letter, sign in reversed(word.letters()):
        o = apply_generator(o, letter) if sign > 0 else apply_inverse_generator(o, letter)
    return o


# ---------------------------------------------------------------- canonical forms

def _relabel_from(o: Origami, start: int) -> list[int] | None:
    hi, vi = o.h.images, o.v.images
    label = [-1] * o.n
    label[start] = 0
    nxt = 1
    queue = deque([start])
    while queue:
        x = queue.popleft()
        for y in (hi[x], vi[x]):
            if label[y] < 0:
                label[y] = nxt
                nxt += 1
                queue.append(y)
    if nxt != o.n:
        return None
    return label


def canonical_form(o: Origami) -> tuple[Origami, Permutation]:
    """Least relabeling over all start squares; returns ``(canon, r)`` with
    ``canon == o.relabel(r)``."""
    best_key = None
    best_r = None
    hi, vi = o.h.images, o.v.images
    for s in range(o.n):
        r = _relabel_from(o, s)
        if r is None:
            raise OrigamiError(f"{o} is not connected")
        nh = [0] * o.n
        nv = [0] * o.n
        for i in range(o.n):
            nh[r[i]] = r[hi[i]]
            nv[r[i]] = r[vi[i]]
        key = (nh, nv)
        if best_key is None or key < best_key:
            best_key, best_r = key, r
    canon = Origami(Permutation(best_key[0], check=False), Permutation(best_key[1], check=False))
    return canon, Permutation(best_r, check=False)


def is_equivalent(o1: Origami, o2: Origami) -> bool:
    return o1.n == o2.n and canonical_form(o1)[0] == canonical_form(o2)[0]


def automorphisms(o: Origami) -> list[Permutation]:
    """Permutations commuting with both h and v."""
    o.check_transitive()
    hi, vi = o.h.images, o.v.images
    out = []
    for t in range(o.n):
        m = [-1] * o.n
        m[0] = t
        stack = [0]
        ok = True
        while stack and ok:
            x = stack.pop()
            for p in (hi, vi):
                y, fy = p[x], p[m[x]]
                if m[y] < 0:
                    m[y] = fy
                    stack.append(y)
                elif m[y] != fy:
                    ok = False
                    break
        if ok and sorted(m) == list(range(o.n)):
            out.append(Permutation(m, check=False))
    return out


# ---------------------------------------------------------------- orbit graph

@dataclass(frozen=True)
class Edge:
    target: int
    relabel: Permutation  # nodes[target] == apply_generator(nodes[source], g).relabel(relabel)


@dataclass
class OrbitGraph:
    nodes: list[Origami]
    edges: dict[tuple[int, str], Edge]
    base: int = 0
    # input origami relabeled by this permutation is nodes[base]
    input_relabel: Permutation | None = None
    _inverse: dict[tuple[int, str], int] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self._inverse = {(e.target, g): i for (i, g), e in self.edges.items()}

    def __len__(self) -> int:
        return len(self.nodes)

    def step(self, node: int, letter: str, sign: int = 1) -> int:
        if sign > 0:
            return self.edges[(node, letter)].target
        return self._inverse[(node, letter)]

    def predecessor(self, node: int, letter: str) -> int:
        """The node sent to ``node`` by ``letter``."""
        return self._inverse[(node, letter)]

    def walk(self, word: Word, start: int | None = None) -> list[int]:
        """Nodes visited by ``word`` (rightmost letter first), starting node included."""
        node = self.base if start is None else start
        path = [node]
        for letter, sign in reversed(word.letters()):
            node = self.step(node, letter, sign)
            path.append(node)
        return path

    def endpoint(self, word: Word, start: int | None = None) -> int:
        return self.walk(word, start)[-1]

    def index_of(self, o: Origami) -> int:
        canon = canonical_form(o)[0]
        return self.nodes.index(canon)

    def to_json(self) -> dict:
        return {
            "base": self.base,
            "input_relabel": None if self.input_relabel is None else list(self.input_relabel.images),
            "nodes": [o.to_json() for o in self.nodes],
            "edges": [
                {"source": i, "generator": g, "target": e.target,
                 "relabel": format_cycles(e.relabel)}
                for (i, g), e in sorted(self.edges.items())
            ],
        }

    @classmethod
    def from_json(cls, d: dict) -> "OrbitGraph":
        nodes = [Origami.from_json(x) for x in d["nodes"]]
        n = nodes[0].n
        edges = {}
        for e in d["edges"]:
            relabel = parse_cycles(e["relabel"], n)
            src = nodes[e["source"]]
            if apply_generator(src, e["generator"]).relabel(relabel) != nodes[e["target"]]:
                raise OrigamiError(f"edge {e} does not relabel onto its target")
            edges[(e["source"], e["generator"])] = Edge(e["target"], relabel)
        ir = d.get("input_relabel")
        return cls(nodes, edges, d["base"], None if ir is None else Permutation(ir))

    def to_dot(self) -> str:
        lines = ["digraph orbit {", "  node [shape=box, fontname=monospace];"]
        for i, o in enumerate(self.nodes):
            lab = f"{i}\\nh={format_cycles(o.h)}\\nv={format_cycles(o.v)}"
            extra = ", penwidth=2" if i == self.base else ""
            lines.append(f'  n{i} [label="{lab}"{extra}];')
        style = {"T": "solid", "S": "dashed", "N": "dotted"}
        for (i, g), e in sorted(self.edges.items()):
            lines.append(f'  n{i} -> n{e.target} [label="{g}", style={style[g]}];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def sl2z_orbit(o: Origami, generators: Sequence[str] = GENERATORS) -> OrbitGraph:
    """Breadth-first closure under T, S and -Id with canonical deduplication."""
    o.check_transitive()
    base, input_relabel = canonical_form(o)
    nodes = [base]
    index = {base: 0}
    edges: dict[tuple[int, str], Edge] = {}
    queue = deque([0])
    while queue:
        i = queue.popleft()
        for g in generators:
            raw = apply_generator(nodes[i], g)
            canon, r = canonical_form(raw)
            j = index.get(canon)
            if j is None:
                j = index[canon] = len(nodes)
                nodes.append(canon)
                queue.append(j)
            edges[(i, g)] = Edge(j, r)
    return OrbitGraph(nodes, edges, 0, input_relabel)


def cusps(graph: OrbitGraph) -> list[tuple[int, ...]]:
    """T-cycles of the orbit graph; each cycle starts at its least node."""
    seen: set[int] = set()
    out = []
    for i in range(len(graph)):
        if i in seen:
            continue
        cyc = [i]
        seen.add(i)
        j = graph.step(i, "T")
        while j != i:
            cyc.append(j)
            seen.add(j)
            j = graph.step(j, "T")
        out.append(tuple(cyc))
    return out


# ---------------------------------------------------------------- Veech group

@dataclass(frozen=True)
class SchreierGenerator:
    word: Word
    matrix: mx.Matrix


@dataclass
class VeechGroupData:
    index: int
    cusp_count: int
    schreier_generators: list[SchreierGenerator]
    coset_words: list[Word]

    def to_json(self) -> dict:
        return {
            "index": self.index,
            "cusp_count": self.cusp_count,
            "coset_representatives": [str(w) for w in self.coset_words],
            "schreier_generators": [
                {"word": str(g.word), "matrix": mx.as_lists(g.matrix)} for g in self.schreier_generators
            ],
        }


def stabilizes(graph: OrbitGraph, word: Word) -> bool:
    return graph.endpoint(word) == graph.base


def veech_group(graph: OrbitGraph) -> VeechGroupData:
    """Index, cusps and Schreier generators from a BFS spanning tree."""
    coset: dict[int, Word] = {graph.base: Word()}
    tree_edges = set()
    queue = deque([graph.base])
    while queue:
        i = queue.popleft()
        for g in GENERATORS:
            j = graph.step(i, g)
            if j not in coset:
                coset[j] = Word.of(g) * coset[i]
                tree_edges.add((i, g))
                queue.append(j)
    gens = []
    seen_mats = set()
    for (i, g), e in sorted(graph.edges.items()):
        if (i, g) in tree_edges:
            continue
        w = coset[e.target].inverse() * Word.of(g) * coset[i]
        if not w.syllables:
            continue
        m = sl2_matrix(w)
        if not stabilizes(graph, w):
            raise AssertionError(f"Schreier word {w} does not return to the base")
        if mx.det(m) != 1:
            raise AssertionError(f"Schreier matrix {m} has det != 1")
        if m in seen_mats or mx.is_identity(m):
            continue
        seen_mats.add(m)
        gens.append(SchreierGenerator(w, m))
    cosets = [coset[i] for i in range(len(graph))]
    return VeechGroupData(len(graph), len(cusps(graph)), gens, cosets)


# ---------------------------------------------------------------- cylinders

@dataclass(frozen=True)
class Cylinder:
    rows: tuple[tuple[int, ...], ...]  # bottom to top, each an h-cycle
    width: int
    height: int
    waist: tuple[int, ...]  # relative chain, coefficients on (sigma_1..n, zeta_1..n)

    @property
    def squares(self) -> frozenset[int]:
        return frozenset(s for r in self.rows for s in r)


def horizontal_cylinders(o: Origami) -> list[Cylinder]:
    """Maximal horizontal cylinders.

    Row R (an h-cycle) is glued to the row above it inside one cylinder
    when v maps R onto a single row and commutes with h there, i.e. no
    corner on the shared boundary is singular.
    """
    return _cylinders(o.h, o.v, offset=0)


def vertical_cylinders(o: Origami) -> list[Cylinder]:
    """Columns play the role of rows; waists are sums of zeta edges."""
    return _cylinders(o.v, o.h, offset=o.n)


def _cylinders(h: Permutation, v: Permutation, offset: int) -> list[Cylinder]:
    n = h.n
    rows = h.cycles()
    row_of = {s: k for k, r in enumerate(rows) for s in r}
    up: dict[int, int] = {}
    for k, r in enumerate(rows):
        targets = {row_of[v(s)] for s in r}
        if len(targets) == 1 and all(v(h(s)) == h(v(s)) for s in r):
            up[k] = targets.pop()
    has_below = set(up.values())
    chains = []
    seen: set[int] = set()
    for k in range(len(rows)):
        if k in has_below:
            continue
        chain = [k]
        while chain[-1] in up:
            chain.append(up[chain[-1]])
        chains.append(chain)
        seen.update(chain)
    for k in range(len(rows)):
        # rows closing up into a cycle (a torus without singular corners)
        if k in seen:
            continue
        chain = [k]
        seen.add(k)
        while up[chain[-1]] != k:
            chain.append(up[chain[-1]])
            seen.add(chain[-1])
        chains.append(chain)
    out = []
    for chain in chains:
        waist = [0] * (2 * n)
        for s in rows[chain[0]]:
            waist[offset + s - 1] += 1
        out.append(Cylinder(tuple(rows[k] for k in chain), len(rows[chain[0]]), len(chain), tuple(waist)))
    out.sort(key=lambda c: (c.width, min(c.squares)))
    return out


def homological_dimension(graph: OrbitGraph, homologies: Sequence | None = None) -> int:
    """Max over cusp representatives of the rank of horizontal waist classes in H_1.

    The waist span of every representative is checked to be isotropic.
    """
    from origami_kz.homology import Homology

    best = 0
    for cyc in cusps(graph):
        node = cyc[0]
        hom = homologies[node] if homologies is not None else Homology(graph.nodes[node])
        waists = [c.waist for c in horizontal_cylinders(graph.nodes[node])]
        for w1 in waists:
            for w2 in waists:
                if hom.intersection(w1, w2) != 0:
                    raise AssertionError("waist curves of one direction must be disjoint")
        best = max(best, hom.rank_in_homology(waists))
    return best
