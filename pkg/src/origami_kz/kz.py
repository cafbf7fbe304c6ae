"""Kontsevich-Zorich cocycle over an SL(2,Z)-orbit of origamis.

For an orbit edge ``i --g--> j`` with relabeling r (raw image square x is
square r(x) of node j) the induced map on edge generators is

    T:   sigma_x -> sigma_rx,                   zeta_x -> sigma_rx + zeta_{r h x}
    S:   sigma_x -> zeta_rx + sigma_{r v x},    zeta_x -> zeta_rx
    -Id: sigma_x -> -sigma_{r v^-1 x},          zeta_x -> -zeta_{r h^-1 x}

with (h, v) the permutations of the source node.  Matrices use the
columns-are-images convention.  Inverse letters use the exact integer
inverse of the forward map.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from origami_kz import matrices as mx
from origami_kz.homology import Coordinates, Homology, HomologyBasis, HomologyError
from origami_kz.origami import OrbitGraph
from origami_kz.words import Word, sl2_matrix


class CocycleError(ValueError):
    pass


@dataclass(frozen=True)
class HomologyMap:
    source: int
    target: int
    matrix: mx.Matrix  # 2n x 2n, column j = image of source generator j

    def __call__(self, chain: Sequence[int]) -> tuple[int, ...]:
        return mx.apply(self.matrix, chain)

    def then(self, other: "HomologyMap") -> "HomologyMap":
        """``other`` after ``self``."""
        if other.source != self.target:
            raise CocycleError(f"cannot compose: {self.target} != {other.source}")
        return HomologyMap(self.source, other.target, mx.mul(other.matrix, self.matrix))


@dataclass(frozen=True)
class MonodromyMatrix:
    word: Word
    full: mx.Matrix
    taut: mx.Matrix
    zero_part: mx.Matrix

    def to_json(self) -> dict:
        return {"word": str(self.word), "full": mx.as_lists(self.full),
                "taut": mx.as_lists(self.taut), "zero_part": mx.as_lists(self.zero_part)}


def _elementary_matrix(graph: OrbitGraph, g: str, source: int) -> mx.Matrix:
    try:
        edge = graph.edges[(source, g)]
    except KeyError:
        raise CocycleError(f"no {g}-edge at node {source}") from None
    o = graph.nodes[source]
    n = o.n
    r = edge.relabel.images
    h, v = o.h.images, o.v.images
    hinv, vinv = o.h.inverse().images, o.v.inverse().images
    cols = []
    for x in range(n):  # sigma_x
        col = [0] * (2 * n)
        if g == "T":
            col[r[x]] += 1
        elif g == "S":
            col[n + r[x]] += 1
            col[r[v[x]]] += 1
        else:
            col[r[vinv[x]]] -= 1
        cols.append(col)
    for x in range(n):  # zeta_x
        col = [0] * (2 * n)
        if g == "T":
            col[r[x]] += 1
            col[n + r[h[x]]] += 1
        elif g == "S":
            col[n + r[x]] += 1
        else:
            col[n + r[hinv[x]]] -= 1
        cols.append(col)
    return mx.transpose(mx.mat(cols))


class KZCocycle:
    """Caches elementary maps (and their inverses) over one orbit graph."""

    def __init__(self, graph: OrbitGraph):
        self.graph = graph
        self._fwd: dict[tuple[int, str], HomologyMap] = {}
        self._bwd: dict[tuple[int, str], HomologyMap] = {}
        self._hom: dict[int, Homology] = {}
        self._coords: dict[tuple, Coordinates] = {}

    def homology(self, node: int) -> Homology:
        if node not in self._hom:
            self._hom[node] = Homology(self.graph.nodes[node])
        return self._hom[node]

    def elementary(self, g: str, source: int) -> HomologyMap:
        key = (source, g)
        if key not in self._fwd:
            m = _elementary_matrix(self.graph, g, source)
            self._fwd[key] = HomologyMap(source, self.graph.step(source, g), m)
        return self._fwd[key]

    def elementary_inverse(self, g: str, node: int) -> HomologyMap:
        """Map for ``g^-1`` starting at ``node``."""
        key = (node, g)
        if key not in self._bwd:
            prev = self.graph.predecessor(node, g)
            fwd = self.elementary(g, prev)
            if abs(mx.det(fwd.matrix)) != 1:
                raise CocycleError(f"elementary {g}-map at node {prev} is not unimodular")
            self._bwd[key] = HomologyMap(node, prev, mx.inverse(fwd.matrix))
        return self._bwd[key]

    def steps(self, word: Word, start: int | None = None) -> list[HomologyMap]:
        node = self.graph.base if start is None else start
        out = []
        for letter, sign in reversed(word.letters()):
            m = self.elementary(letter, node) if sign > 0 else self.elementary_inverse(letter, node)
            out.append(m)
            node = m.target
        return out

    def word_map(self, word: Word, start: int | None = None) -> HomologyMap:
        node = self.graph.base if start is None else start
        n = self.graph.nodes[node].n
        total = HomologyMap(node, node, mx.identity(2 * n))
        for m in self.steps(word, node):
            total = total.then(m)
        return total

    def transport(self, word: Word, chains: Sequence[Sequence[int]], start: int | None = None):
        """Push chains along ``word``; returns (endpoint, images)."""
        node = self.graph.base if start is None else start
        vecs = [tuple(c) for c in chains]
        for m in self.steps(word, node):
            vecs = [m(c) for c in vecs]
            node = m.target
        return node, vecs

    def coordinates(self, basis: HomologyBasis, node: int) -> Coordinates:
        key = (node, basis.vectors)
        if key not in self._coords:
            self._coords[key] = Coordinates(basis, self.homology(node))
        return self._coords[key]

    def matrix_in_bases(self, hmap: HomologyMap, src_basis: HomologyBasis,
                        tgt_basis: HomologyBasis) -> mx.Matrix:
        images = [hmap(b) for b in src_basis.vectors]
        return self.coordinates(tgt_basis, hmap.target).matrix(images)

    def monodromy(self, word: Word, basis: HomologyBasis, start: int | None = None,
                  *, integral: bool = True) -> MonodromyMatrix:
        """Monodromy of a closed word; ``integral=False`` allows rational entries
        for bases that only span a finite-index sublattice."""
        node = self.graph.base if start is None else start
        end, images = self.transport(word, basis.vectors, node)
        if end != node:
            raise CocycleError(f"word {word} is not closed at node {node} (ends at {end})")
        full = self.coordinates(basis, node).matrix(images, integral=integral)
        k = len(full)
        taut = tuple(r[:2] for r in full[:2])
        zero = tuple(r[2:] for r in full[2:])
        if any(full[i][j] for i in range(2) for j in range(2, k)) or \
                any(full[i][j] for i in range(2, k) for j in range(2)):
            raise CocycleError("monodromy does not preserve the tautological splitting; basis not adapted")
        if taut != sl2_matrix(word):
            raise CocycleError(f"tautological block {taut} differs from the SL(2,Z) matrix of {word}")
        return MonodromyMatrix(word, full, taut, zero)

    def monodromies(self, words: Iterable[Word], basis: HomologyBasis) -> list[MonodromyMatrix]:
        """Evaluate many closed words; ``ORIGAMI_KZ_WORKERS`` sets the thread count."""
        words = list(words)
        workers = int(os.environ.get("ORIGAMI_KZ_WORKERS", "1"))
        # warm the caches so worker threads only read them
        self.coordinates(basis, self.graph.base)
        if workers <= 1:
            return [self.monodromy(w, basis) for w in words]
        with ThreadPoolExecutor(workers) as pool:
            return list(pool.map(lambda w: self.monodromy(w, basis), words))


def elementary_map(g: str, source: int, graph: OrbitGraph) -> HomologyMap:
    return KZCocycle(graph).elementary(g, source)


def word_map(word: Word, graph: OrbitGraph) -> HomologyMap:
    return KZCocycle(graph).word_map(word)


def monodromy(word: Word, graph: OrbitGraph, basis: HomologyBasis) -> MonodromyMatrix:
    return KZCocycle(graph).monodromy(word, basis)


def change_basis(m: mx.Matrix, theta: mx.Matrix) -> mx.Matrix:
    """``theta^-1 m theta``; raises if theta is singular or the result is not integral."""
    inv = mx.rational_inverse(theta)
    prod = mx.mul(mx.mul(inv, [[Fraction(x) for x in r] for r in m]), theta)
    if any(x.denominator != 1 for r in prod for x in r):
        raise CocycleError("conjugated matrix is not integral")
    return tuple(tuple(int(x) for x in r) for r in prod)


def is_symplectic(m: mx.Matrix, omega: mx.Matrix) -> bool:
    return mx.mul(mx.mul(mx.transpose(m), omega), m) == tuple(tuple(r) for r in omega)


__all__ = [
    "CocycleError", "HomologyMap", "KZCocycle", "MonodromyMatrix", "change_basis",
    "elementary_map", "is_symplectic", "monodromy", "word_map", "HomologyError",
]
