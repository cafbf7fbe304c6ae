"""Relative and absolute homology of an origami.

Edge generators: ``sigma_g`` is the bottom side of square g (pointing
east) and ``zeta_g`` its left side (pointing north).  A chain is an
integer vector of length 2n, sigma coefficients first.  Square g bounds
the relation ``sigma_g + zeta_{h(g)} - zeta_g - sigma_{v(g)}``.

Intersection numbers are computed exactly on the cell structure.  One
cycle is pushed off the edges onto the dual graph (square centres joined
across edges): an edge is pushed into the square on its left, and at
each vertex the pushed path is routed counterclockwise around the
vertex, crossing the edges incident to it in their cyclic order.  The
pushed cycle meets primal edges transversally, so the pairing is a plain
signed count.  Orientation: an east-pointing edge crossed by a
north-pointing dual edge counts +1, which gives
``<Sigma_0, Z_0> = +n``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Sequence

import sympy

from origami_kz import matrices as mx
from origami_kz.origami import Origami
from origami_kz.perm import Permutation

Chain = tuple[int, ...]

BL, BR, TR, TL = range(4)


class HomologyError(ValueError):
    pass


def sigma(g: int, n: int, c: int = 1) -> list[int]:
    v = [0] * (2 * n)
    v[g - 1] = c
    return v


def zeta(g: int, n: int, c: int = 1) -> list[int]:
    v = [0] * (2 * n)
    v[n + g - 1] = c
    return v


def chain_add(*chains: Sequence[int]) -> Chain:
    return tuple(map(sum, zip(*chains)))


def chain_scale(k: int, c: Sequence[int]) -> Chain:
    return tuple(k * x for x in c)


def relabel_chain(chain: Sequence[int], r: Permutation) -> Chain:
    """Chain on the origami relabeled by ``r`` (square g becomes r(g))."""
    n = len(chain) // 2
    out = [0] * (2 * n)
    for g in range(n):
        out[r.images[g]] = chain[g]
        out[n + r.images[g]] = chain[n + g]
    return tuple(out)


def chain_to_json(chain: Sequence[int]) -> dict:
    n = len(chain) // 2
    return {
        "n": n,
        "sigma": {str(g + 1): c for g, c in enumerate(chain[:n]) if c},
        "zeta": {str(g + 1): c for g, c in enumerate(chain[n:]) if c},
    }


def chain_from_json(d: dict, n: int | None = None) -> Chain:
    n = d.get("n", n)
    if n is None:
        raise HomologyError("chain JSON needs n")
    out = [0] * (2 * n)
    for g, c in d.get("sigma", {}).items():
        out[int(g) - 1] += c
    for g, c in d.get("zeta", {}).items():
        out[n + int(g) - 1] += c
    return tuple(out)


def format_chain(chain: Sequence[int]) -> str:
    n = len(chain) // 2
    terms = []
    for name, part in (("s", chain[:n]), ("z", chain[n:])):
        for g, c in enumerate(part):
            if c:
                coef = "" if c == 1 else "-" if c == -1 else f"{c}*"
                terms.append(f"{coef}{name}{g + 1}")
    return " + ".join(terms).replace("+ -", "- ") or "0"


class Homology:
    """Homology data of one origami (face relations, boundary, intersection)."""

    def __init__(self, origami: Origami):
        self.origami = origami.check_transitive()
        self.n = origami.n
        self._build_corners()

    # -- cell structure -------------------------------------------------

    def _build_corners(self) -> None:
        n = self.n
        h, v = self.origami.h.images, self.origami.v.images
        hinv, vinv = self.origami.h.inverse().images, self.origami.v.inverse().images
        # counterclockwise step around a vertex: corner -> (next corner, dual edge, sign)
        # dual edge index: g for H_g (g -> h(g)), n + g for V_g (g -> v(g))
        def ccw(state):
            g, c = state
            if c == BL:
                return (hinv[g], BR), hinv[g], -1
            if c == BR:
                return (vinv[g], TR), n + vinv[g], -1
            if c == TR:
                return (h[g], TL), g, 1
            return (v[g], BL), n + g, 1

        vertex_of: dict[tuple[int, int], int] = {}
        # cumulative dual path from the vertex's home corner to each corner
        cum: dict[tuple[int, int], dict[int, int]] = {}
        vertices = []
        for g in range(n):
            for c in range(4):
                if (g, c) in vertex_of:
                    continue
                vid = len(vertices)
                orbit = [(g, c)]
                path: dict[int, int] = {}
                vertex_of[(g, c)] = vid
                cum[(g, c)] = {}
                state = (g, c)
                while True:
                    nxt, edge, sgn = ccw(state)
                    if nxt == (g, c):
                        break
                    path = dict(path)
                    path[edge] = path.get(edge, 0) + sgn
                    vertex_of[nxt] = vid
                    cum[nxt] = {k: x for k, x in path.items() if x}
                    orbit.append(nxt)
                    state = nxt
                vertices.append(tuple(orbit))
        self.vertices = vertices
        self._vertex_of = vertex_of
        # push matrix: column j = dual chain of primal edge j
        push = [[0] * (2 * n) for _ in range(2 * n)]
        for g in range(n):
            for j, start, end in ((g, (g, BL), (g, BR)), (n + g, (g, BL), (g, TL))):
                for k, x in cum[start].items():
                    push[k][j] += x
                for k, x in cum[end].items():
                    push[k][j] -= x
        self._push = mx.mat(push)
        # primal-dual pairing: row i = primal edge, column k = dual edge
        pair = [[0] * (2 * n) for _ in range(2 * n)]
        for g in range(n):
            pair[v[g]][n + g] += 1  # V_g crosses sigma_{v(g)} northwards
            pair[n + h[g]][g] -= 1  # H_g crosses zeta_{h(g)} eastwards
        self._pairing = mx.mul(mx.mat(pair), self._push)

    @cached_property
    def face_relations(self) -> mx.Matrix:
        """n x 2n matrix, row g = sigma_g + zeta_{h(g)} - zeta_g - sigma_{v(g)}."""
        n = self.n
        h, v = self.origami.h.images, self.origami.v.images
        rows = []
        for g in range(n):
            row = [0] * (2 * n)
            row[g] += 1
            row[n + h[g]] += 1
            row[n + g] -= 1
            row[v[g]] -= 1
            rows.append(tuple(row))
        return tuple(rows)

    @cached_property
    def face_basis(self) -> list[Chain]:
        """n - 1 independent face relations."""
        rows = list(self.face_relations)
        out: list[Chain] = []
        for r in rows:
            if mx.rank(out + [r]) > len(out):
                out.append(r)
        return out

    @cached_property
    def boundary_matrix(self) -> mx.Matrix:
        n = self.n
        rows = [[0] * (2 * n) for _ in self.vertices]
        for g in range(n):
            rows[self._vertex_of[(g, BR)]][g] += 1
            rows[self._vertex_of[(g, BL)]][g] -= 1
            rows[self._vertex_of[(g, TL)]][n + g] += 1
            rows[self._vertex_of[(g, BL)]][n + g] -= 1
        return mx.mat(rows)

    @property
    def genus(self) -> int:
        return (2 - len(self.vertices) + self.n) // 2

    def boundary(self, chain: Sequence[int]) -> tuple[int, ...]:
        return mx.apply(self.boundary_matrix, chain)

    def is_cycle(self, chain: Sequence[int]) -> bool:
        return not any(self.boundary(chain))

    @cached_property
    def cycle_space(self) -> list[Chain]:
        return mx.nullspace(self.boundary_matrix, 2 * self.n)

    def rank_in_homology(self, chains: Sequence[Sequence[int]]) -> int:
        chains = [tuple(c) for c in chains]
        return mx.rank(chains + self.face_basis) - len(self.face_basis)

    def is_homologous_to_zero(self, chain: Sequence[int]) -> bool:
        return self.is_cycle(chain) and self.rank_in_homology([chain]) == 0

    # -- intersection ---------------------------------------------------

    def push_to_dual(self, chain: Sequence[int]) -> tuple[int, ...]:
        """Dual chain (coefficients on H_1..H_n, V_1..V_n) homologous to ``chain``."""
        return mx.apply(self._push, chain)

    def intersection(self, c: Sequence[int], d: Sequence[int]) -> int:
        """Algebraic intersection number of two absolute cycles."""
        for x in (c, d):
            if not self.is_cycle(x):
                raise HomologyError("intersection needs absolute cycles (zero boundary)")
        return sum(ci * sum(p * di for p, di in zip(row, d)) for ci, row in zip(c, self._pairing) if ci)

    def intersection_matrix(self, basis: Sequence[Sequence[int]]) -> mx.Matrix:
        return tuple(tuple(self.intersection(a, b) for b in basis) for a in basis)

    # -- distinguished classes -------------------------------------------

    @property
    def sigma0(self) -> Chain:
        return tuple([1] * self.n + [0] * self.n)

    @property
    def zeta0(self) -> Chain:
        return tuple([0] * self.n + [1] * self.n)


@dataclass(frozen=True)
class HomologyBasis:
    """2g absolute classes; entries 0, 1 are (Sigma_0, Z_0), the rest span H_1^(0)."""

    origami: Origami
    vectors: tuple[Chain, ...]
    names: tuple[str, ...] | None = None

    def __len__(self) -> int:
        return len(self.vectors)

    @property
    def taut(self) -> tuple[Chain, ...]:
        return self.vectors[:2]

    @property
    def zero_part(self) -> tuple[Chain, ...]:
        return self.vectors[2:]

    def relabeled(self, r: Permutation) -> "HomologyBasis":
        return HomologyBasis(self.origami.relabel(r), tuple(relabel_chain(c, r) for c in self.vectors), self.names)

    def to_json(self) -> dict:
        return {
            "origami": self.origami.to_json(),
            "names": list(self.names) if self.names else None,
            "vectors": [chain_to_json(c) for c in self.vectors],
        }

    @classmethod
    def from_json(cls, d: dict) -> "HomologyBasis":
        o = Origami.from_json(d["origami"])
        names = tuple(d["names"]) if d.get("names") else None
        return cls(o, tuple(chain_from_json(c, o.n) for c in d["vectors"]), names)


def _homology(o: Origami, hom: Homology | None) -> Homology:
    if hom is None:
        return Homology(o)
    if hom.origami != o:
        raise HomologyError("homology data belongs to a different origami")
    return hom


def check_basis(basis: HomologyBasis, hom: Homology | None = None) -> None:
    """Raise unless the basis consists of 2g independent absolute classes
    with H_1^(0) part orthogonal to the tautological plane."""
    hom = _homology(basis.origami, hom)
    if len(basis) != 2 * hom.genus:
        raise HomologyError(f"expected {2 * hom.genus} classes, got {len(basis)}")
    for c in basis.vectors:
        if len(c) != 2 * hom.n:
            raise HomologyError("chain length must be 2n")
        if not hom.is_cycle(c):
            raise HomologyError(f"{format_chain(c)} is not an absolute cycle")
    if hom.rank_in_homology(basis.vectors) != len(basis):
        raise HomologyError("classes are dependent modulo face relations")
    if len(basis) >= 2:
        for c in basis.zero_part:
            for t in basis.taut:
                if hom.intersection(c, t) != 0:
                    raise HomologyError("H_1^(0) part is not orthogonal to the tautological plane")


def face_relations(o: Origami) -> mx.Matrix:
    return Homology(o).face_relations


def _orthogonalize(c: Sequence[int], s0: Chain, z0: Chain, hom: Homology) -> Chain:
    """Project onto the symplectic orthogonal of span(s0, z0), scaled to an integer chain."""
    w = hom.intersection(s0, z0)
    if w == 0:
        raise HomologyError("tautological pair is isotropic; cannot split")
    a = Fraction(hom.intersection(c, z0), w)   # coefficient of s0 to remove
    b = Fraction(-hom.intersection(c, s0), w)  # coefficient of z0 to remove
    vec = [Fraction(x) - a * s - b * z for x, s, z in zip(c, s0, z0)]
    return mx.integral_vector(vec)


def absolute_basis(o: Origami, hom: Homology | None = None) -> HomologyBasis:
    """(Sigma_0, Z_0) followed by 2g - 2 classes orthogonal to them."""
    hom = _homology(o, hom)
    s0, z0 = hom.sigma0, hom.zeta0
    chosen = [s0, z0]
    if hom.genus == 1:
        return HomologyBasis(o, (s0, z0))
    for c in hom.cycle_space:
        if len(chosen) == 2 * hom.genus:
            break
        if hom.rank_in_homology(chosen + [c]) > len(chosen):
            chosen.append(c)
    rest = [_orthogonalize(c, s0, z0, hom) for c in chosen[2:]]
    basis = HomologyBasis(o, tuple([s0, z0] + rest))
    check_basis(basis, hom)
    return basis


def intersection_form(o: Origami, basis: Sequence[Sequence[int]] | HomologyBasis,
                      hom: Homology | None = None) -> mx.Matrix:
    hom = _homology(o, hom)
    vecs = basis.vectors if isinstance(basis, HomologyBasis) else basis
    return hom.intersection_matrix(vecs)


def split_tautological(basis: HomologyBasis, hom: Homology | None = None):
    """Return ``(taut, zero_part)``; non-orthogonal entries are re-orthogonalized over Q."""
    hom = _homology(basis.origami, hom)
    s0, z0 = basis.taut
    rest = []
    for c in basis.zero_part:
        if hom.intersection(c, s0) or hom.intersection(c, z0):
            c = _orthogonalize(c, s0, z0, hom)
        rest.append(tuple(c))
    if hom.rank_in_homology([s0, z0] + rest) != len(basis):
        raise HomologyError("basis is not adapted: classes became dependent after splitting")
    return (s0, z0), tuple(rest)


class Coordinates:
    """Coordinates of absolute classes in a fixed basis, modulo face relations."""

    def __init__(self, basis: HomologyBasis, hom: Homology | None = None):
        self.basis = basis
        self.hom = _homology(basis.origami, hom)
        cols = list(basis.vectors) + list(self.hom.face_basis)
        m = sympy.Matrix([list(c) for c in cols]).T
        if m.rank() != len(cols):
            raise HomologyError("basis is dependent modulo face relations")
        self._cols = m
        self._left_inv = (m.T * m).inv() * m.T

    def __call__(self, chain: Sequence[int]) -> tuple[Fraction, ...]:
        x = self._left_inv * sympy.Matrix(list(chain))
        if self._cols * x != sympy.Matrix(list(chain)):
            raise HomologyError(f"{format_chain(chain)} is not an absolute cycle")
        k = len(self.basis)
        return tuple(Fraction(int(x[i].p), int(x[i].q)) for i in range(k))

    def matrix(self, images: Sequence[Sequence[int]], *, integral: bool = True) -> mx.Matrix:
        """Columns = coordinates of ``images``.

        With ``integral`` the result must have integer entries; otherwise
        non-integral entries stay as Fractions (bases spanning a sublattice).
        """
        cols = [self(c) for c in images]
        if integral and any(x.denominator != 1 for c in cols for x in c):
            raise HomologyError("change of basis is not integral")
        return mx.transpose(tuple(tuple(int(x) if x.denominator == 1 else x for x in c) for c in cols))
