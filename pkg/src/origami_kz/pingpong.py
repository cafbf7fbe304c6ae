"""Ping-pong certificates for two finite-order elements of SL(2,Z).

Tables are finite unions of closed rational cones in R^2 \\ {0}.  If the
nontrivial powers of ``a`` send table X into table Y, those of ``b`` send
Y into X, and X, Y have disjoint interiors, then <a, b> = <a> * <b>.
All geometry is integer cross products; no floating point.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Mapping, Sequence

from origami_kz import matrices as mx
from origami_kz.words import Word

INTERIOR, BOUNDARY, OUTSIDE = "interior", "boundary", "outside"


class PingPongError(ValueError):
    pass


def cross(u: Sequence[int], w: Sequence[int]) -> int:
    return u[0] * w[1] - u[1] * w[0]


def _primitive(vec: Sequence[int]) -> tuple[int, int]:
    g = gcd(vec[0], vec[1])
    if g == 0:
        raise PingPongError("zero vector")
    return vec[0] // g, vec[1] // g


@dataclass(frozen=True)
class RationalCone:
    """Closed cone spanned counterclockwise from ``u`` to ``w`` (angle < pi)."""

    u: tuple[int, int]
    w: tuple[int, int]

    def __post_init__(self):
        if cross(self.u, self.w) <= 0:
            raise PingPongError(f"cone({self.u}, {self.w}) is not a proper counterclockwise cone")
        if _primitive(self.u) != tuple(self.u) or _primitive(self.w) != tuple(self.w):
            raise PingPongError(f"cone({self.u}, {self.w}) has non-primitive generators")

    @classmethod
    def spanned(cls, u: Sequence[int], w: Sequence[int]) -> "RationalCone":
        """Cone between two non-parallel vectors, in either order."""
        u, w = _primitive(u), _primitive(w)
        c = cross(u, w)
        if c == 0:
            raise PingPongError(f"vectors {u}, {w} are parallel or antipodal")
        return cls(u, w) if c > 0 else cls(w, u)

    def __neg__(self) -> "RationalCone":
        return RationalCone((-self.u[0], -self.u[1]), (-self.w[0], -self.w[1]))

    def interior_vector(self) -> tuple[int, int]:
        return _primitive((self.u[0] + self.w[0], self.u[1] + self.w[1]))


def cone_contains(c: RationalCone, vec: Sequence[int]) -> str:
    if vec[0] == 0 and vec[1] == 0:
        raise PingPongError("zero vector")
    s1, s2 = cross(c.u, vec), cross(vec, c.w)
    if s1 > 0 and s2 > 0:
        return INTERIOR
    if (s1 == 0 and s2 >= 0 and _same_ray(c.u, vec)) or (s2 == 0 and s1 >= 0 and _same_ray(c.w, vec)):
        return BOUNDARY
    return OUTSIDE


def _same_ray(u, vec) -> bool:
    return cross(u, vec) == 0 and u[0] * vec[0] + u[1] * vec[1] > 0


def in_closure(c: RationalCone, vec: Sequence[int]) -> bool:
    return cone_contains(c, vec) != OUTSIDE


def image_cone(m: mx.Matrix, c: RationalCone) -> RationalCone:
    if mx.det(m) == 0:
        raise PingPongError("singular matrix")
    return RationalCone.spanned(mx.apply(m, c.u), mx.apply(m, c.w))


def cone_inside(inner: RationalCone, outer: RationalCone) -> bool:
    """Closed inclusion (both angles < pi, so checking the two rays suffices)."""
    return in_closure(outer, inner.u) and in_closure(outer, inner.w)


def interiors_meet(c1: RationalCone, c2: RationalCone) -> bool:
    if (_same_ray(c1.u, c2.u) and _same_ray(c1.w, c2.w)):
        return True
    return any(cone_contains(x, y) == INTERIOR for x, y in
               ((c1, c2.u), (c1, c2.w), (c2, c1.u), (c2, c1.w)))


@dataclass
class PingPongTable:
    cones: dict[str, RationalCone]
    x: tuple[str, ...]  # table for the powers of a to map out of
    y: tuple[str, ...]

    @classmethod
    def from_fixture(cls, d: Mapping) -> "PingPongTable":
        rays = {k: tuple(v) for k, v in d["rays"].items()}
        cones = {k: RationalCone(rays[u], rays[w]) for k, (u, w) in d["cones"].items()}
        for k, src in d.get("cones_negated", {}).items():
            cones[k] = -cones[src]
        return cls(cones, tuple(d["tables"]["a"]), tuple(d["tables"]["b"]))

    def swapped(self) -> "PingPongTable":
        return PingPongTable(self.cones, self.y, self.x)

    def to_json(self) -> dict:
        return {
            "cones": {k: [list(c.u), list(c.w)] for k, c in self.cones.items()},
            "X": list(self.x), "Y": list(self.y),
        }


@dataclass
class Inclusion:
    generator: str
    source: str
    image: RationalCone
    targets: tuple[str, ...]  # more than one when the image straddles cones


@dataclass
class FreeProductCertificate:
    a: mx.Matrix
    b: mx.Matrix
    orders: tuple[int, int]
    table: PingPongTable
    inclusions: list[Inclusion]
    failures: list[str]
    images: dict[str, list[RationalCone]] = field(default_factory=dict)

    @property
    def valid(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {
            "kind": "ping-pong",
            "a": mx.as_lists(self.a), "b": mx.as_lists(self.b),
            "orders": list(self.orders),
            "table": self.table.to_json(),
            "inclusions": [
                {"generator": i.generator, "source": i.source,
                 "image": [list(i.image.u), list(i.image.w)], "targets": list(i.targets)}
                for i in self.inclusions
            ],
            "failures": self.failures,
            "checked_conditions": ["X and Y have disjoint interiors",
                                   "nontrivial powers of a map X into Y",
                                   "nontrivial powers of b map Y into X"],
            "verdict": f"<a> * <b> = Z/{self.orders[0]} * Z/{self.orders[1]}" if self.valid else "not certified",
        }


def matrix_order(m: mx.Matrix, bound: int = 12) -> int | None:
    p = m
    for k in range(1, bound + 1):
        if mx.is_identity(p):
            return k
        p = mx.mul(p, m)
    return None


def _locate(image: RationalCone, table: PingPongTable, names: Sequence[str]) -> tuple[str, ...] | None:
    for k in names:
        if cone_inside(image, table.cones[k]):
            return (k,)
    # straddle: cut at table rays strictly inside the image, ordered by -cot(angle from u)
    cuts = [image.u]
    inner = sorted(
        {r for k in names for r in (table.cones[k].u, table.cones[k].w)
         if cone_contains(image, r) == INTERIOR},
        key=lambda r: Fraction(-(image.u[0] * r[0] + image.u[1] * r[1]), cross(image.u, r)))
    cuts += inner + [image.w]
    pieces = []
    for lo, hi in zip(cuts, cuts[1:]):
        piece = RationalCone(lo, hi)
        hit = next((k for k in names if cone_inside(piece, table.cones[k])), None)
        if hit is None:
            return None
        pieces.append(hit)
    return tuple(pieces) if len(pieces) > 1 else None


def verify_pingpong(a: mx.Matrix, b: mx.Matrix, table: PingPongTable) -> FreeProductCertificate:
    oa, ob = matrix_order(a), matrix_order(b)
    if oa is None or ob is None:
        raise PingPongError("generators must have finite order")
    failures: list[str] = []
    for kx in table.x:
        for ky in table.y:
            if interiors_meet(table.cones[kx], table.cones[ky]):
                failures.append(f"interiors of {kx} (X) and {ky} (Y) meet")
    inclusions = []
    images: dict[str, list[RationalCone]] = {}
    for name, g, order, src, dst in (("a", a, oa, table.x, table.y), ("b", b, ob, table.y, table.x)):
        for e in range(1, order):
            gen = name if e == 1 else f"{name}^{e}"
            ge = mx.power(g, e)
            images[gen] = []
            for k in src:
                img = image_cone(ge, table.cones[k])
                images[gen].append(img)
                targets = _locate(img, table, dst)
                if targets is None:
                    failures.append(f"{gen}({k}) = cone({img.u}, {img.w}) is not inside the opposite table")
                else:
                    inclusions.append(Inclusion(gen, k, img, targets))
    return FreeProductCertificate(tuple(map(tuple, a)), tuple(map(tuple, b)), (oa, ob), table,
                                  inclusions, failures, images)


# ---------------------------------------------------------------- membership

@dataclass(frozen=True)
class NotMember:
    bound: int
    reason: str = "no normal form within the syllable bound"


def membership_normal_form(m: mx.Matrix, cert: FreeProductCertificate, bound: int = 24) -> Word | NotMember:
    """Normal form of ``m`` in <a> * <b>, found by peeling leading syllables.

    The leading syllable s of a reduced word sends a probe vector from the
    appropriate table into s(opposite table); probes from both tables give
    at most a couple of candidates per step, and the search only follows
    alternating syllable types, so any word found is the normal form.
    """
    if not cert.valid:
        raise PingPongError("certificate is not valid")
    gens = {"a": cert.a, "b": cert.b}
    orders = {"a": cert.orders[0], "b": cert.orders[1]}
    syllables = [(l, e) for l in ("a", "b") for e in range(1, orders[l])]
    inv_power = {s: mx.power(gens[s[0]], orders[s[0]] - s[1]) for s in syllables}
    regions = {s: cert.images[s[0] if s[1] == 1 else f"{s[0]}^{s[1]}"] for s in syllables}
    probes = [cert.table.cones[cert.table.x[0]].interior_vector(),
              cert.table.cones[cert.table.y[0]].interior_vector()]

    def strip(mat, depth, last):
        if mx.is_identity(mat):
            return []
        if depth == bound:
            return None
        cands = []
        for p in probes:
            q = mx.apply(mat, p)
            for s in syllables:
                if s[0] != last and s not in cands and any(in_closure(c, q) for c in regions[s]):
                    cands.append(s)
        for s in sorted(cands):
            rest = strip(mx.mul(inv_power[s], mat), depth + 1, s[0])
            if rest is not None:
                return [s] + rest
        return None

    found = strip(tuple(map(tuple, m)), 0, None)
    if found is None:
        return NotMember(bound)
    word = Word(tuple(found))
    if word.evaluate(gens) != tuple(map(tuple, m)):
        raise AssertionError("replayed normal form does not reproduce the matrix")
    return word
