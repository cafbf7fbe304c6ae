"""Permutations of {1..n} with cycle-notation input and output.

Composition convention: ``p * q`` (or ``compose(p, q)``) is the map
``i -> p(q(i))``, i.e. the right factor is applied first.  With this
convention the commutator ``v h v^-1 h^-1`` of the flagship origami comes
out as ``(1,9)(2,3)(4,6)(5,8)(7)``.

Squares are 1-indexed in every public method; ``images`` stores the
0-indexed array.
"""

from __future__ import annotations

import re
from collections import Counter
from typing import Iterable, Sequence


class PermutationError(ValueError):
    """Invalid permutation data or a size mismatch."""


class Permutation:
    """An immutable bijection of {1..n}."""

    __slots__ = ("_img", "_hash")

    def __init__(self, images: Sequence[int], *, check: bool = True):
        # images are 0-indexed: images[i] is the image of square i+1, minus one
        img = tuple(images)
        if check:
            if len(img) == 0:
                raise PermutationError("a permutation needs n >= 1")
            if sorted(img) != list(range(len(img))):
                raise PermutationError(f"{list(img)} is not a bijection of 0..{len(img) - 1}")
        self._img = img
        self._hash = hash(img)

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        if n < 1:
            raise PermutationError("a permutation needs n >= 1")
        return cls(range(n), check=False)

    @classmethod
    def from_images(cls, images: Iterable[int]) -> "Permutation":
        """Build from 1-indexed images, ``images[i-1] = p(i)``."""
        return cls([x - 1 for x in images])

    @classmethod
    def from_cycles(cls, cycles: Iterable[Sequence[int]], n: int) -> "Permutation":
        """Build from disjoint 1-indexed cycles; omitted points are fixed."""
        img = list(range(n))
        seen: set[int] = set()
        for cyc in cycles:
            for p in cyc:
                if not 1 <= p <= n:
                    raise PermutationError(f"point {p} out of range 1..{n}")
                if p in seen:
                    raise PermutationError(f"point {p} repeated")
                seen.add(p)
            for i, p in enumerate(cyc):
                img[p - 1] = cyc[(i + 1) % len(cyc)] - 1
        return cls(img, check=False)

    @property
    def n(self) -> int:
        return len(self._img)

    @property
    def images(self) -> tuple[int, ...]:
        """0-indexed image array."""
        return self._img

    def __call__(self, i: int) -> int:
        """Image of the 1-indexed point ``i``."""
        return self._img[i - 1] + 1

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Permutation) and self._img == other._img

    def __lt__(self, other: "Permutation") -> bool:
        return self._img < other._img

    def __hash__(self) -> int:
        return self._hash

    def __mul__(self, other: "Permutation") -> "Permutation":
        return compose(self, other)

    def __pow__(self, k: int) -> "Permutation":
        base = self if k >= 0 else self.inverse()
        result = Permutation.identity(self.n)
        for _ in range(abs(k)):
            result = compose(base, result)
        return result

    def __repr__(self) -> str:
        return f"Permutation('{format_cycles(self)}', n={self.n})"

    def __str__(self) -> str:
        return format_cycles(self)

    def inverse(self) -> "Permutation":
        inv = [0] * self.n
        for i, x in enumerate(self._img):
            inv[x] = i
        return Permutation(inv, check=False)

    def is_identity(self) -> bool:
        return all(i == x for i, x in enumerate(self._img))

    def cycles(self) -> list[tuple[int, ...]]:
        """All cycles (fixed points included), 1-indexed, each starting at its least point."""
        seen = [False] * self.n
        out = []
        for i in range(self.n):
            if seen[i]:
                continue
            cyc = []
            j = i
            while not seen[j]:
                seen[j] = True
                cyc.append(j + 1)
                j = self._img[j]
            out.append(tuple(cyc))
        return out

    def cycle_of(self, i: int) -> tuple[int, ...]:
        """The cycle through ``i`` starting at ``i``."""
        cyc = [i]
        j = self(i)
        while j != i:
            cyc.append(j)
            j = self(j)
        return tuple(cyc)


def _check_sizes(p: Permutation, q: Permutation) -> None:
    if p.n != q.n:
        raise PermutationError(f"size mismatch: {p.n} vs {q.n}")


def compose(p: Permutation, q: Permutation) -> Permutation:
    """``i -> p(q(i))``: apply ``q`` first."""
    _check_sizes(p, q)
    pi = p.images
    return Permutation([pi[x] for x in q.images], check=False)


def inverse(p: Permutation) -> Permutation:
    return p.inverse()


def commutator(h: Permutation, v: Permutation) -> Permutation:
    """``v h v^-1 h^-1``; its cycles are the corners of the origami (h, v)."""
    _check_sizes(h, v)
    return compose(v, compose(h, compose(v.inverse(), h.inverse())))


def conjugate(p: Permutation, c: Permutation) -> Permutation:
    """``c p c^-1``: relabel point ``i`` as ``c(i)``.

    The orbit identifications written ``phi^-1 h phi`` correspond to
    ``conjugate(h, phi.inverse())``.
    """
    _check_sizes(p, c)
    return compose(c, compose(p, c.inverse()))


def cycle_type(p: Permutation) -> tuple[int, ...]:
    """Cycle lengths including fixed points, sorted ascending."""
    return tuple(sorted(len(c) for c in p.cycles()))


def cycle_type_counter(p: Permutation) -> Counter:
    return Counter(cycle_type(p))


def format_cycles(p: Permutation) -> str:
    """Cycle notation with fixed points printed, e.g. ``(1)(2,3,4,5)(6,7,8,9)``."""
    return "".join("(" + ",".join(map(str, c)) + ")" for c in p.cycles())


_TOKEN = re.compile(r"\s*(?:(\()|(\))|(,)|(\d+))")


def parse_cycles(text: str, n: int) -> Permutation:
    """Parse a product of disjoint cycles such as ``(1)(2,3,4,5)(6,7,8,9)``.

    Whitespace is ignored and omitted points are fixed.  Raises
    :class:`PermutationError` with the character position on malformed
    input, repeated points or points outside ``1..n``.
    """
    if n < 1:
        raise PermutationError("a permutation needs n >= 1")
    cycles: list[list[int]] = []
    current: list[int] | None = None
    expect_point = False
    seen: set[int] = set()
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise PermutationError(f"unexpected character {text[pos]!r} at position {pos}")
        start = m.start(m.lastindex)
        opening, closing, comma, number = m.groups()
        if opening:
            if current is not None:
                raise PermutationError(f"nested '(' at position {start}")
            current = []
            expect_point = True
        elif closing:
            if current is None or (expect_point and current):
                raise PermutationError(f"unexpected ')' at position {start}")
            cycles.append(current)
            current = None
            expect_point = False
        elif comma:
            if current is None or expect_point:
                raise PermutationError(f"unexpected ',' at position {start}")
            expect_point = True
        else:
            if current is None or not expect_point:
                raise PermutationError(f"unexpected number at position {start}")
            p = int(number)
            if not 1 <= p <= n:
                raise PermutationError(f"point {p} at position {start} outside 1..{n}")
            if p in seen:
                raise PermutationError(f"point {p} repeated at position {start}")
            seen.add(p)
            current.append(p)
            expect_point = False
        pos = m.end()
    if current is not None:
        raise PermutationError(f"unclosed '(' at end of input (position {len(text)})")
    return Permutation.from_cycles(cycles, n)
