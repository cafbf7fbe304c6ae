"""Group words such as ``N T S^-1`` or ``a b a^-1``.

A word is a sequence of (letter, exponent) syllables, written left to
right.  As a matrix it is the product in written order, so when acting on
origamis the rightmost syllable is applied first.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Mapping

from origami_kz import matrices as mx

_EXP = r"(?:\^(?:\((-?\d+)\)|(-?\d+)))?"
_SYLLABLE = re.compile(r"\s*([A-Za-z])" + _EXP)
_EXPONENT = re.compile(_EXP)


class WordError(ValueError):
    pass


def _exponent(paren: str | None, bare: str | None) -> int:
    e = paren if paren is not None else bare
    return int(e) if e is not None else 1


@dataclass(frozen=True)
class Word:
    syllables: tuple[tuple[str, int], ...] = ()

    @classmethod
    def parse(cls, text: str) -> "Word":
        """Parse ``"N T S^-1"``, ``"ST^-3"``, ``"aba^-1"`` or ``"(A^2 B)^2"``."""
        text = text.strip()
        if text in ("", "1", "e", "Id"):
            return cls()
        word, pos = cls._parse_seq(text, 0)
        if pos != len(text):
            raise WordError(f"cannot parse word {text!r} at position {pos}")
        return word

    @classmethod
    def _parse_seq(cls, text: str, pos: int) -> tuple["Word", int]:
        out = cls()
        while pos < len(text):
            ch = text[pos]
            if ch.isspace() or ch in "*·":
                pos += 1
            elif ch == "(":
                inner, pos = cls._parse_seq(text, pos + 1)
                if pos >= len(text) or text[pos] != ")":
                    raise WordError(f"unbalanced parenthesis in {text!r}")
                m = _EXPONENT.match(text, pos + 1)
                out = out * inner ** _exponent(m.group(1), m.group(2))
                pos = m.end()
            elif ch == ")":
                return out, pos
            else:
                m = _SYLLABLE.match(text, pos)
                if m is None:
                    raise WordError(f"cannot parse word {text!r} at position {pos}")
                out = out * cls(((m.group(1), _exponent(m.group(2), m.group(3))),))
                pos = m.end()
        return out, pos

    @classmethod
    def of(cls, *syllables: tuple[str, int] | str) -> "Word":
        return cls(tuple((s, 1) if isinstance(s, str) else s for s in syllables))

    def __str__(self) -> str:
        if not self.syllables:
            return "1"
        return " ".join(l if e == 1 else f"{l}^{e}" for l, e in self.syllables)

    def __len__(self) -> int:
        return sum(abs(e) for _, e in self.syllables)

    def __mul__(self, other: "Word") -> "Word":
        return Word(self.syllables + other.syllables).reduced()

    def __pow__(self, k: int) -> "Word":
        base = self if k >= 0 else self.inverse()
        out = Word()
        for _ in range(abs(k)):
            out = out * base
        return out

    def inverse(self) -> "Word":
        return Word(tuple((l, -e) for l, e in reversed(self.syllables)))

    def reduced(self) -> "Word":
        """Merge adjacent equal letters and drop zero exponents (free reduction)."""
        out: list[list] = []
        for l, e in self.syllables:
            if out and out[-1][0] == l:
                out[-1][1] += e
                if out[-1][1] == 0:
                    out.pop()
            elif e != 0:
                out.append([l, e])
        return Word(tuple((l, e) for l, e in out))

    def reduced_mod(self, orders: Mapping[str, int]) -> "Word":
        """Free reduction with exponents of torsion letters taken mod their order."""
        word = self
        while True:
            syl = []
            for l, e in word.syllables:
                if l in orders:
                    e %= orders[l]
                if e:
                    syl.append((l, e))
            new = Word(tuple(syl)).reduced()
            if new == word:
                return new
            word = new

    def letters(self) -> list[tuple[str, int]]:
        """Expand to unit syllables ``(letter, +-1)`` in written order."""
        out = []
        for l, e in self.syllables:
            out.extend([(l, 1 if e > 0 else -1)] * abs(e))
        return out

    def substitute(self, images: Mapping[str, "Word"]) -> "Word":
        out = Word()
        for l, e in self.syllables:
            out = out * (images[l] ** e)
        return out

    def evaluate(self, gens: Mapping[str, mx.Matrix], *, orders: Mapping[str, int] | None = None):
        """Product of generator matrices in written order."""
        size = len(next(iter(gens.values())))
        result = mx.identity(size)
        cache: dict[tuple[str, int], mx.Matrix] = {}
        for l, e in self.syllables:
            if orders and l in orders:
                e %= orders[l]
            key = (l, e)
            if key not in cache:
                cache[key] = mx.power(gens[l], e)
            result = mx.mul(result, cache[key])
        return result


# SL(2,Z) generators acting on origamis; N is -Id.
T = ((1, 1), (0, 1))
S = ((1, 0), (1, 1))
NEG_ID = ((-1, 0), (0, -1))
SL2_GENERATORS = {"T": T, "S": S, "N": NEG_ID}


def sl2_matrix(word: Word) -> mx.Matrix:
    return word.evaluate(SL2_GENERATORS)


def words_str(words: Iterable[Word]) -> list[str]:
    return [str(w) for w in words]
