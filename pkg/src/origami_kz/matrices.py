"""Exact integer/rational matrix helpers.

Matrices are tuples of row tuples of ``int`` (or ``Fraction`` where a
rational intermediate is unavoidable).  Small products stay in pure
Python; rank, null spaces and inverses go through sympy.
"""

from __future__ import annotations

from fractions import Fraction
from functools import reduce
from math import gcd
from typing import Iterable, Sequence

import sympy

Matrix = tuple[tuple[int, ...], ...]


class MatrixError(ArithmeticError):
    pass


def mat(rows: Iterable[Iterable]) -> Matrix:
    """Tuple-of-tuples matrix; string entries such as ``"3/2"`` become Fractions."""
    return tuple(tuple(_entry(x) for x in r) for r in rows)


def _entry(x):
    if isinstance(x, str):
        f = Fraction(x)
        return int(f) if f.denominator == 1 else f
    return x


def identity(n: int) -> Matrix:
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


def zeros(r: int, c: int) -> Matrix:
    return tuple((0,) * c for _ in range(r))


def shape(m: Matrix) -> tuple[int, int]:
    return len(m), (len(m[0]) if m else 0)


def transpose(m: Matrix) -> Matrix:
    return tuple(zip(*m))


def mul(a: Matrix, b: Matrix) -> Matrix:
    bt = tuple(zip(*b))
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in bt) for row in a)


def mul_all(*ms: Matrix) -> Matrix:
    return reduce(mul, ms)


def apply(m: Matrix, vec: Sequence[int]) -> tuple[int, ...]:
    return tuple(sum(x * y for x, y in zip(row, vec)) for row in m)


def add(a: Matrix, b: Matrix) -> Matrix:
    return tuple(tuple(x + y for x, y in zip(r, s)) for r, s in zip(a, b))


def sub(a: Matrix, b: Matrix) -> Matrix:
    return tuple(tuple(x - y for x, y in zip(r, s)) for r, s in zip(a, b))


def scale(k, m: Matrix) -> Matrix:
    return tuple(tuple(k * x for x in r) for r in m)


def neg(m: Matrix) -> Matrix:
    return scale(-1, m)


def power(m: Matrix, k: int) -> Matrix:
    if k < 0:
        return power(inverse(m), -k)
    result = identity(len(m))
    base = m
    while k:
        if k & 1:
            result = mul(result, base)
        base = mul(base, base)
        k >>= 1
    return result


def is_identity(m: Matrix) -> bool:
    return m == identity(len(m))


def to_sympy(m: Matrix) -> sympy.Matrix:
    return sympy.Matrix([list(r) for r in m])


def _from_sympy(m: sympy.Matrix):
    out = []
    for i in range(m.rows):
        row = []
        for j in range(m.cols):
            x = m[i, j]
            row.append(int(x) if x.q == 1 else Fraction(int(x.p), int(x.q)))
        out.append(tuple(row))
    return tuple(out)


def det(m: Matrix) -> int:
    return int(to_sympy(m).det(method="bareiss"))


def inverse(m: Matrix, *, integral: bool = True):
    """Exact inverse; with ``integral`` the inverse must have integer entries."""
    d = det(m)
    if d == 0:
        raise MatrixError("matrix is singular")
    inv = _from_sympy(to_sympy(m).inv())
    if integral and any(isinstance(x, Fraction) for r in inv for x in r):
        raise MatrixError(f"inverse is not integral (det = {d})")
    return inv


def rational_inverse(m) -> tuple[tuple[Fraction, ...], ...]:
    s = sympy.Matrix([[sympy.Rational(x) for x in r] for r in m])
    if s.det() == 0:
        raise MatrixError("matrix is singular")
    return tuple(tuple(Fraction(x) for x in r) for r in _from_sympy(s.inv()))


def rank(rows: Sequence[Sequence[int]]) -> int:
    if not rows:
        return 0
    return to_sympy(rows).rank()


def primitive(vec: Sequence[int]) -> tuple[int, ...]:
    """Divide an integer vector by the gcd of its entries."""
    g = reduce(gcd, (abs(x) for x in vec), 0)
    if g == 0:
        return tuple(vec)
    return tuple(x // g for x in vec)


def integral_vector(vec: Sequence) -> tuple[int, ...]:
    """Clear denominators of a rational vector and make it primitive."""
    fr = [Fraction(x) for x in vec]
    den = reduce(lambda a, b: a * b // gcd(a, b), (f.denominator for f in fr), 1)
    return primitive([int(f * den) for f in fr])


def nullspace(rows: Sequence[Sequence[int]], ncols: int) -> list[tuple[int, ...]]:
    """Integer basis (primitive vectors) of the rational right kernel."""
    if not rows:
        return [tuple(int(i == j) for j in range(ncols)) for i in range(ncols)]
    return [integral_vector(list(v)) for v in to_sympy(rows).nullspace()]


def solve(columns: Sequence[Sequence[int]], target: Sequence[int]) -> list[Fraction] | None:
    """Solve ``sum x_i columns[i] = target`` over Q, or return None.

    ``columns`` must be linearly independent.
    """
    a = sympy.Matrix([list(c) for c in columns]).T
    b = sympy.Matrix(list(target))
    try:
        sol, params = a.gauss_jordan_solve(b)
    except ValueError:
        return None
    if params.shape[0]:
        raise MatrixError("columns are linearly dependent")
    return [Fraction(int(x.p), int(x.q)) for x in sol]


def as_lists(m) -> list[list]:
    """JSON-ready rows; non-integral Fractions are written as ``"p/q"``."""
    return [[x if isinstance(x, int) else (int(x) if x.denominator == 1 else str(x)) for x in r] for r in m]
