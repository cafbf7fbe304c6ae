"""Certificates about the non-tautological monodromy group rho(Aff(O)).

* Galois-pinching and disjoint splitting fields from the discriminants of
  reciprocal quartics, giving Zariski density in Sp(4).
* Words in A, B (the generators after the Theta change of basis) whose
  P-conjugates fix e1, and the unipotent root elements they produce.
* Kernel witnesses showing rho is not faithful.

The density and arithmeticity conclusions rest on external theorems
(Prasad-Rapinchuk; Oh, Benoist-Miquel).  The certificates check their
hypotheses exactly and record which conditions were checked.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import reduce
from itertools import chain, islice, product
from math import gcd, isqrt
from typing import Iterable, Iterator, Mapping, Sequence

import sympy

from origami_kz import matrices as mx
from origami_kz.kz import KZCocycle, is_symplectic
from origami_kz.words import Word, sl2_matrix


class CertificateError(ValueError):
    pass


# ---------------------------------------------------------------- integers

def is_square(n: int) -> bool:
    return n >= 0 and isqrt(n) ** 2 == n


def squarefree_part(n: int) -> int:
    """Signed squarefree kernel: n = squarefree_part(n) * k^2."""
    if n == 0:
        return 0
    out = -1 if n < 0 else 1
    for p, e in sympy.factorint(abs(n)).items():
        if e % 2:
            out *= p
    return out


def factorization(n: int) -> dict[int, int]:
    if n == 0:
        return {0: 1}
    f = {int(p): int(e) for p, e in sympy.factorint(abs(n)).items()}
    if n < 0:
        f = {-1: 1, **f}
    return f


def format_factorization(n: int) -> str:
    if n in (0, 1, -1):
        return str(n)
    parts = []
    for p, e in factorization(n).items():
        parts.append(str(p) if e == 1 else f"{p}^{e}")
    return "*".join(parts)


# ---------------------------------------------------------------- quartics

@dataclass(frozen=True)
class ReciprocalQuartic:
    """x^4 + a x^3 + b x^2 + a x + 1."""

    a: int
    b: int

    @property
    def coefficients(self) -> tuple[int, ...]:
        """Highest degree first."""
        return (1, self.a, self.b, self.a, 1)

    def __str__(self) -> str:
        x = sympy.Symbol("x")
        return str(sympy.Poly(list(self.coefficients), x).as_expr())

    def __call__(self, x):
        return x ** 4 + self.a * x ** 3 + self.b * x ** 2 + self.a * x + 1


def char_poly(m: mx.Matrix) -> ReciprocalQuartic:
    """Characteristic polynomial of a 4x4 integer matrix, which must be reciprocal."""
    if mx.shape(m) != (4, 4):
        raise CertificateError("char_poly expects a 4x4 matrix")
    lam = sympy.Symbol("lam")
    coeffs = [int(c) for c in mx.to_sympy(m).charpoly(lam).all_coeffs()]
    if coeffs[4] != 1 or coeffs[1] != coeffs[3]:
        raise CertificateError(f"characteristic polynomial {coeffs} is not reciprocal with constant 1")
    return ReciprocalQuartic(coeffs[1], coeffs[2])


def discriminants(q: ReciprocalQuartic) -> tuple[int, int]:
    """Delta_1 = a^2 - 4(b - 2) and Delta_2 = (b + 2)^2 - 4a^2.

    With y = x + 1/x the quartic becomes y^2 + a y + (b - 2); Delta_1 is its
    discriminant and Delta_2 = (y_1^2 - 4)(y_2^2 - 4).
    """
    return q.a ** 2 - 4 * (q.b - 2), (q.b + 2) ** 2 - 4 * q.a ** 2


def irreducibility_witness(q: ReciprocalQuartic) -> tuple[bool, str]:
    """Exact irreducibility over Q of a monic quartic with constant term 1.

    Rational roots can only be +-1; a factorization into monic integer
    quadratics (x^2 + p x + c)(x^2 + r x + d) needs c d = 1.
    """
    c4, c3, c2, c1, c0 = q.coefficients
    for root in (1, -1):
        if q(root) == 0:
            return False, f"rational root {root}"
    for c, d in ((1, 1), (-1, -1)):
        # p + r = c3, p d + r c = c1, c + d + p r = c2
        if c == d:
            if c * c3 != c1:
                continue
            disc = c3 * c3 - 4 * (c2 - 2 * c)
            if is_square(disc) and (c3 + isqrt(disc)) % 2 == 0:
                p = (c3 + isqrt(disc)) // 2
                return False, f"(x^2 + {p}x + {c})(x^2 + {c3 - p}x + {d})"
    return True, "no root in {1,-1}; no monic integer quadratic factorization with constants (1,1) or (-1,-1)"


@dataclass
class PinchingCertificate:
    word: str | None
    matrix: mx.Matrix
    poly: ReciprocalQuartic
    delta1: int
    delta2: int
    irreducible: bool
    irreducibility_witness: str
    checked_conditions: dict[str, bool]
    verdict: bool

    def to_json(self) -> dict:
        return {
            "word": self.word,
            "matrix": mx.as_lists(self.matrix),
            "char_poly": {"a": self.poly.a, "b": self.poly.b, "text": str(self.poly)},
            "delta1": self.delta1,
            "delta1_factored": format_factorization(self.delta1),
            "delta2": self.delta2,
            "delta2_factored": format_factorization(self.delta2),
            "irreducibility_witness": self.irreducibility_witness,
            "checked_conditions": self.checked_conditions,
            "verdict": "Galois-pinching" if self.verdict else "not certified",
        }


def is_galois_pinching(m: mx.Matrix, omega: mx.Matrix, word: str | None = None) -> PinchingCertificate:
    """Sufficient test for a Galois-pinching symplectic 4x4 matrix.

    Conditions: irreducible char poly; Delta_1, Delta_2 > 0; all roots
    y of y^2 + a y + b - 2 have |y| > 2 (real eigenvalues); Delta_1,
    Delta_2, Delta_1 Delta_2 non-squares (Galois group of order 8).
    """
    if not is_symplectic(m, omega):
        raise CertificateError("matrix does not preserve the intersection form")
    q = char_poly(m)
    d1, d2 = discriminants(q)
    irr, witness = irreducibility_witness(q)
    conds = {
        "irreducible": irr,
        "delta1_positive": d1 > 0,
        "delta2_positive": d2 > 0,
        # given both deltas positive, |y_1|, |y_2| > 2 iff |a| > 4 or b < -2
        "real_eigenvalues": d1 > 0 and d2 > 0 and (abs(q.a) > 4 or q.b < -2),
        "delta1_nonsquare": not is_square(d1),
        "delta2_nonsquare": not is_square(d2),
        "delta1_delta2_nonsquare": not is_square(d1 * d2),
    }
    return PinchingCertificate(word, tuple(map(tuple, m)), q, d1, d2, irr, witness, conds, all(conds.values()))


def splitting_disjoint(c1: PinchingCertificate, c2: PinchingCertificate) -> bool:
    """All four products Delta_i(chi_1) Delta_j(chi_2) are non-squares."""
    return all(not is_square(x * y) for x in (c1.delta1, c1.delta2) for y in (c2.delta1, c2.delta2))


def cross_products(c1: PinchingCertificate, c2: PinchingCertificate) -> list[dict]:
    out = []
    for i, x in ((1, c1.delta1), (2, c1.delta2)):
        for j, y in ((1, c2.delta1), (2, c2.delta2)):
            out.append({"pair": f"delta{i}(first)*delta{j}(second)", "value": x * y,
                        "squarefree_part": squarefree_part(x * y), "nonsquare": not is_square(x * y)})
    return out


@dataclass
class DensityCertificate:
    first: PinchingCertificate | None
    second: PinchingCertificate | None
    cross: list[dict]
    verdict: bool
    report: str

    def to_json(self) -> dict:
        return {
            "kind": "zariski-density",
            "first": self.first.to_json() if self.first else None,
            "second": self.second.to_json() if self.second else None,
            "cross_products": self.cross,
            "checked_conditions": [
                "both matrices preserve the form", "both Galois-pinching",
                "four cross products of discriminants are non-squares",
            ],
            "verdict": "Zariski dense" if self.verdict else "not certified",
            "report": self.report,
        }


def closed_words(generators: Sequence[Word], depth: int) -> Iterator[Word]:
    """Distinct nonempty products of at most ``depth`` generators or inverses, shortest first.

    Lazy, so callers can stop early on large Veech groups.
    """
    letters = list(generators) + [g.inverse() for g in generators]
    seen: set[Word] = set()
    for d in range(1, depth + 1):
        for combo in product(letters, repeat=d):
            w = reduce(lambda x, y: x * y, combo)
            if w.syllables and w not in seen:
                seen.add(w)
                yield w


def density_certificate(cocycle: KZCocycle, basis, candidates: Iterable[Word], omega: mx.Matrix,
                        *, fallback_generators: Sequence[Word] = (), depth: int = 0,
                        integral: bool = True, max_candidates: int = 500) -> DensityCertificate:
    """Find two Galois-pinching elements with disjoint splitting fields.

    Candidates are tried in order, then closed words in the fallback
    generators, stopping after ``max_candidates`` words.  ``integral=False``
    accepts rational monodromy (bases of a sublattice); characteristic
    polynomials are basis independent, so the test is unchanged.
    """
    pool = list(candidates)
    stream = chain(pool, (w for w in closed_words(fallback_generators, depth) if w not in pool)
                   if fallback_generators and depth > 0 else ())
    pinching: list[PinchingCertificate] = []
    tried = 0
    for w in islice(stream, max_candidates):
        tried += 1
        rho = cocycle.monodromy(w, basis, integral=integral).zero_part
        cert = is_galois_pinching(rho, omega, str(w))
        if not cert.verdict:
            continue
        for other in pinching:
            if splitting_disjoint(other, cert):
                return DensityCertificate(other, cert, cross_products(other, cert), True,
                                          f"certified after {tried} candidate words")
        pinching.append(cert)
    return DensityCertificate(pinching[0] if pinching else None, None, [], False,
                              f"no certifying pair among {tried} candidate words "
                              f"({len(pinching)} pinching, cap {max_candidates})")


# ---------------------------------------------------------------- unipotent search

ORDERS = {"A": 3, "B": 3}
_SYLLABLES = (("A", 1), ("A", 2), ("B", 1), ("B", 2))


def _search_branch(args):
    a, b, p, first, max_syllables = args
    gens = {"A": a, "B": b}
    powers = {(l, e): mx.power(gens[l], e) for l, e in _SYLLABLES}
    hits = []
    start = mx.mul(p, powers[first])
    # depth-first over alternating syllables; matrices carry the prefix P * w
    stack = [((first,), start)]
    while stack:
        syl, pm = stack.pop()
        full = mx.mul(pm, p)
        if all(full[i][0] == int(i == 0) for i in range(len(full))):
            hits.append((syl, full))
        if len(syl) < max_syllables:
            other = "B" if syl[-1][0] == "A" else "A"
            for e in (2, 1):
                stack.append((syl + ((other, e),), mx.mul(pm, powers[(other, e)])))
    return hits


def _sort_key(syl):
    return len(syl), [_SYLLABLES.index(s) for s in syl]


def unipotent_search(a: mx.Matrix, b: mx.Matrix, p: mx.Matrix, max_syllables: int = 10,
                     workers: int | None = None) -> list[tuple[Word, mx.Matrix]]:
    """Normal-form words w in <A> * <B> with at most ``max_syllables``
    syllables such that P w P fixes the first basis vector.

    Ordered by syllable count, then lexicographically in A < A^2 < B < B^2.
    The empty word is always the first hit.
    """
    if not (mx.is_identity(mx.power(a, 3)) and mx.is_identity(mx.power(b, 3))):
        raise CertificateError("unipotent search needs A^3 = B^3 = Id")
    if max_syllables < 0:
        raise CertificateError("max_syllables must be non-negative")
    if workers is None:
        workers = int(os.environ.get("ORIGAMI_KZ_WORKERS", "1"))
    hits: list = [((), mx.mul(p, p))]
    if max_syllables > 0:
        tasks = [(a, b, p, s, max_syllables) for s in _SYLLABLES]
        if workers > 1:
            with ProcessPoolExecutor(workers) as pool:
                parts = list(pool.map(_search_branch, tasks))
        else:
            parts = [_search_branch(t) for t in tasks]
        for part in parts:
            hits.extend(part)
    hits.sort(key=lambda h: _sort_key(h[0]))
    return [(Word(tuple(syl)), m) for syl, m in hits]


def evaluate_ab_word(word: Word, a: mx.Matrix, b: mx.Matrix, p: mx.Matrix | None = None) -> mx.Matrix:
    """Matrix of a word in A, B (optionally conjugated: P w P)."""
    m = word.evaluate({"A": a, "B": b}, orders=ORDERS)
    return mx.mul_all(p, m, p) if p is not None else m


# ---------------------------------------------------------------- root groups

# positive roots for the form with pairs (e1, e4), (e2, e3); entries 0-indexed
POSITIVE_ROOTS: dict[str, tuple[tuple[int, int], ...]] = {
    "e1-e2": ((0, 1), (2, 3)),
    "e1+e2": ((0, 2), (1, 3)),
    "2e1": ((0, 3),),
    "2e2": ((1, 2),),
}
# unipotent radical of the parabolic fixing the flag <e1> in <e1,e2,e3>
PARABOLIC_RADICAL_ROOTS = ("e1-e2", "e1+e2", "2e1")


def standard_form(theta: mx.Matrix, omega: mx.Matrix, p: mx.Matrix) -> tuple[mx.Matrix, int]:
    """``P Theta^t Omega Theta P`` divided by the gcd of its entries; returns (form, scale)."""
    f = mx.mul_all(p, mx.transpose(theta), omega, theta, p)
    k = reduce(gcd, (abs(x) for r in f for x in r), 0)
    return tuple(tuple(x // k for x in r) for r in f), k


@dataclass
class RootElement:
    matrix: mx.Matrix
    root: str
    parameter: int


@dataclass
class UnipotentCertificate:
    form: mx.Matrix
    form_scale: int
    elements: list[RootElement]
    covered: dict[str, list[int]]
    required_roots: tuple[str, ...]
    verdict: bool
    inputs: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "kind": "unipotent-root-groups",
            "form": mx.as_lists(self.form),
            "form_scale": self.form_scale,
            "elements": [{"matrix": mx.as_lists(e.matrix), "root": e.root, "parameter": e.parameter}
                         for e in self.elements],
            "covered_roots": self.covered,
            "required_roots": list(self.required_roots),
            "checked_conditions": [
                "each element is unipotent and preserves the form",
                "each element minus Id is a single positive root vector",
                "every required root is hit with a nonzero integer parameter",
            ],
            "verdict": "finite index in U(Z)" if self.verdict else "not certified",
            **self.inputs,
        }


def classify_root_element(u: mx.Matrix, form: mx.Matrix) -> RootElement:
    n = len(u)
    nil = mx.sub(u, mx.identity(n))
    if any(x for r in mx.power(nil, n) for x in r):
        raise CertificateError("matrix is not unipotent")
    if not is_symplectic(u, form):
        raise CertificateError("matrix does not preserve the form")
    if any(x for r in mx.mul(nil, nil) for x in r):
        raise CertificateError("matrix is not a root element ((u - Id)^2 != 0)")
    # N in sp(form): N^t F + F N = 0
    if any(x for r in mx.add(mx.mul(mx.transpose(nil), form), mx.mul(form, nil)) for x in r):
        raise CertificateError("u - Id is not in the symplectic Lie algebra")
    support = {(i, j) for i in range(n) for j in range(n) if nil[i][j]}
    if not support:
        return RootElement(u, "none", 0)
    for name, positions in POSITIVE_ROOTS.items():
        if support <= set(positions):
            i, j = positions[0]
            return RootElement(u, name, nil[i][j])
    raise CertificateError(f"support {sorted(support)} is not a single positive root space")


def root_group_certificate(unipotents: Sequence[mx.Matrix], form: mx.Matrix, form_scale: int = 1,
                           required: Sequence[str] = tuple(POSITIVE_ROOTS)) -> UnipotentCertificate:
    """Check that the matrices are root elements covering every required root."""
    elements = [classify_root_element(u, form) for u in unipotents]
    covered: dict[str, list[int]] = {}
    for e in elements:
        if e.parameter:
            covered.setdefault(e.root, []).append(e.parameter)
    missing = [r for r in required if r not in covered]
    if missing:
        raise CertificateError(f"uncovered roots: {', '.join(missing)}")
    return UnipotentCertificate(form, form_scale, elements, covered, tuple(required), True)


def derived_unipotents(x: mx.Matrix, y: mx.Matrix, z: mx.Matrix) -> dict[str, mx.Matrix]:
    """[y,x], x^6 [y,x], y^6 [y,x]^-1 and z^6 (x^6 [y,x])^-1."""
    inv = mx.inverse
    yx = mx.mul_all(y, x, inv(y), inv(x))
    u2 = mx.mul(mx.power(x, 6), yx)
    return {
        "[y,x]": yx,
        "x^6[y,x]": u2,
        "y^6[y,x]^-1": mx.mul(mx.power(y, 6), inv(yx)),
        "z^6(x^6[y,x])^-1": mx.mul(mx.power(z, 6), inv(u2)),
    }


def unipotent_certificate(a: mx.Matrix, b: mx.Matrix, p: mx.Matrix, theta: mx.Matrix, omega: mx.Matrix,
                          words: Mapping[str, Word]) -> UnipotentCertificate:
    """Root-group certificate from the words x, y, z in A, B (conjugated by P)."""
    if not mx.is_identity(mx.mul(p, p)):
        raise CertificateError("P must be an involution")
    mats = {k: evaluate_ab_word(w, a, b, p) for k, w in words.items()}
    for k, m in mats.items():
        if any(m[i][0] != int(i == 0) for i in range(4)):
            raise CertificateError(f"{k} does not fix the first basis vector")
    form, scale = standard_form(theta, omega, p)
    derived = derived_unipotents(mats["x"], mats["y"], mats["z"])
    cert = root_group_certificate(list(derived.values()), form, scale)
    cert.inputs = {
        "A": mx.as_lists(a), "B": mx.as_lists(b), "P": mx.as_lists(p), "theta": mx.as_lists(theta),
        "words": {k: str(w) for k, w in words.items()},
        "word_matrices": {k: mx.as_lists(m) for k, m in mats.items()},
        "derived": {k: mx.as_lists(m) for k, m in derived.items()},
    }
    return cert


# ---------------------------------------------------------------- kernel witness

@dataclass
class KernelWitness:
    word: str
    rho: mx.Matrix
    sl2: mx.Matrix
    is_witness: bool

    def to_json(self) -> dict:
        return {"kind": "kernel-witness", "word": self.word, "rho": mx.as_lists(self.rho),
                "sl2": mx.as_lists(self.sl2),
                "checked_conditions": ["rho(word) = Id", "SL(2,Z) image != Id"],
                "verdict": "rho not faithful" if self.is_witness else "not a witness"}


def kernel_relation_check(word: Word, cocycle: KZCocycle, basis, generators: Mapping[str, Word]) -> KernelWitness:
    """Evaluate a word in Veech-group generators (given as T/S/N words)."""
    expanded = word.substitute(generators)
    mono = cocycle.monodromy(expanded, basis)
    rho = mono.zero_part
    sl2 = sl2_matrix(expanded)
    return KernelWitness(str(word), rho, sl2, mx.is_identity(rho) and not mx.is_identity(sl2))


# ---------------------------------------------------------------- verdict

@dataclass
class ArithmeticityReport:
    verdict: str
    arithmetic: bool
    reasons: list[str]

    def to_json(self) -> dict:
        return {"verdict": self.verdict, "arithmetic": self.arithmetic, "reasons": self.reasons,
                "conditional_on": "Oh / Benoist-Miquel: Zariski-dense subgroups of Sp(4,Z) meeting U(Z) "
                                  "in a finite-index subgroup are arithmetic"}


def arithmeticity_verdict(dense: bool, finite_index_unipotent: bool) -> ArithmeticityReport:
    reasons = []
    if not dense:
        reasons.append("no valid Zariski-density certificate")
    if not finite_index_unipotent:
        reasons.append("no valid unipotent root-group certificate")
    if reasons:
        return ArithmeticityReport("withheld", False, reasons)
    return ArithmeticityReport("arithmetic (Benoist-Miquel hypotheses verified)", True,
                               ["Zariski dense", "finite-index subgroup of U(Z)"])
