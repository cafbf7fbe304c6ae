"""Acceptance gate: one test per criterion, each reporting PASS or FAIL.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines inline; they
are also repeated in the terminal summary.
"""

import random
from contextlib import contextmanager

import pytest

from conftest import ACCEPTANCE_RESULTS, random_origami
from origami_kz import fixtures as F
from origami_kz import matrices as mx
from origami_kz.arithmeticity import (
    char_poly,
    density_certificate,
    derived_unipotents,
    discriminants,
    evaluate_ab_word,
    is_galois_pinching,
    kernel_relation_check,
    splitting_disjoint,
    unipotent_certificate,
    unipotent_search,
)
from origami_kz.certify import RunConfig, certify_all
from origami_kz.homology import Homology
from origami_kz.kz import KZCocycle, change_basis, is_symplectic
from origami_kz.origami import (
    GENERATORS,
    Edge,
    OrbitGraph,
    Origami,
    apply_generator,
    automorphisms,
    cusps,
    homological_dimension,
    sl2z_orbit,
    stabilizes,
    stratum,
    veech_group,
)
from origami_kz.perm import Permutation, conjugate, format_cycles, parse_cycles
from origami_kz.pingpong import PingPongTable, RationalCone, cone_contains, membership_normal_form, verify_pingpong
from origami_kz.words import Word, sl2_matrix

H_O1 = "(1)(2,3,4,5)(6,7,8,9)"
V_O = {1: "(1,2,3,6)(4,7,9,8)(5)", 2: "(1,2,5,7)(3)(4,6,8,9)", 3: "(1,2,7,8)(3,5,6,4)(9)",
       4: "(1,2,6,9)(3,7,4,5)(8)"}
PHI = {4: "(1,6,2,9,4,3)(5,8)(7)", 3: "(1,5,9,8)(2,6,3,4)(7)", 2: "(1,9)(2,4,5,3,6,8)(7)"}
PSI = {3: "(1)(2,8,4,6)(3,7,5,9)", 4: "(1)(2,9,4,7)(3,8,5,6)"}

OMEGA = ((0, 0, -6, -3), (0, 0, -3, 3), (6, 3, 0, 0), (3, -3, 0, 0))
ELEMENTARY = {
    "T_{1,2}": ((1, 1, 0, 0, 0, 0), (0, 1, 0, 0, 0, 0), (0, 0, 1, 0, 1, 0),
                (0, 0, 0, 1, 0, 1), (0, 0, 0, 0, 1, 0), (0, 0, 0, 0, 0, 1)),
    "T_{2,3}": ((1, 1, 0, 0, 0, 0), (0, 1, 0, 0, 0, 0), (0, 0, 1, 0, -1, -1),
                (0, 0, 0, 1, 0, 1), (0, 0, 0, 0, 1, 0), (0, 0, 0, 0, -1, -1)),
    "T_{3,4}": ((1, 1, 0, 0, 0, 0), (0, 1, 0, 0, 0, 0), (0, 0, 1, 0, 0, 1),
                (0, 0, 0, 1, 1, 0), (0, 0, 0, 0, 1, 0), (0, 0, 0, 0, 0, 1)),
    "T_{4,1}": ((1, 1, 0, 0, 0, 0), (0, 1, 0, 0, 0, 0), (0, 0, 1, 0, 0, 1),
                (0, 0, 0, 1, -1, -1), (0, 0, 0, 0, 1, 0), (0, 0, 0, 0, -1, -1)),
    "S_{1,4}": ((1, 0, 0, 0, 0, 0), (1, 1, 0, 0, 0, 0), (0, 0, 0, 1, 0, 0),
                (0, 0, 1, 0, 0, 0), (0, 0, 1, 0, 1, 0), (0, 0, 0, 1, 0, 1)),
    "S_{4,3}": ((1, 0, 0, 0, 0, 0), (1, 1, 0, 0, 0, 0), (0, 0, -1, -1, 0, 0),
                (0, 0, 0, 1, 0, 0), (0, 0, 1, 0, 0, 1), (0, 0, -1, -1, 1, 0)),
    "S_{3,2}": ((1, 0, 0, 0, 0, 0), (1, 1, 0, 0, 0, 0), (0, 0, 0, 1, 0, 0),
                (0, 0, 1, 0, 0, 0), (0, 0, 0, 1, 1, 0), (0, 0, 1, 0, 0, 1)),
    "S_{2,1}": ((1, 0, 0, 0, 0, 0), (1, 1, 0, 0, 0, 0), (0, 0, 1, 0, 0, 0),
                (0, 0, -1, -1, 0, 0), (0, 0, 0, 1, 0, 1), (0, 0, -1, -1, 1, 0)),
    "-Id_{1,3}": ((-1, 0, 0, 0, 0, 0), (0, -1, 0, 0, 0, 0), (0, 0, 0, -1, 0, 0),
                  (0, 0, -1, 0, 0, 0), (0, 0, 0, 0, -1, 0), (0, 0, 0, 0, 0, -1)),
}
RHO_A = ((0, 0, -1, 0), (0, 0, 1, 1), (0, 1, 0, -1), (1, 0, 1, 1))
RHO_B = ((1, 0, 3, 3), (-1, -1, -2, -1), (0, 1, -1, -1), (-1, -1, -1, -1))
A = ((1, 0, 0, 0), (0, 1, 0, 0), (0, 0, -1, 1), (0, 0, -1, 0))
B = ((-1, 0, 0, -1), (0, 0, -1, 0), (0, 1, -1, 0), (1, 0, 0, 0))
THETA_FORM = ((0, -9, 0, 0), (9, 0, 0, 0), (0, 0, 0, 9), (0, 0, -9, 0))
P = ((1, 0, 0, 0), (0, 0, 0, 1), (0, 0, 1, 0), (0, 1, 0, 0))
XYZ = {"x": "(A^2 B)^2 (A B^2)^2", "y": "A B A^2 B A (A B^2)^2", "z": "A^2 B A^2 (B^2 A)^2 B"}
UNIPOTENTS = [
    ((1, 0, 0, 18), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)),
    ((1, 0, 18, 0), (0, 1, 0, 18), (0, 0, 1, 0), (0, 0, 0, 1)),
    ((1, 18, 0, 0), (0, 1, 0, 0), (0, 0, 1, -18), (0, 0, 0, 1)),
    ((1, 0, 0, 0), (0, 1, -18, 0), (0, 0, 1, 0), (0, 0, 0, 1)),
]
SL2_A = ((0, -1), (1, -1))
SL2_B = ((1, -3), (1, -2))


@contextmanager
def criterion(n, title):
    try:
        yield
    except BaseException:
        ACCEPTANCE_RESULTS[n] = (title, False)
        print(f"\ncriterion {n:2d}: FAIL  {title}")
        raise
    ACCEPTANCE_RESULTS[n] = (title, True)
    print(f"\ncriterion {n:2d}: PASS  {title}")


def member(k):
    return Origami.from_cycles(H_O1, V_O[k], 9)


def pulled_back(o, phi):
    c = phi.inverse()
    return Origami(conjugate(o.h, c), conjugate(o.v, c))


def normal_form_word(rng, max_syllables):
    first = rng.choice("ab")
    return Word(tuple(("ab"[("ab".index(first) + j) % 2], rng.randint(1, 2))
                      for j in range(rng.randint(0, max_syllables))))


@pytest.fixture(scope="module")
def setup():
    g = sl2z_orbit(member(1))
    cz = KZCocycle(g)
    basis = F.bases_on_graph(g)[g.base]
    omega = cz.homology(g.base).intersection_matrix(basis.zero_part)
    return g, cz, basis, omega


@pytest.fixture(scope="module")
def report():
    return certify_all(RunConfig(member(1)))


def test_criterion_01_stratum():
    with criterion(1, "stratum of O1: commutator, H(1,1,1,1), genus 3"):
        o = member(1)
        assert format_cycles(o.commutator()) == "(1,9)(2,3)(4,6)(5,8)(7)"
        s = stratum(o)
        assert str(s) == "H(1,1,1,1)"
        assert s.genus == 3


def test_criterion_02_orbit(setup):
    with criterion(2, "orbit of size 4, listed T/S/-Id images with relabelings, one cusp"):
        g = setup[0]
        assert len(g) == 4
        o = member(1)
        for k in (2, 3, 4):
            o = apply_generator(o, "T")
            assert o == member(k)
        s_image = member(1)
        for k in (4, 3, 2):
            s_image = apply_generator(s_image, "S")
            assert s_image == pulled_back(member(k), parse_cycles(PHI[k], 9))
        assert apply_generator(member(1), "N") == pulled_back(member(3), parse_cycles(PSI[3], 9))
        assert apply_generator(member(2), "N") == pulled_back(member(4), parse_cycles(PSI[4], 9))
        assert len(automorphisms(member(1))) == 1
        assert len(cusps(g)) == 1


def test_criterion_03_veech_group(setup, report):
    with criterion(3, "Veech group of index 4 generated by a = (-Id) T S^-1 and b = S T^-3"):
        g = setup[0]
        vg = veech_group(g)
        assert vg.index == 4
        wa, wb = Word.parse("N T S^-1"), Word.parse("S T^-3")
        assert sl2_matrix(wa) == SL2_A and sl2_matrix(wb) == SL2_B
        assert stabilizes(g, wa) and stabilizes(g, wb)
        cert = verify_pingpong(SL2_A, SL2_B, PingPongTable.from_fixture(F.pingpong_fixture()))
        for s in vg.schreier_generators:
            w = membership_normal_form(s.matrix, cert)
            assert isinstance(w, Word)
            assert w.evaluate({"a": SL2_A, "b": SL2_B}) == s.matrix
        assert report["stages"]["pingpong"]["generated_by_a_b"] is True


def test_criterion_04_pingpong():
    with criterion(4, "ping-pong table inclusions and Z/3 * Z/3 certificate"):
        fx = F.pingpong_fixture()
        table = PingPongTable.from_fixture(fx)
        rays = [tuple(fx["rays"][f"v{l}"]) for l in range(1, 8)]
        ext = rays + [(-x, -y) for x, y in rays[1:]]  # v_{6+l} = -v_l
        for l in range(1, 7):
            assert mx.apply(SL2_A, ext[l - 1]) == ext[l + 3]
            assert table.cones[f"C{l}"] == RationalCone(ext[l - 1], ext[l])
            assert table.cones[f"C{l + 6}"] == -table.cones[f"C{l}"]
        assert mx.apply(SL2_B, ext[3]) == (-5, -3)
        assert cone_contains(table.cones["C8"], (-5, -3)) == "interior"
        assert table.x == ("C1", "C2", "C7", "C8")
        cert = verify_pingpong(SL2_A, SL2_B, table)
        assert cert.valid
        assert cert.orders == (3, 3)
        by_gen = {}
        for inc in cert.inclusions:
            by_gen.setdefault(inc.generator, set()).update(inc.targets)
        assert by_gen["a"] == {"C5", "C6", "C11", "C12"}
        assert by_gen["a^2"] == {"C9", "C10", "C3", "C4"}
        assert by_gen["b"] <= {"C2", "C8"}
        assert by_gen["b^2"] <= {"C1", "C7"}


def test_criterion_05_homology(setup):
    with criterion(5, "intersection form on B1^(0) with <Sigma0,Z0> = +9"):
        g, cz, basis, omega = setup
        hom = cz.homology(g.base)
        assert hom.intersection(basis.vectors[0], basis.vectors[1]) == 9
        assert omega == OMEGA
        fixture = F.load_basis(1)
        assert Homology(fixture.origami).intersection_matrix(fixture.zero_part) == OMEGA


def test_criterion_06_kz_matrices(setup):
    with criterion(6, "nine elementary 6x6 matrices, rho(a), rho(b), cubes trivial"):
        g, cz, basis, _ = setup
        got = F.elementary_matrices(cz)
        for label, m in ELEMENTARY.items():
            assert got[label] == m, label
        ra = cz.monodromy(Word.parse("N T S^-1"), basis).zero_part
        rb = cz.monodromy(Word.parse("S T^-3"), basis).zero_part
        assert ra == RHO_A and rb == RHO_B
        assert mx.is_identity(mx.power(ra, 3)) and mx.is_identity(mx.power(rb, 3))


def test_criterion_07_pinching(setup):
    with criterion(7, "p1, p2 Galois-pinching with disjoint splitting fields; density certificate"):
        g, cz, basis, omega = setup
        p1, p2 = Word.parse("S T^-4 S^-1 T^4"), Word.parse("S T^-4 S T^6")
        c1 = is_galois_pinching(cz.monodromy(p1, basis).zero_part, omega)
        c2 = is_galois_pinching(cz.monodromy(p2, basis).zero_part, omega)
        assert c1.poly.coefficients == (1, -11, 29, -11, 1)
        assert c2.poly.coefficients == (1, -2, -16, -2, 1)
        assert (c1.delta1, c1.delta2) == (13, 3 ** 2 * 53)
        assert (c2.delta1, c2.delta2) == (2 ** 2 * 19, 6 ** 2 * 5)
        assert c1.verdict and c2.verdict
        assert splitting_disjoint(c1, c2)
        dens = density_certificate(cz, basis, [p1, p2], omega)
        assert dens.verdict and dens.to_json()["verdict"] == "Zariski dense"


def test_criterion_08_basis_change(setup):
    with criterion(8, "Theta conjugates rho(a), rho(b) to A, B and Omega to 9 times the standard form"):
        omega = setup[3]
        theta = F.theta()
        assert change_basis(RHO_A, theta) == A
        assert change_basis(RHO_B, theta) == B
        assert mx.mul_all(mx.transpose(theta), omega, theta) == THETA_FORM


def test_criterion_09_unipotents(setup, report):
    with criterion(9, "word search finds x, y, z; derived unipotents with entries 18; verdict emitted"):
        omega = setup[3]
        hits = [w for w, _ in unipotent_search(A, B, P, 10)]
        words = {k: Word.parse(v) for k, v in XYZ.items()}
        for w in words.values():
            assert w.reduced_mod({"A": 3, "B": 3}) in hits
        mats = {k: evaluate_ab_word(w, A, B, P) for k, w in words.items()}
        assert list(derived_unipotents(mats["x"], mats["y"], mats["z"]).values()) == UNIPOTENTS
        cert = unipotent_certificate(A, B, P, F.theta(), omega,
                                     {k: w.reduced_mod({"A": 3, "B": 3}) for k, w in words.items()})
        assert cert.verdict
        verdict = report["stages"]["arithmeticity"]["verdict"]
        assert verdict["arithmetic"] is True
        assert report["verdict"].startswith("arithmetic")


def test_criterion_10_kernel_witness(setup):
    with criterion(10, "(ABA^-1BA^-1BAB^-1)^3 is trivial under rho but not in SL(2,Z)"):
        g, cz, basis, _ = setup
        kw = kernel_relation_check(Word.parse("(a b a^-1 b a^-1 b a b^-1)^3"), cz, basis,
                                   {"a": Word.parse("N T S^-1"), "b": Word.parse("S T^-3")})
        assert kw.rho == mx.identity(4)
        assert kw.sl2 == ((-24587, 42408), (15048, -25955))
        assert mx.is_identity(evaluate_ab_word(Word.parse("(A B A^-1 B A^-1 B A B^-1)^3"), A, B))


def test_criterion_11_homological_dimension(setup):
    with criterion(11, "homological dimension 3 (max waist-span rank over cusp representatives)"):
        assert homological_dimension(setup[0]) == 3


def test_criterion_12_property_suites(setup):
    with criterion(12, "symplecticity, homomorphism, tautological block, face relations, round trips"):
        g, cz, basis, omega = setup
        rng = random.Random(12)
        named = {"a": Word.parse("N T S^-1"), "b": Word.parse("S T^-3")}
        # 200 random closed words
        for _ in range(200):
            w = Word(tuple((rng.choice("ab"), rng.choice((1, -1))) for _ in range(rng.randint(1, 10))))
            m = cz.monodromy(w.reduced().substitute(named), basis)
            assert is_symplectic(m.zero_part, omega)
        # homomorphism and tautological block
        for _ in range(50):
            u = normal_form_word(rng, 5).substitute(named)
            v = normal_form_word(rng, 5).substitute(named)
            mu, mv, muv = (cz.monodromy(x, basis) for x in (u, v, u * v))
            assert muv.full == mx.mul(mu.full, mv.full)
            assert muv.taut == sl2_matrix(u * v)
        # face relations on 50 random origamis with n <= 12
        for _ in range(50):
            o = random_origami(rng, rng.randint(1, 12))
            nodes = [o] + [apply_generator(o, x) for x in GENERATORS]
            ident = Permutation.identity(o.n)
            star = OrbitGraph(nodes, {(0, x): Edge(k + 1, ident) for k, x in enumerate(GENERATORS)})
            sc = KZCocycle(star)
            for x in GENERATORS:
                hmap = sc.elementary(x, 0)
                tgt = sc.homology(hmap.target)
                images = [hmap(r) for r in sc.homology(0).face_relations]
                assert mx.rank(list(tgt.face_basis) + images) == len(tgt.face_basis)
        # 200 free-product round trips
        cert = verify_pingpong(SL2_A, SL2_B, PingPongTable.from_fixture(F.pingpong_fixture()))
        for _ in range(200):
            w = normal_form_word(rng, 14)
            assert membership_normal_form(w.evaluate({"a": SL2_A, "b": SL2_B}), cert) == w
