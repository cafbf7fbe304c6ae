import pytest
from hypothesis import given

from origami_kz import fixtures as F
from origami_kz.perm import (
    Permutation,
    PermutationError,
    commutator,
    compose,
    conjugate,
    cycle_type,
    format_cycles,
    inverse,
    parse_cycles,
)

from conftest import permutations

H = parse_cycles(F.O1_H, 9)
V = parse_cycles(F.O1_V, 9)


def test_compose_applies_right_factor_first():
    p = parse_cycles("(1,2)", 3)
    q = parse_cycles("(2,3)", 3)
    assert compose(p, q)(2) == p(q(2)) == 3
    assert compose(Permutation.identity(9), H) == H
    assert compose(H, inverse(H)).is_identity()


def test_commutator_of_o1():
    assert format_cycles(commutator(H, V)) == "(1,9)(2,3)(4,6)(5,8)(7)"
    assert commutator(H, H).is_identity()


def test_commutator_matches_stepwise_product():
    v3 = parse_cycles("(1,2,7,8)(3,5,6,4)(9)", 9)
    hi, vi = H.inverse(), v3.inverse()
    expected = [v3(H(vi(hi(x)))) for x in range(1, 10)]
    assert [commutator(H, v3)(x) for x in range(1, 10)] == expected


def test_conjugation_convention_matches_orbit_identifications():
    phi4 = F.relabelings()["phi4"]
    s_h = compose(H, inverse(V))
    assert conjugate(H, inverse(phi4)) == s_h
    assert conjugate(H, Permutation.identity(9)) == H
    psi3 = F.relabelings()["psi3"]
    v3 = parse_cycles("(1,2,7,8)(3,5,6,4)(9)", 9)
    assert conjugate(v3, inverse(psi3)) == inverse(V)


def test_cycle_types():
    assert cycle_type(Permutation.identity(9)) == (1,) * 9
    assert cycle_type(commutator(H, V)) == (1, 2, 2, 2, 2)
    assert cycle_type(H) == (1, 4, 4)


def test_parse_examples():
    assert parse_cycles("(1)(2,3,4,5)(6,7,8,9)", 9) == H
    assert parse_cycles("", 5) == Permutation.identity(5)
    assert parse_cycles(" ( 1 , 2 ) ", 3) == parse_cycles("(1,2)", 3)


@pytest.mark.parametrize("text, fragment", [
    ("(1,2)(2,3)", "repeated"),
    ("(1,4)", "outside"),
    ("(1,2", "position"),
    ("1,2)", "position"),
    ("(1,,2)", "position"),
])
def test_parse_errors(text, fragment):
    with pytest.raises(PermutationError, match=fragment):
        parse_cycles(text, 3)


def test_size_mismatch():
    with pytest.raises(PermutationError):
        compose(Permutation.identity(2), Permutation.identity(3))


def test_format_prints_fixed_points():
    assert format_cycles(V) == "(1,2,3,6)(4,7,9,8)(5)"


@given(permutations())
def test_inverse_property(p):
    assert compose(p, inverse(p)).is_identity()
    assert compose(inverse(p), p).is_identity()


@given(permutations(n=8), permutations(n=8))
def test_cycle_type_conjugation_invariant(p, c):
    assert cycle_type(conjugate(p, c)) == cycle_type(p)


@given(permutations())
def test_parse_format_roundtrip(p):
    assert parse_cycles(format_cycles(p), p.n) == p
