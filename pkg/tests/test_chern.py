"""
Unit tests for Chern character arithmetic and Hilbert polynomials.
"""
import random
from fractions import Fraction

import pytest
import sympy as sp

from src.chern import (ChernCharacter, HilbertPolynomial, N, T, delta, deltas, dual,
                       hilbert_polynomial, iter_characters, numerical_dimension, parse_character,
                       q_bmt, q_tilt, reduced_coefficients, reduced_hilbert, tensor_line, twist)
from src.errors import StabilityError
from src.params import HalfPlanePoint
from src.utils import parse_rational


def random_character(rng: random.Random, bound: int = 5) -> ChernCharacter:
    return ChernCharacter(rng.randint(-bound, bound), rng.randint(-bound, bound),
                          Fraction(rng.randint(-2 * bound, 2 * bound), 2),
                          Fraction(rng.randint(-6 * bound, 6 * bound), 6))


def sheaf_character(rng: random.Random, bound: int = 3) -> ChernCharacter:
    """Integer combination of the line bundles O(-3), ..., O(3)."""
    v = ChernCharacter(0, 0, 0, 0)
    for k in range(-3, 4):
        v = v + rng.randint(-bound, bound) * tensor_line(ChernCharacter(1, 0, 0, 0), k)
    return v


def small_grid():
    return [ChernCharacter(v0, v1, Fraction(n2, 2), Fraction(n3, 6))
            for v0 in range(-1, 2) for v1 in range(-1, 2)
            for n2 in range(-2, 3) for n3 in range(-2, 3)]


@pytest.fixture
def structure_sheaf():
    return ChernCharacter(1, 0, 0, 0)


@pytest.fixture
def hyperplane():
    """ch(i_*O_H) = ch(O) - ch(O(-1))."""
    return ChernCharacter(0, 1, Fraction(-1, 2), Fraction(1, 6))


@pytest.fixture
def conic():
    return ChernCharacter(0, 0, 2, -3)


def test_parse_character():
    assert parse_character("2,0,-2,0") == ChernCharacter(2, 0, -2, 0)
    assert parse_character(" 0, 1, -1/2, 1/6 ").components == (0, 1, Fraction(-1, 2), Fraction(1, 6))


@pytest.mark.parametrize("text,code", [
    ("1,0,1/3,0", "DenominatorViolation"),
    ("0,1/2,0,0", "DenominatorViolation"),
    ("0,0,0,1/4", "DenominatorViolation"),
    ("1,0,0", "MalformedCharacter"),
    ("1,0,0,0,0", "MalformedCharacter"),
    ("1,0,0.5,0", "MalformedRational"),
    ("1,0,1/0,0", "MalformedRational"),
    ("a,b,c,d", "MalformedRational"),
])
def test_parse_character_errors(text, code):
    with pytest.raises(StabilityError) as excinfo:
        parse_character(text)
    assert excinfo.value.code == code


def test_parse_rational_canonical_form():
    assert parse_rational("-4/6") == Fraction(-2, 3)
    assert parse_rational("+3") == 3
    assert parse_rational(" - 1 / 2 ") == Fraction(-1, 2)


def test_hyperplane_from_triangle(structure_sheaf, hyperplane):
    assert structure_sheaf - tensor_line(structure_sheaf, -1) == hyperplane


def test_twist_example(hyperplane):
    assert twist(hyperplane, -2).components == (0, 1, Fraction(3, 2), Fraction(7, 6))


def test_twist_by_zero_is_identity():
    rng = random.Random(3)
    for _ in range(50):
        v = random_character(rng)
        assert twist(v, 0).components == v.components


def test_twist_then_untwist():
    rng = random.Random(5)
    for _ in range(200):
        v = random_character(rng)
        beta = Fraction(rng.randint(-20, 20), rng.randint(1, 7))
        back = twist(v, beta).twist(-beta)
        assert back.components == v.components
        assert back.beta == 0


def test_tensor_line_is_twist_by_negative_degree():
    rng = random.Random(23)
    for _ in range(100):
        v = random_character(rng)
        k = rng.randint(-6, 6)
        assert tensor_line(v, k).components == twist(v, -k).components


def test_twists_compose():
    v = ChernCharacter(2, -1, Fraction(1, 2), Fraction(5, 6))
    assert twist(v, Fraction(1, 3)).twist(Fraction(2, 3)).components == twist(v, 1).components


def test_tensor_line(structure_sheaf, hyperplane):
    assert tensor_line(structure_sheaf, 3) == ChernCharacter(1, 3, Fraction(9, 2), Fraction(9, 2))
    assert tensor_line(hyperplane, -1) == ChernCharacter(0, 1, Fraction(-3, 2), Fraction(7, 6))
    assert tensor_line(hyperplane, 0) == hyperplane


def test_dual_examples(hyperplane, conic):
    assert dual(conic) == ChernCharacter(0, 0, 2, 3)
    assert dual(hyperplane) == ChernCharacter(0, -1, Fraction(-1, 2), Fraction(-1, 6))


def test_dual_of_conic_from_resolution(structure_sheaf, conic):
    o = structure_sheaf
    resolved = tensor_line(o, 3) - tensor_line(o, 1) - tensor_line(o, 2) + o
    assert dual(conic) == resolved


def test_dual_is_an_involution():
    rng = random.Random(11)
    for _ in range(1000):
        v = random_character(rng, bound=9)
        assert dual(dual(v)) == v


def test_delta_antisymmetry():
    rng = random.Random(7)
    for _ in range(100):
        v, w = random_character(rng), random_character(rng)
        for (i, j), value in deltas(v, w).items():
            assert delta(i, j, w, v) == -value


def test_delta_is_bilinear():
    rng = random.Random(19)
    for _ in range(100):
        v, v2, w = random_character(rng), random_character(rng), random_character(rng)
        a, b = rng.randint(-4, 4), rng.randint(-4, 4)
        combined = a * v + b * v2
        for i in range(1, 4):
            for j in range(i):
                expected = a * delta(i, j, v, w) + b * delta(i, j, v2, w)
                assert delta(i, j, combined, w) == expected
                assert delta(i, j, w, combined) == -expected


def test_dual_negates_delta21_and_keeps_delta31():
    grid = small_grid()
    for v in grid:
        for w in grid:
            assert delta(2, 1, dual(v), dual(w)) == -delta(2, 1, v, w)
            assert delta(3, 1, dual(v), dual(w)) == delta(3, 1, v, w)


@pytest.mark.parametrize("i,j", [(0, 0), (1, 2), (4, 0), (3, -1)])
def test_delta_index_out_of_range(i, j, structure_sheaf):
    with pytest.raises(StabilityError) as excinfo:
        delta(i, j, structure_sheaf, structure_sheaf)
    assert excinfo.value.code == 'IndexOutOfRange'


def test_bogomolov_forms(structure_sheaf):
    instanton = ChernCharacter(2, 0, -2, 0)
    assert q_tilt(instanton) == 8
    assert q_tilt(structure_sheaf) == 0
    # line bundles sit on the boundary of the generalized inequality everywhere
    for beta, a in ((0, 1), (Fraction(-3, 2), Fraction(1, 4)), (5, 7)):
        assert q_bmt(structure_sheaf, HalfPlanePoint(beta, a)) == 0


def test_q_bmt_of_instanton_character():
    instanton = ChernCharacter(2, 0, -2, 0)
    for a in (Fraction(1, 9), 1, Fraction(7, 2), 40):
        assert q_bmt(instanton, HalfPlanePoint(0, a)) == 8 * a + 16


def test_q_bmt_of_hyperplane(hyperplane):
    # (beta + 1/2)^2 + a - 1/4: negative only under the wall of O and O_H
    for n in range(-12, 13):
        beta = Fraction(n, 4)
        for a in (Fraction(1, 4), Fraction(1, 2), 1, 3):
            value = q_bmt(hyperplane, HalfPlanePoint(beta, a))
            assert value == beta ** 2 + beta + a
            assert value >= 0
    assert q_bmt(hyperplane, HalfPlanePoint(Fraction(-1, 2), Fraction(1, 8))) < 0


def test_q_bmt_of_torsion_characters():
    rng = random.Random(29)
    for _ in range(100):
        v = random_character(rng)
        v = ChernCharacter(0, v.v1, v.v2, v.v3)
        beta = Fraction(rng.randint(-20, 20), rng.randint(1, 5))
        a = Fraction(rng.randint(1, 30), rng.randint(1, 5))
        expected = (4 * (v.v2 - beta * v.v1) ** 2
                    - 6 * v.v1 * (v.v3 - beta * v.v2 + beta ** 2 * v.v1 / 2) + v.v1 ** 2 * a)
        assert q_bmt(v, HalfPlanePoint(beta, a)) == expected


def test_character_arithmetic(hyperplane):
    assert hyperplane + hyperplane == 2 * hyperplane
    assert -hyperplane + hyperplane == ChernCharacter(0, 0, 0, 0)
    assert str(hyperplane) == "0,1,-1/2,1/6"
    assert hyperplane.as_list() == ["0", "1", "-1/2", "1/6"]


def test_hilbert_polynomial_of_line_bundles(structure_sheaf):
    for k in range(-5, 6):
        p = hilbert_polynomial(tensor_line(structure_sheaf, k))
        assert p.c3 == Fraction(1, 6)
        for n in range(-10, 11):
            m = n + k
            assert p(n) == Fraction((m + 3) * (m + 2) * (m + 1), 6)


def test_hilbert_polynomial_of_hyperplane_and_conic(hyperplane, conic):
    for n in range(-10, 11):
        assert hilbert_polynomial(hyperplane)(n) == Fraction((n + 1) * (n + 2), 2)
        assert hilbert_polynomial(conic)(n) == 2 * n + 1


def test_hilbert_polynomial_is_integer_valued():
    rng = random.Random(13)
    for _ in range(100):
        p = hilbert_polynomial(sheaf_character(rng))
        assert all(p(n).denominator == 1 for n in range(-10, 11))


def test_hilbert_polynomial_of_tensor_is_shift():
    rng = random.Random(17)
    for _ in range(100):
        v = random_character(rng)
        k = rng.randint(-4, 4)
        p, shifted = hilbert_polynomial(v), hilbert_polynomial(tensor_line(v, k))
        for n in range(-6, 7):
            assert shifted(n) == p(n + k)


def test_hilbert_polynomial_is_additive(structure_sheaf, hyperplane):
    total = hilbert_polynomial(tensor_line(structure_sheaf, -1)) + hilbert_polynomial(hyperplane)
    assert total == hilbert_polynomial(structure_sheaf)


def test_hilbert_polynomial_as_poly(conic):
    assert hilbert_polynomial(conic).as_poly() == sp.Poly(2 * N + 1, N, domain=sp.QQ)
    assert HilbertPolynomial(0, 0, 2, 1).coefficients() == {3: 0, 2: 0, 1: 2, 0: 1}


def test_numerical_dimension(structure_sheaf, hyperplane, conic):
    assert numerical_dimension(structure_sheaf) == 3
    assert numerical_dimension(hyperplane) == 2
    assert numerical_dimension(conic) == 1
    assert numerical_dimension(ChernCharacter(0, 0, 0, 1)) == 0
    assert numerical_dimension(ChernCharacter(0, 0, 0, 0)) == -1


def test_reduced_hilbert():
    twisted_plane = ChernCharacter(0, 1, Fraction(-3, 2), Fraction(7, 6))
    assert reduced_hilbert(twisted_plane, 2) == sp.Poly(T ** 2 + T, T, domain=sp.QQ)
    assert reduced_coefficients(ChernCharacter(0, 0, 2, -3), 1) == {1: 1, 0: Fraction(1, 2)}


def test_reduced_hilbert_errors(hyperplane):
    with pytest.raises(StabilityError) as excinfo:
        reduced_coefficients(hyperplane, 3)
    assert excinfo.value.code == 'KOutOfRange'
    with pytest.raises(StabilityError) as excinfo:
        reduced_coefficients(ChernCharacter(0, 0, 0, 0), 1)
    assert excinfo.value.code == 'ZeroCharacter'


def test_iter_characters():
    rows = ["1,0,0,0", "0,0,2,-3"]
    assert list(iter_characters(rows)) == [ChernCharacter(1, 0, 0, 0), ChernCharacter(0, 0, 2, -3)]
