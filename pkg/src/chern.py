"""
Exact arithmetic on Chern characters of P^3.

A character is the vector v = (ch0.H^3, ch1.H^2, ch2.H, ch3) in the lattice
Z + Z + (1/2)Z + (1/6)Z.
"""
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, Tuple

import sympy as sp

from src.errors import StabilityError
from src.params import HalfPlanePoint
from src.utils import RationalLike, format_rational, parse_rational, to_sympy

# td(P^3) = 1 + 2H + 11/6 H^2 + H^3
TODD = (Fraction(1), Fraction(2), Fraction(11, 6), Fraction(1))

N = sp.Symbol('n')
T = sp.Symbol('t')

# lattice denominators of ch0..ch3
_DENOMINATORS = (1, 1, 2, 6)


def _twist_components(components: Tuple[Fraction, ...], beta: Fraction) -> Tuple[Fraction, ...]:
    c0, c1, c2, c3 = components
    return (
        c0,
        c1 - beta * c0,
        c2 - beta * c1 + beta ** 2 * c0 / 2,
        c3 - beta * c2 + beta ** 2 * c1 / 2 - beta ** 3 * c0 / 6,
    )


@dataclass(frozen=True)
class ChernCharacter:
    v0: Fraction
    v1: Fraction
    v2: Fraction
    v3: Fraction

    def __post_init__(self):
        for index, name in enumerate(('v0', 'v1', 'v2', 'v3')):
            value = parse_rational(getattr(self, name))
            object.__setattr__(self, name, value)
            if (value * _DENOMINATORS[index]).denominator != 1:
                raise StabilityError(
                    'DenominatorViolation',
                    f"ch{index} = {format_rational(value)} is not in "
                    f"{'Z' if _DENOMINATORS[index] == 1 else '(1/%d)Z' % _DENOMINATORS[index]}"
                )

    @classmethod
    def of(cls, *components: RationalLike) -> 'ChernCharacter':
        if len(components) != 4:
            raise StabilityError('MalformedCharacter', f"expected 4 components, got {len(components)}")
        return cls(*components)

    @property
    def components(self) -> Tuple[Fraction, Fraction, Fraction, Fraction]:
        return (self.v0, self.v1, self.v2, self.v3)

    def is_zero(self) -> bool:
        return not any(self.components)

    def __add__(self, other: 'ChernCharacter') -> 'ChernCharacter':
        return ChernCharacter(*(a + b for a, b in zip(self.components, other.components)))

    def __sub__(self, other: 'ChernCharacter') -> 'ChernCharacter':
        return ChernCharacter(*(a - b for a, b in zip(self.components, other.components)))

    def __neg__(self) -> 'ChernCharacter':
        return ChernCharacter(*(-a for a in self.components))

    def __mul__(self, factor: int) -> 'ChernCharacter':
        if not isinstance(factor, int):
            return NotImplemented
        return ChernCharacter(*(factor * a for a in self.components))

    __rmul__ = __mul__

    def __str__(self) -> str:
        return ','.join(format_rational(c) for c in self.components)

    def as_list(self):
        return [format_rational(c) for c in self.components]


@dataclass(frozen=True)
class TwistedCharacter:
    """ch^beta(v): four rationals, no lattice condition."""
    beta: Fraction
    c0: Fraction
    c1: Fraction
    c2: Fraction
    c3: Fraction

    @property
    def components(self) -> Tuple[Fraction, Fraction, Fraction, Fraction]:
        return (self.c0, self.c1, self.c2, self.c3)

    def twist(self, beta: RationalLike) -> 'TwistedCharacter':
        beta = parse_rational(beta)
        return TwistedCharacter(self.beta + beta, *_twist_components(self.components, beta))

    def as_list(self):
        return [format_rational(c) for c in self.components]


@dataclass(frozen=True)
class HilbertPolynomial:
    """P(n) = c3 n^3 + c2 n^2 + c1 n + c0."""
    c3: Fraction
    c2: Fraction
    c1: Fraction
    c0: Fraction

    def __call__(self, n: RationalLike) -> Fraction:
        n = parse_rational(n)
        return ((self.c3 * n + self.c2) * n + self.c1) * n + self.c0

    def __add__(self, other: 'HilbertPolynomial') -> 'HilbertPolynomial':
        return HilbertPolynomial(self.c3 + other.c3, self.c2 + other.c2,
                                 self.c1 + other.c1, self.c0 + other.c0)

    def coefficients(self) -> Dict[int, Fraction]:
        return {3: self.c3, 2: self.c2, 1: self.c1, 0: self.c0}

    def as_poly(self) -> sp.Poly:
        return sp.Poly([to_sympy(c) for c in (self.c3, self.c2, self.c1, self.c0)], N, domain=sp.QQ)


def parse_character(text: str) -> ChernCharacter:
    """Parse "v0,v1,v2,v3" into a lattice character."""
    parts = str(text).split(',')
    if len(parts) != 4:
        raise StabilityError('MalformedCharacter', f"expected four comma-separated rationals, got {text!r}")
    return ChernCharacter(*(parse_rational(p) for p in parts))


def twist(v: ChernCharacter, beta: RationalLike) -> TwistedCharacter:
    """Twisted character ch^beta = e^{-beta H} ch(v)."""
    beta = parse_rational(beta)
    return TwistedCharacter(beta, *_twist_components(v.components, beta))


def tensor_line(v: ChernCharacter, k: int) -> ChernCharacter:
    """ch(E (x) O(k)) = ch(E) * exp(kH)."""
    return ChernCharacter(*_twist_components(v.components, Fraction(-k)))


def dual(v: ChernCharacter) -> ChernCharacter:
    """Character of the derived dual RHom(-, O)[2]."""
    return ChernCharacter(v.v0, -v.v1, v.v2, -v.v3)


def delta(i: int, j: int, v: ChernCharacter, w: ChernCharacter) -> Fraction:
    """delta_ij(v, w) = ch_i(v) ch_j(w) - ch_j(v) ch_i(w), for 0 <= j < i <= 3."""
    if not (0 <= j < i <= 3):
        raise StabilityError('IndexOutOfRange', f"delta needs 0 <= j < i <= 3, got i={i}, j={j}")
    vc, wc = v.components, w.components
    return vc[i] * wc[j] - vc[j] * wc[i]


def deltas(v: ChernCharacter, w: ChernCharacter) -> Dict[Tuple[int, int], Fraction]:
    """All pairings delta_ij(v, w) with 0 <= j < i <= 3."""
    return {(i, j): delta(i, j, v, w) for i in range(4) for j in range(i)}


def q_tilt(v: ChernCharacter) -> Fraction:
    """Bogomolov discriminant ch1^2 - 2 ch0 ch2."""
    return v.v1 ** 2 - 2 * v.v0 * v.v2


def q_bmt(v: ChernCharacter, p: HalfPlanePoint) -> Fraction:
    """Generalized Bogomolov form Q_{beta,alpha}(v)."""
    t = twist(v, p.beta)
    return q_tilt(v) * p.a + 4 * t.c2 ** 2 - 6 * t.c1 * t.c3


def hilbert_polynomial(v: ChernCharacter) -> HilbertPolynomial:
    """P_E(n) = chi(E(n)) by Riemann-Roch on P^3."""
    v0, v1, v2, v3 = v.components
    return HilbertPolynomial(
        c3=v0 / 6,
        c2=(v1 + TODD[1] * v0) / 2,
        c1=v2 + TODD[1] * v1 + TODD[2] * v0,
        c0=v3 + TODD[1] * v2 + TODD[2] * v1 + TODD[3] * v0,
    )


def numerical_dimension(v: ChernCharacter) -> int:
    """Dimension of the support: 3 minus the index of the first nonzero entry, -1 for zero."""
    for index, value in enumerate(v.components):
        if value != 0:
            return 3 - index
    return -1


def reduced_coefficients(v: ChernCharacter, k: int) -> Dict[int, Fraction]:
    """Coefficients alpha_i / alpha_d of P_E for i = d-k .. d."""
    d = numerical_dimension(v)
    if d < 0:
        raise StabilityError('ZeroCharacter', "the zero character has no reduced Hilbert polynomial")
    if not (1 <= k <= d):
        raise StabilityError('KOutOfRange', f"k must satisfy 1 <= k <= {d}, got {k}")
    coefficients = hilbert_polynomial(v).coefficients()
    leading = coefficients[d]
    return {i: coefficients[i] / leading for i in range(d - k, d + 1)}


def reduced_hilbert(v: ChernCharacter, k: int) -> sp.Poly:
    """The truncated reduced Hilbert polynomial p_{E,k}(t)."""
    coefficients = reduced_coefficients(v, k)
    expr = sum((to_sympy(c) * T ** i for i, c in coefficients.items()), sp.Integer(0))
    return sp.Poly(expr, T, domain=sp.QQ)


def iter_characters(rows: Iterable[str]) -> Iterable[ChernCharacter]:
    for row in rows:
        yield parse_character(row)
