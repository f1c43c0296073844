"""
Asymptotic slope comparison along unbounded curves a = c_gamma * beta^2,
Gieseker (GS_k) comparison of reduced Hilbert polynomials, and the
classifiers for beta -> -infinity and beta -> +infinity.

Every slope along the model curve is a rational function N(beta)/D(beta);
comparisons work with the exact difference N_v D_u - N_u D_v over D_v D_u.
"""
import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, List, Optional, Tuple

import sympy as sp
from sympy.polys.domains import QQ
from sympy.polys.ring_series import rs_mul, rs_series_inversion
from sympy.polys.rings import ring

from src.chern import ChernCharacter, delta, dual, numerical_dimension, reduced_coefficients
from src.errors import StabilityError
from src.params import StabilityParam
from src.slopes import ExtendedRational, Ordering
from src.utils import RationalLike, format_rational, parse_rational, to_fraction, to_sympy
from src.walls import BETA

logger = logging.getLogger(__name__)


class Side(Enum):
    LEFT = 'left'
    RIGHT = 'right'

    @property
    def tau_sign(self) -> int:
        """tau = tau_sign * beta grows to +infinity on this side."""
        return -1 if self is Side.LEFT else 1


@dataclass(frozen=True)
class CurveClass:
    """Germ of an unbounded curve with a / beta^2 -> c_gamma < 1."""
    side: Side
    c_gamma: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, 'c_gamma', parse_rational(self.c_gamma))
        if not (0 <= self.c_gamma < 1):
            raise StabilityError('InvalidCurveClass',
                                 f"c_gamma must lie in [0, 1), got {format_rational(self.c_gamma)}")


@dataclass(frozen=True)
class AsymOrdering:
    """Sign of a slope difference; leading is the coefficient of tau^order."""
    sign: Ordering
    order: Optional[int]
    leading: Optional[Fraction]

    def as_dict(self) -> dict:
        return {'sign': self.sign.value, 'order': self.order,
                'leading': None if self.leading is None else format_rational(self.leading)}


@dataclass(frozen=True)
class LaurentSlope:
    """Expansion sum c_k beta^k, powers strictly decreasing, depth terms kept."""
    terms: Tuple[Tuple[int, Fraction], ...]
    depth: int

    def coefficient(self, power: int) -> Fraction:
        return dict(self.terms).get(power, Fraction(0))

    def leading_term(self) -> Optional[Tuple[int, Fraction]]:
        return next(((p, c) for p, c in self.terms if c != 0), None)

    def as_dict(self) -> dict:
        return {'depth': self.depth,
                'terms': [{'power': p, 'coeff': format_rational(c)} for p, c in self.terms]}


@dataclass(frozen=True)
class LimitValue:
    case: str
    value: ExtendedRational
    closed_form: ExtendedRational

    def as_dict(self) -> dict:
        return {'case': self.case, 'value': str(self.value), 'closed_form': str(self.closed_form)}


class GsMode(Enum):
    AGAINST_SUB = 'AgainstSub'
    AGAINST_QUOTIENT = 'AgainstQuotient'


class VerdictStatus(Enum):
    STABLE = 'stable'
    SEMISTABLE = 'semistable'
    DESTABILIZED = 'destabilized'
    REJECTED = 'rejected'


@dataclass(frozen=True)
class Verdict:
    status: VerdictStatus
    by: Optional[ChernCharacter] = None
    reason: Optional[str] = None

    def as_dict(self) -> dict:
        result = {'verdict': self.status.value}
        if self.by is not None:
            result['by'] = self.by.as_list()
        if self.reason is not None:
            result['reason'] = self.reason
        return result


def _twisted_along(v: ChernCharacter):
    R, C, D, E = (to_sympy(c) for c in v.components)
    return (R,
            C - R * BETA,
            D - C * BETA + R * BETA ** 2 / 2,
            E - D * BETA + C * BETA ** 2 / 2 - R * BETA ** 3 / 6)


def _poly(expr) -> sp.Poly:
    return sp.Poly(expr, BETA, domain=sp.QQ)


def _lambda_parts(v: ChernCharacter, g: CurveClass, s: StabilityParam) -> Tuple[sp.Poly, sp.Poly]:
    ch0, ch1, ch2, ch3 = _twisted_along(v)
    a = to_sympy(g.c_gamma) * BETA ** 2
    return _poly(ch3 - to_sympy(s.weight) * a * ch1), _poly(ch2 - a * ch0 / 2)


def _nu_parts(v: ChernCharacter, g: CurveClass) -> Tuple[sp.Poly, sp.Poly]:
    ch0, ch1, ch2, _ = _twisted_along(v)
    a = to_sympy(g.c_gamma) * BETA ** 2
    return _poly(ch2 - a * ch0 / 2), _poly(ch1)


def _laurent(numerator: sp.Poly, denominator: sp.Poly, depth: int) -> LaurentSlope:
    """Expand N/D at infinity in powers of beta, via x = 1/beta."""
    if depth < 1:
        raise StabilityError('InvalidParameter', f"series depth must be positive, got {depth}")
    if numerator.is_zero:
        return LaurentSlope(tuple((-i, Fraction(0)) for i in range(depth)), depth)
    top = numerator.degree() - denominator.degree()
    _, x = ring('x', QQ)
    num = sum((QQ.from_sympy(c) * x ** i for i, c in enumerate(numerator.all_coeffs())), 0 * x)
    den = sum((QQ.from_sympy(c) * x ** i for i, c in enumerate(denominator.all_coeffs())), 0 * x)
    series = rs_mul(num, rs_series_inversion(den, x, depth), x, depth)
    coefficients = dict(series.terms())
    return LaurentSlope(tuple((top - i, to_fraction(coefficients.get((i,), QQ.zero)))
                              for i in range(depth)), depth)


def _require_nonzero(*characters: ChernCharacter) -> None:
    if any(v.is_zero() for v in characters):
        raise StabilityError('ZeroCharacter', "asymptotic slopes are undefined for the zero character")


def lambda_series(v: ChernCharacter, g: CurveClass, s: StabilityParam, depth: int = 6) -> LaurentSlope:
    _require_nonzero(v)
    numerator, denominator = _lambda_parts(v, g, s)
    if denominator.is_zero:
        raise StabilityError('IdenticallyInfinite', f"lambda({v}) is +infinity along the whole curve")
    return _laurent(numerator, denominator, depth)


def _compare_parts(v_parts: Tuple[sp.Poly, sp.Poly], u_parts: Tuple[sp.Poly, sp.Poly],
                   side: Side) -> AsymOrdering:
    (nv, dv), (nu, du) = v_parts, u_parts
    if dv.is_zero and du.is_zero:
        return AsymOrdering(Ordering.EQUAL, None, Fraction(0))
    if dv.is_zero:
        return AsymOrdering(Ordering.GREATER, None, None)
    if du.is_zero:
        return AsymOrdering(Ordering.LESS, None, None)

    difference = nv * du - nu * dv
    if difference.is_zero:
        return AsymOrdering(Ordering.EQUAL, None, Fraction(0))
    denominator = dv * du
    order = difference.degree() - denominator.degree()
    leading = to_fraction(difference.LC()) / to_fraction(denominator.LC())
    # beta^order = (tau_sign)^order tau^order
    if side.tau_sign < 0 and order % 2:
        leading = -leading
    return AsymOrdering(Ordering.from_sign((leading > 0) - (leading < 0)), order, leading)


def asym_compare_nu(v: ChernCharacter, u: ChernCharacter, g: CurveClass) -> AsymOrdering:
    """Asymptotic nu comparison of two torsion characters of dimension 2."""
    if v.v0 != 0 or u.v0 != 0:
        raise StabilityError('RankNonzero', "asymptotic nu comparison needs rank-0 characters")
    if v.v1 == 0 or u.v1 == 0:
        raise StabilityError('TorsionBelowDim2', "asymptotic nu comparison needs ch1 != 0")
    result = _compare_parts(_nu_parts(v, g), _nu_parts(u, g), g.side)

    expected = delta(2, 1, v, u) / (v.v1 * u.v1)
    if result.leading != expected or (expected != 0 and result.order != 0):
        raise StabilityError('InvariantViolation',
                             f"nu difference {result.leading} does not match delta21/(ch1 ch1) = {expected}")
    return result


def asym_compare_lambda(v: ChernCharacter, u: ChernCharacter, g: CurveClass,
                        s: StabilityParam) -> AsymOrdering:
    """Eventual sign of lambda(v) - lambda(u) along g; +infinity is maximal."""
    _require_nonzero(v, u)
    return _compare_parts(_lambda_parts(v, g, s), _lambda_parts(u, g, s), g.side)


def predicted_lambda_leading(v: ChernCharacter, u: ChernCharacter, g: CurveClass,
                             s: StabilityParam) -> Optional[AsymOrdering]:
    """Closed-form leading term of lambda(v) - lambda(u) for torsion pairs.

    Returns None outside the cases with a closed form.
    """
    if v.v0 != 0 or u.v0 != 0:
        return None
    if v.v1 != 0 and u.v1 != 0:
        d21 = delta(2, 1, v, u)
        if d21 != 0:
            leading = (s.weight * g.c_gamma + Fraction(1, 2)) * d21 / (v.v1 * u.v1)
            return AsymOrdering(Ordering.from_sign((leading > 0) - (leading < 0)), 0, leading)
        d31 = delta(3, 1, v, u)
        if d31 != 0:
            leading = -g.side.tau_sign * d31 / (v.v1 * u.v1)
            return AsymOrdering(Ordering.from_sign((leading > 0) - (leading < 0)), -1, leading)
        return AsymOrdering(Ordering.EQUAL, None, Fraction(0))
    if v.v1 == 0 and u.v1 == 0 and v.v2 != 0 and u.v2 != 0:
        leading = delta(3, 2, v, u) / (v.v2 * u.v2)
        if leading == 0:
            return AsymOrdering(Ordering.EQUAL, None, Fraction(0))
        return AsymOrdering(Ordering.from_sign((leading > 0) - (leading < 0)), 0, leading)
    return None


def limit_table_nu(v: ChernCharacter, g: CurveClass) -> LimitValue:
    """lim nu / tau along g, tau = -beta on the left and beta on the right."""
    _require_nonzero(v)
    numerator, denominator = _nu_parts(v, g)
    if denominator.is_zero:
        value = ExtendedRational.infinity()
    else:
        series = _laurent(numerator, denominator, depth=2)
        value = ExtendedRational(series.coefficient(1) * g.side.tau_sign)

    if v.v0 != 0:
        case = 'rank_nonzero'
        closed_form = ExtendedRational(-g.side.tau_sign * (1 - g.c_gamma) / 2)
    elif v.v1 != 0:
        case = 'torsion_dim2'
        closed_form = ExtendedRational(Fraction(-g.side.tau_sign))
    else:
        case = 'infinite'
        closed_form = ExtendedRational.infinity()

    if value != closed_form:
        raise StabilityError('InvariantViolation',
                             f"series limit {value} disagrees with closed form {closed_form} for ({v})")
    return LimitValue(case, value, closed_form)


def gs_compare(vE: ChernCharacter, vOther: ChernCharacter, k: int, mode: GsMode) -> Ordering:
    """Compare truncated reduced Hilbert polynomials for m >> 0.

    AgainstSub: sign of p_E - p_F.  AgainstQuotient: sign of p_G - p_E.
    In both modes Greater is the stable direction.
    """
    d_e, d_other = numerical_dimension(vE), numerical_dimension(vOther)
    if d_e < 0 or d_other < 0:
        raise StabilityError('ZeroCharacter', "Gieseker comparison needs nonzero characters")
    if d_e != d_other:
        raise StabilityError('DimensionMismatch', f"dimensions differ: {d_e} vs {d_other}")
    p_e = reduced_coefficients(vE, k)
    p_other = reduced_coefficients(vOther, k)
    first, second = (p_e, p_other) if mode is GsMode.AGAINST_SUB else (p_other, p_e)
    for i in range(d_e, d_e - k - 1, -1):
        diff = first[i] - second[i]
        if diff != 0:
            return Ordering.from_sign((diff > 0) - (diff < 0))
    return Ordering.EQUAL


def is_effective(v: ChernCharacter) -> bool:
    """First nonvanishing component positive."""
    return next((c > 0 for c in v.components if c != 0), False)


def _usable_candidates(v: ChernCharacter, candidates: Iterable[ChernCharacter]) -> List[ChernCharacter]:
    usable = []
    for u in sorted(set(candidates), key=lambda c: c.components):
        if u.is_zero():
            logger.warning("Skipping zero candidate")
        elif u == v:
            logger.warning(f"Skipping candidate equal to the character itself ({u})")
        else:
            usable.append(u)
    return usable


def _screen(v: ChernCharacter) -> Optional[Verdict]:
    if v.is_zero():
        return Verdict(VerdictStatus.REJECTED, reason='zero character')
    if not is_effective(v):
        return Verdict(VerdictStatus.REJECTED, reason=f"({v}) is not the character of a sheaf")
    return None


def classify_left(v: ChernCharacter, s: StabilityParam, candidates: Iterable[ChernCharacter],
                  strict: bool = False, c_gamma: RationalLike = 0) -> Verdict:
    """Asymptotic lambda-stability at beta -> -infinity relative to candidate subobjects."""
    if v.v0 != 0:
        raise StabilityError('NonzeroRank', "the left classifier needs ch0 = 0")
    rejected = _screen(v)
    if rejected is not None:
        return rejected

    g = CurveClass(Side.LEFT, c_gamma)
    semistable_only = False
    for u in _usable_candidates(v, candidates):
        sign = asym_compare_lambda(v, u, g, s).sign
        if sign is Ordering.LESS or (sign is Ordering.EQUAL and strict):
            return Verdict(VerdictStatus.DESTABILIZED, by=u)
        if sign is Ordering.EQUAL:
            semistable_only = True
    return Verdict(VerdictStatus.SEMISTABLE if semistable_only else VerdictStatus.STABLE)


def gieseker_verdict(v: ChernCharacter, candidates: Iterable[ChernCharacter],
                     strict: bool = False) -> Verdict:
    """Gieseker (semi)stability relative to candidate subsheaves."""
    rejected = _screen(v)
    if rejected is not None:
        return rejected

    d = numerical_dimension(v)
    semistable_only = False
    for u in _usable_candidates(v, candidates):
        d_u = numerical_dimension(u)
        if d_u > d:
            logger.warning(f"Skipping candidate ({u}) of dimension {d_u} > {d}")
            continue
        if d_u < d:
            return Verdict(VerdictStatus.DESTABILIZED, by=u)
        sign = Ordering.EQUAL if d == 0 else gs_compare(v, u, d, GsMode.AGAINST_SUB)
        if sign is Ordering.LESS or (sign is Ordering.EQUAL and strict):
            return Verdict(VerdictStatus.DESTABILIZED, by=u)
        if sign is Ordering.EQUAL:
            semistable_only = True
    return Verdict(VerdictStatus.SEMISTABLE if semistable_only else VerdictStatus.STABLE)


def classify_right(v: ChernCharacter, s: StabilityParam, candidates: Iterable[ChernCharacter],
                   strict: bool = False, c_gamma: RationalLike = 0) -> Verdict:
    """Asymptotic lambda-stability at beta -> +infinity relative to candidate quotients.

    Decided through the derived dual on the left; the direct right-side
    comparison is run alongside and must agree.
    """
    if v.v0 != 0:
        raise StabilityError('NonzeroRank', "the right classifier needs ch0 = 0")
    usable = _usable_candidates(v, candidates)
    duals = {dual(q): q for q in usable}
    verdict = classify_left(dual(v), s, list(duals), strict, c_gamma)
    if verdict.status is VerdictStatus.REJECTED:
        return verdict

    right, left = CurveClass(Side.RIGHT, c_gamma), CurveClass(Side.LEFT, c_gamma)
    if not _lambda_parts(v, right, s)[1].is_zero:
        for q in usable:
            if _lambda_parts(q, right, s)[1].is_zero:
                continue
            direct = asym_compare_lambda(v, q, right, s).sign
            through_dual = asym_compare_lambda(dual(v), dual(q), left, s).sign
            direct_hit = direct is Ordering.GREATER or (direct is Ordering.EQUAL and strict)
            dual_hit = through_dual is Ordering.LESS or (through_dual is Ordering.EQUAL and strict)
            if direct_hit != dual_hit:
                raise StabilityError('InvariantViolation',
                                     f"right-side comparison with ({q}) disagrees with the dual rule")

    if verdict.status is VerdictStatus.DESTABILIZED:
        return Verdict(VerdictStatus.DESTABILIZED, by=duals[verdict.by])
    return verdict
