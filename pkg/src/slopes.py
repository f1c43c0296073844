"""
Central charges and the slopes mu, nu (tilt) and lambda (Bridgeland).

Every slope is -Re Z / Im Z written in exact rationals; a vanishing
imaginary part yields +infinity, which compares above every finite value.
"""
from dataclasses import dataclass
from enum import Enum, IntEnum
from fractions import Fraction
from functools import total_ordering
from typing import Optional

from src.chern import ChernCharacter, q_bmt, q_tilt, twist
from src.errors import StabilityError
from src.params import HalfPlanePoint, StabilityParam
from src.utils import format_rational


@total_ordering
@dataclass(frozen=True)
class ExtendedRational:
    """A rational or +infinity (value None)."""
    value: Optional[Fraction] = None

    @classmethod
    def infinity(cls) -> 'ExtendedRational':
        return cls(None)

    @classmethod
    def ratio(cls, numerator: Fraction, denominator: Fraction) -> 'ExtendedRational':
        if denominator == 0:
            return cls(None)
        return cls(Fraction(numerator) / denominator)

    @property
    def is_infinite(self) -> bool:
        return self.value is None

    def sign(self) -> int:
        if self.value is None:
            return 1
        return (self.value > 0) - (self.value < 0)

    def __lt__(self, other: 'ExtendedRational') -> bool:
        if self.value is None:
            return False
        if other.value is None:
            return True
        return self.value < other.value

    def __str__(self) -> str:
        return format_rational(self.value)


class Ordering(Enum):
    LESS = 'Less'
    EQUAL = 'Equal'
    GREATER = 'Greater'

    @classmethod
    def from_sign(cls, sign: int) -> 'Ordering':
        if sign < 0:
            return cls.LESS
        if sign > 0:
            return cls.GREATER
        return cls.EQUAL

    def reversed(self) -> 'Ordering':
        return {Ordering.LESS: Ordering.GREATER,
                Ordering.GREATER: Ordering.LESS}.get(self, Ordering.EQUAL)


class ShiftClass(IntEnum):
    """k such that E[k] lies in the double-tilted heart at a point."""
    HEART = 0
    SHIFT_ONE = 1
    SHIFT_TWO = 2


def _require_nonzero(v: ChernCharacter) -> None:
    if v.is_zero():
        raise StabilityError('ZeroCharacter', "slopes are undefined for the zero character")


def tilt_real_part(v: ChernCharacter, p: HalfPlanePoint) -> Fraction:
    """-Re Z^t(v) = ch2^beta - a/2 ch0."""
    return twist(v, p.beta).c2 - p.a * v.v0 / 2


def bridgeland_real_part(v: ChernCharacter, p: HalfPlanePoint, s: StabilityParam) -> Fraction:
    """-Re Z_{beta,alpha,s}(v) = ch3^beta - (s + 1/6) a ch1^beta."""
    t = twist(v, p.beta)
    return t.c3 - s.weight * p.a * t.c1


def mu_slope(v: ChernCharacter) -> ExtendedRational:
    """Mumford slope ch1 / ch0, infinite for torsion characters."""
    _require_nonzero(v)
    return ExtendedRational.ratio(v.v1, v.v0)


def nu_slope(v: ChernCharacter, p: HalfPlanePoint) -> ExtendedRational:
    """Tilt slope (ch2^beta - a ch0 / 2) / ch1^beta at p."""
    _require_nonzero(v)
    return ExtendedRational.ratio(tilt_real_part(v, p), twist(v, p.beta).c1)


def lambda_slope(v: ChernCharacter, p: HalfPlanePoint, s: StabilityParam) -> ExtendedRational:
    """Bridgeland slope (ch3^beta - (s + 1/6) a ch1^beta) / (ch2^beta - a ch0 / 2) at p."""
    _require_nonzero(v)
    return ExtendedRational.ratio(bridgeland_real_part(v, p, s), tilt_real_part(v, p))


def compare(x: ExtendedRational, y: ExtendedRational) -> Ordering:
    """Order two extended slopes; infinity is above every rational."""
    if x == y:
        return Ordering.EQUAL
    return Ordering.LESS if x < y else Ordering.GREATER


def compare_lambda(v: ChernCharacter, u: ChernCharacter, p: HalfPlanePoint,
                   s: StabilityParam) -> Ordering:
    return compare(lambda_slope(v, p, s), lambda_slope(u, p, s))


def region_classify(v: ChernCharacter, p: HalfPlanePoint) -> ShiftClass:
    """Which shift of an object of character v sits in the heart at p."""
    _require_nonzero(v)
    if v.v0 == 0:
        raise StabilityError('RankZero', "region classification needs v0 != 0; use ch1-based membership")
    if p.beta < v.v1 / v.v0:
        return ShiftClass.HEART if nu_slope(v, p).sign() > 0 else ShiftClass.SHIFT_ONE
    return ShiftClass.SHIFT_ONE if nu_slope(-v, p).sign() > 0 else ShiftClass.SHIFT_TWO


def theta_side(v: ChernCharacter, p: HalfPlanePoint) -> int:
    """Sign of Re Z^t(v) at p: +1 above Theta_v (Theta+), -1 below, 0 on it."""
    value = -tilt_real_part(v, p)
    return (value > 0) - (value < 0)


def l_side(v: ChernCharacter, p: HalfPlanePoint) -> int:
    """Sign of ch1^beta(v): +1 left of L_v (L+), -1 right of it."""
    value = twist(v, p.beta).c1
    return (value > 0) - (value < 0)


def bogomolov_holds(v: ChernCharacter) -> bool:
    return q_tilt(v) >= 0


def generalized_bogomolov_holds(v: ChernCharacter, p: HalfPlanePoint) -> bool:
    return q_bmt(v, p) >= 0
