"""
Points of the (beta, alpha) upper half-plane and the Bridgeland parameter s.
"""
from dataclasses import dataclass
from fractions import Fraction

from src.errors import StabilityError
from src.utils import RationalLike, format_rational, parse_rational


@dataclass(frozen=True)
class HalfPlanePoint:
    """A point (beta, a) with a = alpha^2 > 0."""
    beta: Fraction
    a: Fraction

    def __post_init__(self):
        object.__setattr__(self, 'beta', parse_rational(self.beta))
        object.__setattr__(self, 'a', parse_rational(self.a))
        if self.a <= 0:
            raise StabilityError('InvalidPoint', f"a = alpha^2 must be positive, got {format_rational(self.a)}")

    @classmethod
    def from_alpha(cls, beta: RationalLike, alpha: RationalLike) -> 'HalfPlanePoint':
        alpha = parse_rational(alpha)
        if alpha <= 0:
            raise StabilityError('InvalidPoint', f"alpha must be positive, got {format_rational(alpha)}")
        return cls(parse_rational(beta), alpha * alpha)

    def as_dict(self) -> dict:
        return {'beta': format_rational(self.beta), 'a': format_rational(self.a)}


@dataclass(frozen=True)
class StabilityParam:
    s: Fraction

    def __post_init__(self):
        object.__setattr__(self, 's', parse_rational(self.s))
        if self.s <= 0:
            raise StabilityError('InvalidParameter', f"s must be positive, got {format_rational(self.s)}")

    @property
    def weight(self) -> Fraction:
        """The factor s + 1/6 multiplying a * ch1 in the Bridgeland charge."""
        return self.s + Fraction(1, 6)
