"""
Distinguished curves, numerical walls and wall enumeration in the
(beta, a) half-plane, a = alpha^2.

Working in a instead of alpha keeps every curve polynomial over the
rationals; square roots only appear when a section is rendered as alpha.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from math import ceil, floor
from typing import Dict, List, Optional, Tuple

import mpmath
import sympy as sp

from src.chern import ChernCharacter, deltas, q_tilt
from src.errors import StabilityError
from src.params import HalfPlanePoint, StabilityParam
from src.slopes import tilt_real_part
from src.utils import (RationalLike, chunk_list, exact_sqrt, format_decimal, format_rational,
                       parse_rational, to_fraction, to_mpf, to_sympy)

logger = logging.getLogger(__name__)

BETA, A = sp.symbols('beta a')


def _poly(expr) -> sp.Poly:
    return sp.Poly(expr, BETA, A, domain=sp.QQ)


def _section_coefficients(poly: sp.Poly, beta: Fraction) -> Tuple[Fraction, Fraction, Fraction]:
    """Coefficients (of a^2, a, 1) of poly restricted to a vertical line."""
    coefficients = [Fraction(0), Fraction(0), Fraction(0)]
    for (i, j), coeff in poly.terms():
        if j > 2:
            raise StabilityError('InvalidParameter', f"curve has degree {j} in a")
        coefficients[2 - j] += to_fraction(coeff) * beta ** i
    return tuple(coefficients)


@dataclass(frozen=True)
class SectionRoot:
    """An exact value center + sign * sqrt(radicand); radicand >= 0."""
    center: Fraction
    radicand: Fraction = Fraction(0)
    sign: int = 0

    @classmethod
    def exact(cls, value: Fraction) -> 'SectionRoot':
        return cls(Fraction(value))

    @property
    def is_rational(self) -> bool:
        return self.radicand == 0

    @property
    def value(self) -> Optional[Fraction]:
        return self.center if self.is_rational else None

    def is_positive(self) -> bool:
        if self.is_rational or self.sign == 0:
            return self.center > 0
        if self.sign > 0:
            return self.center >= 0 or self.radicand > self.center ** 2
        return self.center > 0 and self.center ** 2 > self.radicand

    def to_mpf(self, digits: int = 12) -> mpmath.mpf:
        with mpmath.workdps(digits + 20):
            value = to_mpf(self.center)
            if not self.is_rational:
                value += self.sign * mpmath.sqrt(to_mpf(self.radicand))
            return +value

    def decimal(self, digits: int = 12) -> str:
        with mpmath.workdps(digits + 20):
            return format_decimal(self.to_mpf(digits), digits)

    def alpha_decimal(self, digits: int = 12) -> str:
        with mpmath.workdps(digits + 20):
            return format_decimal(mpmath.sqrt(self.to_mpf(digits)), digits)

    def __str__(self) -> str:
        if self.is_rational:
            return format_rational(self.center)
        root = f"sqrt({format_rational(self.radicand)})"
        if self.center == 0:
            return root if self.sign > 0 else f"-{root}"
        return f"{format_rational(self.center)}{'+' if self.sign > 0 else '-'}{root}"

    def as_dict(self, digits: int = 12) -> dict:
        return {'a': str(self), 'rational': self.is_rational,
                'a_decimal': self.decimal(digits), 'alpha_decimal': self.alpha_decimal(digits)}


def positive_roots(a2: Fraction, a1: Fraction, a0: Fraction) -> Optional[List[SectionRoot]]:
    """Exact positive roots of a2 x^2 + a1 x + a0, ascending.

    Returns None when the polynomial vanishes identically.
    """
    if a2 == 0:
        if a1 == 0:
            return None if a0 == 0 else []
        roots = [SectionRoot.exact(-a0 / a1)]
    else:
        center = -a1 / (2 * a2)
        radicand = (a1 * a1 - 4 * a2 * a0) / (4 * a2 * a2)
        if radicand < 0:
            return []
        root = exact_sqrt(radicand)
        if root is not None:
            roots = sorted({SectionRoot.exact(center - root), SectionRoot.exact(center + root)},
                           key=lambda r: r.center)
        else:
            roots = [SectionRoot(center, radicand, -1), SectionRoot(center, radicand, 1)]
    return [r for r in roots if r.is_positive()]


class WallKind(Enum):
    SEMICIRCLE = 'Semicircle'
    VERTICAL_RAY = 'VerticalRay'
    EMPTY = 'Empty'
    DEGENERATE = 'Degenerate'


@dataclass(frozen=True)
class TiltWallGeometry:
    """The nu-wall x(beta^2 + a) + y beta + z = 0."""
    x: Fraction
    y: Fraction
    z: Fraction
    kind: WallKind
    center: Optional[Fraction] = None
    radius2: Optional[Fraction] = None
    beta: Optional[Fraction] = None

    def as_poly(self) -> sp.Poly:
        return _poly(to_sympy(self.x) * (BETA ** 2 + A) + to_sympy(self.y) * BETA + to_sympy(self.z))

    def contains(self, p: HalfPlanePoint) -> bool:
        return self.x * (p.beta ** 2 + p.a) + self.y * p.beta + self.z == 0

    def beta_interval(self) -> Tuple[sp.Expr, sp.Expr]:
        if self.kind is not WallKind.SEMICIRCLE:
            raise StabilityError('NotASemicircle', f"a {self.kind.value} wall has no beta interval")
        rho = sp.sqrt(to_sympy(self.radius2))
        return to_sympy(self.center) - rho, to_sympy(self.center) + rho

    def normalized_key(self) -> Tuple[Fraction, Fraction, Fraction]:
        """(x:y:z) scaled so that the first nonzero entry is 1."""
        lead = next((c for c in (self.x, self.y, self.z) if c != 0), Fraction(1))
        return (self.x / lead, self.y / lead, self.z / lead)

    def as_dict(self) -> dict:
        result = {'x': format_rational(self.x), 'y': format_rational(self.y),
                  'z': format_rational(self.z), 'kind': self.kind.value}
        if self.kind is WallKind.SEMICIRCLE:
            result['center'] = format_rational(self.center)
            result['radius2'] = format_rational(self.radius2)
        elif self.kind is WallKind.VERTICAL_RAY:
            result['beta'] = format_rational(self.beta)
        return result


def tilt_wall(v: ChernCharacter, w: ChernCharacter) -> TiltWallGeometry:
    """Numerical nu-wall between v = (r, c, d, e) and w = (R, C, D, E)."""
    if v.is_zero() or w.is_zero():
        raise StabilityError('ZeroCharacter', "walls need two nonzero characters")
    r, c, d = v.v0, v.v1, v.v2
    R, C, D = w.v0, w.v1, w.v2
    x = R * c - C * r
    y = 2 * (D * r - R * d)
    z = 2 * (C * d - D * c)

    if x != 0:
        discriminant = y * y - 4 * x * z
        if discriminant > 0:
            return TiltWallGeometry(x, y, z, WallKind.SEMICIRCLE,
                                    center=-y / (2 * x), radius2=discriminant / (4 * x * x))
        return TiltWallGeometry(x, y, z, WallKind.EMPTY)
    if y != 0:
        return TiltWallGeometry(x, y, z, WallKind.VERTICAL_RAY, beta=-z / y)
    if z == 0:
        return TiltWallGeometry(x, y, z, WallKind.DEGENERATE)
    return TiltWallGeometry(x, y, z, WallKind.EMPTY)


def wall_apex(g: TiltWallGeometry, w: ChernCharacter) -> HalfPlanePoint:
    """Top of a semicircular wall; it lies on Theta_w."""
    if g.kind is not WallKind.SEMICIRCLE:
        raise StabilityError('NotASemicircle', f"apex undefined for a {g.kind.value} wall")
    apex = HalfPlanePoint(g.center, g.radius2)
    if tilt_real_part(w, apex) != 0:
        raise StabilityError('InvariantViolation',
                             f"apex ({format_rational(apex.beta)}, {format_rational(apex.a)}) is not on Theta_w")
    return apex


class CurveKind(Enum):
    L_LINE = 'LLine'
    THETA = 'ThetaCurve'
    GAMMA = 'GammaCurve'


@dataclass(frozen=True)
class CurveDescriptor:
    kind: CurveKind
    w: ChernCharacter
    polynomial: sp.Poly = field(compare=False)
    s: Optional[Fraction] = None

    def as_poly(self) -> sp.Poly:
        return self.polynomial

    def evaluate(self, beta: RationalLike, a: RationalLike) -> Fraction:
        a2, a1, a0 = _section_coefficients(self.polynomial, parse_rational(beta))
        a = parse_rational(a)
        return (a2 * a + a1) * a + a0

    def section(self, beta: RationalLike) -> Optional[List[SectionRoot]]:
        """Positive a on the curve over beta; None if the whole line lies on it."""
        return positive_roots(*_section_coefficients(self.polynomial, parse_rational(beta)))

    def as_dict(self) -> dict:
        result = {'kind': self.kind.value, 'w': self.w.as_list(),
                  'polynomial': str(self.polynomial.as_expr())}
        if self.s is not None:
            result['s'] = format_rational(self.s)
        return result


def distinguished_curve(kind: CurveKind, w: ChernCharacter,
                        s: Optional[StabilityParam] = None) -> CurveDescriptor:
    """L_w (ch1^beta = 0), Theta_w (Re Z^t = 0) or Gamma_w (Re Z_s = 0)."""
    R, C, D, E = (to_sympy(c) for c in w.components)
    ch1 = C - R * BETA
    ch2 = D - C * BETA + R * BETA ** 2 / 2
    ch3 = E - D * BETA + C * BETA ** 2 / 2 - R * BETA ** 3 / 6

    if kind is CurveKind.L_LINE:
        if w.v0 == 0:
            raise StabilityError('RankZeroLine', "L_w only exists for w0 != 0")
        return CurveDescriptor(kind, w, _poly(ch1))
    if kind is CurveKind.THETA:
        return CurveDescriptor(kind, w, _poly(ch2 - A * R / 2))
    if s is None:
        raise StabilityError('MissingS', "the Gamma curve needs s")
    return CurveDescriptor(kind, w, _poly(ch3 - to_sympy(s.weight) * A * ch1), s.s)


@dataclass(frozen=True)
class QuarticWall:
    """f_{v,w} = A a^2 + (B2 b^2 + B1 b + B0) a + (C4 b^4 + ... + C0)."""
    v: ChernCharacter
    w: ChernCharacter
    s: Fraction
    A: Fraction
    B2: Fraction
    B1: Fraction
    B0: Fraction
    C4: Fraction
    C3: Fraction
    C2: Fraction
    C1: Fraction
    C0: Fraction

    def coefficients(self) -> Dict[str, Fraction]:
        return {name: getattr(self, name)
                for name in ('A', 'B2', 'B1', 'B0', 'C4', 'C3', 'C2', 'C1', 'C0')}

    def is_zero(self) -> bool:
        return not any(self.coefficients().values())

    def section_coefficients(self, beta: RationalLike) -> Tuple[Fraction, Fraction, Fraction]:
        b = parse_rational(beta)
        return (self.A,
                (self.B2 * b + self.B1) * b + self.B0,
                (((self.C4 * b + self.C3) * b + self.C2) * b + self.C1) * b + self.C0)

    def evaluate(self, beta: RationalLike, a: RationalLike) -> Fraction:
        a2, a1, a0 = self.section_coefficients(beta)
        a = parse_rational(a)
        return (a2 * a + a1) * a + a0

    def as_poly(self) -> sp.Poly:
        c = {name: to_sympy(value) for name, value in self.coefficients().items()}
        return _poly(c['A'] * A ** 2
                     + (c['B2'] * BETA ** 2 + c['B1'] * BETA + c['B0']) * A
                     + c['C4'] * BETA ** 4 + c['C3'] * BETA ** 3 + c['C2'] * BETA ** 2
                     + c['C1'] * BETA + c['C0'])

    def as_dict(self) -> dict:
        return {'v': self.v.as_list(), 'w': self.w.as_list(), 's': format_rational(self.s),
                'coefficients': {k: format_rational(c) for k, c in self.coefficients().items()},
                'polynomial': str(self.as_poly().as_expr())}


def bridgeland_wall(v: ChernCharacter, w: ChernCharacter, s: StabilityParam) -> QuarticWall:
    """Numerical lambda-wall: the zero locus of N_v D_w - N_w D_v."""
    if v.is_zero() or w.is_zero():
        raise StabilityError('ZeroCharacter', "walls need two nonzero characters")
    d = deltas(v, w)
    s_ = s.s
    return QuarticWall(
        v=v, w=w, s=s_,
        A=(6 * s_ + 1) / 12 * d[1, 0],
        B2=(3 * s_ - 1) / 6 * d[1, 0],
        B1=(1 - 3 * s_) / 3 * d[2, 0],
        B0=(6 * s_ + 1) / 6 * d[2, 1] - d[3, 0] / 2,
        C4=d[1, 0] / 12,
        C3=-d[2, 0] / 3,
        C2=(d[3, 0] + d[2, 1]) / 2,
        C1=-d[3, 1],
        C0=d[3, 2],
    )


def wall_section(wall: QuarticWall, beta: RationalLike) -> List[SectionRoot]:
    """Positive a with f_{v,w}(beta, a) = 0."""
    if wall.is_zero():
        raise StabilityError('IdenticallyZero', "v and w are proportional; the wall is the whole plane")
    roots = positive_roots(*wall.section_coefficients(beta))
    if roots is None:
        logger.warning(f"Wall contains the whole vertical line beta = {format_rational(parse_rational(beta))}")
        return []
    return roots


@dataclass(frozen=True)
class WallWindow:
    beta_min: Fraction
    beta_max: Fraction
    max_imaginary: Fraction
    max_qtilt: Fraction
    max_rank: int = 6

    def __post_init__(self):
        for name in ('beta_min', 'beta_max', 'max_imaginary', 'max_qtilt'):
            object.__setattr__(self, name, parse_rational(getattr(self, name)))
        if self.beta_min >= self.beta_max:
            raise StabilityError('WindowEmpty', f"beta_min {format_rational(self.beta_min)} must be "
                                                f"below beta_max {format_rational(self.beta_max)}")
        if self.max_imaginary <= 0 or self.max_qtilt <= 0 or self.max_rank < 0:
            raise StabilityError('InvalidParameter', "window bounds must be positive")


def _restrict(bounds: Tuple[Optional[Fraction], Optional[Fraction]], p: Fraction, q: Fraction):
    """Intersect an open beta-interval with {p + q beta > 0}."""
    lo, hi = bounds
    if q == 0:
        return bounds if p > 0 else None
    edge = -p / q
    if q > 0:
        lo = edge if lo is None else max(lo, edge)
    else:
        hi = edge if hi is None else min(hi, edge)
    if lo is not None and hi is not None and lo >= hi:
        return None
    return lo, hi


def _below_far_edge(q: Fraction, center: Fraction, radius2: Fraction) -> bool:
    """q < center + sqrt(radius2), exactly."""
    return q < center or (q - center) ** 2 < radius2


def _above_near_edge(q: Fraction, center: Fraction, radius2: Fraction) -> bool:
    """q > center - sqrt(radius2), exactly."""
    return q > center or (center - q) ** 2 < radius2


def _feasible(v: ChernCharacter, w: ChernCharacter, g: TiltWallGeometry, win: WallWindow) -> bool:
    """Is 0 < ch1^beta(w) < ch1^beta(v) somewhere on the wall inside the window?"""
    bounds = (None, None)
    for p, q in ((w.v1, -w.v0),                                   # ch1^beta(w) > 0
                 (v.v1 - w.v1, w.v0 - v.v0),                      # ch1^beta(v - w) > 0
                 (win.max_imaginary - w.v1, w.v0)):               # ch1^beta(w) < max_imaginary
        bounds = _restrict(bounds, p, q)
        if bounds is None:
            return False
    lo, hi = bounds

    if g.kind is WallKind.VERTICAL_RAY:
        return (win.beta_min <= g.beta <= win.beta_max
                and (lo is None or lo < g.beta) and (hi is None or g.beta < hi))

    lo = win.beta_min if lo is None else max(lo, win.beta_min)
    hi = win.beta_max if hi is None else min(hi, win.beta_max)
    return (lo < hi
            and _below_far_edge(lo, g.center, g.radius2)
            and _above_near_edge(hi, g.center, g.radius2))


def _half_integers(lo: Fraction, hi: Fraction) -> List[Fraction]:
    return [Fraction(k, 2) for k in range(ceil(2 * lo), floor(2 * hi) + 1)]


def _d_range(v: ChernCharacter, win: WallWindow, R: int, C: int) -> List[Fraction]:
    r, c, d = v.v0, v.v1, v.v2
    if R != 0:
        # 0 <= C^2 - 2RD <= max_qtilt
        ends = (Fraction(C * C, 2 * R), (C * C - win.max_qtilt) / (2 * R))
        return _half_integers(min(ends), max(ends))
    if r == 0 or C < 1 or C * C > win.max_qtilt:
        return []
    # q_tilt(v - w) >= 0 on one side, the wall staying on the side of L_v where ch1^beta(v) > 0 on the other
    if r > 0:
        values = _half_integers(d - (c - C) ** 2 / (2 * r), C * c / r)
        return [D for D in values if D < C * c / r]
    values = _half_integers(C * c / r, d + (c - C) ** 2 / (2 * -r))
    return [D for D in values if D > C * c / r]


def _walls_for_ranks(v: ChernCharacter, win: WallWindow,
                     ranks: List[int]) -> List[Tuple[ChernCharacter, TiltWallGeometry]]:
    found = []
    r, c = v.v0, v.v1
    for R in ranks:
        ends = (win.beta_min * R, win.beta_max * R)
        c_low = floor(min(ends)) + 1
        c_high = min(ceil(max(c + win.beta_min * (R - r), c + win.beta_max * (R - r))) - 1,
                     floor(win.max_imaginary + max(ends)))
        for C in range(c_low, c_high + 1):
            for D in _d_range(v, win, R, C):
                w = ChernCharacter(R, C, D, 0)
                if w.is_zero():
                    continue
                q_w = q_tilt(w)
                if q_w < 0 or q_w > win.max_qtilt or q_tilt(v - w) < 0:
                    continue
                g = tilt_wall(v, w)
                if g.kind in (WallKind.SEMICIRCLE, WallKind.VERTICAL_RAY) and _feasible(v, w, g, win):
                    found.append((w, g))
    return found


def _wall_sort_key(item: Tuple[ChernCharacter, TiltWallGeometry]):
    _, g = item
    if g.kind is WallKind.SEMICIRCLE:
        return (0, g.center, g.radius2)
    return (1, g.beta, Fraction(0))


def enumerate_tilt_walls(v: ChernCharacter, win: WallWindow, workers: int = 1,
                         chunk_size: int = 2) -> List[Tuple[ChernCharacter, TiltWallGeometry]]:
    """Candidate nu-walls for v inside the window, one representative w per wall."""
    if v.is_zero():
        raise StabilityError('ZeroCharacter', "cannot enumerate walls of the zero character")
    ranks = list(range(-win.max_rank, win.max_rank + 1))
    chunks = chunk_list(ranks, max(1, chunk_size))
    logger.info(f"Enumerating tilt walls of ({v}) over {len(ranks)} ranks with {workers} worker(s)")

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        batches = list(pool.map(lambda chunk: _walls_for_ranks(v, win, chunk), chunks))

    representatives: Dict[Tuple[Fraction, Fraction, Fraction], Tuple[ChernCharacter, TiltWallGeometry]] = {}
    for w, g in (item for batch in batches for item in batch):
        key = g.normalized_key()
        size = (sum(abs(x) for x in w.components), w.components)
        current = representatives.get(key)
        if current is None or size < (sum(abs(x) for x in current[0].components), current[0].components):
            representatives[key] = (w, g)

    walls = sorted(representatives.values(), key=_wall_sort_key)
    logger.info(f"Found {len(walls)} distinct tilt walls")
    return walls


@dataclass(frozen=True)
class SamplePoint:
    beta: Fraction
    root: SectionRoot
    branch: int

    def alpha_decimal(self, digits: int = 12) -> str:
        return self.root.alpha_decimal(digits)


def _vertical_position(poly: sp.Poly) -> Tuple[bool, Optional[Fraction]]:
    """For an a-free polynomial: (True, beta0) if it is linear in beta."""
    if any(j > 0 for (_, j), coeff in poly.terms() if coeff != 0):
        return False, None
    coefficients = {i: to_fraction(coeff) for (i, _), coeff in poly.terms()}
    if max((i for i, c in coefficients.items() if c != 0), default=0) != 1:
        return True, None
    return True, -coefficients.get(0, Fraction(0)) / coefficients[1]


def sample_curve(curve, beta_min: RationalLike, beta_max: RationalLike, n: int,
                 alpha_max: RationalLike = 4) -> List[SamplePoint]:
    """Sample a curve or wall at n evenly spaced rational beta values.

    ``curve`` is anything with ``as_poly()`` giving a polynomial of degree at
    most 2 in a. Curves that do not involve a are vertical segments and are
    sampled on an alpha grid up to ``alpha_max`` instead.
    """
    beta_min, beta_max, alpha_max = (parse_rational(x) for x in (beta_min, beta_max, alpha_max))
    if n < 2:
        raise StabilityError('InvalidParameter', f"need at least 2 samples, got {n}")
    if beta_min >= beta_max:
        raise StabilityError('EmptyRange', "beta range is empty")

    poly = curve.as_poly()
    a_free, vertical = _vertical_position(poly)
    if a_free:
        if vertical is None or not (beta_min <= vertical <= beta_max):
            return []
        return [SamplePoint(vertical, SectionRoot.exact((alpha_max * j / n) ** 2), 0)
                for j in range(1, n + 1)]

    points = []
    for i in range(n):
        beta = beta_min + (beta_max - beta_min) * i / (n - 1)
        a2, a1, a0 = _section_coefficients(poly, beta)
        for root in positive_roots(a2, a1, a0) or []:
            if a2 == 0:
                branch = 0
            elif root.is_rational:
                branch = 1 if root.center > -a1 / (2 * a2) else 0
            else:
                branch = 1 if root.sign > 0 else 0
            points.append(SamplePoint(beta, root, branch))
    return points
