"""
Command dispatch: a CommandRequest in, a JSON-ready ResultDocument out.
"""
import logging
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, FrozenSet, Optional, Tuple

from src.asymptotics import (CurveClass, GsMode, Side, asym_compare_lambda, asym_compare_nu,
                             classify_left, classify_right, gs_compare, lambda_series,
                             limit_table_nu)
from src.chern import (ChernCharacter, delta, dual, hilbert_polynomial, iter_characters,
                       numerical_dimension, parse_character, q_bmt, q_tilt, reduced_hilbert,
                       tensor_line, twist)
from src.errors import StabilityError, usage_error
from src.figures import emit_figure, load_figure_spec
from src.params import HalfPlanePoint, StabilityParam
from src.slopes import compare_lambda, lambda_slope, mu_slope, nu_slope, region_classify
from src.utils import format_rational, parse_rational, read_candidates
from src.walls import (CurveKind, SectionRoot, WallWindow, bridgeland_wall, distinguished_curve,
                       enumerate_tilt_walls, tilt_wall, wall_apex, wall_section)

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1

DEFAULTS = {
    'output': {'schema_version': SCHEMA_VERSION, 'decimal_digits': 12},
    'sampling': {'points': 61, 'alpha_max': '4'},
    'enumeration': {'workers': 4, 'chunk_size': 2, 'max_rank': 6, 'max_imaginary': '50'},
    'asymptotics': {'series_depth': 6, 'c_gamma': '0'},
    'figures': {'presets': 'config/figures.yaml'},
}


@dataclass
class CommandRequest:
    """Subcommand path plus its flags, all values still strings."""
    path: Tuple[str, ...]
    flags: Dict[str, str] = field(default_factory=dict)


class _Context:
    def __init__(self, flags: Dict[str, str], config: Dict):
        self.flags = flags
        self.config = config

    def setting(self, section: str, key: str):
        return self.config.get(section, {}).get(key, DEFAULTS[section][key])

    @property
    def digits(self) -> int:
        return int(self.setting('output', 'decimal_digits'))

    def raw(self, name: str, required: bool = True) -> Optional[str]:
        value = self.flags.get(name)
        if value is None and required:
            raise usage_error(f"missing required flag --{name.replace('_', '-')}")
        return value

    def character(self, name: str) -> ChernCharacter:
        return parse_character(self.raw(name))

    def rational(self, name: str, default=None) -> Fraction:
        value = self.raw(name, required=default is None)
        return parse_rational(default if value is None else value)

    def integer(self, name: str, default: Optional[int] = None) -> int:
        value = self.raw(name, required=default is None)
        if value is None:
            return default
        number = parse_rational(value)
        if number.denominator != 1:
            raise StabilityError('MalformedRational', f"--{name} must be an integer, got {value}")
        return int(number)

    def point(self) -> HalfPlanePoint:
        beta = self.rational('beta')
        alpha2, alpha = self.flags.get('alpha2'), self.flags.get('alpha')
        if alpha2 is not None and alpha is not None:
            raise usage_error("give either --alpha2 or --alpha, not both")
        if alpha2 is not None:
            return HalfPlanePoint(beta, parse_rational(alpha2))
        if alpha is not None:
            return HalfPlanePoint.from_alpha(beta, alpha)
        raise usage_error("missing required flag --alpha2 (or --alpha)")

    def param(self) -> StabilityParam:
        return StabilityParam(self.rational('s'))

    def curve_class(self) -> CurveClass:
        side = self.raw('side')
        if side not in ('left', 'right'):
            raise usage_error(f"--side must be left or right, got {side!r}")
        return CurveClass(Side(side), self.rational('cgamma', self.setting('asymptotics', 'c_gamma')))


def _value(value) -> Dict:
    return {'value': value}


def _roots(roots, digits: int):
    return {'a': [str(r) for r in roots], 'roots': [r.as_dict(digits) for r in roots]}


# chern

def _chern_parse(ctx: _Context) -> Dict:
    v = ctx.character('ch')
    return {'value': v.as_list(), 'dimension': numerical_dimension(v)}


def _chern_twist(ctx: _Context) -> Dict:
    return _value(twist(ctx.character('ch'), ctx.rational('beta')).as_list())


def _chern_tensor(ctx: _Context) -> Dict:
    return _value(tensor_line(ctx.character('ch'), ctx.integer('k')).as_list())


def _chern_dual(ctx: _Context) -> Dict:
    return _value(dual(ctx.character('ch')).as_list())


def _chern_delta(ctx: _Context) -> Dict:
    value = delta(ctx.integer('i'), ctx.integer('j'), ctx.character('ch'), ctx.character('w'))
    return _value(format_rational(value))


def _chern_qtilt(ctx: _Context) -> Dict:
    return _value(format_rational(q_tilt(ctx.character('ch'))))


def _chern_qbmt(ctx: _Context) -> Dict:
    return _value(format_rational(q_bmt(ctx.character('ch'), ctx.point())))


def _chern_dimension(ctx: _Context) -> Dict:
    return _value(numerical_dimension(ctx.character('ch')))


def _hilbert(ctx: _Context) -> Dict:
    v = ctx.character('ch')
    p = hilbert_polynomial(v)
    result = {'coefficients': {f"c{i}": format_rational(c) for i, c in p.coefficients().items()},
              'polynomial': str(p.as_poly().as_expr())}
    if ctx.raw('k', required=False) is not None:
        result['reduced'] = str(reduced_hilbert(v, ctx.integer('k')).as_expr())
    return result


# slopes

def _slope_mu(ctx: _Context) -> Dict:
    return _value(str(mu_slope(ctx.character('ch'))))


def _slope_nu(ctx: _Context) -> Dict:
    return _value(str(nu_slope(ctx.character('ch'), ctx.point())))


def _slope_lambda(ctx: _Context) -> Dict:
    return _value(str(lambda_slope(ctx.character('ch'), ctx.point(), ctx.param())))


def _slope_compare(ctx: _Context) -> Dict:
    ordering = compare_lambda(ctx.character('ch'), ctx.character('u'), ctx.point(), ctx.param())
    return {'ordering': ordering.value}


def _region(ctx: _Context) -> Dict:
    return {'shift': int(region_classify(ctx.character('ch'), ctx.point()))}


# walls and curves

def _wall_tilt(ctx: _Context) -> Dict:
    return tilt_wall(ctx.character('v'), ctx.character('w')).as_dict()


def _wall_apex(ctx: _Context) -> Dict:
    v, w = ctx.character('v'), ctx.character('w')
    g = tilt_wall(v, w)
    apex = wall_apex(g, w)
    wall_apex(g, v)
    return {**apex.as_dict(), 'alpha_decimal': SectionRoot.exact(apex.a).alpha_decimal(ctx.digits)}


def _wall_bridgeland(ctx: _Context) -> Dict:
    return bridgeland_wall(ctx.character('v'), ctx.character('w'), ctx.param()).as_dict()


def _wall_section(ctx: _Context) -> Dict:
    wall = bridgeland_wall(ctx.character('v'), ctx.character('w'), ctx.param())
    beta = ctx.rational('beta')
    return {'beta': format_rational(beta), **_roots(wall_section(wall, beta), ctx.digits)}


def _curve(kind: CurveKind) -> Callable[[_Context], Dict]:
    def handler(ctx: _Context) -> Dict:
        s = ctx.param() if ctx.raw('s', required=False) is not None else None
        curve = distinguished_curve(kind, ctx.character('w'), s)
        result = curve.as_dict()
        if ctx.raw('beta', required=False) is not None:
            beta = ctx.rational('beta')
            roots = curve.section(beta)
            result['section'] = {'beta': format_rational(beta),
                                 **_roots(roots or [], ctx.digits),
                                 'vertical': roots is None}
        return result
    return handler


def _enumerate(ctx: _Context) -> Dict:
    window = WallWindow(
        beta_min=ctx.rational('beta_min'),
        beta_max=ctx.rational('beta_max'),
        max_imaginary=ctx.rational('max_imaginary', ctx.setting('enumeration', 'max_imaginary')),
        max_qtilt=ctx.rational('max_qtilt'),
        max_rank=ctx.integer('max_rank', int(ctx.setting('enumeration', 'max_rank'))),
    )
    walls = enumerate_tilt_walls(
        ctx.character('v'), window,
        workers=ctx.integer('workers', int(ctx.setting('enumeration', 'workers'))),
        chunk_size=int(ctx.setting('enumeration', 'chunk_size')),
    )
    return {'count': len(walls), 'walls': [{'w': w.as_list(), **g.as_dict()} for w, g in walls]}


# asymptotics

def _asym_compare(ctx: _Context) -> Dict:
    v, u, g = ctx.character('v'), ctx.character('u'), ctx.curve_class()
    slope = ctx.raw('slope', required=False) or 'lambda'
    if slope == 'nu':
        return asym_compare_nu(v, u, g).as_dict()
    if slope != 'lambda':
        raise usage_error(f"--slope must be nu or lambda, got {slope!r}")
    return asym_compare_lambda(v, u, g, ctx.param()).as_dict()


def _asym_classify(ctx: _Context) -> Dict:
    g = ctx.curve_class()
    candidates = list(iter_characters(read_candidates(ctx.raw('candidates'))))
    classify = classify_left if g.side is Side.LEFT else classify_right
    verdict = classify(ctx.character('v'), ctx.param(), candidates,
                       strict=ctx.raw('strict', required=False) == 'true', c_gamma=g.c_gamma)
    return {**verdict.as_dict(), 'side': g.side.value, 'candidates': len(candidates)}


def _asym_series(ctx: _Context) -> Dict:
    depth = ctx.integer('depth', int(ctx.setting('asymptotics', 'series_depth')))
    return lambda_series(ctx.character('v'), ctx.curve_class(), ctx.param(), depth).as_dict()


def _asym_limit(ctx: _Context) -> Dict:
    return limit_table_nu(ctx.character('v'), ctx.curve_class()).as_dict()


def _asym_gs(ctx: _Context) -> Dict:
    mode = ctx.raw('mode', required=False) or 'sub'
    modes = {'sub': GsMode.AGAINST_SUB, 'quotient': GsMode.AGAINST_QUOTIENT}
    if mode not in modes:
        raise usage_error(f"--mode must be sub or quotient, got {mode!r}")
    ordering = gs_compare(ctx.character('v'), ctx.character('u'), ctx.integer('k'), modes[mode])
    return {'ordering': ordering.value, 'mode': modes[mode].value}


# figures

def _plot(ctx: _Context) -> Dict:
    out = ctx.raw('out')
    output_format = os.path.splitext(out)[1].lstrip('.').lower()
    if output_format not in ('svg', 'csv'):
        raise usage_error(f"--out must end in .svg or .csv, got {out!r}")
    name, spec_path = ctx.raw('figure', required=False), ctx.raw('spec', required=False)
    if (name is None) == (spec_path is None):
        raise usage_error("give exactly one of --figure or --spec")
    samples = ctx.integer('samples', 0) or None
    if name is not None:
        spec = load_figure_spec(ctx.setting('figures', 'presets'), name, output_format, samples)
    else:
        spec = load_figure_spec(spec_path, None, output_format, samples)

    data = emit_figure(spec, ctx.digits)
    directory = os.path.dirname(out)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(out, 'wb') as f:
        f.write(data)
    logger.info(f"Wrote {len(data)} bytes to {out}")
    return {'out': out, 'format': output_format, 'figure': spec.name,
            'curves': [c.curve_id for c in spec.curves], 'bytes': len(data)}


_POINT = frozenset({'beta', 'alpha2', 'alpha'})
_ASYM = frozenset({'side', 'cgamma', 's', 'v'})

COMMANDS: Dict[Tuple[str, ...], Tuple[Callable[[_Context], Dict], FrozenSet[str]]] = {
    ('chern', 'parse'): (_chern_parse, frozenset({'ch'})),
    ('chern', 'twist'): (_chern_twist, frozenset({'ch', 'beta'})),
    ('chern', 'tensor'): (_chern_tensor, frozenset({'ch', 'k'})),
    ('chern', 'dual'): (_chern_dual, frozenset({'ch'})),
    ('chern', 'delta'): (_chern_delta, frozenset({'ch', 'w', 'i', 'j'})),
    ('chern', 'qtilt'): (_chern_qtilt, frozenset({'ch'})),
    ('chern', 'qbmt'): (_chern_qbmt, frozenset({'ch'}) | _POINT),
    ('chern', 'dimension'): (_chern_dimension, frozenset({'ch'})),
    ('hilbert',): (_hilbert, frozenset({'ch', 'k'})),
    ('slope', 'mu'): (_slope_mu, frozenset({'ch'})),
    ('slope', 'nu'): (_slope_nu, frozenset({'ch'}) | _POINT),
    ('slope', 'lambda'): (_slope_lambda, frozenset({'ch', 's'}) | _POINT),
    ('slope', 'compare'): (_slope_compare, frozenset({'ch', 'u', 's'}) | _POINT),
    ('region',): (_region, frozenset({'ch'}) | _POINT),
    ('wall', 'tilt'): (_wall_tilt, frozenset({'v', 'w'})),
    ('wall', 'apex'): (_wall_apex, frozenset({'v', 'w'})),
    ('wall', 'bridgeland'): (_wall_bridgeland, frozenset({'v', 'w', 's'})),
    ('wall', 'section'): (_wall_section, frozenset({'v', 'w', 's', 'beta'})),
    ('curve', 'theta'): (_curve(CurveKind.THETA), frozenset({'w', 's', 'beta'})),
    ('curve', 'l'): (_curve(CurveKind.L_LINE), frozenset({'w', 's', 'beta'})),
    ('curve', 'gamma'): (_curve(CurveKind.GAMMA), frozenset({'w', 's', 'beta'})),
    ('enumerate',): (_enumerate, frozenset({'v', 'beta_min', 'beta_max', 'max_qtilt',
                                            'max_imaginary', 'max_rank', 'workers'})),
    ('asym', 'compare'): (_asym_compare, _ASYM | {'u', 'slope'}),
    ('asym', 'classify'): (_asym_classify, _ASYM | {'candidates', 'strict'}),
    ('asym', 'series'): (_asym_series, _ASYM | {'depth'}),
    ('asym', 'limit'): (_asym_limit, frozenset({'side', 'cgamma', 'v'})),
    ('asym', 'gs'): (_asym_gs, frozenset({'v', 'u', 'k', 'mode'})),
    ('plot',): (_plot, frozenset({'figure', 'spec', 'out', 'samples'})),
}


def run(request: CommandRequest, config: Optional[Dict] = None) -> Dict:
    """Dispatch a request; raises StabilityError on usage or domain errors."""
    entry = COMMANDS.get(tuple(request.path))
    if entry is None:
        raise usage_error(f"unknown command {' '.join(request.path)!r}")
    handler, allowed = entry
    unknown = sorted(set(request.flags) - allowed)
    if unknown:
        raise usage_error(f"unknown flag(s) for {' '.join(request.path)}: "
                          + ', '.join(f"--{name.replace('_', '-')}" for name in unknown))

    config = config or {}
    payload = handler(_Context(dict(request.flags), config))
    schema_version = config.get('output', {}).get('schema_version', SCHEMA_VERSION)
    return {'schema_version': schema_version, 'command': ' '.join(request.path), **payload}
