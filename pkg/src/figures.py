"""
Figure emission: sampled curves and walls written as CSV or SVG.
"""
import csv
import io
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

import matplotlib
matplotlib.use('Agg')
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
import yaml  # noqa: E402

from src.chern import ChernCharacter, parse_character  # noqa: E402
from src.errors import StabilityError  # noqa: E402
from src.params import StabilityParam  # noqa: E402
from src.utils import format_decimal, parse_rational  # noqa: E402
from src.walls import (CurveKind, SamplePoint, bridgeland_wall, distinguished_curve,  # noqa: E402
                       sample_curve, tilt_wall)

logger = logging.getLogger(__name__)

CURVE_KINDS = ('l', 'theta', 'gamma', 'tilt_wall', 'bridgeland_wall')
OUTPUT_FORMATS = ('svg', 'csv')

# Fixed ids and no timestamp keep the SVG byte-stable.
SVG_RC = {
    'svg.hashsalt': 'p3walls',
    'svg.fonttype': 'none',
    'path.simplify': False,
}


@dataclass(frozen=True)
class CurveRequest:
    curve_id: str
    kind: str
    w: ChernCharacter
    v: Optional[ChernCharacter] = None
    s: Optional[Fraction] = None
    label: Optional[str] = None

    def __post_init__(self):
        if self.kind not in CURVE_KINDS:
            raise StabilityError('InvalidParameter', f"unknown curve kind {self.kind!r}")
        if self.kind in ('tilt_wall', 'bridgeland_wall') and self.v is None:
            raise StabilityError('InvalidParameter', f"{self.kind} {self.curve_id!r} needs v")


@dataclass(frozen=True)
class FigureSpec:
    name: str
    curves: Tuple[CurveRequest, ...]
    beta_min: Fraction
    beta_max: Fraction
    samples: int = 61
    alpha_max: Fraction = Fraction(4)
    output_format: str = 'csv'
    title: str = ''

    def __post_init__(self):
        object.__setattr__(self, 'beta_min', parse_rational(self.beta_min))
        object.__setattr__(self, 'beta_max', parse_rational(self.beta_max))
        object.__setattr__(self, 'alpha_max', parse_rational(self.alpha_max))
        if not self.curves:
            raise StabilityError('InvalidParameter', f"figure {self.name!r} has no curves")
        if self.beta_min >= self.beta_max:
            raise StabilityError('EmptyRange', f"figure {self.name!r} has an empty beta range")
        if self.samples < 2:
            raise StabilityError('InvalidParameter', "a figure needs at least 2 samples per curve")
        if self.output_format not in OUTPUT_FORMATS:
            raise StabilityError('InvalidParameter', f"unknown output format {self.output_format!r}")


def _optional_character(data: Dict, key: str) -> Optional[ChernCharacter]:
    return parse_character(data[key]) if data.get(key) is not None else None


def figure_spec_from_dict(name: str, data: Dict, output_format: str = 'csv',
                          samples: Optional[int] = None) -> FigureSpec:
    """Build a FigureSpec from the mapping of one figure in a YAML file."""
    curves = tuple(
        CurveRequest(
            curve_id=str(item['id']),
            kind=str(item['kind']),
            w=parse_character(item['w']),
            v=_optional_character(item, 'v'),
            s=parse_rational(item['s']) if item.get('s') is not None else None,
            label=item.get('label'),
        )
        for item in data.get('curves', [])
    )
    return FigureSpec(
        name=name,
        curves=curves,
        beta_min=data['beta_min'],
        beta_max=data['beta_max'],
        samples=int(samples if samples is not None else data.get('samples', 61)),
        alpha_max=data.get('alpha_max', 4),
        output_format=output_format,
        title=str(data.get('title', name)),
    )


def load_figure_spec(path: str, name: Optional[str] = None, output_format: str = 'csv',
                     samples: Optional[int] = None) -> FigureSpec:
    """Load a preset (by name) from a presets file, or a single-figure file."""
    try:
        with open(path, 'r') as f:
            data = yaml.safe_load(f)
    except (OSError, yaml.YAMLError) as e:
        raise StabilityError('InputFileError', f"cannot read figure file {path}: {e}")
    if not isinstance(data, dict):
        raise StabilityError('InputFileError', f"figure file {path} does not hold a mapping")
    if name is not None:
        if name not in data:
            raise StabilityError('InvalidParameter', f"no figure preset named {name!r}")
        data = data[name]
    try:
        return figure_spec_from_dict(name or str(data.get('name', 'figure')), data, output_format, samples)
    except (KeyError, TypeError, AttributeError) as e:
        raise StabilityError('InputFileError', f"figure file {path} is missing or misuses {e}")


def build_curve(request: CurveRequest):
    """Turn one curve entry of a figure into the curve object it names."""
    if request.kind == 'l':
        return distinguished_curve(CurveKind.L_LINE, request.w)
    if request.kind == 'theta':
        return distinguished_curve(CurveKind.THETA, request.w)
    s = StabilityParam(request.s) if request.s is not None else None
    if request.kind == 'gamma':
        return distinguished_curve(CurveKind.GAMMA, request.w, s)
    if request.kind == 'tilt_wall':
        return tilt_wall(request.v, request.w)
    if s is None:
        raise StabilityError('MissingS', f"bridgeland wall {request.curve_id!r} needs s")
    return bridgeland_wall(request.v, request.w, s)


def sample_figure(spec: FigureSpec) -> Dict[str, List[SamplePoint]]:
    """Sample every curve of the figure over its beta window, keyed by curve id."""
    return {request.curve_id: sample_curve(build_curve(request), spec.beta_min, spec.beta_max,
                                           spec.samples, spec.alpha_max)
            for request in spec.curves}


def _csv_bytes(samples: Dict[str, List[SamplePoint]], digits: int) -> bytes:
    rows = sorted(((curve_id, point) for curve_id, points in samples.items() for point in points),
                  key=lambda row: (row[0], row[1].beta, row[1].root.to_mpf(digits)))
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(['curve_id', 'beta', 'alpha'])
    for curve_id, point in rows:
        writer.writerow([curve_id, format_decimal(point.beta, digits), point.alpha_decimal(digits)])
    return buffer.getvalue().encode('utf-8')


def _branch_polyline(points: List[SamplePoint], step: Fraction, digits: int):
    """x/y arrays for one curve, NaN-separated between branches and gaps."""
    xs: List[float] = []
    ys: List[float] = []
    for branch in sorted({p.branch for p in points}):
        previous = None
        for point in sorted((p for p in points if p.branch == branch),
                            key=lambda p: (p.beta, p.root.to_mpf(digits))):
            if xs and (previous is None or point.beta - previous > step):
                xs.append(np.nan)
                ys.append(np.nan)
            xs.append(float(point.beta))
            ys.append(float(point.alpha_decimal(digits)))
            previous = point.beta
    return np.array(xs, dtype=float), np.array(ys, dtype=float)


def _svg_bytes(spec: FigureSpec, samples: Dict[str, List[SamplePoint]], digits: int) -> bytes:
    step = (spec.beta_max - spec.beta_min) / (spec.samples - 1) * Fraction(3, 2)
    buffer = io.BytesIO()
    with plt.rc_context(SVG_RC):
        fig, ax = plt.subplots(figsize=(6, 4.5))
        for request in spec.curves:
            xs, ys = _branch_polyline(samples[request.curve_id], step, digits)
            line, = ax.plot(xs, ys, label=request.label or request.curve_id, linewidth=1.2)
            line.set_gid(request.curve_id)
        ax.set_xlim(float(spec.beta_min), float(spec.beta_max))
        ax.set_ylim(bottom=0)
        ax.set_xlabel('beta')
        ax.set_ylabel('alpha')
        ax.set_title(spec.title)
        ax.legend(loc='upper right', fontsize='small')
        fig.savefig(buffer, format='svg', metadata={'Date': None})
        plt.close(fig)
    return buffer.getvalue()


def emit_figure(spec: FigureSpec, digits: int = 12) -> bytes:
    """Render a figure spec as CSV or SVG bytes; identical specs give identical bytes."""
    samples = sample_figure(spec)
    logger.info(f"Sampled {sum(len(p) for p in samples.values())} points for {spec.name}")
    if spec.output_format == 'csv':
        return _csv_bytes(samples, digits)
    return _svg_bytes(spec, samples, digits)
