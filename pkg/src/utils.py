"""
Utility functions for logging, configuration and exact rational I/O.
"""
import logging
import math
import os
import re
from fractions import Fraction
from typing import Dict, List, Optional, Union

import mpmath
import sympy as sp
import yaml

from src.errors import StabilityError

RationalLike = Union[int, str, Fraction]

_RATIONAL_RE = re.compile(r'^\s*([+-]?)\s*(\d+)\s*(?:/\s*(\d+))?\s*$')


def load_config(config_path: str = 'config/config.yaml') -> Dict:
    """Load the YAML configuration file."""
    with open(config_path, 'r') as f:
        return yaml.safe_load(f)


def setup_logging(config_path: str = 'config/config.yaml') -> logging.Logger:
    """Set up logging configuration."""
    config = load_config(config_path)
    log_config = config['logging']

    handlers: List[logging.Handler] = [logging.StreamHandler()]
    log_file = log_config.get('file')
    if log_file:
        # Create logs directory if it doesn't exist
        log_dir = os.path.dirname(log_file)
        if log_dir:
            os.makedirs(log_dir, exist_ok=True)
        handlers.insert(0, logging.FileHandler(log_file))

    # Handlers are rebuilt on every call so each CLI run writes to the
    # streams that are current at that moment.
    logging.basicConfig(
        level=log_config['level'],
        format=log_config['format'],
        handlers=handlers,
        force=True
    )

    return logging.getLogger(__name__)


def parse_rational(text: RationalLike) -> Fraction:
    """Parse an integer or "p/q" literal into an exact Fraction.

    Decimal literals are rejected so that no value silently loses exactness.
    """
    if isinstance(text, bool):
        raise StabilityError('MalformedRational', f"not a rational literal: {text!r}")
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    match = _RATIONAL_RE.match(str(text))
    if not match:
        raise StabilityError('MalformedRational', f"not a rational literal: {text!r}")
    sign, numerator, denominator = match.groups()
    if denominator is not None and int(denominator) == 0:
        raise StabilityError('MalformedRational', f"zero denominator in {text!r}")
    value = Fraction(int(numerator), int(denominator or 1))
    return -value if sign == '-' else value


def format_rational(value: Optional[Fraction]) -> str:
    """Render an exact value as "p/q"; None stands for +infinity."""
    if value is None:
        return 'inf'
    return str(Fraction(value))


def to_fraction(value) -> Fraction:
    """Convert sympy / ground-domain rationals back to Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, sp.Rational):
        return Fraction(int(value.p), int(value.q))
    # QQ elements (python or gmpy flavour) expose numerator/denominator
    return Fraction(int(value.numerator), int(value.denominator))


def to_sympy(value: Fraction) -> sp.Rational:
    value = Fraction(value)
    return sp.Rational(value.numerator, value.denominator)


def to_mpf(value: Fraction) -> mpmath.mpf:
    value = Fraction(value)
    return mpmath.mpf(value.numerator) / value.denominator


def exact_sqrt(value: Fraction) -> Optional[Fraction]:
    """Square root of a non-negative rational when it is rational."""
    value = Fraction(value)
    if value < 0:
        return None
    num_root = math.isqrt(value.numerator)
    den_root = math.isqrt(value.denominator)
    if num_root * num_root == value.numerator and den_root * den_root == value.denominator:
        return Fraction(num_root, den_root)
    return None


def format_decimal(value, digits: int = 12) -> str:
    """Decimal rendering with a fixed number of significant digits."""
    if isinstance(value, Fraction):
        with mpmath.workdps(digits + 10):
            return mpmath.nstr(to_mpf(value), digits)
    return mpmath.nstr(value, digits)


def read_candidates(filepath: str) -> List[str]:
    """Read a candidates file: one character literal per line, '#' comments."""
    lines = []
    try:
        with open(filepath, 'r', encoding='utf-8') as f:
            for raw in f:
                line = raw.split('#', 1)[0].strip()
                if line:
                    lines.append(line)
    except OSError as e:
        raise StabilityError('InputFileError', f"cannot read candidates file {filepath}: {e.strerror or e}")
    return lines


def chunk_list(data: List, chunk_size: int) -> List[List]:
    """Split a list into chunks of specified size."""
    return [data[i:i + chunk_size] for i in range(0, len(data), chunk_size)]
