#!/usr/bin/env python3
"""
Command line front end for the P^3 stability toolkit.

Every subcommand prints one JSON ResultDocument on standard output. Errors
are logged and then written as a JSON error document on the last line of
standard error; the exit status is 1 for usage errors and 2 for domain
errors.
"""
import argparse
import json
import os
import re
import sys
from typing import Dict, List, Optional

import yaml

# Add the project root directory to the Python path
project_root = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.insert(0, project_root)

from src.commands import COMMANDS, CommandRequest, run  # noqa: E402
from src.errors import StabilityError, usage_error  # noqa: E402
from src.utils import load_config, setup_logging  # noqa: E402

DEFAULT_CONFIG = 'config/config.yaml'
USAGE_CODES = ('UsageError', 'InputFileError')

COMMAND_HELP = {
    ('chern',): 'Chern character arithmetic',
    ('chern', 'parse'): 'Parse and validate a character',
    ('chern', 'twist'): 'Twisted character ch^beta',
    ('chern', 'tensor'): 'Character of E tensor O(k)',
    ('chern', 'dual'): 'Character of the derived dual',
    ('chern', 'delta'): 'The pairing delta_ij(ch, w)',
    ('chern', 'qtilt'): 'Bogomolov discriminant',
    ('chern', 'qbmt'): 'Generalized Bogomolov form at a point',
    ('chern', 'dimension'): 'Numerical dimension of the support',
    ('hilbert',): 'Hilbert polynomial, optionally reduced and truncated',
    ('slope',): 'Slopes at a point',
    ('slope', 'mu'): 'Mumford slope',
    ('slope', 'nu'): 'Tilt slope',
    ('slope', 'lambda'): 'Bridgeland slope',
    ('slope', 'compare'): 'Compare lambda slopes of two characters',
    ('region',): 'Shift of ch lying in the double-tilted heart',
    ('wall',): 'Numerical walls',
    ('wall', 'tilt'): 'nu-wall between two characters',
    ('wall', 'apex'): 'Top point of a semicircular nu-wall',
    ('wall', 'bridgeland'): 'Quartic lambda-wall between two characters',
    ('wall', 'section'): 'Points of a lambda-wall over a vertical line',
    ('curve',): 'Distinguished curves of a character',
    ('curve', 'theta'): 'Theta curve (Re Z^t = 0)',
    ('curve', 'l'): 'L line (ch1^beta = 0)',
    ('curve', 'gamma'): 'Gamma curve (Re Z_s = 0)',
    ('enumerate',): 'Candidate nu-walls inside a window',
    ('asym',): 'Asymptotic stability',
    ('asym', 'compare'): 'Eventual order of two slopes along an unbounded curve',
    ('asym', 'classify'): 'Asymptotic lambda-stability against candidates',
    ('asym', 'series'): 'Laurent expansion of lambda at infinity',
    ('asym', 'limit'): 'Limit of nu / tau along an unbounded curve',
    ('asym', 'gs'): 'Truncated Gieseker comparison',
    ('plot',): 'Emit a figure as SVG or CSV',
}

FLAG_HELP = {
    'ch': 'Character "v0,v1,v2,v3"',
    'v': 'Character "v0,v1,v2,v3"',
    'w': 'Second character "w0,w1,w2,w3"',
    'u': 'Second character "u0,u1,u2,u3"',
    'beta': 'Rational beta, e.g. -1/2',
    'alpha2': 'Rational a = alpha^2 > 0',
    'alpha': 'Rational alpha > 0 (squared on input)',
    's': 'Rational s > 0',
    'k': 'Integer',
    'i': 'Index i of delta_ij',
    'j': 'Index j of delta_ij',
    'side': 'left or right',
    'cgamma': 'Rational c_gamma in [0, 1) (default from config)',
    'slope': 'lambda (default) or nu',
    'candidates': 'File with one character per line, # comments',
    'strict': 'Treat equal slopes as destabilizing',
    'depth': 'Number of series terms (default from config)',
    'mode': 'sub (default) or quotient',
    'beta_min': 'Left end of the beta window',
    'beta_max': 'Right end of the beta window',
    'max_qtilt': 'Upper bound for the discriminant of candidates',
    'max_imaginary': 'Upper bound for ch1^beta of candidates (default from config)',
    'max_rank': 'Bound on |rank| of candidates (default from config)',
    'workers': 'Threads used for enumeration (default from config)',
    'figure': 'Preset name from the figures file',
    'spec': 'YAML file describing one figure',
    'out': 'Output file ending in .svg or .csv',
    'samples': 'Samples per curve (default from the figure)',
}

_NEGATIVE_VALUE = re.compile(r'^-\d')


class CommandLineParser(argparse.ArgumentParser):
    """ArgumentParser that reports problems as UsageError instead of exiting."""

    def __init__(self, *args, **kwargs):
        kwargs.setdefault('allow_abbrev', False)
        super().__init__(*args, **kwargs)

    def error(self, message):
        raise usage_error(message)


def merge_negative_values(argv: List[str]) -> List[str]:
    """Join '--flag -1/2' into '--flag=-1/2' so negative literals are not read as options."""
    merged: List[str] = []
    for token in argv:
        previous = merged[-1] if merged else ''
        if previous.startswith('--') and '=' not in previous and _NEGATIVE_VALUE.match(token):
            merged[-1] = f"{previous}={token}"
        else:
            merged.append(token)
    return merged


def config_path_from(argv: List[str]) -> str:
    """The --config value, found before the full parse so logging is ready for parse errors."""
    for index, token in enumerate(argv):
        if token == '--config' and index + 1 < len(argv):
            return argv[index + 1]
        if token.startswith('--config='):
            return token.split('=', 1)[1]
    return DEFAULT_CONFIG


def _add_flag(parser: argparse.ArgumentParser, name: str) -> None:
    option = f"--{name.replace('_', '-')}"
    if name == 'strict':
        parser.add_argument(option, dest=name, action='store_const', const='true', help=FLAG_HELP[name])
    else:
        parser.add_argument(option, dest=name, default=None, help=FLAG_HELP.get(name))


def _add_config(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--config', default=argparse.SUPPRESS,
                        help=f"Path to configuration file (default {DEFAULT_CONFIG})")


def build_parser() -> CommandLineParser:
    parser = CommandLineParser(
        prog='stability.py',
        description='Exact slopes, walls and asymptotic stability for Chern characters on P^3')
    _add_config(parser)
    commands = parser.add_subparsers(dest='command', required=True)

    groups: Dict[str, argparse._SubParsersAction] = {}
    for path, (_, flags) in COMMANDS.items():
        if len(path) == 1:
            sub = commands.add_parser(path[0], help=COMMAND_HELP.get(path))
        else:
            if path[0] not in groups:
                group = commands.add_parser(path[0], help=COMMAND_HELP.get(path[:1]))
                groups[path[0]] = group.add_subparsers(dest='action', required=True)
            sub = groups[path[0]].add_parser(path[1], help=COMMAND_HELP.get(path))
        _add_config(sub)
        for flag in sorted(flags):
            _add_flag(sub, flag)
    return parser


def parse_args(argv: List[str]) -> CommandRequest:
    """Parse command line arguments into a CommandRequest."""
    args = build_parser().parse_args(argv)
    path = (args.command,) if getattr(args, 'action', None) is None else (args.command, args.action)
    _, allowed = COMMANDS[path]
    flags = {name: getattr(args, name) for name in allowed if getattr(args, name, None) is not None}
    return CommandRequest(path, flags)


def main(argv: Optional[List[str]] = None) -> int:
    """Run one subcommand and return the exit status."""
    argv = merge_negative_values(list(sys.argv[1:] if argv is None else argv))
    config_path = config_path_from(argv)
    try:
        logger = setup_logging(config_path)
        config = load_config(config_path)
    except (OSError, KeyError, TypeError, yaml.YAMLError) as e:
        error = usage_error(f"cannot load configuration {config_path}: {str(e)}")
        print(json.dumps(error.as_dict(), sort_keys=True), file=sys.stderr)
        return 1

    try:
        request = parse_args(argv)
        logger.debug(f"Running {' '.join(request.path)} with {request.flags}")
        document = run(request, config)
    except StabilityError as e:
        logger.error(f"Error during command: {e.code}: {e.message}")
        print(json.dumps(e.as_dict(), sort_keys=True), file=sys.stderr)
        return 1 if e.code in USAGE_CODES else 2

    print(json.dumps(document, sort_keys=True, indent=2))
    return 0


if __name__ == '__main__':
    sys.exit(main())
