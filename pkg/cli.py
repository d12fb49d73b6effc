#!/usr/bin/env python3
"""
cli.py — derived p-completion from the command line
Run:  python cli.py li --prime 2 "Prufer(2)"
Subcommands:
  complete         completion of a complex, engine against tower oracle
  li               L0 / L1 of a tame group
  ses              p-adic homotopy SES records of a spectrum or complex
  peq              p-equivalence test for a chain map (--map)
  em               completion of Eilenberg-MacLane factors
  space            completion of a formal space
  postnikov-check  completion against the limit over the Postnikov tower
  presheaf         sectionwise completion of a presheaf
  suite            seeded property suite
"""
import argparse
import json
import logging
import os
import sys

from app.services import CompletionService, SuiteService
from completion.abelian import check_prime
from completion.errors import (
    CompletionError, InvalidComparison, InvalidComplex, NoStabilization,
    ParseError, UnresolvedExtension,
)
from config import get_config, settings_of

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_PARSE = 2
EXIT_NO_STABILIZATION = 3
EXIT_UNRESOLVED = 4

EXIT_CODES = {
    ParseError: EXIT_PARSE,
    InvalidComplex: EXIT_PARSE,
    InvalidComparison: EXIT_PARSE,
    NoStabilization: EXIT_NO_STABILIZATION,
    UnresolvedExtension: EXIT_UNRESOLVED,
}

EPILOG = """exit codes:
  0  every check passed
  1  a check failed (or an internal verification failed)
  2  input does not parse or is not a valid complex / comparison
  3  the tower oracle did not stabilize within the stage budget
  4  an extension in a short exact sequence is not determined
"""

SUBCOMMANDS = ('complete', 'li', 'ses', 'peq', 'em', 'space', 'postnikov-check', 'presheaf', 'suite')


def exit_code_for(exc):
    for cls, code in EXIT_CODES.items():
        if isinstance(exc, cls):
            return code
    return EXIT_CHECK_FAILED


def prime_arg(text):
    try:
        return check_prime(int(text))
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a prime")


def stages_arg(text):
    value = int(text)
    if value < 3:
        raise argparse.ArgumentTypeError("stage budget must be >= 3")
    return value


def build_parser(settings):
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--prime", type=prime_arg, default=settings['DEFAULT_PRIME'])
    common.add_argument("--stages", type=stages_arg, default=settings['STAGE_BUDGET'],
                        help="tower oracle stage budget")
    common.add_argument("--seed", type=int, default=settings['SUITE_SEED'])
    common.add_argument("--format", choices=("text", "json"), default=settings['REPORT_FORMAT'])
    common.add_argument("--input", help="read the expression from this file")

    parser = argparse.ArgumentParser(
        prog="cli.py",
        description="Derived p-completion of tame groups, complexes, spaces and presheaves.",
        epilog=EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in SUBCOMMANDS:
        p = sub.add_parser(name, parents=[common], epilog=EPILOG,
                           formatter_class=argparse.RawDescriptionHelpFormatter)
        if name == 'peq':
            p.add_argument("--map", dest="map_text", help='e.g. "3: Z -> Z"')
        elif name == 'ses':
            p.add_argument("--degree", type=int)
        if name != 'suite':
            p.add_argument("expression", nargs="?")
    return parser


def read_expression(args):
    text = getattr(args, 'map_text', None) or getattr(args, 'expression', None)
    if args.input:
        with open(args.input, encoding='utf-8') as fh:
            text = fh.read()
    if not text:
        raise ValueError(f"{args.command} needs an expression or --input")
    return text


def run(args, settings):
    """Dispatch one command; returns the report record."""
    p = args.prime
    if args.command == 'suite':
        settings = dict(settings, STAGE_BUDGET=args.stages)
        return SuiteService.run(args.seed, settings)
    text = read_expression(args)
    if args.command == 'complete':
        return CompletionService.complete(text, p, args.stages)
    if args.command == 'li':
        return CompletionService.li(text, p)
    if args.command == 'ses':
        return CompletionService.ses(text, p, args.degree)
    if args.command == 'peq':
        return CompletionService.peq(text, p)
    if args.command == 'em':
        return CompletionService.em(text, p)
    if args.command == 'space':
        return CompletionService.space(text, p)
    if args.command == 'postnikov-check':
        return CompletionService.postnikov_check(text, p)
    return CompletionService.presheaf(text, p)


# ---------- Rendering ----------
def render_text(report):
    if report['command'] == 'suite':
        return render_suite(report)
    lines = []
    for key, value in report.items():
        if key == 'records':
            lines.append("records:")
            for r in value:
                middle = r['middle'] if r['middle'] is not None else '? (unresolved)'
                lines.append(f"  pi_{r['degree']}^p: 0 -> {r['left']} -> {middle} -> {r['right']} -> 0")
        elif isinstance(value, dict):
            lines.append(f"{key}:")
            for k, v in value.items():
                lines.append(f"  {k}: {v}")
        else:
            lines.append(f"{key}: {value}")
    return '\n'.join(lines)


def render_suite(report):
    lines = [f"Property suite (seed {report['seed']})", "=" * 50]
    for row in report['checks']:
        mark = "✅" if row['passed'] else "❌"
        extra = f", {row['skipped']} unresolved" if row['skipped'] else ""
        lines.append(f"{mark} {row['name']:<28} {row['total'] - row['failures']}/{row['total']}{extra}")
        if 'resolvable_share' in row:
            lines.append(f"   resolvable share: {row['resolvable_share']:.2%}")
        for detail in row['details'] if not row['passed'] else ():
            lines.append(f"   ⚠️ {detail}")
    lines.append("=" * 50)
    lines.append("ALL CHECKS PASSED" if report['passed'] else "SOME CHECKS FAILED")
    return '\n'.join(lines)


def render_json(report):
    if report['command'] == 'suite':
        lines = [json.dumps(dict(row, command='suite', seed=report['seed']), sort_keys=True)
                 for row in report['checks']]
        lines.append(json.dumps({'command': 'suite', 'seed': report['seed'],
                                 'passed': report['passed']}, sort_keys=True))
        return '\n'.join(lines)
    return json.dumps(report, sort_keys=True)


def main(argv=None):
    settings = settings_of(get_config(os.environ.get('PADIC_CONFIG')))
    logging.basicConfig(stream=sys.stderr, level=settings['LOG_LEVEL'],
                        format="%(levelname)s %(name)s: %(message)s")
    args = build_parser(settings).parse_args(argv)
    try:
        report = run(args, settings)
    except CompletionError as exc:
        print(f"error: {exc.kind}: {exc}", file=sys.stderr)
        if args.format == 'json':
            print(json.dumps(dict({'error': exc.kind, 'message': str(exc)}, **exc.details()), sort_keys=True))
        return exit_code_for(exc)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    print(render_json(report) if args.format == 'json' else render_text(report))
    return EXIT_OK if report['passed'] else EXIT_CHECK_FAILED


if __name__ == "__main__":
    sys.exit(main())
