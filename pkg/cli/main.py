# cli/main.py
"""
COMMAND-LINE ENTRY POINT
========================
python -m cli.main <subcommand> [flags]

SUBCOMMANDS:
- classify   base class, weak-greedy verdict and the place dump
- represent  eventually periodic representation of x
- verify     exact round trip of a stored representation
- alphabet   build (or validate) a digit alphabet and its cover certificate
- spectrum   level-n spectrum statistics, optional CSV dump
- attractor  cylinder covers and the origin-interior certificate
- crossval   consistency of the four equivalent conditions on samples

EXIT CODES:
  0 success, 1 negative verdict, 2 inconclusive / budget, 3 usage error
"""

import argparse
import csv
import json
import sys
from fractions import Fraction
from pathlib import Path

# Ensure the project root is importable when run as a script
PROJECT_ROOT = Path(__file__).resolve().parents[1]
if str(PROJECT_ROOT) not in sys.path:
    sys.path.insert(0, str(PROJECT_ROOT))

from engines.approximation import suggest_alphabet, validate_cover
from engines.attractor import (
    InteriorCertificate,
    SampleSpec,
    check_certificate,
    cross_validate_main2,
    cylinder_cover,
    origin_interior_certificate,
    represent_via_certificate,
)
from engines.classify_wg import weak_greedy_decision
from engines.exact_field import construct_field
from engines.places import build_place_system, classify_base
from engines.rep_engine import Policy, represent, verify
from engines.spectrum import (
    covering_radius,
    csv_header,
    density_test,
    enumerate_spectrum,
    min_gap,
    separation_bound,
    to_rows,
    window,
)
from utils.config import load_config
from utils.errors import NoAdmissibleDigit, NotMonic, PeriodicError, UsageError
from utils.logger import log_info
from utils.parsing import (
    parse_alphabet,
    parse_certificate,
    parse_element,
    parse_polynomial,
    parse_rational,
    parse_representation,
)


# flags whose values may start with "-" (digit ranges, negative rationals)
VALUE_FLAGS = ("--alphabet", "--x", "--sample", "--minpoly", "--prune", "--margin")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# -------------------------
# OUTPUT
# -------------------------
def _jsonable(value):
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def _emit(payload: dict, fmt: str, out) -> None:
    payload = _jsonable(payload)
    if fmt == "human":
        for key in sorted(payload):
            out.write(f"{key}: {json.dumps(payload[key], sort_keys=True)}\n")
        return
    out.write(json.dumps(payload, sort_keys=True, indent=2) + "\n")


def _setup(args):
    config = load_config().with_overrides(
        prec_start=args.prec_start, prec_max=args.prec_max, seed=args.seed,
        max_iters=getattr(args, "max_iters", None), max_level=getattr(args, "max_level", None),
        output_format=args.format, workers=args.workers,
    )
    field = construct_field(parse_polynomial(args.minpoly), args.root_index)
    ps = build_place_system(field, config, args.root_index)
    return config, field, ps


# -------------------------
# SUBCOMMANDS
# -------------------------
def cmd_classify(args, out) -> int:
    _, field, ps = _setup(args)
    payload = {"minpoly": list(field.min_poly.coefficients), "irreducibility": field.certificate, "places": ps.to_json()}
    try:
        verdict = weak_greedy_decision(field, ps)
        payload.update(verdict.to_json())
        payload.update(verdict.base_class.to_json())
    except NotMonic:
        payload.update(classify_base(field, ps).to_json())
        payload.update({"weak_greedy": False, "witnesses": []})
    _emit(payload, args.format, out)
    return 0


def cmd_represent(args, out) -> int:
    config, field, ps = _setup(args)
    alphabet = parse_alphabet(args.alphabet, field)
    x = parse_element(args.x, field)
    policy = Policy(mode=args.mode, max_iters=config.max_iters, epsilon=config.shift_epsilon)
    try:
        rep, trace = represent(x, alphabet, policy, ps)
    except NoAdmissibleDigit:
        if ps.has_unit_places() or ps.finite_s_beta:
            raise
        cert = origin_interior_certificate(ps, alphabet, config.max_level)
        if not isinstance(cert, InteriorCertificate):
            raise
        log_info(f"[CLI] first-fit stalled, using the level-{cert.n} interior certificate")
        rep, trace = represent_via_certificate(x, cert, ps, config.max_iters)
    payload = rep.to_json()
    payload.update({"verified": verify(rep, x), "steps": len(trace.digits), "m": trace.m, "block": trace.block})
    _emit(payload, args.format, out)
    return 0 if payload["verified"] else 1


def cmd_verify(args, out) -> int:
    rep = parse_representation(args.rep)
    x = parse_element(args.x, rep.field)
    ok = verify(rep, x)
    _emit({"verified": ok}, args.format, out)
    return 0 if ok else 1


def cmd_alphabet(args, out) -> int:
    _, field, ps = _setup(args)
    if args.alphabet:
        alphabet = parse_alphabet(args.alphabet, field)
    else:
        alphabet = suggest_alphabet(ps, args.mode, args.M)
    margin = parse_rational(args.margin) if args.margin else None
    cert = validate_cover(ps, alphabet, margin)
    _emit({"alphabet": alphabet.to_json(), "size": len(alphabet), "cover": cert.to_json()}, args.format, out)
    if not args.validate:
        return 0
    return {"certified": 0, "refuted": 1}.get(cert.verdict, 2)


def cmd_spectrum(args, out) -> int:
    config, field, ps = _setup(args)
    alphabet = parse_alphabet(args.alphabet, field)
    prune = parse_rational(args.prune) if args.prune else None
    level = enumerate_spectrum(ps, alphabet, args.level, prune)
    payload = {"n": level.n, "count": len(level), "pruned": level.pruned,
               "separation_bound": separation_bound(ps, alphabet)}
    if len(level) >= 2:
        payload["min_gap"] = list(min_gap(level, ps))
    payload["covering_radius"] = list(covering_radius(level, window(ps, args.level), ps))
    if args.density:
        payload["density"] = density_test(ps, alphabet, config.max_level).to_json()

    rows = to_rows(level, ps)
    if args.emit:
        with open(args.emit, "w", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(csv_header(ps))
            writer.writerows(rows)
        log_info(f"[Spectrum] wrote {len(rows)} points to {args.emit}")
    if args.format == "csv":
        writer = csv.writer(out)
        writer.writerow(csv_header(ps))
        writer.writerows(rows)
        return 0
    _emit(payload, args.format, out)
    return 0


def cmd_attractor(args, out) -> int:
    config, field, ps = _setup(args)
    alphabet = parse_alphabet(args.alphabet, field)
    payload, code = {}, 0
    if args.cylinder is not None:
        payload["cylinder"] = cylinder_cover(ps, alphabet, args.cylinder).to_json()
    if args.certificate:
        cert = parse_certificate(args.certificate, alphabet)
        ok = check_certificate(cert, ps)
        payload["check"] = ok
        code = 0 if ok else 1
    if args.check_origin or not payload:
        result = origin_interior_certificate(ps, alphabet, config.max_level)
        if isinstance(result, InteriorCertificate):
            payload["certificate"] = result.to_json()
            payload["replay"] = check_certificate(result, ps)
        else:
            payload["certificate"] = result.to_json()
            code = max(code, 1 if result.refuted else 2)
    _emit(payload, args.format, out)
    return code


def cmd_crossval(args, out) -> int:
    config, field, ps = _setup(args)
    alphabet = parse_alphabet(args.alphabet, field)
    explicit = tuple(parse_element(s, field) for s in (args.sample or []))
    spec = SampleSpec(count=args.samples, height=args.height, seed=config.seed, explicit=explicit)
    policy = Policy(mode=args.mode, max_iters=config.max_iters, epsilon=config.shift_epsilon)
    report = cross_validate_main2(ps, alphabet, spec, config.max_level, policy)
    _emit(report.to_json(), args.format, out)
    return 0 if report.consistent else 1


# -------------------------
# PARSER
# -------------------------
def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--minpoly", required=True, help='e.g. "x^4-x^3-x^2-x+1" or "[1,-1,-1,-1,1]"')
    common.add_argument("--root-index", type=int, default=None)
    common.add_argument("--prec-start", type=int, default=None)
    common.add_argument("--prec-max", type=int, default=None)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--workers", type=int, default=None)
    common.add_argument("--format", choices=("json", "csv", "human"), default="json")

    parser = _Parser(prog="periodic", description="Eventually periodic (beta, A)-representations")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("classify", parents=[common])
    p.set_defaults(handler=cmd_classify)

    p = sub.add_parser("represent", parents=[common])
    p.add_argument("--alphabet", required=True)
    p.add_argument("--x", required=True)
    p.add_argument("--mode", choices=("guaranteed", "empirical"), default="guaranteed")
    p.add_argument("--max-iters", type=int, default=None)
    p.set_defaults(handler=cmd_represent)

    p = sub.add_parser("verify")
    p.add_argument("--rep", required=True, help="representation JSON (file or inline)")
    p.add_argument("--x", required=True)
    p.add_argument("--format", choices=("json", "human"), default="json")
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser("alphabet", parents=[common])
    p.add_argument("--mode", choices=("guaranteed", "complex-pisot-bound", "integer-range"), default="guaranteed")
    p.add_argument("--M", type=int, default=None)
    p.add_argument("--alphabet", default=None, help="validate this alphabet instead of building one")
    p.add_argument("--validate", action="store_true")
    p.add_argument("--margin", default=None, help="required overlap for a certified verdict")
    p.set_defaults(handler=cmd_alphabet)

    p = sub.add_parser("spectrum", parents=[common])
    p.add_argument("--alphabet", required=True)
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--prune", default=None)
    p.add_argument("--emit", default=None, help="write the points as CSV")
    p.add_argument("--density", action="store_true")
    p.add_argument("--max-level", type=int, default=None)
    p.set_defaults(handler=cmd_spectrum)

    p = sub.add_parser("attractor", parents=[common])
    p.add_argument("--alphabet", required=True)
    p.add_argument("--check-origin", action="store_true")
    p.add_argument("--cylinder", type=int, default=None)
    p.add_argument("--certificate", default=None, help="re-check a stored certificate")
    p.add_argument("--max-level", type=int, default=None)
    p.set_defaults(handler=cmd_attractor)

    p = sub.add_parser("crossval", parents=[common])
    p.add_argument("--alphabet", required=True)
    p.add_argument("--samples", type=int, default=20)
    p.add_argument("--height", type=int, default=3)
    p.add_argument("--sample", action="append", help="explicit sample, repeatable")
    p.add_argument("--mode", choices=("guaranteed", "empirical"), default="guaranteed")
    p.add_argument("--max-iters", type=int, default=None)
    p.add_argument("--max-level", type=int, default=None)
    p.set_defaults(handler=cmd_crossval)
    return parser


def _attach_values(argv) -> list[str]:
    out, argv = [], list(argv)
    i = 0
    while i < len(argv):
        if argv[i] in VALUE_FLAGS and i + 1 < len(argv):
            out.append(f"{argv[i]}={argv[i + 1]}")
            i += 2
            continue
        out.append(argv[i])
        i += 1
    return out


def run(argv, out=None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(_attach_values(argv))
        if args.format == "csv" and args.command != "spectrum":
            raise UsageError("--format csv is only available for spectrum")
        return args.handler(args, out)
    except PeriodicError as e:
        log_info(f"[CLI] {type(e).__name__}: {e}")
        return e.exit_code


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
