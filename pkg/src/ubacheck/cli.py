"""Command-line front end.

Exit codes: 0 success, 1 usage or precondition error, 2 ambiguous
automaton, 3 parse error, 4 numeric failure. Results go to stdout,
diagnostics to stderr. ``UBA_CHECK_LOG`` sets the log level (e.g. INFO).
"""

import argparse
import json
import logging
import os
import sys
from fractions import Fraction

from . import generators
from .automata import verify_unambiguous
from .engine import (
    AmbiguousAutomatonError,
    NumericError,
    Options,
    measure,
    sample,
)
from .hoa import HoaError, parse_hoa, to_hoa
from .markov import DtmcError, parse_dtmc, serialize_dtmc, uniform_chain
from .oracle import OracleError, powerset_absorption_oracle
from .product import ProductError, to_dot

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_AMBIGUOUS = 2
EXIT_PARSE = 3
EXIT_NUMERIC = 4

log = logging.getLogger("ubacheck")


def _read(path):
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _inputs(args):
    nba = parse_hoa(_read(args.hoa))
    if args.uniform:
        if args.dtmc:
            raise UsageError("give either a chain file or --uniform, not both")
        return nba, uniform_chain(nba.alphabet), True
    if not args.dtmc:
        raise UsageError("a chain file or --uniform is required")
    return nba, parse_dtmc(_read(args.dtmc)), False


class UsageError(Exception):
    pass


def _word(nba, syms):
    return " ".join(nba.alphabet.name(s) or "-" for s in syms) or "(empty)"


def _print_witness(nba, w):
    print("ambiguous: two accepting runs on the lasso", file=sys.stderr)
    print(f"  prefix: {_word(nba, w.prefix)}", file=sys.stderr)
    print(f"  cycle:  {_word(nba, w.cycle)}", file=sys.stderr)
    for i, run in enumerate(w.runs, 1):
        print(f"  run {i}: " + " ".join(nba.state_name(q) for q in run), file=sys.stderr)


def _fmt_prob(p):
    return f"{p:.12f}"


def _options(args):
    try:
        return Options(
            method=args.method,
            epsilon=args.epsilon,
            max_iter=args.max_iter,
            rank_tol=args.rank_tol,
            trust_unambiguous=args.trust_unambiguous,
            workers=args.workers,
        )
    except ValueError as e:
        raise UsageError(str(e)) from None


def cmd_measure(args):
    nba, dtmc, uniform = _inputs(args)
    opts = _options(args)
    res = measure(dtmc, nba, opts, uniform=uniform)
    if args.product_dot and res.product is not None:
        alive = res.dag.alive if res.dag is not None else None
        with open(args.product_dot, "w", encoding="utf-8") as fh:
            fh.write(to_dot(res.product, alive))
    if args.emit_cut:
        for rep in res.sccs:
            if rep.cut is None:
                continue
            prod = res.product
            word = " ".join(prod.dtmc.state_name(t) for t in rep.cut.word) or "(empty)"
            members = " ".join(prod.label(v) for v in sorted(rep.cut.members))
            print(f"scc {rep.id}: anchor {prod.label(rep.cut.anchor)}", file=sys.stderr)
            print(f"  word: {word}", file=sys.stderr)
            print(f"  members ({len(rep.cut.members)}): {members}", file=sys.stderr)
    if args.json:
        print(json.dumps(res.to_json(), indent=2))
    else:
        print(_fmt_prob(res.probability))
    for rep in res.sccs:
        log.info(
            "scc %d: size %d positive %s cut %s iterations %d (%s)",
            rep.id, rep.size, rep.positive, rep.cut_size, rep.iterations, rep.method,
        )
    return EXIT_OK


def cmd_gen(args):
    family = args.family
    needs_k = family in ("complete", "nearly-complete", "fig1-left")
    if needs_k and args.k is None:
        raise UsageError(f"family {family} needs k")
    if not needs_k and args.k is not None:
        raise UsageError(f"family {family} takes no k")
    try:
        out = generators.generate(family, args.k)
    except ValueError as e:
        raise UsageError(str(e)) from None
    nba, chain = out if isinstance(out, tuple) else (out, None)
    name = family if args.k is None else f"{family}-{args.k}"
    hoa = to_hoa(nba, name)
    if args.output:
        with open(args.output + ".hoa", "w", encoding="utf-8") as fh:
            fh.write(hoa)
        if chain is not None:
            with open(args.output + ".dtmc", "w", encoding="utf-8") as fh:
                fh.write(serialize_dtmc(chain))
        return EXIT_OK
    sys.stdout.write(hoa)
    if chain is not None:
        sys.stdout.write(serialize_dtmc(chain))
    return EXIT_OK


def cmd_oracle(args):
    nba, dtmc, _ = _inputs(args)
    p = powerset_absorption_oracle(nba, dtmc)
    if isinstance(p, Fraction):
        print(f"{p} (= {_fmt_prob(float(p))})")
    else:
        print(_fmt_prob(p))
    return EXIT_OK


def cmd_check(args):
    nba = parse_hoa(_read(args.hoa))
    rep = verify_unambiguous(nba)
    if rep.unambiguous:
        print("unambiguous")
        return EXIT_OK
    print("ambiguous")
    _print_witness(nba, rep.witness)
    return EXIT_AMBIGUOUS


def cmd_almost_universal(args):
    nba = parse_hoa(_read(args.hoa))
    res = measure(uniform_chain(nba.alphabet), nba, _options(args), uniform=True)
    print("true" if res.probability >= 1 - 1e-9 else "false")
    return EXIT_OK


def cmd_simulate(args):
    nba, dtmc, _ = _inputs(args)
    if args.samples < 1 or args.horizon < 1:
        raise UsageError("samples and horizon must be positive")
    res = sample(dtmc, nba, args.samples, args.horizon, args.seed)
    print(f"lower {_fmt_prob(res.lower)}")
    print(f"upper {_fmt_prob(res.upper)}")
    print(
        f"{res.samples} paths, horizon {res.horizon}: {res.accepted} surely accepted, "
        f"{res.blocked} blocked",
        file=sys.stderr,
    )
    return EXIT_OK


def _add_inputs(p):
    p.add_argument("hoa", help="automaton in HOA format ('-' for stdin)")
    p.add_argument("dtmc", nargs="?", help="Markov chain file")
    p.add_argument("--uniform", action="store_true", help="use the uniform chain over the alphabet")


def _add_numeric(p):
    p.add_argument("--method", choices=("power", "rank"), default="power")
    p.add_argument("--epsilon", type=float, default=1e-10)
    p.add_argument("--max-iter", type=int, default=10**6)
    p.add_argument("--rank-tol", type=float, default=1e-9)
    p.add_argument("--trust-unambiguous", action="store_true", help="skip the unambiguity check")
    p.add_argument("--workers", type=int, default=1)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="uba-check",
        description="Probability that a Markov chain satisfies an unambiguous Büchi automaton.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("measure", help="compute the acceptance probability")
    _add_inputs(p)
    _add_numeric(p)
    p.add_argument("--emit-cut", action="store_true", help="print the cuts to stderr")
    p.add_argument("--json", action="store_true", help="print a JSON report instead")
    p.add_argument("--product-dot", metavar="PATH", help="write the pruned product as DOT")
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("gen", help="print a fixture automaton")
    p.add_argument("family", choices=generators.FAMILIES)
    p.add_argument("k", nargs="?", type=int)
    p.add_argument("-o", "--output", metavar="PREFIX", help="write PREFIX.hoa (and PREFIX.dtmc)")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("oracle", help="powerset-absorption ground truth")
    _add_inputs(p)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("check", help="check unambiguity")
    p.add_argument("hoa")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("almost-universal", help="decide almost-universality")
    p.add_argument("hoa")
    _add_numeric(p)
    p.set_defaults(func=cmd_almost_universal)

    p = sub.add_parser("simulate", help="Monte Carlo bounds (sanity check only)")
    _add_inputs(p)
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--horizon", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None):
    level = os.environ.get("UBA_CHECK_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except AmbiguousAutomatonError as e:
        _print_witness(e.nba, e.witness)
        return EXIT_AMBIGUOUS
    except (HoaError, DtmcError) as e:
        print(f"parse error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except NumericError as e:
        print(f"numeric failure: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except (UsageError, OracleError, ProductError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
