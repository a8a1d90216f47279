"""Command-line front end.

Exit codes: 0 for a positive verdict, 1 for a negative one (or a fuzz
divergence), 2 for parse and usage errors, 3 when the oracle enumeration cap
is exceeded. The first stdout line is always the machine-parseable verdict.
"""

from __future__ import annotations

import argparse
import sys

from .fuzzing import fuzz_run
from .reductions import NonSingletonAssignmentError, emit_pdl_embedding
from .semantics import EnumerationCapError, evaluate, oracle_sat, parse_valuation
from .solver import model_check, sat, valid
from .syntax import ParseError, is_star_free, parse_formula


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dlpa",
        description="Decision procedures for a dynamic logic whose atomic "
                    "programs assign truth values to propositional atoms.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_formula(p):
        p.add_argument("formula",
                       help="formula text, or - to read standard input")

    def add_solver_flags(p):
        p.add_argument("--trace", action="store_true",
                       help="append the proof trace")
        p.add_argument("--algorithm", default="auto",
                       choices=["auto", "star-free", "full"])

    p = sub.add_parser("mc", help="model check a formula against a model")
    p.add_argument("--model", default="",
                   help="comma-separated true atoms, empty for the empty model")
    add_formula(p)
    add_solver_flags(p)
    p.set_defaults(func=_cmd_mc)

    p = sub.add_parser("sat", help="decide satisfiability")
    add_formula(p)
    add_solver_flags(p)
    p.set_defaults(func=_cmd_sat)

    p = sub.add_parser("valid", help="decide validity")
    add_formula(p)
    add_solver_flags(p)
    p.set_defaults(func=_cmd_valid)

    p = sub.add_parser("oracle-mc",
                       help="model check with the brute-force evaluator")
    p.add_argument("--model", default="")
    add_formula(p)
    p.set_defaults(func=_cmd_oracle_mc)

    p = sub.add_parser("oracle-sat",
                       help="decide satisfiability by model enumeration")
    add_formula(p)
    p.add_argument("--oracle-cap", type=int, default=20,
                   help="largest vocabulary the enumeration will accept")
    p.set_defaults(func=_cmd_oracle_sat)

    p = sub.add_parser("translate-pdl",
                       help="emit the equisatisfiable PDL problem")
    add_formula(p)
    p.set_defaults(func=_cmd_translate)

    p = sub.add_parser("fuzz",
                       help="random agreement check: oracle vs both solvers")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cases", type=int, default=100)
    p.add_argument("--max-atoms", type=int, default=3)
    p.add_argument("--max-len", type=int, default=20)
    p.add_argument("--starred", action="store_true",
                   help="allow iteration in generated programs")
    p.set_defaults(func=_cmd_fuzz)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=_cmd_serve)

    return parser


def _read_formula(args):
    text = sys.stdin.read() if args.formula == "-" else args.formula
    return parse_formula(text)


def _reject_starred(args, f) -> bool:
    if args.algorithm == "star-free" and not is_star_free(f):
        print("error: --algorithm star-free on a formula with iteration",
              file=sys.stderr)
        return True
    return False


def _report(answer: bool, positive: str, negative: str, verdict) -> int:
    print(positive if answer else negative)
    if verdict is not None and verdict.trace is not None:
        print(verdict.trace.serialize())
    return 0 if answer else 1


def _cmd_mc(args) -> int:
    v = parse_valuation(args.model)
    f = _read_formula(args)
    if _reject_starred(args, f):
        return 2
    verdict = model_check(v, f, args.algorithm, want_trace=args.trace)
    return _report(verdict.answer, "TRUE", "FALSE",
                   verdict if args.trace else None)


def _cmd_sat(args) -> int:
    f = _read_formula(args)
    if _reject_starred(args, f):
        return 2
    verdict = sat(f, args.algorithm, want_trace=args.trace)
    return _report(verdict.answer, "SAT", "UNSAT",
                   verdict if args.trace else None)


def _cmd_valid(args) -> int:
    f = _read_formula(args)
    if _reject_starred(args, f):
        return 2
    verdict = valid(f, args.algorithm, want_trace=args.trace)
    return _report(verdict.answer, "VALID", "INVALID",
                   verdict if args.trace else None)


def _cmd_oracle_mc(args) -> int:
    v = parse_valuation(args.model)
    f = _read_formula(args)
    return _report(evaluate(v, f), "TRUE", "FALSE", None)


def _cmd_oracle_sat(args) -> int:
    f = _read_formula(args)
    return _report(oracle_sat(f, cap=args.oracle_cap), "SAT", "UNSAT", None)


def _cmd_translate(args) -> int:
    f = _read_formula(args)
    print(emit_pdl_embedding(f))
    return 0


def _cmd_fuzz(args) -> int:
    agree, lines = fuzz_run(args.seed, args.cases, max_atoms=args.max_atoms,
                            max_len=args.max_len, starred=args.starred)
    print("\n".join(lines))
    return 0 if agree else 1


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app
    uvicorn.run(create_app(), host=args.host, port=args.port)
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return args.func(args)
    except ParseError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return 2
    except NonSingletonAssignmentError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except EnumerationCapError as e:
        print(f"error: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
