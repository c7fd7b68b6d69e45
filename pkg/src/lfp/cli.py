"""Command line front door.

Exit codes: 0 success, 1 input error, 2 stratification failure, 3 the model
given to `oracle` does not satisfy the program, 4 solver/reference mismatch
under --oracle. Results go to stdout, diagnostics to stderr.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import csp as csp_mod
from . import ctl as ctl_mod
from . import dataflow as df_mod
from .engine import solve, solve_detailed
from .errors import LfpError, StratificationError
from .parser import parse_program
from .printer import parse_model, print_model
from .semantics import sat_layers
from .stratify import check_stratification

OK, INPUT_ERROR, NOT_STRATIFIED, UNSAT, MISMATCH = 0, 1, 2, 3, 4


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise LfpError(f"cannot read {path}: {exc.strerror or exc}")


def cmd_check(args) -> int:
    formula = parse_program(_read(args.file))
    try:
        ranks = check_stratification(formula)
    except StratificationError as exc:
        print(f"not stratified (rule {exc.bullet}): {exc}", file=sys.stderr)
        return NOT_STRATIFIED
    for rel in sorted(ranks.relations()):
        print(f"{rel}\t{ranks.rank(rel)}\t{ranks.kind(rel)}")
    return OK


def cmd_solve(args) -> int:
    formula = parse_program(_read(args.file))
    try:
        rho, stats = solve_detailed(formula)
    except StratificationError as exc:
        print(f"not stratified (rule {exc.bullet}): {exc}", file=sys.stderr)
        return NOT_STRATIFIED
    if args.stats:
        for st in stats:
            print(f"# layer\t{st.index}\t{st.kind}\tk\t{st.depth}\tclauses\t{st.ground_clauses}")
    sys.stdout.write(print_model(rho, formula.universe))
    return OK


def cmd_oracle(args) -> int:
    formula = parse_program(_read(args.file))
    rho = parse_model(_read(args.model), formula)
    verdicts = sat_layers(rho, formula)
    facts_ok = all(tuples <= rho[rel] for rel, tuples in formula.facts.items())
    print(f"facts\t{'SAT' if facts_ok else 'UNSAT'}")
    for i, ok in enumerate(verdicts, 1):
        print(f"layer {i}\t{'SAT' if ok else 'UNSAT'}")
    return OK if facts_ok and all(verdicts) else UNSAT


def cmd_dataflow(args) -> int:
    cfg = df_mod.parse_cfg(_read(args.file))
    formula = df_mod.dataflow_formula(cfg, args.direction, args.modality)
    solved = df_mod.analysis_result(solve(formula), cfg)
    rho = {"A": frozenset((n, x) for n, xs in solved.items() for x in xs)}
    sys.stdout.write(print_model(rho, formula.universe))
    if args.oracle:
        reference = df_mod.dataflow_oracle(cfg, args.direction, args.modality)
        if reference != solved:
            _report_mismatch(solved, reference)
            return MISMATCH
    return OK


def cmd_csp(args) -> int:
    csp = csp_mod.parse_csp(_read(args.file))
    formula = csp_mod.csp_formula(csp, style=args.style)
    solved = csp_mod.csp_domains(solve(formula), csp)
    rho = {csp_mod.domain_relation(csp, i): frozenset((v,) for v in solved[var])
           for i, var in enumerate(csp.variables)}
    sys.stdout.write(print_model(rho, csp.universe))
    if args.oracle:
        reference = csp_mod.ac3_oracle(csp)
        if reference != solved:
            _report_mismatch(solved, reference)
            return MISMATCH
    return OK


def cmd_ctl(args) -> int:
    ts = ctl_mod.parse_kripke(_read(args.file))
    phi = ctl_mod.parse_ctl(args.formula)
    compiled = ctl_mod.ctl_compile(phi, ts)
    solved = ctl_mod.sat_states(solve(compiled.formula), compiled)
    rho = {"sat": frozenset((s,) for s in solved)}
    sys.stdout.write(print_model(rho, compiled.formula.universe))
    if args.oracle:
        reference = ctl_mod.ctl_oracle(phi, ts)
        if reference != solved:
            _report_mismatch(solved, reference)
            return MISMATCH
    return OK


def cmd_report(args) -> int:
    from .report import DEFAULT_SIZES, run_report
    sizes = DEFAULT_SIZES
    if args.sizes:
        try:
            sizes = tuple(int(p) for p in args.sizes.split(","))
        except ValueError:
            raise LfpError(f"bad --sizes value {args.sizes!r}")
    tsv, png = run_report(Path(args.out), sizes=sizes, repeats=args.repeats)
    print(f"wrote {tsv}")
    print(f"wrote {png}")
    return OK


def _report_mismatch(solved, reference) -> None:
    print("solver and reference disagree:", file=sys.stderr)
    print(f"  solver:    {_fmt(solved)}", file=sys.stderr)
    print(f"  reference: {_fmt(reference)}", file=sys.stderr)


def _fmt(result) -> str:
    if isinstance(result, dict):
        return "; ".join(f"{k}={sorted(map(str, v))}" for k, v in sorted(result.items()))
    return str(sorted(map(str, result)))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lfp",
        description="Solve layered fixed point programs and problems compiled to them.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="parse a program and print its rank table")
    p.add_argument("file")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("solve", help="print the least model of a program")
    p.add_argument("file")
    p.add_argument("--stats", action="store_true",
                   help="also print per-layer quantifier depth and ground clause counts")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("oracle", help="check a model file against a program")
    p.add_argument("file")
    p.add_argument("--model", required=True)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("dataflow", help="run a bit-vector analysis from a CFG file")
    p.add_argument("file")
    p.add_argument("--direction", choices=[df_mod.FORWARD, df_mod.BACKWARD], required=True)
    p.add_argument("--modality", choices=[df_mod.MAY, df_mod.MUST], required=True)
    p.add_argument("--oracle", action="store_true",
                   help="also run the worklist reference and compare")
    p.set_defaults(func=cmd_dataflow)

    p = sub.add_parser("csp", help="shrink CSP domains to arc consistency")
    p.add_argument("file")
    p.add_argument("--style", choices=[csp_mod.TUPLE_STYLE, csp_mod.SUB_STYLE],
                   default=csp_mod.TUPLE_STYLE,
                   help="encode difference constraints as pair tables or via subtraction")
    p.add_argument("--oracle", action="store_true",
                   help="also run AC-3 and compare")
    p.set_defaults(func=cmd_csp)

    p = sub.add_parser("ctl", help="model-check a CTL formula over a transition system")
    p.add_argument("file")
    p.add_argument("--formula", required=True)
    p.add_argument("--oracle", action="store_true",
                   help="also run the recursive satisfaction oracle and compare")
    p.set_defaults(func=cmd_ctl)

    p = sub.add_parser("report", help="measure grounding cost scaling; write TSV and figure")
    p.add_argument("--out", default="reports")
    p.add_argument("--sizes", help="comma-separated universe sizes")
    p.add_argument("--repeats", type=int, default=3)
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (LfpError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return INPUT_ERROR


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
