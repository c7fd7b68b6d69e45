"""Deterministic textual output: solved models and program round-tripping."""
from __future__ import annotations

from .errors import ParseError
from .model import (And, App, Atom, ConAnd, ConForall, Condition, Const,
                    DEFINE, DefAnd, DefForall, Exists, FalseC, ForallC,
                    Interpretation, LayeredFormula, NegQuery, Or, Query, Term,
                    TrueC, Universe, Var, is_generated)


def print_model(rho: Interpretation, universe: Universe) -> str:
    """One tab-separated line per tuple; relations alphabetical, tuples in
    universe order; empty relations and generated symbols are omitted."""
    lines = []
    for rel in sorted(rho):
        if is_generated(rel) or not rho[rel]:
            continue
        for t in sorted(rho[rel], key=lambda t: tuple(universe.index(a) for a in t)):
            lines.append("\t".join([rel] + [str(a) for a in t]))
    return "".join(line + "\n" for line in lines)


def parse_model(text: str, formula: LayeredFormula) -> Interpretation:
    """Read print_model output back into an interpretation over the signature."""
    rho: dict[str, set] = {rel: set() for rel in formula.signature}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t") if "\t" in line else line.split()
        rel, fields = parts[0], parts[1:]
        if rel not in formula.signature:
            raise ParseError(f"unknown relation {rel!r} in model", lineno)
        if len(fields) != formula.signature[rel]:
            raise ParseError(
                f"relation {rel!r} expects {formula.signature[rel]} atoms", lineno)
        atoms = []
        for field in fields:
            atom: Atom = int(field) if formula.universe.is_integer else field
            if atom not in formula.universe:
                raise ParseError(f"{field!r} is not a universe atom", lineno)
            atoms.append(atom)
        rho[rel].add(tuple(atoms))
    return {rel: frozenset(ts) for rel, ts in rho.items()}


# ---------------------------------------------------------------------------
# Program printing (canonical concrete syntax)
# ---------------------------------------------------------------------------

def _format_atom(atom: Atom) -> str:
    return str(atom)


def _format_term(term: Term) -> str:
    if isinstance(term, Var):
        return term.name
    if isinstance(term, Const):
        return _format_atom(term.atom)
    if isinstance(term, App):
        if not term.args:
            return f"{term.fn}()"
        return f"{term.fn}({', '.join(_format_term(a) for a in term.args)})"
    raise TypeError(f"unexpected term {type(term).__name__}")


def _format_args(args: tuple[Term, ...]) -> str:
    return f"({', '.join(_format_term(a) for a in args)})"


def _format_cond(cond: Condition, level: int = 0) -> str:
    # level 0 = or-context, 1 = and-context
    if isinstance(cond, TrueC):
        return "true"
    if isinstance(cond, FalseC):
        return "false"
    if isinstance(cond, Query):
        return f"{cond.rel}{_format_args(cond.args)}"
    if isinstance(cond, NegQuery):
        return f"!{cond.rel}{_format_args(cond.args)}"
    if isinstance(cond, Or):
        text = f"{_format_cond(cond.left, 0)} | {_format_cond(cond.right, 0)}"
        return f"({text})" if level > 0 else text
    if isinstance(cond, And):
        return f"{_format_cond(cond.left, 1)} & {_format_cond(cond.right, 1)}"
    if isinstance(cond, Exists):
        return f"(exists {cond.var}: {_format_cond(cond.body, 0)})"
    if isinstance(cond, ForallC):
        return f"(forall {cond.var}: {_format_cond(cond.body, 0)})"
    raise TypeError(f"unexpected condition {type(cond).__name__}")


def _top_conjuncts(body):
    if isinstance(body, (DefAnd, ConAnd)):
        return _top_conjuncts(body.left) + _top_conjuncts(body.right)
    return [body]


def _format_define_chain(body) -> str:
    # quantifier scope is greedy on re-parse, so a conjunction under a
    # quantifier prints inside it with '&'
    if isinstance(body, DefForall):
        return f"forall {body.var}: {_format_define_chain(body.body)}"
    if isinstance(body, DefAnd):
        return f"{_format_define_chain(body.left)} & {_format_define_chain(body.right)}"
    head = f"{body.rel}{_format_args(body.args)}"
    if isinstance(body.cond, TrueC):
        return head
    return f"{_format_cond(body.cond)} => {head}"


def _constrain_conjuncts(body, prefix=()):
    """Flatten into forall-prefixed implications; a conjunction under a
    quantifier is distributed over it (same semantics and nesting depth)."""
    if isinstance(body, ConForall):
        return _constrain_conjuncts(body.body, prefix + (body.var,))
    if isinstance(body, ConAnd):
        return (_constrain_conjuncts(body.left, prefix)
                + _constrain_conjuncts(body.right, prefix))
    return [(prefix, body)]


def _format_constrain_conjunct(prefix, imp) -> str:
    quantified = "".join(f"forall {v}: " for v in prefix)
    head = f"{imp.rel}{_format_args(imp.args)}"
    if isinstance(imp.cond, FalseC):
        return f"{quantified}!{head}"
    return f"{quantified}{head} => {_format_cond(imp.cond)}"


def format_program(formula: LayeredFormula) -> str:
    lines = []
    universe = formula.universe
    if universe.is_integer:
        lines.append(f"universe {universe.atoms[0]}..{universe.atoms[-1]};")
    else:
        lines.append("universe {" + ", ".join(map(str, universe.atoms)) + "};")
    for rel, arity in formula.signature.items():
        lines.append(f"rel {rel}/{arity};")
    for fn in sorted(formula.functions.arities):
        if universe.is_integer and fn in formula.functions.BUILTINS:
            continue  # built-ins need no declaration
        arity = formula.functions.arities[fn]
        table = formula.functions.tables.get(fn)
        if table:
            entries = ", ".join(
                f"({', '.join(map(str, args))}) -> {result}"
                for args, result in sorted(table.items()))
            lines.append(f"fun {fn}/{arity} {{ {entries} }};")
        else:
            lines.append(f"fun {fn}/{arity};")
    for rel in sorted(formula.facts):
        for t in sorted(formula.facts[rel], key=lambda t: tuple(universe.index(a) for a in t)):
            lines.append(f"fact {rel}({', '.join(map(str, t))}).")
    for clause in formula.layers:
        lines.append(clause.kind + " {")
        if clause.kind == DEFINE:
            parts = [_format_define_chain(c) for c in _top_conjuncts(clause.body)]
        else:
            parts = [_format_constrain_conjunct(prefix, imp)
                     for top in _top_conjuncts(clause.body)
                     for prefix, imp in _constrain_conjuncts(top)]
        lines.append(",\n".join("  " + p for p in parts))
        lines.append("}")
    return "\n".join(lines) + "\n"
