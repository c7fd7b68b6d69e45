"""Direct satisfaction checking for conditions, clauses and whole programs.

This is the ground-truth oracle used to validate the solver; it evaluates
quantifiers by exhaustive enumeration over the universe and is never used
to compute models.
"""
from __future__ import annotations

from .errors import SignatureError
from .model import (And, Clause, ConAnd, ConForall, ConImplies, Condition,
                    DefAnd, DefForall, DefImplies, Exists, FalseC, ForallC,
                    FunctionEnv, Interpretation, LayeredFormula, NegQuery, Or,
                    Query, TrueC, Universe, Valuation, eval_args)

_NO_FUNCTIONS: FunctionEnv | None = None


def _lookup(rho: Interpretation, rel: str):
    if rel not in rho:
        raise SignatureError(f"unknown relation {rel!r}")
    return rho[rel]


def sat_cond(rho: Interpretation, valuation: Valuation, cond: Condition,
             universe: Universe, functions: FunctionEnv | None = None) -> bool:
    """Does (rho, valuation) satisfy the condition?

    An undefined argument term makes a positive query false and a negative
    query true (partial functions never witness membership).
    """
    if isinstance(cond, TrueC):
        return True
    if isinstance(cond, FalseC):
        return False
    if isinstance(cond, Query):
        args = eval_args(cond.args, functions or _empty_functions(universe), valuation)
        return args is not None and args in _lookup(rho, cond.rel)
    if isinstance(cond, NegQuery):
        args = eval_args(cond.args, functions or _empty_functions(universe), valuation)
        return args is None or args not in _lookup(rho, cond.rel)
    if isinstance(cond, And):
        return (sat_cond(rho, valuation, cond.left, universe, functions)
                and sat_cond(rho, valuation, cond.right, universe, functions))
    if isinstance(cond, Or):
        return (sat_cond(rho, valuation, cond.left, universe, functions)
                or sat_cond(rho, valuation, cond.right, universe, functions))
    if isinstance(cond, Exists):
        return any(sat_cond(rho, {**valuation, cond.var: a}, cond.body, universe, functions)
                   for a in universe.atoms)
    if isinstance(cond, ForallC):
        return all(sat_cond(rho, {**valuation, cond.var: a}, cond.body, universe, functions)
                   for a in universe.atoms)
    raise TypeError(f"unexpected condition {type(cond).__name__}")


def _empty_functions(universe: Universe) -> FunctionEnv:
    return FunctionEnv(universe)


def sat_clause(rho: Interpretation, functions: FunctionEnv, valuation: Valuation,
               clause: Clause, universe: Universe) -> bool:
    return _sat_body(rho, functions, valuation, clause.body, universe)


def _sat_body(rho, functions, valuation, body, universe) -> bool:
    if isinstance(body, (DefForall, ConForall)):
        return all(_sat_body(rho, functions, {**valuation, body.var: a}, body.body, universe)
                   for a in universe.atoms)
    if isinstance(body, (DefAnd, ConAnd)):
        return (_sat_body(rho, functions, valuation, body.left, universe)
                and _sat_body(rho, functions, valuation, body.right, universe))
    if isinstance(body, DefImplies):
        head = eval_args(body.args, functions, valuation)
        if head is None:
            # nothing is asserted for an undefined head instance
            return True
        if not sat_cond(rho, valuation, body.cond, universe, functions):
            return True
        return head in _lookup(rho, body.rel)
    if isinstance(body, ConImplies):
        head = eval_args(body.args, functions, valuation)
        if head is None or head not in _lookup(rho, body.rel):
            return True
        return sat_cond(rho, valuation, body.cond, universe, functions)
    raise TypeError(f"unexpected clause node {type(body).__name__}")


def sat_formula(rho: Interpretation, formula: LayeredFormula) -> bool:
    """All layers satisfied, and rho extends the base facts."""
    for rel, tuples in formula.facts.items():
        if not tuples <= _lookup(rho, rel):
            return False
    return all(sat_clause(rho, formula.functions, {}, cl, formula.universe)
               for cl in formula.layers)


def sat_layers(rho: Interpretation, formula: LayeredFormula) -> list[bool]:
    """Per-layer satisfaction verdicts (used by the oracle subcommand)."""
    return [sat_clause(rho, formula.functions, {}, cl, formula.universe)
            for cl in formula.layers]
