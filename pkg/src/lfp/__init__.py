"""Layered fixed point logic: model, solver, oracles and problem front-ends."""

from .errors import LfpError, ParseError, SignatureError, StratificationError
from .model import (App, Atom, Clause, Condition, Const, CONSTRAIN, DEFINE,
                    FunctionEnv, Interpretation, LayeredFormula, RankInfo,
                    RankMap, Term, Universe, Var, eval_term)
from .stratify import check_stratification, usage
from .semantics import sat_cond, sat_clause, sat_formula
from .order import layer_leq, lex_leq, meet
from .engine import (dualize, gfp_iterate, ground, nesting_depth, propagate,
                     rewrite_simple, solve, solve_detailed)
from .parser import parse_program
from .printer import format_program, parse_model, print_model

__all__ = [
    "LfpError", "ParseError", "SignatureError", "StratificationError",
    "App", "Atom", "Clause", "Condition", "Const", "CONSTRAIN", "DEFINE",
    "FunctionEnv", "Interpretation", "LayeredFormula", "RankInfo", "RankMap",
    "Term", "Universe", "Var", "eval_term",
    "check_stratification", "usage",
    "sat_cond", "sat_clause", "sat_formula",
    "layer_leq", "lex_leq", "meet",
    "dualize", "gfp_iterate", "ground", "nesting_depth", "propagate",
    "rewrite_simple", "solve", "solve_detailed",
    "parse_program", "format_program", "parse_model", "print_model",
]
