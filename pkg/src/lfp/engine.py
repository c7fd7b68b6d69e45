"""The solver: layers are processed in rank order; co-inductive layers are
dualized into two inductive sub-layers via complement relations; inductive
layers are grounded over the universe, rewritten to disjunction-free clauses
over ground atoms, and closed by linear-time propagation.
"""
from __future__ import annotations

from dataclasses import dataclass
from collections import deque
from itertools import product

from .errors import SignatureError
from .model import (And, AtomTuple, CONSTRAIN, Clause, ConAnd, ConForall,
                    ConImplies, Condition, DEFINE, DefAnd, DefForall,
                    DefImplies, Exists, FALSE, FalseC, ForallC, FunctionEnv,
                    GENERATED_PREFIX, Interpretation, LayeredFormula, NegQuery,
                    Or, Query, TRUE, TrueC, Universe, Valuation, eval_args,
                    freeze, is_generated, validate_interpretation)
from .semantics import sat_cond
from .stratify import check_stratification, clause_usage

# A ground atom is (relation name, atom tuple); generated symbols share the
# same shape with reserved-prefix names.
GroundAtom = tuple[str, AtomTuple]


@dataclass(frozen=True)
class GAnd:
    parts: tuple


@dataclass(frozen=True)
class GOr:
    parts: tuple


# body is True (empty conjunction), a GroundAtom, or a GAnd/GOr tree
@dataclass(frozen=True)
class GroundClause:
    body: object
    head: GroundAtom


@dataclass(frozen=True)
class SimpleClause:
    """Conjunction of positive ground atoms implying one ground atom."""

    body: tuple[GroundAtom, ...]
    head: GroundAtom


def complement_name(rel: str) -> str:
    return f"{GENERATED_PREFIX}co_{rel}"


class _Fresh:
    """Allocator for generated nullary predicates used by the rewrite."""

    def __init__(self):
        self.count = 0

    def __call__(self) -> GroundAtom:
        self.count += 1
        return (f"{GENERATED_PREFIX}q{self.count}", ())


# ---------------------------------------------------------------------------
# Dualization of co-inductive layers
# ---------------------------------------------------------------------------

def dualize(clause: Clause, constrained: set[str] | None = None) -> tuple[Clause, Clause]:
    """Split a constrain clause into two define clauses.

    The first defines the complement of each constrained relation (negated
    right-hand sides, pushed to negation normal form, with negated queries of
    constrained relations replaced by complement queries). The second re-derives
    the constrained relations: right-hand sides with constrained queries
    replaced by true, guarded by the complement being absent.
    """
    if clause.kind != CONSTRAIN:
        raise ValueError("dualize expects a constrain clause")
    if constrained is None:
        constrained = clause_usage(clause).asserted
    return (Clause(DEFINE, _g(clause.body, constrained)),
            Clause(DEFINE, _h(clause.body, constrained)))


def _g(body, constrained):
    if isinstance(body, ConForall):
        return DefForall(body.var, _g(body.body, constrained))
    if isinstance(body, ConAnd):
        return DefAnd(_g(body.left, constrained), _g(body.right, constrained))
    return DefImplies(_negate(body.cond, constrained), complement_name(body.rel), body.args)


def _negate(cond: Condition, constrained) -> Condition:
    if isinstance(cond, TrueC):
        return FALSE
    if isinstance(cond, FalseC):
        return TRUE
    if isinstance(cond, Query):
        if cond.rel in constrained:
            return Query(complement_name(cond.rel), cond.args)
        return NegQuery(cond.rel, cond.args)
    if isinstance(cond, NegQuery):
        return Query(cond.rel, cond.args)
    if isinstance(cond, And):
        return Or(_negate(cond.left, constrained), _negate(cond.right, constrained))
    if isinstance(cond, Or):
        return And(_negate(cond.left, constrained), _negate(cond.right, constrained))
    if isinstance(cond, Exists):
        return ForallC(cond.var, _negate(cond.body, constrained))
    if isinstance(cond, ForallC):
        return Exists(cond.var, _negate(cond.body, constrained))
    raise TypeError(f"unexpected condition {type(cond).__name__}")


def _h(body, constrained):
    if isinstance(body, ConForall):
        return DefForall(body.var, _h(body.body, constrained))
    if isinstance(body, ConAnd):
        return DefAnd(_h(body.left, constrained), _h(body.right, constrained))
    guard = And(_true_out(body.cond, constrained), NegQuery(complement_name(body.rel), body.args))
    return DefImplies(guard, body.rel, body.args)


def _true_out(cond: Condition, constrained) -> Condition:
    if isinstance(cond, Query) and cond.rel in constrained:
        return TRUE
    if isinstance(cond, And):
        return And(_true_out(cond.left, constrained), _true_out(cond.right, constrained))
    if isinstance(cond, Or):
        return Or(_true_out(cond.left, constrained), _true_out(cond.right, constrained))
    if isinstance(cond, Exists):
        return Exists(cond.var, _true_out(cond.body, constrained))
    if isinstance(cond, ForallC):
        return ForallC(cond.var, _true_out(cond.body, constrained))
    return cond


# ---------------------------------------------------------------------------
# Grounding (quantifier elimination + constant folding)
# ---------------------------------------------------------------------------

def _fold_and(parts):
    flat = []
    for p in parts:
        if p is False:
            return False
        if p is True:
            continue
        if isinstance(p, GAnd):
            flat.extend(p.parts)
        else:
            flat.append(p)
    if not flat:
        return True
    if len(flat) == 1:
        return flat[0]
    return GAnd(tuple(flat))


def _fold_or(parts):
    flat = []
    for p in parts:
        if p is True:
            return True
        if p is False:
            continue
        if isinstance(p, GOr):
            flat.extend(p.parts)
        else:
            flat.append(p)
    if not flat:
        return False
    if len(flat) == 1:
        return flat[0]
    return GOr(tuple(flat))


class _Grounder:
    def __init__(self, universe: Universe, functions: FunctionEnv,
                 solved: Interpretation):
        self.universe = universe
        self.functions = functions
        self.solved = solved
        self.out: list[GroundClause] = []

    def run(self, body) -> list[GroundClause]:
        self._body(body, {})
        return self.out

    def _body(self, body, val: Valuation):
        if isinstance(body, DefForall):
            self._each_atom(body.var, val, lambda: self._body(body.body, val))
        elif isinstance(body, DefAnd):
            self._body(body.left, val)
            self._body(body.right, val)
        elif isinstance(body, DefImplies):
            head_args = eval_args(body.args, self.functions, val)
            if head_args is None:
                return  # undefined head: this instance asserts nothing
            cond = self._cond(body.cond, val)
            if cond is False:
                return
            self.out.append(GroundClause(cond, (body.rel, head_args)))
        else:
            raise TypeError(f"unexpected clause node {type(body).__name__}")

    def _each_atom(self, var: str, val: Valuation, thunk):
        missing = object()
        saved = val.get(var, missing)
        for a in self.universe.atoms:
            val[var] = a
            thunk()
        if saved is missing:
            del val[var]
        else:
            val[var] = saved

    def _cond(self, cond: Condition, val: Valuation):
        """Ground a condition to True/False or a tree over unsolved atoms."""
        if isinstance(cond, TrueC):
            return True
        if isinstance(cond, FalseC):
            return False
        if isinstance(cond, Query):
            args = eval_args(cond.args, self.functions, val)
            if args is None:
                return False
            if cond.rel in self.solved:
                return args in self.solved[cond.rel]
            return (cond.rel, args)
        if isinstance(cond, NegQuery):
            args = eval_args(cond.args, self.functions, val)
            if args is None:
                return True
            if cond.rel not in self.solved:
                raise SignatureError(
                    f"negative query of {cond.rel!r} before it is solved")
            return args not in self.solved[cond.rel]
        if isinstance(cond, And):
            left = self._cond(cond.left, val)
            if left is False:
                return False
            return _fold_and([left, self._cond(cond.right, val)])
        if isinstance(cond, Or):
            left = self._cond(cond.left, val)
            if left is True:
                return True
            return _fold_or([left, self._cond(cond.right, val)])
        if isinstance(cond, (Exists, ForallC)):
            parts = []
            stop = True if isinstance(cond, Exists) else False
            missing = object()
            saved = val.get(cond.var, missing)
            for a in self.universe.atoms:
                val[cond.var] = a
                part = self._cond(cond.body, val)
                if part is stop:
                    parts = [stop]
                    break
                parts.append(part)
            if saved is missing:
                del val[cond.var]
            else:
                val[cond.var] = saved
            return _fold_or(parts) if isinstance(cond, Exists) else _fold_and(parts)
        raise TypeError(f"unexpected condition {type(cond).__name__}")


def ground(clause: Clause, universe: Universe, functions: FunctionEnv,
           solved: Interpretation) -> list[GroundClause]:
    """Instantiate a define clause over the universe.

    Quantifiers at clause level become one instance per atom; condition-level
    exists/forall become disjunctions/conjunctions. Queries of relations
    present in `solved` (lower layers, and every negative query) fold to
    constants; queries of still-unsolved relations stay symbolic.
    """
    if clause.kind != DEFINE:
        raise ValueError("ground expects a define clause (dualize constrain layers first)")
    return _Grounder(universe, functions, solved).run(clause.body)


# ---------------------------------------------------------------------------
# Rewrite to simple clauses and propagation
# ---------------------------------------------------------------------------

def _dedup(atoms: list[GroundAtom]) -> tuple[GroundAtom, ...]:
    return tuple(dict.fromkeys(atoms))


def rewrite_simple(clauses: list[GroundClause], fresh: _Fresh | None = None) -> list[SimpleClause]:
    """Eliminate disjunctions by naming them with fresh nullary predicates."""
    fresh = fresh or _Fresh()
    out: list[SimpleClause] = []

    def flatten(node) -> list[GroundAtom]:
        if node is True:
            return []
        if isinstance(node, tuple):
            return [node]
        if isinstance(node, GAnd):
            atoms = []
            for p in node.parts:
                atoms.extend(flatten(p))
            return atoms
        if isinstance(node, GOr):
            q = fresh()
            for p in node.parts:
                out.append(SimpleClause(_dedup(flatten(p)), q))
            return [q]
        raise TypeError(f"unexpected ground node {type(node).__name__}")

    for gc in clauses:
        out.append(SimpleClause(_dedup(flatten(gc.body)), gc.head))
    return out


def propagate(clauses: list[SimpleClause]) -> set[GroundAtom]:
    """Least set of ground atoms closed under the clauses (unit propagation)."""
    waiting: dict[GroundAtom, list[int]] = {}
    missing = []
    queue: deque[GroundAtom] = deque()
    for i, cl in enumerate(clauses):
        missing.append(len(cl.body))
        if not cl.body:
            queue.append(cl.head)
        for atom in cl.body:
            waiting.setdefault(atom, []).append(i)
    true: set[GroundAtom] = set()
    while queue:
        atom = queue.popleft()
        if atom in true:
            continue
        true.add(atom)
        for i in waiting.get(atom, ()):
            missing[i] -= 1
            if missing[i] == 0:
                queue.append(clauses[i].head)
    return true


# ---------------------------------------------------------------------------
# Direct greatest-fixpoint computation (differential check for dualize)
# ---------------------------------------------------------------------------

def gfp_iterate(clause: Clause, rho: Interpretation, universe: Universe,
                functions: FunctionEnv, arities: dict[str, int]) -> Interpretation:
    """Greatest interpretation of the clause's constrained relations over rho.

    Starts each constrained relation at the full product and deletes tuples
    whose implication instances fail, until nothing changes.
    """
    if clause.kind != CONSTRAIN:
        raise ValueError("gfp_iterate expects a constrain clause")
    constrained = clause_usage(clause).asserted
    work: dict[str, set] = {
        rel: set(product(universe.atoms, repeat=arities[rel])) for rel in constrained}
    combined: dict = dict(rho)
    combined.update(work)

    implications: list[tuple[list[str], ConImplies]] = []

    def collect(body, scope):
        if isinstance(body, ConForall):
            collect(body.body, scope + [body.var])
        elif isinstance(body, ConAnd):
            collect(body.left, scope)
            collect(body.right, scope)
        else:
            implications.append((scope, body))

    collect(clause.body, [])

    changed = True
    while changed:
        changed = False
        for scope, imp in implications:
            for values in product(universe.atoms, repeat=len(scope)):
                val = dict(zip(scope, values))
                head = eval_args(imp.args, functions, val)
                if head is None or head not in work[imp.rel]:
                    continue
                if not sat_cond(combined, val, imp.cond, universe, functions):
                    work[imp.rel].discard(head)
                    changed = True
    return {rel: frozenset(v) for rel, v in work.items()}


# ---------------------------------------------------------------------------
# Full pipeline
# ---------------------------------------------------------------------------

def nesting_depth(clause: Clause) -> int:
    """Maximal number of nested quantifiers along any path of the clause."""
    def cond_depth(c: Condition) -> int:
        if isinstance(c, (Exists, ForallC)):
            return 1 + cond_depth(c.body)
        if isinstance(c, (And, Or)):
            return max(cond_depth(c.left), cond_depth(c.right))
        return 0

    def body_depth(b) -> int:
        if isinstance(b, (DefForall, ConForall)):
            return 1 + body_depth(b.body)
        if isinstance(b, (DefAnd, ConAnd)):
            return max(body_depth(b.left), body_depth(b.right))
        if isinstance(b, DefImplies):
            return cond_depth(b.cond)
        if isinstance(b, ConImplies):
            return cond_depth(b.cond)
        raise TypeError(f"unexpected clause node {type(b).__name__}")

    return body_depth(clause.body)


def clause_size(clause: Clause) -> int:
    """Node count of the clause: structural operators plus query/true/false leaves."""
    def cond_size(c: Condition) -> int:
        if isinstance(c, (And, Or)):
            return 1 + cond_size(c.left) + cond_size(c.right)
        if isinstance(c, (Exists, ForallC)):
            return 1 + cond_size(c.body)
        return 1

    def body_size(b) -> int:
        if isinstance(b, (DefForall, ConForall)):
            return 1 + body_size(b.body)
        if isinstance(b, (DefAnd, ConAnd)):
            return 1 + body_size(b.left) + body_size(b.right)
        if isinstance(b, DefImplies):
            return 1 + cond_size(b.cond)
        return 1 + cond_size(b.cond)

    return body_size(clause.body)


@dataclass(frozen=True)
class LayerStats:
    index: int
    kind: str
    depth: int
    ground_clauses: int


def solve(formula: LayeredFormula) -> Interpretation:
    rho, _ = solve_detailed(formula)
    return rho


def solve_detailed(formula: LayeredFormula) -> tuple[Interpretation, list[LayerStats]]:
    """Least model of a stratified program above its base facts, plus per-layer
    grounding statistics."""
    ranks = check_stratification(formula)
    universe, functions = formula.universe, formula.functions
    # rank-0 relations are fully known up front: the facts, or empty
    solved: dict[str, set] = {rel: set(formula.facts.get(rel, ()))
                              for rel in formula.signature if ranks.rank(rel) == 0}
    fresh = _Fresh()
    stats: list[LayerStats] = []

    def run_define(clause: Clause) -> int:
        buckets: dict[str, set] = {rel: set() for rel in clause_usage(clause).asserted}
        simple = rewrite_simple(ground(clause, universe, functions, solved), fresh)
        for rel, args in propagate(simple):
            if rel in buckets:
                buckets[rel].add(args)
        solved.update(buckets)
        return len(simple)

    for i, clause in enumerate(formula.layers, 1):
        if clause.kind == DEFINE:
            count = run_define(clause)
        else:
            # The complement sub-layer derives exactly the tuples the greatest
            # fixpoint deletes; tuples never covered by an assertion pattern
            # are unconstrained, so each constrained relation is completed as
            # the complement of its complement relation. (Grounding the
            # re-derivation sub-layer instead would miss off-pattern tuples.)
            g_clause, _h_clause = dualize(clause)
            count = run_define(g_clause)
            for rel in sorted(clause_usage(clause).asserted):
                grid = set(product(universe.atoms, repeat=formula.signature[rel]))
                solved[rel] = grid - solved[complement_name(rel)]
        stats.append(LayerStats(i, clause.kind, nesting_depth(clause), count))
        result_so_far = freeze({r: v for r, v in solved.items() if not is_generated(r)})
        validate_interpretation(result_so_far, formula)

    result = freeze({rel: solved[rel] for rel in formula.signature})
    return result, stats
