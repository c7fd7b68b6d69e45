"""Shared builders, naive reference oracles and random generators for tests."""
from __future__ import annotations

import random
from itertools import combinations, product

from lfp.model import (And, Clause, CONSTRAIN, ConImplies, DEFINE, DefImplies,
                       Exists, FALSE, ForallC, FunctionEnv, LayeredFormula,
                       NegQuery, Or, Query, TRUE, Universe, Var, con_and,
                       def_and, forall_con, forall_def, freeze, neg_query)
from lfp.semantics import sat_formula


def formula(universe, signature, layers, facts=None, functions=None):
    uni = universe if isinstance(universe, Universe) else Universe(tuple(universe))
    return LayeredFormula(
        universe=uni,
        signature=dict(signature),
        functions=functions or FunctionEnv(uni),
        facts=freeze(facts or {}),
        layers=tuple(layers),
    )


def define(body):
    return Clause(DEFINE, body)


def constrain(body):
    return Clause(CONSTRAIN, body)


def eqneq_formula(atoms=("a", "b")):
    """Two layers: reflexive equality, then its complement via negation."""
    return formula(
        atoms,
        {"eq": 2, "neq": 2},
        [
            define(forall_def(["x"], DefImplies(TRUE, "eq", (Var("x"), Var("x"))))),
            define(forall_def(["x", "y"],
                              DefImplies(neg_query("eq", "x", "y"), "neq", (Var("x"), Var("y"))))),
        ],
    )


# ---------------------------------------------------------------------------
# Naive reference fixpoint for simple clauses (independent of the engine)
# ---------------------------------------------------------------------------

def naive_fixpoint(clauses):
    """Iterate bodies-to-heads until stable; the obviously-correct propagation."""
    true = set()
    changed = True
    while changed:
        changed = False
        for cl in clauses:
            if cl.head not in true and all(a in true for a in cl.body):
                true.add(cl.head)
                changed = True
    return true


# ---------------------------------------------------------------------------
# Exhaustive model enumeration over tiny signatures
# ---------------------------------------------------------------------------

def all_relations(universe, arity):
    grid = list(product(universe.atoms, repeat=arity))
    for r in range(len(grid) + 1):
        for combo in combinations(grid, r):
            yield frozenset(combo)


def all_interpretations(universe, signature):
    names = sorted(signature)
    pools = [list(all_relations(universe, signature[n])) for n in names]
    for values in product(*pools):
        yield dict(zip(names, values))


def enumerate_models(f: LayeredFormula):
    """All interpretations satisfying the program and extending its facts."""
    return [rho for rho in all_interpretations(f.universe, f.signature)
            if sat_formula(rho, f)]


# ---------------------------------------------------------------------------
# Random stratified programs (small enough for exhaustive enumeration)
# ---------------------------------------------------------------------------

def _random_cond(rng, pos_rels, neg_rels, scope, signature, depth):
    """Random condition using the given relations; queries only use in-scope vars."""
    choices = ["query", "true", "false"]
    if neg_rels:
        choices.append("neg")
    if depth > 0:
        choices += ["and", "or", "exists", "forall"]
    kind = rng.choice(choices)
    if kind in ("and", "or"):
        left = _random_cond(rng, pos_rels, neg_rels, scope, signature, depth - 1)
        right = _random_cond(rng, pos_rels, neg_rels, scope, signature, depth - 1)
        return And(left, right) if kind == "and" else Or(left, right)
    if kind in ("exists", "forall"):
        var = f"q{len(scope)}"
        body = _random_cond(rng, pos_rels, neg_rels, scope + [var], signature, depth - 1)
        return Exists(var, body) if kind == "exists" else ForallC(var, body)
    if kind == "true":
        return TRUE
    if kind == "false":
        return FALSE
    rels = pos_rels if kind == "query" else neg_rels
    rel = rng.choice(sorted(rels))
    args = tuple(Var(rng.choice(scope)) for _ in range(signature[rel]))
    return Query(rel, args) if kind == "query" else NegQuery(rel, args)


def random_formula(rng: random.Random, max_weight=12):
    """Random stratified program on a tiny universe.

    The total enumeration weight (sum over relations of |U|**arity) is capped
    so exhaustive model enumeration stays cheap.
    """
    size = rng.choice([2, 2, 3])
    universe = Universe(tuple("abc"[:size]))
    n_rels = rng.randint(2, 3)
    names = [f"R{i}" for i in range(n_rels)]
    signature = {}
    weight = 0
    for name in names:
        arity = rng.choice([1, 1, 2])
        if weight + size ** arity > max_weight:
            arity = 1
        signature[name] = arity
        weight += size ** arity

    n_layers = rng.randint(1, 2)
    # split relations: possibly one fact relation, the rest across layers
    shuffled = names[:]
    rng.shuffle(shuffled)
    fact_rels = shuffled[:1] if rng.random() < 0.6 and len(shuffled) > n_layers else []
    rest = shuffled[len(fact_rels):]
    if len(rest) < n_layers:
        n_layers = len(rest)
    cut = rng.randint(1, len(rest) - n_layers + 1)
    layer_rels = [rest[:cut], rest[cut:]][:n_layers]

    facts = {}
    for rel in fact_rels:
        grid = list(product(universe.atoms, repeat=signature[rel]))
        facts[rel] = frozenset(t for t in grid if rng.random() < 0.5)

    layers = []
    asserted_so_far = list(fact_rels)
    for i, rels in enumerate(layer_rels, 1):
        kind = rng.choice([DEFINE, CONSTRAIN])
        neg_rels = list(asserted_so_far)
        conjuncts = []
        for rel in rels:
            arity = signature[rel]
            head_vars = [f"x{k}" for k in range(max(arity, 1))]
            head = tuple(Var(rng.choice(head_vars)) for _ in range(arity))
            pos_rels = set(asserted_so_far) | set(rels)
            cond = _random_cond(rng, sorted(pos_rels), neg_rels, head_vars,
                                signature, depth=rng.randint(0, 2))
            if kind == DEFINE:
                conjuncts.append(forall_def(head_vars, DefImplies(cond, rel, head)))
            else:
                conjuncts.append(forall_con(head_vars, ConImplies(rel, head, cond)))
        body = def_and(*conjuncts) if kind == DEFINE else con_and(*conjuncts)
        layers.append(Clause(kind, body))
        asserted_so_far.extend(rels)

    return formula(universe, signature, layers, facts)
