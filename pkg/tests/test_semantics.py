import random
from itertools import product

import pytest

from helpers import (all_interpretations, constrain, define, eqneq_formula,
                     formula, random_formula)
from lfp.errors import SignatureError
from lfp.model import (And, ConImplies, DefImplies, FALSE, ForallC, Or, TRUE,
                       Universe, Var, forall_con, forall_def, neg_query, query)
from lfp.semantics import sat_clause, sat_cond, sat_formula
from lfp.stratify import check_stratification

U_AB = Universe(("a", "b"))


def test_query_is_membership():
    rho = {"R": frozenset({("a",)})}
    assert sat_cond(rho, {"x": "a"}, query("R", "x"), U_AB)
    assert not sat_cond(rho, {"x": "b"}, query("R", "x"), U_AB)


def test_forall_needs_every_atom():
    rho = {"R": frozenset({("a",)})}
    assert not sat_cond(rho, {}, ForallC("x", query("R", "x")), U_AB)
    rho_full = {"R": frozenset({("a",), ("b",)})}
    assert sat_cond(rho_full, {}, ForallC("x", query("R", "x")), U_AB)


def test_negation_tautology():
    rho = {"R": frozenset({("a",)})}
    cond = Or(neg_query("R", "x"), query("R", "x"))
    assert sat_cond(rho, {"x": "b"}, cond, U_AB)
    assert sat_cond(rho, {"x": "a"}, cond, U_AB)


def test_unknown_relation_raises():
    with pytest.raises(SignatureError):
        sat_cond({}, {"x": "a"}, query("R", "x"), U_AB)


def test_vacuous_define_clause():
    from lfp.model import FunctionEnv
    cl = define(forall_def(["x"], DefImplies(FALSE, "S", (Var("x"),))))
    rho = {"S": frozenset()}
    assert sat_clause(rho, FunctionEnv(U_AB), {}, cl, U_AB)


def test_define_fails_when_head_missing():
    from lfp.model import FunctionEnv
    u = Universe(("a",))
    cl = define(forall_def(["x"], DefImplies(query("R", "x"), "S", (Var("x"),))))
    rho = {"R": frozenset({("a",)}), "S": frozenset()}
    assert not sat_clause(rho, FunctionEnv(u), {}, cl, u)


def test_constrain_is_subset_check():
    from lfp.model import FunctionEnv
    u = Universe.of_range(1, 2)
    cl = constrain(forall_con(["s"], ConImplies("G", (Var("s"),), query("P", "s"))))
    rho = {"G": frozenset({(1,)}), "P": frozenset({(1,)})}
    assert sat_clause(rho, FunctionEnv(u), {}, cl, u)
    rho_bad = {"G": frozenset({(1,), (2,)}), "P": frozenset({(1,)})}
    assert not sat_clause(rho_bad, FunctionEnv(u), {}, cl, u)


def test_eqneq_model_and_counterexample():
    f = eqneq_formula()
    good = {"eq": frozenset({("a", "a"), ("b", "b")}),
            "neq": frozenset({("a", "b"), ("b", "a")})}
    assert sat_formula(good, f)
    bad = {"eq": frozenset({("a", "a"), ("b", "b")}), "neq": frozenset()}
    assert not sat_formula(bad, f)


def test_facts_side_condition():
    f = formula(("a", "b"), {"F": 1, "R": 1},
                [define(forall_def(["x"], DefImplies(query("F", "x"), "R", (Var("x"),))))],
                facts={"F": {("a",)}})
    assert not sat_formula({"F": frozenset(), "R": frozenset()}, f)
    assert sat_formula({"F": frozenset({("a",)}), "R": frozenset({("a",)})}, f)


def test_full_interpretation_satisfies_negation_free_programs():
    # verified per instance: with every relation full, each define head holds
    # and each constrain right-hand side below is checked by sat_formula itself
    cases = []
    cases.append(formula(("a", "b"), {"R": 1, "S": 1},
                         [define(forall_def(["x"], DefImplies(query("R", "x"), "S", (Var("x"),))))]))
    cases.append(formula(("a", "b"), {"G": 1, "P": 1},
                         [define(forall_def(["x"], DefImplies(TRUE, "P", (Var("x"),)))),
                          constrain(forall_con(["s"], ConImplies("G", (Var("s"),), query("P", "s"))))]))
    cases.append(formula((0, 1), {"T": 2, "R": 1},
                         [define(forall_def(["x", "y"],
                                            DefImplies(And(query("T", "x", "y"), query("R", "y")),
                                                       "R", (Var("x"),))))]))
    for f in cases:
        full = {rel: frozenset(product(f.universe.atoms, repeat=k))
                for rel, k in f.signature.items()}
        assert sat_formula(full, f)


def test_ground_conditions_agree_with_truth_tables():
    # quantifier-free conditions over nullary relations behave like
    # propositional formulas under every assignment
    rng = random.Random(3)
    u = Universe(("a",))
    names = ["A", "B", "C"]

    def random_prop(depth):
        if depth == 0:
            return rng.choice([TRUE, FALSE, query(rng.choice(names)),
                               neg_query(rng.choice(names))])
        left, right = random_prop(depth - 1), random_prop(depth - 1)
        return rng.choice([And, Or])(left, right)

    def truth(cond, bits):
        from lfp.model import And as A_, NegQuery, Or as O_, Query, TrueC
        if isinstance(cond, TrueC):
            return True
        if isinstance(cond, Query):
            return bits[cond.rel]
        if isinstance(cond, NegQuery):
            return not bits[cond.rel]
        if isinstance(cond, A_):
            return truth(cond.left, bits) and truth(cond.right, bits)
        if isinstance(cond, O_):
            return truth(cond.left, bits) or truth(cond.right, bits)
        return False

    for _ in range(200):
        cond = random_prop(rng.randint(0, 3))
        for assignment in product([False, True], repeat=3):
            bits = dict(zip(names, assignment))
            rho = {n: frozenset({()}) if bits[n] else frozenset() for n in names}
            assert sat_cond(rho, {}, cond, u) == truth(cond, bits)


def test_monotone_in_layer_order():
    """Conditions legal at a layer stay true when that layer's relations grow."""
    rng = random.Random(7)
    checked = 0
    for _ in range(60):
        f = random_formula(rng)
        try:
            ranks = check_stratification(f)
        except Exception:
            continue
        interps = list(all_interpretations(f.universe, f.signature))
        for cl_index, clause in enumerate(f.layers, 1):
            conds = _conditions_of(clause.body)
            for _ in range(3):
                rho1 = rng.choice(interps)
                rho2 = _grow_at_rank(rng, rho1, ranks, cl_index, f)
                for cond, scope in conds:
                    val = {v: rng.choice(f.universe.atoms) for v in scope}
                    if sat_cond(rho1, val, cond, f.universe, f.functions):
                        assert sat_cond(rho2, val, cond, f.universe, f.functions)
                        checked += 1
    assert checked > 50


def _conditions_of(body, scope=()):
    from lfp.model import (ConAnd, ConForall, ConImplies, DefAnd, DefForall,
                           DefImplies)
    if isinstance(body, (DefForall, ConForall)):
        return _conditions_of(body.body, scope + (body.var,))
    if isinstance(body, (DefAnd, ConAnd)):
        return _conditions_of(body.left, scope) + _conditions_of(body.right, scope)
    return [(body.cond, scope)]


def _grow_at_rank(rng, rho, ranks, j, f):
    """A random interpretation above rho in the layer-j ordering."""
    out = dict(rho)
    for rel in f.signature:
        if ranks.rank(rel) == j:
            grid = list(product(f.universe.atoms, repeat=f.signature[rel]))
            extra = {t for t in grid if rng.random() < 0.4}
            out[rel] = rho[rel] | extra
    return out
