from itertools import product

import pytest

from helpers import constrain, define, eqneq_formula, formula
from lfp.errors import StratificationError
from lfp.model import (DEFINED, DefImplies, FACT, TRUE, Var, ConImplies,
                       forall_con, forall_def, neg_query, query)
from lfp.stratify import check_stratification, usage


def test_usage_pure_assertion():
    f = formula(("a", "b"), {"eq": 2},
                [define(forall_def(["x"], DefImplies(TRUE, "eq", (Var("x"), Var("x")))))])
    report = usage(f)
    assert report.layer(1).asserted == {"eq"}
    assert report.layer(1).positive == set()
    assert report.layer(1).negative == set()


def test_usage_constrain_positive():
    f = formula(("a",), {"G": 1, "P": 1},
                [define(forall_def(["x"], DefImplies(TRUE, "P", (Var("x"),)))),
                 constrain(forall_con(["x"], ConImplies("G", (Var("x"),), query("P", "x"))))])
    report = usage(f)
    assert report.layer(2).asserted == {"G"}
    assert report.layer(2).positive == {"P"}


def test_usage_negative_query():
    report = usage(eqneq_formula())
    assert report.layer(2).asserted == {"neq"}
    assert report.layer(2).negative == {"eq"}


def test_eqneq_ranks():
    ranks = check_stratification(eqneq_formula())
    assert ranks.rank("eq") == 1 and ranks.kind("eq") == DEFINED
    assert ranks.rank("neq") == 2 and ranks.kind("neq") == DEFINED
    assert ranks.order == 2


def test_swapped_layers_violate_bullet_three():
    f = eqneq_formula()
    swapped = formula(f.universe, f.signature, reversed(f.layers))
    with pytest.raises(StratificationError) as err:
        check_stratification(swapped)
    assert err.value.bullet == 3
    assert err.value.relation == "eq"
    assert (err.value.use_layer, err.value.assert_layer) == (1, 2)


def test_same_layer_positive_recursion_is_legal():
    f = formula(("a",), {"R": 1},
                [define(forall_def(["x"], DefImplies(query("R", "x"), "R", (Var("x"),))))])
    ranks = check_stratification(f)
    assert ranks.rank("R") == 1


def test_same_layer_negative_recursion_is_rejected():
    f = formula(("a",), {"R": 1},
                [define(forall_def(["x"], DefImplies(neg_query("R", "x"), "R", (Var("x"),))))])
    with pytest.raises(StratificationError) as err:
        check_stratification(f)
    assert err.value.bullet == 3
    assert (err.value.use_layer, err.value.assert_layer) == (1, 1)


def test_reassertion_across_layers_is_bullet_one():
    f = formula(("a",), {"R": 1, "S": 1},
                [define(forall_def(["x"], DefImplies(TRUE, "R", (Var("x"),)))),
                 define(forall_def(["x"], DefImplies(query("S", "x"), "R", (Var("x"),)))),
                 define(forall_def(["x"], DefImplies(TRUE, "S", (Var("x"),))))])
    # S is also used before assertion, but re-assertion of R is detected first
    with pytest.raises(StratificationError) as err:
        check_stratification(f)
    assert err.value.bullet == 1 and err.value.relation == "R"


def test_define_constrain_conflict_message():
    f = formula(("a",), {"R": 1},
                [define(forall_def(["x"], DefImplies(TRUE, "R", (Var("x"),)))),
                 constrain(forall_con(["x"], ConImplies("R", (Var("x"),), TRUE)))])
    with pytest.raises(StratificationError) as err:
        check_stratification(f)
    assert err.value.bullet == 1
    assert "define" in str(err.value) and "constrain" in str(err.value)


def test_positive_use_before_later_assertion_is_bullet_two():
    f = formula(("a",), {"R": 1, "S": 1},
                [define(forall_def(["x"], DefImplies(query("S", "x"), "R", (Var("x"),)))),
                 define(forall_def(["x"], DefImplies(TRUE, "S", (Var("x"),))))])
    with pytest.raises(StratificationError) as err:
        check_stratification(f)
    assert err.value.bullet == 2 and err.value.relation == "S"


def test_fact_relations_rank_zero():
    f = formula(("a",), {"F": 1, "R": 1},
                [define(forall_def(["x"], DefImplies(neg_query("F", "x"), "R", (Var("x"),))))],
                facts={"F": {("a",)}})
    ranks = check_stratification(f)
    assert ranks.rank("F") == 0 and ranks.kind("F") == FACT
    assert ranks.rank("R") == 1


# ---------------------------------------------------------------------------
# Exhaustive comparison against a brute-force tri-bullet checker over all
# usage patterns realizable with two relations and up to two layers.
# ---------------------------------------------------------------------------

def brute_force_stratified(asserted, positive, negative):
    """Check the three rules directly on per-layer usage sets."""
    n = len(asserted)
    for i in range(n):
        for later in range(i + 1, n):
            if asserted[i] & asserted[later]:
                return False
            if positive[i] & asserted[later]:
                return False
        for later in range(i, n):
            if negative[i] & asserted[later]:
                return False
    return True


def _realize_layer(kind, asserted, pos, neg):
    """Concrete clause with exactly the given usage sets."""
    from lfp.model import con_and, conj, def_and
    conjuncts = []
    for rel in sorted(asserted):
        parts = ([query(p, "x") for p in sorted(pos)]
                 + [neg_query(m, "x") for m in sorted(neg)])
        cond = conj(*parts) if parts else TRUE
        if kind == "define":
            conjuncts.append(forall_def(["x"], DefImplies(cond, rel, (Var("x"),))))
        else:
            conjuncts.append(forall_con(["x"], ConImplies(rel, (Var("x"),), cond)))
    return define(def_and(*conjuncts)) if kind == "define" else constrain(con_and(*conjuncts))


def test_exhaustive_two_layer_two_relation_patterns():
    rels = ("A", "B")
    subsets = [frozenset(s) for s in
               [(), ("A",), ("B",), ("A", "B")]]
    checked = accepted = 0
    for n_layers in (1, 2):
        spaces = [ (a, p, ng, k)
                   for a in subsets if a
                   for p in subsets
                   for ng in subsets
                   for k in ("define", "constrain") ]
        for combo in product(spaces, repeat=n_layers):
            asserted = [set(c[0]) for c in combo]
            positive = [set(c[1]) for c in combo]
            negative = [set(c[2]) for c in combo]
            layers = [_realize_layer(c[3], c[0], c[1], c[2]) for c in combo]
            f = formula(("a",), {"A": 1, "B": 1}, layers)
            expected = brute_force_stratified(asserted, positive, negative)
            try:
                check_stratification(f)
                got = True
            except StratificationError:
                got = False
            assert got == expected, (asserted, positive, negative)
            checked += 1
            accepted += got
    assert checked > 1000 and 0 < accepted < checked
