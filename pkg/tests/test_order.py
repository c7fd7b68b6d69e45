import random
from itertools import product

import pytest

from helpers import all_interpretations
from lfp.model import (CONSTRAINED, DEFINED, FACT, RankInfo, RankMap, Universe)
from lfp.order import full_relation, layer_leq, lex_leq, meet

U1 = Universe(("a",))
U2 = Universe(("a", "b"))


def ranks_of(**info):
    """rank map from rel=(rank, kind) keyword arguments."""
    parsed = {rel: RankInfo(r, k) for rel, (r, k) in info.items()}
    order = max((ri.rank for ri in parsed.values()), default=0)
    return RankMap(parsed, order=order)


def test_reflexive():
    ranks = ranks_of(R=(1, DEFINED), F=(0, FACT))
    rho = {"R": frozenset({("a",)}), "F": frozenset()}
    assert lex_leq(rho, rho, ranks)


def test_defined_subset_direction():
    ranks = ranks_of(R=(1, DEFINED))
    small = {"R": frozenset()}
    big = {"R": frozenset({("a",)})}
    assert lex_leq(small, big, ranks)
    assert not lex_leq(big, small, ranks)


def test_constrained_superset_direction():
    ranks = ranks_of(R=(1, CONSTRAINED))
    small = {"R": frozenset()}
    big = {"R": frozenset({("a",)})}
    assert lex_leq(big, small, ranks)
    assert not lex_leq(small, big, ranks)


def test_lower_rank_difference_frees_higher_ranks():
    # differing at rank 1 makes rank 2 irrelevant
    ranks = ranks_of(R=(1, DEFINED), S=(2, DEFINED))
    rho1 = {"R": frozenset(), "S": frozenset({("a",)})}
    rho2 = {"R": frozenset({("a",)}), "S": frozenset()}
    assert lex_leq(rho1, rho2, ranks)


def test_layer_leq():
    ranks = ranks_of(R=(1, DEFINED), S=(2, DEFINED))
    rho = {"R": frozenset({("a",)}), "S": frozenset()}
    assert layer_leq(rho, rho, 1, ranks)
    bigger_s = {"R": frozenset({("a",)}), "S": frozenset({("a",)})}
    assert layer_leq(rho, bigger_s, 2, ranks)
    assert not layer_leq(bigger_s, rho, 2, ranks)
    differs_below = {"R": frozenset(), "S": frozenset()}
    assert not layer_leq(differs_below, rho, 2, ranks)


def test_meet_singleton():
    ranks = ranks_of(R=(1, DEFINED))
    rho = {"R": frozenset({("a",)})}
    assert meet([rho], ranks, U1, {"R": 1}) == rho


def test_meet_of_empty_set_rejected():
    with pytest.raises(ValueError):
        meet([], ranks_of(R=(1, DEFINED)), U1, {"R": 1})


def test_meet_single_define_layer_is_intersection():
    ranks = ranks_of(R=(1, DEFINED))
    rho1 = {"R": frozenset({("a",), ("b",)})}
    rho2 = {"R": frozenset({("b",)})}
    got = meet([rho1, rho2], ranks, U2, {"R": 1})
    assert got == {"R": frozenset({("b",)})}


def test_meet_mixed_three_models_on_singleton_universe():
    # R defined at rank 1, G constrained at rank 2
    ranks = ranks_of(R=(1, DEFINED), G=(2, CONSTRAINED))
    arity = {"R": 1, "G": 1}
    e, f = frozenset(), frozenset({("a",)})
    m1 = {"R": e, "G": e}
    m2 = {"R": e, "G": f}
    m3 = {"R": f, "G": e}
    models = [m1, m2, m3]
    got = meet(models, ranks, U1, arity)
    # rank 1: intersection over all three = {}; survivors agreeing: m1, m2;
    # rank 2 constrained: union over survivors = {a}
    assert got == {"R": e, "G": f}
    for rho in models:
        assert lex_leq(got, rho, ranks)


def _random_interp(rng, universe, arity):
    out = {}
    for rel, k in arity.items():
        grid = list(product(universe.atoms, repeat=k))
        out[rel] = frozenset(t for t in grid if rng.random() < 0.5)
    return out


def _random_ranks(rng, names):
    info = {}
    order = 2
    for n in names:
        rank = rng.randint(0, order)
        kind = FACT if rank == 0 else rng.choice([DEFINED, CONSTRAINED])
        info[n] = RankInfo(rank, kind)
    return RankMap(info, order=order)


def test_partial_order_laws_random():
    rng = random.Random(11)
    arity = {"R": 1, "S": 1, "T": 2}
    for _ in range(300):
        ranks = _random_ranks(rng, arity)
        a, b, c = (_random_interp(rng, U2, arity) for _ in range(3))
        assert lex_leq(a, a, ranks)
        if lex_leq(a, b, ranks) and lex_leq(b, a, ranks):
            assert a == b
        if lex_leq(a, b, ranks) and lex_leq(b, c, ranks):
            assert lex_leq(a, c, ranks)


def test_meet_is_greatest_lower_bound_by_enumeration():
    rng = random.Random(23)
    arity = {"R": 1, "S": 1}
    universe = U2
    everything = list(all_interpretations(universe, arity))
    for _ in range(60):
        ranks = _random_ranks(rng, arity)
        models = [rng.choice(everything) for _ in range(rng.randint(1, 4))]
        glb = meet(models, ranks, universe, arity)
        for rho in models:
            assert lex_leq(glb, rho, ranks)
        for candidate in everything:
            if all(lex_leq(candidate, rho, ranks) for rho in models):
                assert lex_leq(candidate, glb, ranks)


def test_full_relation():
    assert full_relation(U2, 2) == frozenset(product(("a", "b"), repeat=2))
