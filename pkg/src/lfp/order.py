"""The layered ordering on interpretations and its greatest lower bound.

Interpretations are compared rank by rank: equal below some pivot rank j,
subset at rank j for defined (and rank-0) relations, superset at rank j for
constrained relations, and (unless j is the last rank) an actual difference
at rank j. The meet intersects defined relations and unions constrained
ones, restricted at each rank to the models that still agree with the meet
on everything below.
"""
from __future__ import annotations

from itertools import product

from .errors import SignatureError
from .model import (CONSTRAINED, Interpretation, RankMap, Relation, Universe)


def _check_signatures(interps, ranks: RankMap):
    rels = set(ranks.relations())
    for rho in interps:
        if set(rho.keys()) != rels:
            raise SignatureError("interpretations must cover exactly the ranked relations")


def lex_leq(rho1: Interpretation, rho2: Interpretation, ranks: RankMap) -> bool:
    """rho1 below-or-equal rho2 in the layered (lexicographic) order."""
    _check_signatures((rho1, rho2), ranks)
    for j in range(ranks.order + 1):
        ok = True
        for rel in ranks.relations():
            rank = ranks.rank(rel)
            if rank < j:
                ok = rho1[rel] == rho2[rel]
            elif rank == j:
                if ranks.kind(rel) == CONSTRAINED:
                    ok = rho1[rel] >= rho2[rel]
                else:
                    ok = rho1[rel] <= rho2[rel]
            if not ok:
                break
        if not ok:
            continue
        if j == ranks.order or any(
                rho1[rel] != rho2[rel] for rel in ranks.at_rank(j)):
            return True
    return False


def layer_leq(rho1: Interpretation, rho2: Interpretation, j: int, ranks: RankMap) -> bool:
    """Equal below rank j and pointwise subset at rank j (both kinds)."""
    _check_signatures((rho1, rho2), ranks)
    for rel in ranks.relations():
        rank = ranks.rank(rel)
        if rank < j and rho1[rel] != rho2[rel]:
            return False
        if rank == j and not rho1[rel] <= rho2[rel]:
            return False
    return True


def full_relation(universe: Universe, arity: int) -> Relation:
    return frozenset(product(universe.atoms, repeat=arity))


def meet(models: list[Interpretation], ranks: RankMap, universe: Universe,
         arities: dict[str, int]) -> Interpretation:
    """Greatest lower bound of a non-empty set of interpretations.

    Computed by rank induction; when no model is left in agreement below rank
    j, the intersection over the empty family is the full relation and the
    union is the empty one.
    """
    if not models:
        raise ValueError("meet of an empty model set is not exposed")
    _check_signatures(models, ranks)
    result: Interpretation = {}
    pool = list(models)
    for j in range(ranks.order + 1):
        rank_rels = ranks.at_rank(j)
        for rel in rank_rels:
            if ranks.kind(rel) == CONSTRAINED:
                acc: frozenset = frozenset()
                for rho in pool:
                    acc |= rho[rel]
            else:
                acc = full_relation(universe, arities[rel])
                for rho in pool:
                    acc &= rho[rel]
            result[rel] = acc
        pool = [rho for rho in pool
                if all(rho[rel] == result[rel] for rel in rank_rels)]
    return result
