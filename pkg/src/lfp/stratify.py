"""Stratification checking and rank assignment.

A program is stratified when, for every layer i:
  1. relations asserted in layer i are not asserted again later;
  2. relations queried positively in layer i are not asserted later;
  3. relations queried negatively in layer i are not asserted in layer i or later.
rank(R) is the unique asserting layer index, or 0 for pure fact relations.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .errors import StratificationError
from .model import (CONSTRAINED, DEFINE, DEFINED, FACT, Clause, LayeredFormula,
                    NegQuery, RankInfo, RankMap, _walk_body)


@dataclass
class LayerUsage:
    asserted: set[str] = field(default_factory=set)
    positive: set[str] = field(default_factory=set)
    negative: set[str] = field(default_factory=set)


@dataclass
class UsageReport:
    layers: list[LayerUsage]

    def layer(self, i: int) -> LayerUsage:
        """1-based layer access, mirroring layer numbering in diagnostics."""
        return self.layers[i - 1]


def clause_usage(clause: Clause) -> LayerUsage:
    use = LayerUsage()

    def visit(role, node, bound):
        if role == "head":
            use.asserted.add(node.rel)
        elif isinstance(node, NegQuery):
            use.negative.add(node.rel)
        else:
            use.positive.add(node.rel)

    _walk_body(clause.body, set(), visit)
    return use


def usage(formula: LayeredFormula) -> UsageReport:
    return UsageReport([clause_usage(cl) for cl in formula.layers])


def check_stratification(formula: LayeredFormula) -> RankMap:
    """Return the rank map, or raise StratificationError naming the violated rule."""
    report = usage(formula)
    n = len(report.layers)
    for i in range(1, n + 1):
        here = report.layer(i)
        for later in range(i, n + 1):
            there = report.layer(later)
            if later > i:
                for rel in sorted(here.asserted & there.asserted):
                    kinds = {formula.layers[i - 1].kind, formula.layers[later - 1].kind}
                    extra = (" (once by define and once by constrain)"
                             if len(kinds) == 2 else "")
                    raise StratificationError(
                        1, rel, i, later,
                        f"relation {rel!r} is asserted in layer {i} and again in layer {later}{extra}")
                for rel in sorted(here.positive & there.asserted):
                    raise StratificationError(
                        2, rel, i, later,
                        f"relation {rel!r} is used positively in layer {i} "
                        f"but asserted later, in layer {later}")
            for rel in sorted(here.negative & there.asserted):
                raise StratificationError(
                    3, rel, i, later,
                    f"relation {rel!r} is used negatively in layer {i} "
                    f"but asserted in layer {later}")

    info: dict[str, RankInfo] = {}
    for i, clause in enumerate(formula.layers, 1):
        kind = DEFINED if clause.kind == DEFINE else CONSTRAINED
        for rel in report.layer(i).asserted:
            info[rel] = RankInfo(i, kind)
    for rel in formula.signature:
        info.setdefault(rel, RankInfo(0, FACT))
    return RankMap(info, order=n)
