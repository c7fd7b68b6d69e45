"""Binary constraint satisfaction compiled to a constrain layer, plus the
AC-3 reference algorithm.

Every value kept in a domain needs a supporting value on the other side of
each constraint touching its variable; solving the constrain layer computes
the greatest such sub-domains. Unary restrictions are diagonal binary
constraints on (v, v).
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .errors import ParseError
from .model import (And, App, Atom, Clause, CONSTRAIN, ConImplies, Exists,
                    FunctionEnv, Interpretation, LayeredFormula, Query,
                    Universe, Var, con_and, forall_con, freeze)

TUPLE_STYLE = "tuples"
SUB_STYLE = "sub"


@dataclass(frozen=True)
class Constraint:
    """Binary constraint between var indices i and j (0-based, i == j allowed)."""

    i: int
    j: int
    pairs: frozenset[tuple[Atom, Atom]]
    diff_band: tuple[int, int] | None = None  # (lo, hi) when pairs = {lo <= y-x <= hi}


def diff_band(i: int, j: int, lo: int, hi: int, universe: Universe) -> Constraint:
    """lo <= x_j - x_i <= hi as an explicit pair table."""
    pairs = frozenset((x, y) for x in universe.atoms for y in universe.atoms
                      if lo <= y - x <= hi)
    return Constraint(i, j, pairs, diff_band=(lo, hi))


def unary_allowed(i: int, allowed, universe: Universe) -> Constraint:
    """x_i restricted to `allowed`, as a diagonal constraint on (x_i, x_i)."""
    values = frozenset(allowed)
    if not values <= set(universe.atoms):
        raise ValueError("allowed values must be universe atoms")
    return Constraint(i, i, frozenset((v, v) for v in values))


@dataclass(frozen=True)
class Csp:
    universe: Universe
    variables: tuple[str, ...]
    domains: tuple[frozenset[Atom], ...]
    constraints: tuple[Constraint, ...]

    def __post_init__(self):
        if len(self.variables) != len(self.domains):
            raise ValueError("one domain per variable")
        for d in self.domains:
            if not d <= set(self.universe.atoms):
                raise ValueError("domains must be subsets of the universe")
        for c in self.constraints:
            if not (0 <= c.i < len(self.variables) and 0 <= c.j < len(self.variables)):
                raise ValueError("constraint indices out of range")
            for x, y in c.pairs:
                if x not in self.domains[c.i] or y not in self.domains[c.j]:
                    raise ValueError("constraint pairs must stay within the domains")


def domain_relation(csp: Csp, i: int) -> str:
    return f"D{i + 1}"


def csp_formula(csp: Csp, style: str = TUPLE_STYLE) -> LayeredFormula:
    """Rank-0 facts for constraint tables and declared domains, one constrain
    layer demanding support in both directions per constraint.

    With style="sub", difference-band constraints use a unary band relation
    queried through the built-in subtraction instead of an explicit pair table;
    both styles solve identically.
    """
    if style not in (TUPLE_STYLE, SUB_STYLE):
        raise ValueError(f"unknown style {style!r}")
    if style == SUB_STYLE and not csp.universe.is_integer:
        raise ValueError("the sub style needs an integer universe")
    universe = csp.universe
    n = len(csp.variables)
    signature: dict[str, int] = {}
    facts: dict[str, frozenset] = {}
    for i in range(n):
        signature[domain_relation(csp, i)] = 1
        signature[f"DOM{i + 1}"] = 1
        facts[f"DOM{i + 1}"] = frozenset((v,) for v in csp.domains[i])

    conjuncts = []
    x, y = Var("x"), Var("y")
    # declared domains always bound the result
    for i in range(n):
        conjuncts.append(forall_con(["x"], ConImplies(
            domain_relation(csp, i), (x,), Query(f"DOM{i + 1}", (x,)))))

    for k, c in enumerate(csp.constraints, 1):
        di, dj = domain_relation(csp, c.i), domain_relation(csp, c.j)
        use_sub = style == SUB_STYLE and c.diff_band is not None
        if use_sub:
            rel = f"B{k}"
            signature[rel] = 1
            lo, hi = c.diff_band
            facts[rel] = frozenset((z,) for z in universe.atoms if lo <= z <= hi)
            support = Query(rel, (App("sub", (y, x)),))
        else:
            rel = f"C{k}"
            signature[rel] = 2
            facts[rel] = frozenset(c.pairs)
            support = Query(rel, (x, y))
        # x is always the value on side i, y the value on side j; the two
        # conjuncts only swap which side demands the supporting witness
        conjuncts.append(forall_con(["x"], ConImplies(
            di, (x,), Exists("y", And(Query(dj, (y,)), support)))))
        conjuncts.append(forall_con(["y"], ConImplies(
            dj, (y,), Exists("x", And(Query(di, (x,)), support)))))

    layer = Clause(CONSTRAIN, con_and(*conjuncts))
    return LayeredFormula(universe=universe, signature=signature,
                          functions=FunctionEnv(universe), facts=freeze(facts),
                          layers=(layer,))


def csp_domains(rho: Interpretation, csp: Csp) -> dict[str, set[Atom]]:
    return {var: {t[0] for t in rho[domain_relation(csp, i)]}
            for i, var in enumerate(csp.variables)}


def ac3_oracle(csp: Csp) -> dict[str, set[Atom]]:
    """Mackworth's arc-revision worklist; returns the maximal arc-consistent
    sub-domains (possibly empty)."""
    domains: list[set[Atom]] = [set(d) for d in csp.domains]
    # directed arcs: (variable to prune, constraint, support side)
    arcs = [(c.i, c, True) for c in csp.constraints] + \
           [(c.j, c, False) for c in csp.constraints]

    def revise(var: int, c: Constraint, forward: bool) -> bool:
        other = c.j if forward else c.i
        removed = False
        for value in list(domains[var]):
            if forward:
                supported = any((value, w) in c.pairs for w in domains[other])
            else:
                supported = any((w, value) in c.pairs for w in domains[other])
            if not supported:
                domains[var].discard(value)
                removed = True
        return removed

    queue = deque(range(len(arcs)))
    queued = set(queue)
    while queue:
        k = queue.popleft()
        queued.discard(k)
        var, c, forward = arcs[k]
        if revise(var, c, forward):
            for k2, (_, c2, forward2) in enumerate(arcs):
                support_side = c2.j if forward2 else c2.i
                if support_side == var and k2 not in queued:
                    queue.append(k2)
                    queued.add(k2)
    return {v: domains[i] for i, v in enumerate(csp.variables)}


# ---------------------------------------------------------------------------
# Line-oriented input format
# ---------------------------------------------------------------------------

def parse_csp(text: str) -> Csp:
    """Lines: `var NAME LO..HI` or `var NAME v...`, `con A B diff LO HI`,
    `con A B pairs x:y ...`, `con A allow LO..HI` or `con A allow v...`."""
    variables: list[str] = []
    domains: list[frozenset[int]] = []
    raw_cons: list[tuple] = []
    lo_all, hi_all = None, None

    def values_of(tokens, lineno):
        nonlocal lo_all, hi_all
        out = set()
        for tok in tokens:
            if ".." in tok:
                try:
                    lo, hi = (int(p) for p in tok.split("..", 1))
                except ValueError:
                    raise ParseError(f"bad range {tok!r}", lineno)
                out.update(range(lo, hi + 1))
            else:
                try:
                    out.add(int(tok))
                except ValueError:
                    raise ParseError(f"bad value {tok!r}", lineno)
        return out

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        word, *rest = line.split()
        if word == "var" and len(rest) >= 2:
            variables.append(rest[0])
            domains.append(frozenset(values_of(rest[1:], lineno)))
        elif word == "con" and len(rest) >= 2:
            raw_cons.append((lineno, rest))
        else:
            raise ParseError(f"unrecognized line {line!r}", lineno)
    if not variables:
        raise ParseError("a CSP needs at least one var line")
    values = set().union(*domains)
    universe = Universe.of_range(min(values), max(values))

    def var_index(name, lineno):
        if name not in variables:
            raise ParseError(f"unknown variable {name!r}", lineno)
        return variables.index(name)

    constraints = []
    for lineno, rest in raw_cons:
        if len(rest) >= 3 and rest[1] == "allow":
            i = var_index(rest[0], lineno)
            allowed = values_of(rest[2:], lineno) & set(domains[i])
            constraints.append(unary_allowed(i, allowed, universe))
        elif len(rest) >= 5 and rest[2] == "diff":
            i, j = var_index(rest[0], lineno), var_index(rest[1], lineno)
            lo, hi = int(rest[3]), int(rest[4])
            band = diff_band(i, j, lo, hi, universe)
            pairs = frozenset((a, b) for a, b in band.pairs
                              if a in domains[i] and b in domains[j])
            constraints.append(Constraint(i, j, pairs, diff_band=(lo, hi)))
        elif len(rest) >= 3 and rest[2] == "pairs":
            i, j = var_index(rest[0], lineno), var_index(rest[1], lineno)
            pairs = set()
            for tok in rest[3:]:
                try:
                    a, b = (int(p) for p in tok.split(":", 1))
                except ValueError:
                    raise ParseError(f"bad pair {tok!r}", lineno)
                pairs.add((a, b))
            constraints.append(Constraint(i, j, frozenset(pairs)))
        else:
            raise ParseError(f"unrecognized constraint {' '.join(rest)!r}", lineno)
    return Csp(universe=universe, variables=tuple(variables),
               domains=tuple(domains), constraints=tuple(constraints))
