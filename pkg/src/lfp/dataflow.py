"""Bit-vector dataflow analyses compiled to clause layers, plus the classical
iterative worklist solver used as a reference.

Per-node transfer is x -> (x - kill) | gen. May analyses take the least
solution (a define layer), must analyses the greatest (a constrain layer).
Backward analyses propagate against the edges and pin the exit node to the
initial information; forward analyses propagate along the edges and pin the
entry node. For backward analyses the transfer of the edge source is applied,
for forward analyses the transfer of the edge target; the pinned extremal
node's own transfer is never applied, so effectful extremal statements need a
synthetic successor node.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .errors import ParseError
from .model import (And, Clause, CONSTRAIN, ConImplies, Const, DEFINE,
                    DefImplies, FunctionEnv, Interpretation, LayeredFormula,
                    NegQuery, Or, Query, Universe, Var, con_and, def_and,
                    forall_con, forall_def, freeze)

FORWARD = "fwd"
BACKWARD = "bwd"
MAY = "may"
MUST = "must"


@dataclass(frozen=True)
class Cfg:
    nodes: tuple[str, ...]
    edges: tuple[tuple[str, str], ...]
    items: tuple[str, ...]
    kill: dict[str, frozenset[str]]
    gen: dict[str, frozenset[str]]
    iota: frozenset[str]

    def __post_init__(self):
        node_set = set(self.nodes)
        if node_set & set(self.items):
            raise ValueError("node and item names must be disjoint")
        for s, t in self.edges:
            if s not in node_set or t not in node_set:
                raise ValueError(f"edge ({s},{t}) uses an undeclared node")
        for mapping in (self.kill, self.gen):
            for n, xs in mapping.items():
                if n not in node_set or not xs <= set(self.items):
                    raise ValueError(f"kill/gen of {n!r} is malformed")
        if not self.iota <= set(self.items):
            raise ValueError("initial information must be a subset of the items")

    @property
    def entry(self) -> str:
        targets = {t for _, t in self.edges}
        candidates = [n for n in self.nodes if n not in targets]
        if len(candidates) != 1:
            raise ValueError(f"need exactly one entry node (no incoming edges), found {candidates}")
        return candidates[0]

    @property
    def exit(self) -> str:
        sources = {s for s, _ in self.edges}
        candidates = [n for n in self.nodes if n not in sources]
        if len(candidates) != 1:
            raise ValueError(f"need exactly one exit node (no outgoing edges), found {candidates}")
        return candidates[0]

    def kill_of(self, n: str) -> frozenset[str]:
        return self.kill.get(n, frozenset())

    def gen_of(self, n: str) -> frozenset[str]:
        return self.gen.get(n, frozenset())


def _transfer_cond(analysis_node: str, transfer_node: str, x: Var) -> "And | Or":
    """(A(analysis_node, x) & !kill(transfer_node, x)) | gen(transfer_node, x)"""
    return Or(And(Query("A", (Const(analysis_node), x)),
                  NegQuery("kill", (Const(transfer_node), x))),
              Query("gen", (Const(transfer_node), x)))


def dataflow_formula(cfg: Cfg, direction: str, modality: str) -> LayeredFormula:
    """One layer per analysis: define for may, constrain for must.

    The edge relation, node set, kill/gen tables and the initial information
    are rank-0 facts; the result relation A pairs nodes with items.
    """
    if direction not in (FORWARD, BACKWARD) or modality not in (MAY, MUST):
        raise ValueError(f"unknown analysis kind {direction!r}/{modality!r}")
    universe = Universe(tuple(cfg.nodes) + tuple(cfg.items))
    signature = {"A": 2, "E": 2, "N": 1, "kill": 2, "gen": 2, "iota": 1}
    facts = {
        "E": frozenset(cfg.edges),
        "N": frozenset((n,) for n in cfg.nodes),
        "kill": frozenset((n, x) for n in cfg.nodes for x in cfg.kill_of(n)),
        "gen": frozenset((n, x) for n in cfg.nodes for x in cfg.gen_of(n)),
        "iota": frozenset((x,) for x in cfg.iota),
    }
    x = Var("x")
    pinned = cfg.exit if direction == BACKWARD else cfg.entry

    if modality == MAY:
        conjuncts = [forall_def(["x"], DefImplies(Query("iota", (x,)), "A", (Const(pinned), x)))]
        for s, t in cfg.edges:
            if direction == BACKWARD:
                cond = _transfer_cond(analysis_node=t, transfer_node=s, x=x)
                head = (Const(s), x)
            else:
                cond = _transfer_cond(analysis_node=s, transfer_node=t, x=x)
                head = (Const(t), x)
            conjuncts.append(forall_def(["x"], DefImplies(cond, "A", head)))
        layer = Clause(DEFINE, def_and(*conjuncts))
    else:
        conjuncts = [forall_con(["x"], ConImplies("A", (Const(pinned), x), Query("iota", (x,))))]
        for s, t in cfg.edges:
            if direction == BACKWARD:
                cond = _transfer_cond(analysis_node=t, transfer_node=s, x=x)
                head = (Const(s), x)
            else:
                cond = _transfer_cond(analysis_node=s, transfer_node=t, x=x)
                head = (Const(t), x)
            conjuncts.append(forall_con(["x"], ConImplies("A", head, cond)))
        layer = Clause(CONSTRAIN, con_and(*conjuncts))

    return LayeredFormula(universe=universe, signature=signature,
                          functions=FunctionEnv(universe), facts=freeze(facts),
                          layers=(layer,))


def analysis_result(rho: Interpretation, cfg: Cfg) -> dict[str, set[str]]:
    """Project the solved A relation onto the node/item grid.

    Must analyses leave tuples outside the grid unconstrained (the greatest
    solution keeps them), so the projection is what the analysis means.
    """
    items = set(cfg.items)
    out: dict[str, set[str]] = {n: set() for n in cfg.nodes}
    for n, item in rho["A"]:
        if n in out and item in items:
            out[n].add(item)
    return out


def dataflow_oracle(cfg: Cfg, direction: str, modality: str) -> dict[str, set[str]]:
    """Classical worklist iteration on the dataflow equations."""
    if direction not in (FORWARD, BACKWARD) or modality not in (MAY, MUST):
        raise ValueError(f"unknown analysis kind {direction!r}/{modality!r}")
    items = set(cfg.items)
    if direction == BACKWARD:
        pinned = cfg.exit
        neighbours = {n: [t for s, t in cfg.edges if s == n] for n in cfg.nodes}
        dependants = {n: [s for s, t in cfg.edges if t == n] for n in cfg.nodes}
    else:
        pinned = cfg.entry
        neighbours = {n: [s for s, t in cfg.edges if t == n] for n in cfg.nodes}
        dependants = {n: [t for s, t in cfg.edges if s == n] for n in cfg.nodes}

    def transfer(n: str, value: set[str]) -> set[str]:
        # each node applies its own transfer to the neighbouring value
        return (value - cfg.kill_of(n)) | cfg.gen_of(n)

    result: dict[str, set[str]] = {}
    for n in cfg.nodes:
        if n == pinned:
            result[n] = set(cfg.iota)
        elif modality == MAY:
            result[n] = set()
        else:
            result[n] = set(items)

    queue = deque(n for n in cfg.nodes if n != pinned)
    while queue:
        n = queue.popleft()
        if n == pinned:
            continue
        values = [transfer(n, result[m]) for m in neighbours[n]]
        if modality == MAY:
            new = set().union(*values) if values else set()
        else:
            new = set.intersection(*values) if values else set(items)
        if new != result[n]:
            result[n] = new
            queue.extend(dependants[n])
    return result


# ---------------------------------------------------------------------------
# Line-oriented input format
# ---------------------------------------------------------------------------

def parse_cfg(text: str) -> Cfg:
    """Lines: `node n`, `edge s t`, `kill n items...`, `gen n items...`,
    `iota items...`, `item names...`; `#` comments."""
    nodes: dict[str, None] = {}
    items: dict[str, None] = {}
    edges: list[tuple[str, str]] = []
    kill: dict[str, set[str]] = {}
    gen: dict[str, set[str]] = {}
    iota: set[str] = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        word, *rest = line.split()
        if word == "node" and len(rest) >= 1:
            for n in rest:
                nodes.setdefault(n, None)
        elif word == "edge" and len(rest) == 2:
            nodes.setdefault(rest[0], None)
            nodes.setdefault(rest[1], None)
            edges.append((rest[0], rest[1]))
        elif word in ("kill", "gen") and len(rest) >= 1:
            nodes.setdefault(rest[0], None)
            table = kill if word == "kill" else gen
            table.setdefault(rest[0], set()).update(rest[1:])
            for x in rest[1:]:
                items.setdefault(x, None)
        elif word == "iota":
            iota.update(rest)
            for x in rest:
                items.setdefault(x, None)
        elif word == "item" and len(rest) >= 1:
            for x in rest:
                items.setdefault(x, None)
        else:
            raise ParseError(f"unrecognized line {line!r}", lineno)
    try:
        cfg = Cfg(nodes=tuple(nodes), edges=tuple(edges), items=tuple(items),
                  kill={n: frozenset(v) for n, v in kill.items()},
                  gen={n: frozenset(v) for n, v in gen.items()},
                  iota=frozenset(iota))
        cfg.entry, cfg.exit  # extremal nodes must exist and be unique
        return cfg
    except ValueError as exc:
        raise ParseError(str(exc))
