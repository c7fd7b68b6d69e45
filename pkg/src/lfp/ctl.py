"""Computation tree logic over finite transition systems without terminal
states, compiled subformula-by-subformula into clause layers, plus the
classical recursive satisfaction-set oracle and the two-process ticket
mutual-exclusion system used as a worked instance.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import ParseError
from .model import (And, Atom, Clause, CONSTRAIN, ConImplies, DEFINE,
                    DefImplies, Exists, ForallC, FunctionEnv, Interpretation,
                    LayeredFormula, Or, TRUE, Universe, Var, con_and, def_and,
                    forall_con, forall_def, freeze, neg_query, query)


@dataclass(frozen=True)
class Kripke:
    states: tuple[Atom, ...]
    transitions: frozenset[tuple[Atom, Atom]]
    labels: dict[str, frozenset[Atom]]
    initial: Atom | None = None

    def __post_init__(self):
        states = set(self.states)
        for s, t in self.transitions:
            if s not in states or t not in states:
                raise ValueError(f"transition ({s},{t}) uses an unknown state")
        for prop, holds in self.labels.items():
            if not holds <= states:
                raise ValueError(f"label {prop!r} marks unknown states")
        sources = {s for s, _ in self.transitions}
        terminal = states - sources
        if terminal:
            raise ValueError(f"terminal states are not allowed: {sorted(map(str, terminal))}")
        if self.initial is not None and self.initial not in states:
            raise ValueError(f"initial state {self.initial!r} is not a state")

    def successors(self, s: Atom) -> set[Atom]:
        return {t for (a, t) in self.transitions if a == s}


# ---------------------------------------------------------------------------
# State formulas (the path operator is fused into its quantifier)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TrueF:
    pass


@dataclass(frozen=True)
class Prop:
    name: str


@dataclass(frozen=True)
class NotF:
    sub: "CtlFormula"


@dataclass(frozen=True)
class AndF:
    left: "CtlFormula"
    right: "CtlFormula"


@dataclass(frozen=True)
class EX:
    sub: "CtlFormula"


@dataclass(frozen=True)
class AX:
    sub: "CtlFormula"


@dataclass(frozen=True)
class EU:
    left: "CtlFormula"
    right: "CtlFormula"


@dataclass(frozen=True)
class AU:
    left: "CtlFormula"
    right: "CtlFormula"


@dataclass(frozen=True)
class EG:
    sub: "CtlFormula"


@dataclass(frozen=True)
class AG:
    sub: "CtlFormula"


CtlFormula = TrueF | Prop | NotF | AndF | EX | AX | EU | AU | EG | AG

_RESERVED = {"true", "E", "A", "U", "EX", "AX", "EG", "AG", "EF", "AF"}


def parse_ctl(text: str) -> CtlFormula:
    """Formulas over `true`, proposition names, `!`, `&`, `EX/AX/EG/AG/EF/AF`
    prefixes and `E[.. U ..]` / `A[.. U ..]`; EF and AF are sugar for
    until-from-true."""
    tokens = _ctl_tokens(text)
    pos = 0

    def peek():
        return tokens[pos] if pos < len(tokens) else ("eof", "")

    def advance():
        nonlocal pos
        tok = peek()
        pos += 1
        return tok

    def expect(value):
        kind, got = advance()
        if got != value:
            raise ParseError(f"expected {value!r}, found {got or 'end of input'}")

    def conjunction():
        left = unary()
        while peek() == ("punct", "&"):
            advance()
            left = AndF(left, unary())
        return left

    def unary():
        kind, value = peek()
        if kind == "punct" and value == "!":
            advance()
            return NotF(unary())
        if kind == "punct" and value == "(":
            advance()
            inner = conjunction()
            expect(")")
            return inner
        if kind == "name":
            advance()
            if value == "true":
                return TrueF()
            if value in ("EX", "AX", "EG", "AG"):
                sub = unary()
                return {"EX": EX, "AX": AX, "EG": EG, "AG": AG}[value](sub)
            if value in ("EF", "AF"):
                sub = unary()
                cls = EU if value == "EF" else AU
                return cls(TrueF(), sub)
            if value in ("E", "A"):
                expect("[")
                left = conjunction()
                expect("U")
                right = conjunction()
                expect("]")
                return (EU if value == "E" else AU)(left, right)
            if value in _RESERVED:
                raise ParseError(f"{value!r} cannot be used here")
            return Prop(value)
        raise ParseError(f"unexpected {value or 'end of input'!r} in formula")

    out = conjunction()
    if peek() != ("eof", ""):
        raise ParseError(f"trailing input {peek()[1]!r} after formula")
    return out


def _ctl_tokens(text: str):
    tokens = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch in "!&()[]":
            tokens.append(("punct", ch))
            i += 1
            continue
        if ch.isalnum() or ch == "_":
            j = i
            while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            tokens.append(("name", "U" if word == "U" else word))
            i = j
            continue
        raise ParseError(f"unexpected character {ch!r} in formula")
    return tokens


def format_ctl(phi: CtlFormula) -> str:
    if isinstance(phi, TrueF):
        return "true"
    if isinstance(phi, Prop):
        return phi.name
    if isinstance(phi, NotF):
        return f"!{format_ctl(phi.sub)}"
    if isinstance(phi, AndF):
        return f"({format_ctl(phi.left)} & {format_ctl(phi.right)})"
    if isinstance(phi, (EX, AX, EG, AG)):
        return f"{type(phi).__name__} {format_ctl(phi.sub)}"
    if isinstance(phi, (EU, AU)):
        quant = "E" if isinstance(phi, EU) else "A"
        return f"{quant}[{format_ctl(phi.left)} U {format_ctl(phi.right)}]"
    raise TypeError(f"unexpected formula {type(phi).__name__}")


# ---------------------------------------------------------------------------
# Compilation: one layer per distinct subformula, bottom-up
# ---------------------------------------------------------------------------

@dataclass
class CompiledCtl:
    formula: LayeredFormula
    top: str                       # relation holding the whole formula's states
    relations: dict[CtlFormula, str]


def ctl_compile(phi: CtlFormula, ts: Kripke) -> CompiledCtl:
    universe = Universe(tuple(ts.states))
    signature: dict[str, int] = {"T": 2}
    facts: dict[str, frozenset] = {"T": frozenset(ts.transitions)}
    for prop, holds in sorted(ts.labels.items()):
        signature[f"L_{prop}"] = 1
        facts[f"L_{prop}"] = frozenset((s,) for s in holds)

    layers: list[Clause] = []
    relations: dict[CtlFormula, str] = {}
    s = Var("s")

    def rel_of(sub: CtlFormula) -> str:
        if sub in relations:
            return relations[sub]
        if isinstance(sub, (NotF, EX, AX, EG, AG)):
            rel_of(sub.sub)
        elif isinstance(sub, (AndF, EU, AU)):
            rel_of(sub.left)
            rel_of(sub.right)
        name = f"sat{len(relations)}"
        relations[sub] = name
        signature[name] = 1
        layers.append(_layer_for(sub, name))
        return name

    def _layer_for(sub: CtlFormula, name: str) -> Clause:
        if isinstance(sub, TrueF):
            return Clause(DEFINE, forall_def(["s"], DefImplies(TRUE, name, (s,))))
        if isinstance(sub, Prop):
            if f"L_{sub.name}" not in signature:
                raise ParseError(f"unknown atomic proposition {sub.name!r}")
            return Clause(DEFINE, forall_def(
                ["s"], DefImplies(query(f"L_{sub.name}", "s"), name, (s,))))
        if isinstance(sub, AndF):
            a, b = rel_of(sub.left), rel_of(sub.right)
            return Clause(DEFINE, forall_def(
                ["s"], DefImplies(And(query(a, "s"), query(b, "s")), name, (s,))))
        if isinstance(sub, NotF):
            a = rel_of(sub.sub)
            return Clause(DEFINE, forall_def(
                ["s"], DefImplies(neg_query(a, "s"), name, (s,))))
        if isinstance(sub, EX):
            a = rel_of(sub.sub)
            return Clause(DEFINE, forall_def(["s"], DefImplies(
                Exists("t", And(query("T", "s", "t"), query(a, "t"))), name, (s,))))
        if isinstance(sub, AX):
            a = rel_of(sub.sub)
            return Clause(DEFINE, forall_def(["s"], DefImplies(
                ForallC("t", Or(neg_query("T", "s", "t"), query(a, "t"))), name, (s,))))
        if isinstance(sub, EU):
            a, b = rel_of(sub.left), rel_of(sub.right)
            return Clause(DEFINE, def_and(
                forall_def(["s"], DefImplies(query(b, "s"), name, (s,))),
                forall_def(["s"], DefImplies(
                    And(query(a, "s"),
                        Exists("t", And(query("T", "s", "t"), query(name, "t")))),
                    name, (s,)))))
        if isinstance(sub, AU):
            a, b = rel_of(sub.left), rel_of(sub.right)
            return Clause(DEFINE, def_and(
                forall_def(["s"], DefImplies(query(b, "s"), name, (s,))),
                forall_def(["s"], DefImplies(
                    And(query(a, "s"),
                        ForallC("t", Or(neg_query("T", "s", "t"), query(name, "t")))),
                    name, (s,)))))
        if isinstance(sub, EG):
            a = rel_of(sub.sub)
            return Clause(CONSTRAIN, con_and(
                forall_con(["s"], ConImplies(name, (s,), query(a, "s"))),
                forall_con(["s"], ConImplies(
                    name, (s,),
                    Exists("t", And(query("T", "s", "t"), query(name, "t")))))))
        if isinstance(sub, AG):
            a = rel_of(sub.sub)
            return Clause(CONSTRAIN, con_and(
                forall_con(["s"], ConImplies(name, (s,), query(a, "s"))),
                forall_con(["s"], ConImplies(
                    name, (s,),
                    ForallC("t", Or(neg_query("T", "s", "t"), query(name, "t")))))))
        raise TypeError(f"unexpected formula {type(sub).__name__}")

    top = rel_of(phi)
    compiled = LayeredFormula(universe=universe, signature=signature,
                              functions=FunctionEnv(universe), facts=freeze(facts),
                              layers=tuple(layers))
    return CompiledCtl(formula=compiled, top=top, relations=relations)


def sat_states(rho: Interpretation, compiled: CompiledCtl) -> set[Atom]:
    return {t[0] for t in rho[compiled.top]}


# ---------------------------------------------------------------------------
# Reference oracle: recursive satisfaction sets with fixpoint iteration
# ---------------------------------------------------------------------------

def ctl_oracle(phi: CtlFormula, ts: Kripke) -> set[Atom]:
    states = set(ts.states)
    succ = {s: ts.successors(s) for s in ts.states}

    def sat(sub: CtlFormula) -> set[Atom]:
        if isinstance(sub, TrueF):
            return set(states)
        if isinstance(sub, Prop):
            if sub.name not in ts.labels:
                raise ParseError(f"unknown atomic proposition {sub.name!r}")
            return set(ts.labels[sub.name])
        if isinstance(sub, NotF):
            return states - sat(sub.sub)
        if isinstance(sub, AndF):
            return sat(sub.left) & sat(sub.right)
        if isinstance(sub, EX):
            good = sat(sub.sub)
            return {s for s in states if succ[s] & good}
        if isinstance(sub, AX):
            good = sat(sub.sub)
            return {s for s in states if succ[s] <= good}
        if isinstance(sub, (EU, AU)):
            keep, target = sat(sub.left), sat(sub.right)
            current = set(target)
            while True:
                if isinstance(sub, EU):
                    added = {s for s in keep - current if succ[s] & current}
                else:
                    added = {s for s in keep - current if succ[s] <= current}
                if not added:
                    return current
                current |= added
        if isinstance(sub, (EG, AG)):
            current = sat(sub.sub)
            while True:
                if isinstance(sub, EG):
                    kept = {s for s in current if succ[s] & current}
                else:
                    kept = {s for s in current if succ[s] <= current}
                if kept == current:
                    return current
                current = kept
        raise TypeError(f"unexpected formula {type(sub).__name__}")

    return sat(phi)


# ---------------------------------------------------------------------------
# Two-process ticket mutual exclusion, interleaved and bounded
# ---------------------------------------------------------------------------

def bakery_builder(ticket_bound: int) -> Kripke:
    """Interleaving of two ticket-taking processes with tickets clamped at
    ticket_bound; locations are 1 (idle), 2 (waiting), 3 (critical).

    Process 1: take x1 := min(x2+1, bound); enter when x2 = 0 or x1 < x2
    (else keep waiting); leave with x1 := 0. Process 2 is symmetric. States
    are explored from both processes idle with both tickets 0; any state
    without a successor would get a self-loop, keeping the system total.
    """
    if ticket_bound < 2:
        raise ValueError("ticket_bound must be at least 2")

    def clamp(v: int) -> int:
        return min(v, ticket_bound)

    def moves(state):
        l1, l2, x1, x2 = state
        out = []
        # process 1
        if l1 == 1:
            out.append((2, l2, clamp(x2 + 1), x2))
        elif l1 == 2:
            if x2 == 0 or x1 < x2:
                out.append((3, l2, x1, x2))
            else:
                out.append((2, l2, x1, x2))
        else:
            out.append((1, l2, 0, x2))
        # process 2
        if l2 == 1:
            out.append((l1, 2, x1, clamp(x1 + 1)))
        elif l2 == 2:
            if x1 == 0 or x2 < x1:
                out.append((l1, 3, x1, x2))
            else:
                out.append((l1, 2, x1, x2))
        else:
            out.append((l1, 1, x1, 0))
        return out

    initial = (1, 1, 0, 0)
    seen = {initial}
    frontier = [initial]
    transitions = set()
    while frontier:
        state = frontier.pop()
        targets = moves(state)
        if not targets:
            targets = [state]  # self-loop keeps the system terminal-state free
        for target in targets:
            transitions.add((state, target))
            if target not in seen:
                seen.add(target)
                frontier.append(target)

    def name(state):
        l1, l2, x1, x2 = state
        return f"s{l1}{l2}_{x1}{x2}"

    states = tuple(sorted(name(s) for s in seen))
    return Kripke(
        states=states,
        transitions=frozenset((name(a), name(b)) for a, b in transitions),
        labels={
            "crit1": frozenset(name(s) for s in seen if s[0] == 3),
            "crit2": frozenset(name(s) for s in seen if s[1] == 3),
        },
        initial=name(initial),
    )


# ---------------------------------------------------------------------------
# Line-oriented input format
# ---------------------------------------------------------------------------

def parse_kripke(text: str) -> Kripke:
    """Lines: `state names...`, `trans s t`, `label prop states...`,
    `init s` (optional)."""
    states: dict[str, None] = {}
    transitions: set[tuple[str, str]] = set()
    labels: dict[str, set[str]] = {}
    initial = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        word, *rest = line.split()
        if word == "state" and rest:
            for s in rest:
                states.setdefault(s, None)
        elif word == "trans" and len(rest) == 2:
            states.setdefault(rest[0], None)
            states.setdefault(rest[1], None)
            transitions.add((rest[0], rest[1]))
        elif word == "label" and len(rest) >= 1:
            labels.setdefault(rest[0], set()).update(rest[1:])
        elif word == "init" and len(rest) == 1:
            initial = rest[0]
        else:
            raise ParseError(f"unrecognized line {line!r}", lineno)
    try:
        return Kripke(states=tuple(states),
                      transitions=frozenset(transitions),
                      labels={p: frozenset(v) for p, v in labels.items()},
                      initial=initial)
    except ValueError as exc:
        raise ParseError(str(exc))
