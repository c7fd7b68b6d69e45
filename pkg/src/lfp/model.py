"""Core domain types: universes, terms, conditions, clause layers, interpretations.

All types here are immutable values after construction; a solver run never
mutates its input formula.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .errors import SignatureError

# A universe atom is a symbolic name or an integer; relations hold tuples of atoms.
Atom = str | int
AtomTuple = tuple[Atom, ...]
Relation = frozenset[AtomTuple]
Interpretation = dict[str, Relation]
Valuation = dict[str, Atom]

# Prefix reserved for engine-generated predicate symbols; rejected by the parser.
GENERATED_PREFIX = "__"


def is_generated(name: str) -> bool:
    return name.startswith(GENERATED_PREFIX)


@dataclass(frozen=True)
class Universe:
    """Finite, non-empty, duplicate-free sequence of atoms.

    Homogeneous: either all atoms are symbolic names, or all are integers
    forming a contiguous range (which enables the built-in arithmetic
    functions).
    """

    atoms: tuple[Atom, ...]

    def __post_init__(self):
        if not self.atoms:
            raise ValueError("universe must be non-empty")
        if len(set(self.atoms)) != len(self.atoms):
            raise ValueError("universe atoms must be distinct")
        kinds = {type(a) for a in self.atoms}
        if kinds == {int}:
            lo, hi = min(self.atoms), max(self.atoms)
            if sorted(self.atoms) != list(range(lo, hi + 1)):
                raise ValueError("integer universe must be a contiguous range")
        elif kinds != {str}:
            raise ValueError("universe must be all-symbolic or all-integer")

    @staticmethod
    def of_range(lo: int, hi: int) -> "Universe":
        if hi < lo:
            raise ValueError(f"empty range {lo}..{hi}")
        return Universe(tuple(range(lo, hi + 1)))

    @property
    def is_integer(self) -> bool:
        return isinstance(self.atoms[0], int)

    def __contains__(self, atom: object) -> bool:
        return atom in self._index

    def __len__(self) -> int:
        return len(self.atoms)

    def index(self, atom: Atom) -> int:
        return self._index[atom]

    @property
    def _index(self) -> dict[Atom, int]:
        # cached on first use; the dataclass is frozen so bypass __setattr__
        cached = self.__dict__.get("_index_cache")
        if cached is None:
            cached = {a: i for i, a in enumerate(self.atoms)}
            object.__setattr__(self, "_index_cache", cached)
        return cached


# ---------------------------------------------------------------------------
# Terms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    """A universe atom used directly in a term position."""

    atom: Atom


@dataclass(frozen=True)
class App:
    """Application of a (possibly zero-arity) function symbol."""

    fn: str
    args: tuple["Term", ...] = ()


Term = Var | Const | App


class FunctionEnv:
    """Interpretation of function symbols as partial finite maps over a universe.

    On integer universes the symbols ``add`` and ``sub`` are built in and
    return None (undefined) when the result leaves the universe. Any other
    symbol needs an explicit table.
    """

    BUILTINS = ("add", "sub")

    def __init__(self, universe: Universe,
                 tables: dict[str, dict[AtomTuple, Atom]] | None = None,
                 arities: dict[str, int] | None = None):
        self.universe = universe
        self.tables = {name: dict(tbl) for name, tbl in (tables or {}).items()}
        self.arities: dict[str, int] = {}
        if universe.is_integer:
            for b in self.BUILTINS:
                self.arities[b] = 2
        for name, tbl in self.tables.items():
            widths = {len(t) for t in tbl}
            if len(widths) > 1:
                raise SignatureError(f"function {name}: inconsistent tuple arities")
            self.arities[name] = widths.pop() if widths else (arities or {}).get(name, 0)
            for args, result in tbl.items():
                if result not in universe or any(a not in universe for a in args):
                    raise SignatureError(f"function {name}: entry outside the universe")
        for name, k in (arities or {}).items():
            self.arities.setdefault(name, k)

    def arity(self, fn: str) -> int:
        if fn not in self.arities:
            raise SignatureError(f"unknown function symbol {fn!r}")
        return self.arities[fn]

    def apply(self, fn: str, args: AtomTuple) -> Atom | None:
        """Apply fn; None means the function is undefined at these arguments."""
        if fn not in self.arities:
            raise SignatureError(f"unknown function symbol {fn!r}")
        if len(args) != self.arities[fn]:
            raise SignatureError(f"function {fn!r} expects {self.arities[fn]} arguments")
        if fn in self.tables:
            return self.tables[fn].get(args)
        if self.universe.is_integer and fn in self.BUILTINS:
            a, b = args
            value = a + b if fn == "add" else a - b
            return value if value in self.universe else None
        return None

    def __eq__(self, other):
        return (isinstance(other, FunctionEnv)
                and self.universe == other.universe
                and self.tables == other.tables
                and self.arities == other.arities)


def eval_term(term: Term, functions: FunctionEnv, valuation: Valuation) -> Atom | None:
    """Evaluate a term to an atom; None propagates from any undefined part."""
    if isinstance(term, Var):
        if term.name not in valuation:
            raise SignatureError(f"unbound variable {term.name!r}")
        return valuation[term.name]
    if isinstance(term, Const):
        return term.atom
    args = []
    for sub in term.args:
        value = eval_term(sub, functions, valuation)
        if value is None:
            return None
        args.append(value)
    return functions.apply(term.fn, tuple(args))


def eval_args(args: tuple[Term, ...], functions: FunctionEnv,
              valuation: Valuation) -> AtomTuple | None:
    """Evaluate an argument tuple pointwise; None if any component is undefined."""
    out = []
    for t in args:
        value = eval_term(t, functions, valuation)
        if value is None:
            return None
        out.append(value)
    return tuple(out)


# ---------------------------------------------------------------------------
# Conditions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Query:
    rel: str
    args: tuple[Term, ...]


@dataclass(frozen=True)
class NegQuery:
    rel: str
    args: tuple[Term, ...]


@dataclass(frozen=True)
class And:
    left: "Condition"
    right: "Condition"


@dataclass(frozen=True)
class Or:
    left: "Condition"
    right: "Condition"


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Condition"


@dataclass(frozen=True)
class ForallC:
    var: str
    body: "Condition"


@dataclass(frozen=True)
class TrueC:
    pass


@dataclass(frozen=True)
class FalseC:
    pass


Condition = Query | NegQuery | And | Or | Exists | ForallC | TrueC | FalseC

TRUE = TrueC()
FALSE = FalseC()


def query(rel: str, *names: str) -> Query:
    """Positive query over plain variables (the common case)."""
    return Query(rel, tuple(Var(n) for n in names))


def neg_query(rel: str, *names: str) -> NegQuery:
    return NegQuery(rel, tuple(Var(n) for n in names))


def conj(*conds: Condition) -> Condition:
    """Right-nested conjunction of any number of conditions."""
    if not conds:
        return TRUE
    out = conds[-1]
    for c in reversed(conds[:-1]):
        out = And(c, out)
    return out


def disj(*conds: Condition) -> Condition:
    if not conds:
        return FALSE
    out = conds[-1]
    for c in reversed(conds[:-1]):
        out = Or(c, out)
    return out


# ---------------------------------------------------------------------------
# Clause bodies and layers
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DefImplies:
    """cond implies rel(args): the inductive implication form."""

    cond: Condition
    rel: str
    args: tuple[Term, ...]


@dataclass(frozen=True)
class DefForall:
    var: str
    body: "DefBody"


@dataclass(frozen=True)
class DefAnd:
    left: "DefBody"
    right: "DefBody"


DefBody = DefImplies | DefForall | DefAnd


@dataclass(frozen=True)
class ConImplies:
    """rel(args) implies cond: the co-inductive implication form."""

    rel: str
    args: tuple[Term, ...]
    cond: Condition


@dataclass(frozen=True)
class ConForall:
    var: str
    body: "ConBody"


@dataclass(frozen=True)
class ConAnd:
    left: "ConBody"
    right: "ConBody"


ConBody = ConImplies | ConForall | ConAnd

DEFINE = "define"
CONSTRAIN = "constrain"


@dataclass(frozen=True)
class Clause:
    kind: str  # DEFINE or CONSTRAIN
    body: DefBody | ConBody

    def __post_init__(self):
        if self.kind == DEFINE:
            ok = isinstance(self.body, (DefImplies, DefForall, DefAnd))
        elif self.kind == CONSTRAIN:
            ok = isinstance(self.body, (ConImplies, ConForall, ConAnd))
        else:
            raise ValueError(f"unknown clause kind {self.kind!r}")
        if not ok:
            raise ValueError(f"{self.kind} clause with mismatched body {type(self.body).__name__}")


def forall_def(names, body: DefBody) -> DefBody:
    for n in reversed(list(names)):
        body = DefForall(n, body)
    return body


def forall_con(names, body: ConBody) -> ConBody:
    for n in reversed(list(names)):
        body = ConForall(n, body)
    return body


def def_and(*parts: DefBody) -> DefBody:
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = DefAnd(p, out)
    return out


def con_and(*parts: ConBody) -> ConBody:
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = ConAnd(p, out)
    return out


# ---------------------------------------------------------------------------
# Rank bookkeeping
# ---------------------------------------------------------------------------

FACT = "fact"
DEFINED = "defined"
CONSTRAINED = "constrained"


@dataclass(frozen=True)
class RankInfo:
    rank: int
    kind: str  # FACT, DEFINED or CONSTRAINED


@dataclass(frozen=True)
class RankMap:
    """Rank and assertion kind per relation, plus the number of layers."""

    info: dict[str, RankInfo] = field(default_factory=dict)
    order: int = 0

    def rank(self, rel: str) -> int:
        return self.info[rel].rank

    def kind(self, rel: str) -> str:
        return self.info[rel].kind

    def relations(self):
        return self.info.keys()

    def at_rank(self, j: int) -> list[str]:
        return sorted(r for r, ri in self.info.items() if ri.rank == j)


# ---------------------------------------------------------------------------
# Whole programs
# ---------------------------------------------------------------------------

def _term_vars(term: Term, out: set[str]):
    if isinstance(term, Var):
        out.add(term.name)
    elif isinstance(term, App):
        for a in term.args:
            _term_vars(a, out)


def _walk_cond(cond: Condition, bound: set[str], visit):
    if isinstance(cond, (Query, NegQuery)):
        visit("query", cond, bound)
    elif isinstance(cond, (And, Or)):
        _walk_cond(cond.left, bound, visit)
        _walk_cond(cond.right, bound, visit)
    elif isinstance(cond, (Exists, ForallC)):
        _walk_cond(cond.body, bound | {cond.var}, visit)


def _walk_body(body, bound: set[str], visit):
    if isinstance(body, DefImplies):
        _walk_cond(body.cond, bound, visit)
        visit("head", body, bound)
    elif isinstance(body, ConImplies):
        visit("head", body, bound)
        _walk_cond(body.cond, bound, visit)
    elif isinstance(body, (DefForall, ConForall)):
        _walk_body(body.body, bound | {body.var}, visit)
    elif isinstance(body, (DefAnd, ConAnd)):
        _walk_body(body.left, bound, visit)
        _walk_body(body.right, bound, visit)
    else:
        raise TypeError(f"unexpected clause node {type(body).__name__}")


@dataclass(frozen=True)
class LayeredFormula:
    """A parsed program: universe, signature, base facts and ordered clause layers.

    Layer indices run 1..len(layers); facts interpret the rank-0 relations.
    """

    universe: Universe
    signature: dict[str, int]            # relation name -> arity
    functions: FunctionEnv
    facts: Interpretation
    layers: tuple[Clause, ...]

    def __post_init__(self):
        asserted: set[str] = set()
        for layer_no, clause in enumerate(self.layers, 1):
            self._check_clause(clause, layer_no, asserted)
        for rel, tuples in self.facts.items():
            if rel not in self.signature:
                raise SignatureError(f"fact for undeclared relation {rel!r}")
            if rel in asserted:
                raise SignatureError(
                    f"relation {rel!r} has base facts but is also asserted in a layer")
            for t in tuples:
                self._check_tuple(rel, t)

    def _check_tuple(self, rel: str, t: AtomTuple):
        if len(t) != self.signature[rel]:
            raise SignatureError(f"{rel!r}: tuple {t} does not match arity {self.signature[rel]}")
        for a in t:
            if a not in self.universe:
                raise SignatureError(f"{rel!r}: atom {a!r} is not in the universe")

    def _check_term(self, term: Term, bound: set[str], where: str):
        if isinstance(term, Var):
            if term.name not in bound:
                raise SignatureError(f"free variable {term.name!r} in {where} (clauses must be closed)")
        elif isinstance(term, Const):
            if term.atom not in self.universe:
                raise SignatureError(f"constant {term.atom!r} in {where} is not a universe atom")
        else:
            if self.functions.arity(term.fn) != len(term.args):
                raise SignatureError(f"function {term.fn!r} applied to {len(term.args)} arguments")
            for a in term.args:
                self._check_term(a, bound, where)

    def _check_clause(self, clause: Clause, layer_no: int, asserted: set[str]):
        def visit(role, node, bound):
            if role == "query":
                rel, args = node.rel, node.args
            else:
                rel, args = node.rel, node.args
                asserted.add(rel)
            if rel not in self.signature:
                raise SignatureError(f"layer {layer_no}: undeclared relation {rel!r}")
            if len(args) != self.signature[rel]:
                raise SignatureError(
                    f"layer {layer_no}: {rel!r} used with {len(args)} arguments, arity is {self.signature[rel]}")
            for t in args:
                self._check_term(t, bound, f"layer {layer_no}")

        _walk_body(clause.body, set(), visit)

    @property
    def order(self) -> int:
        return len(self.layers)


def validate_interpretation(rho: Interpretation, formula: LayeredFormula):
    """Assert every tuple is within the declared universe and arities."""
    for rel, tuples in rho.items():
        if is_generated(rel):
            continue
        arity = formula.signature.get(rel)
        if arity is None:
            raise SignatureError(f"interpretation mentions undeclared relation {rel!r}")
        for t in tuples:
            if len(t) != arity:
                raise SignatureError(f"{rel!r}: tuple {t} has wrong arity")
            if any(a not in formula.universe for a in t):
                raise SignatureError(f"{rel!r}: tuple {t} leaves the universe")


def freeze(rho: dict[str, set | frozenset]) -> Interpretation:
    return {rel: frozenset(tuples) for rel, tuples in rho.items()}
