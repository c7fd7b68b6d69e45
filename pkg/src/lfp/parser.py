"""Parser for the textual program format.

    program := universe decl* fact* layer+
    universe := "universe" ( "{" atom ("," atom)* "}" | INT ".." INT ) ";"
    decl     := "rel" NAME "/" INT ";"
              | "fun" NAME "/" INT table? ";"
    table    := "{" entry ("," entry)* "}"     entry := "(" atoms ")" "->" atom
    fact     := "fact" NAME "(" atoms? ")" "."
    layer    := ("define" | "constrain") "{" conjunct ("," conjunct)* "}"

A define conjunct is `forall x: ... cond => R(terms)` (a bare `R(terms)` means
`true => R(terms)`); a constrain conjunct is `forall x: ... R(terms) => cond`
(`!R(terms)` means `R(terms) => false`). Conditions use `!`, `&`, `|`, `exists
x:`, `forall x:`, `true`, `false` with precedence ! > & > |; a quantifier's
scope extends as far right as possible, to the next unbalanced `)` or the end
of the conjunct. `#` starts a comment. Names with the reserved `__` prefix are
rejected; they belong to engine-generated symbols.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import ParseError
from .model import (And, App, Atom, Clause, CONSTRAIN, ConAnd, ConImplies,
                    Condition, Const, DEFINE, DefAnd, DefImplies, Exists,
                    FALSE, ForallC, FunctionEnv, GENERATED_PREFIX,
                    LayeredFormula, NegQuery, Or, Query, TRUE, Term, Universe,
                    Var, forall_con, forall_def, freeze, is_generated)

KEYWORDS = {"universe", "rel", "fun", "fact", "define", "constrain",
            "forall", "exists", "true", "false"}

_PUNCT = ("..", "=>", "->", "{", "}", "(", ")", ",", ";", ".", "/", "|", "&", "!", ":")


@dataclass(frozen=True)
class Token:
    kind: str  # "name", "int", "punct", "eof"
    value: str | int
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    line, col = 1, 1
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            i, line, col = i + 1, line + 1, 1
            continue
        if ch in " \t\r":
            i, col = i + 1, col + 1
            continue
        if ch == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if ch.isdigit() or (ch == "-" and i + 1 < n and text[i + 1].isdigit()):
            j = i + 1
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(Token("int", int(text[i:j]), line, col))
            col += j - i
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(Token("name", text[i:j], line, col))
            col += j - i
            i = j
            continue
        for p in _PUNCT:
            if text.startswith(p, i):
                tokens.append(Token("punct", p, line, col))
                col += len(p)
                i += len(p)
                break
        else:
            raise ParseError(f"unexpected character {ch!r}", line, col)
    tokens.append(Token("eof", "", line, col))
    return tokens


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self, ahead: int = 0) -> Token:
        return self.tokens[min(self.pos + ahead, len(self.tokens) - 1)]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def fail(self, message: str, tok: Token | None = None):
        tok = tok or self.peek()
        raise ParseError(message, tok.line, tok.col)

    def expect_punct(self, value: str) -> Token:
        tok = self.peek()
        if tok.kind != "punct" or tok.value != value:
            self.fail(f"expected {value!r}, found {self._show(tok)}")
        return self.advance()

    def at_punct(self, value: str) -> bool:
        tok = self.peek()
        return tok.kind == "punct" and tok.value == value

    def eat_punct(self, value: str) -> bool:
        if self.at_punct(value):
            self.advance()
            return True
        return False

    def at_keyword(self, word: str) -> bool:
        tok = self.peek()
        return tok.kind == "name" and tok.value == word

    def eat_keyword(self, word: str) -> bool:
        if self.at_keyword(word):
            self.advance()
            return True
        return False

    def expect_keyword(self, word: str):
        if not self.eat_keyword(word):
            self.fail(f"expected {word!r}, found {self._show(self.peek())}")

    def name(self, what: str) -> str:
        tok = self.peek()
        if tok.kind != "name" or tok.value in KEYWORDS:
            self.fail(f"expected {what}, found {self._show(tok)}")
        if is_generated(tok.value):
            self.fail(f"names starting with {GENERATED_PREFIX!r} are reserved "
                      f"for generated symbols")
        self.advance()
        return tok.value

    def integer(self) -> int:
        tok = self.peek()
        if tok.kind != "int":
            self.fail(f"expected an integer, found {self._show(tok)}")
        self.advance()
        return tok.value

    @staticmethod
    def _show(tok: Token) -> str:
        return "end of input" if tok.kind == "eof" else repr(str(tok.value))

    # -- program structure ---------------------------------------------------

    def program(self) -> LayeredFormula:
        universe = self.universe_decl()
        signature: dict[str, int] = {}
        fun_arities: dict[str, int] = {}
        fun_tables: dict[str, dict[tuple, Atom]] = {}
        while self.at_keyword("rel") or self.at_keyword("fun"):
            if self.eat_keyword("rel"):
                name = self.name("relation name")
                self.expect_punct("/")
                arity = self.integer()
                if name in signature:
                    self.fail(f"relation {name!r} declared twice")
                signature[name] = arity
                self.expect_punct(";")
            else:
                self.expect_keyword("fun")
                name = self.name("function name")
                self.expect_punct("/")
                arity = self.integer()
                fun_arities[name] = arity
                if self.at_punct("{"):
                    fun_tables[name] = self.fun_table(universe, arity, name)
                self.expect_punct(";")
        functions = FunctionEnv(universe, tables=fun_tables, arities=fun_arities)

        facts: dict[str, set] = {}
        while self.eat_keyword("fact"):
            rel = self.name("relation name")
            if rel not in signature:
                self.fail(f"fact for undeclared relation {rel!r}")
            args = self.atom_tuple(universe)
            if len(args) != signature[rel]:
                self.fail(f"fact {rel!r}: expected {signature[rel]} atoms, got {len(args)}")
            facts.setdefault(rel, set()).add(args)
            self.expect_punct(".")

        layers = []
        while self.at_keyword("define") or self.at_keyword("constrain"):
            layers.append(self.layer(universe, signature, functions))
        if not layers:
            self.fail("a program needs at least one define or constrain layer")
        tok = self.peek()
        if tok.kind != "eof":
            self.fail(f"unexpected {self._show(tok)} after the last layer")
        return LayeredFormula(universe=universe, signature=signature,
                              functions=functions, facts=freeze(facts),
                              layers=tuple(layers))

    def universe_decl(self) -> Universe:
        self.expect_keyword("universe")
        if self.eat_punct("{"):
            atoms = [self.atom_token(None)]
            while self.eat_punct(","):
                atoms.append(self.atom_token(None))
            self.expect_punct("}")
            self.expect_punct(";")
            try:
                return Universe(tuple(atoms))
            except ValueError as exc:
                self.fail(str(exc))
        lo = self.integer()
        self.expect_punct("..")
        hi = self.integer()
        self.expect_punct(";")
        if hi < lo:
            self.fail(f"empty universe range {lo}..{hi}")
        return Universe.of_range(lo, hi)

    def atom_token(self, universe: Universe | None) -> Atom:
        tok = self.peek()
        if tok.kind == "int":
            atom: Atom = self.integer()
        elif tok.kind == "name":
            atom = self.name("an atom")
        else:
            self.fail(f"expected an atom, found {self._show(tok)}")
        if universe is not None and atom not in universe:
            self.fail(f"{atom!r} is not a universe atom", tok)
        return atom

    def atom_tuple(self, universe: Universe) -> tuple[Atom, ...]:
        self.expect_punct("(")
        if self.eat_punct(")"):
            return ()
        atoms = [self.atom_token(universe)]
        while self.eat_punct(","):
            atoms.append(self.atom_token(universe))
        self.expect_punct(")")
        return tuple(atoms)

    def fun_table(self, universe: Universe, arity: int, name: str) -> dict[tuple, Atom]:
        self.expect_punct("{")
        table: dict[tuple, Atom] = {}
        while True:
            args = self.atom_tuple(universe)
            if len(args) != arity:
                self.fail(f"function {name!r}: entry with {len(args)} arguments, arity is {arity}")
            self.expect_punct("->")
            table[args] = self.atom_token(universe)
            if not self.eat_punct(","):
                break
        self.expect_punct("}")
        return table

    # -- layers ---------------------------------------------------------------

    def layer(self, universe, signature, functions) -> Clause:
        kind = DEFINE if self.eat_keyword("define") else CONSTRAIN
        if kind == CONSTRAIN:
            self.expect_keyword("constrain")
        self.expect_punct("{")
        ctx = _Scope(universe, signature, functions)
        conjuncts = [self.conjunct(kind, ctx)]
        while self.eat_punct(","):
            conjuncts.append(self.conjunct(kind, ctx))
        self.expect_punct("}")
        body = conjuncts[-1]
        for part in reversed(conjuncts[:-1]):
            body = DefAnd(part, body) if kind == DEFINE else ConAnd(part, body)
        return Clause(kind, body)

    def conjunct(self, kind: str, ctx: "_Scope"):
        if kind == DEFINE:
            return self.define_conjunct(ctx)
        bound: list[str] = []
        while self.eat_keyword("forall"):
            bound.append(self.name("a variable"))
            self.expect_punct(":")
        with ctx.scoped(bound):
            inner = self.constrain_implication(ctx)
        return forall_con(bound, inner)

    def define_conjunct(self, ctx: "_Scope"):
        """quant* implication, optionally chained with '&' at clause level;
        the quantifier scope is greedy, so the chain stays inside it."""
        bound: list[str] = []
        while self.eat_keyword("forall"):
            bound.append(self.name("a variable"))
            self.expect_punct(":")
        with ctx.scoped(bound):
            inner = self.define_implication(ctx)
            if self.eat_punct("&"):
                inner = DefAnd(inner, self.define_conjunct(ctx))
        return forall_def(bound, inner)

    def define_implication(self, ctx: "_Scope"):
        start = self.peek()
        cond = self.cond(ctx)
        if self.eat_punct("=>"):
            rel, args = self.head_atom(ctx)
            return DefImplies(cond, rel, args)
        # bare heads abbreviate `true => head`; a conjunction of bare heads
        # is a clause-level conjunction
        bare = self._bare_heads(cond, ctx)
        if bare is not None:
            return bare
        self.fail("expected '=>' after the condition", start)

    def _bare_heads(self, cond, ctx: "_Scope"):
        if isinstance(cond, Query):
            return DefImplies(TRUE, cond.rel, cond.args)
        if isinstance(cond, And):
            left = self._bare_heads(cond.left, ctx)
            right = self._bare_heads(cond.right, ctx)
            if left is not None and right is not None:
                return DefAnd(left, right)
        return None

    def constrain_implication(self, ctx: "_Scope") -> ConImplies:
        if self.eat_punct("!"):
            rel, args = self.head_atom(ctx)
            return ConImplies(rel, args, FALSE)
        rel, args = self.head_atom(ctx)
        self.expect_punct("=>")
        return ConImplies(rel, args, self.cond(ctx))

    def head_atom(self, ctx: "_Scope") -> tuple[str, tuple[Term, ...]]:
        tok = self.peek()
        rel = self.name("a relation name")
        args = self.term_tuple(ctx)
        ctx.check_relation(rel, len(args), self, tok)
        return rel, args

    # -- conditions -----------------------------------------------------------

    def cond(self, ctx: "_Scope") -> Condition:
        left = self.and_cond(ctx)
        while self.eat_punct("|"):
            left = Or(left, self.and_cond(ctx))
        return left

    def and_cond(self, ctx: "_Scope") -> Condition:
        left = self.unary_cond(ctx)
        while self.eat_punct("&"):
            left = And(left, self.unary_cond(ctx))
        return left

    def unary_cond(self, ctx: "_Scope") -> Condition:
        if self.eat_punct("!"):
            tok = self.peek()
            rel = self.name("a relation name after '!'")
            args = self.term_tuple(ctx)
            ctx.check_relation(rel, len(args), self, tok)
            return NegQuery(rel, args)
        if self.eat_keyword("exists") or self.at_keyword("forall"):
            quantifier = Exists
            if self.eat_keyword("forall"):
                quantifier = ForallC
            var = self.name("a variable")
            self.expect_punct(":")
            with ctx.scoped([var]):
                return quantifier(var, self.cond(ctx))
        if self.eat_punct("("):
            inner = self.cond(ctx)
            self.expect_punct(")")
            return inner
        if self.eat_keyword("true"):
            return TRUE
        if self.eat_keyword("false"):
            return FALSE
        tok = self.peek()
        rel = self.name("a condition")
        args = self.term_tuple(ctx)
        ctx.check_relation(rel, len(args), self, tok)
        return Query(rel, args)

    # -- terms ----------------------------------------------------------------

    def term_tuple(self, ctx: "_Scope") -> tuple[Term, ...]:
        self.expect_punct("(")
        if self.eat_punct(")"):
            return ()
        terms = [self.term(ctx)]
        while self.eat_punct(","):
            terms.append(self.term(ctx))
        self.expect_punct(")")
        return tuple(terms)

    def term(self, ctx: "_Scope") -> Term:
        tok = self.peek()
        if tok.kind == "int":
            atom = self.integer()
            if atom not in ctx.universe:
                self.fail(f"{atom} is not a universe atom", tok)
            return Const(atom)
        name = self.name("a term")
        if self.at_punct("("):
            args = self.term_tuple(ctx)
            arity = ctx.function_arity(name, self, tok)
            if arity != len(args):
                self.fail(f"function {name!r} expects {arity} arguments, got {len(args)}", tok)
            return App(name, args)
        return ctx.resolve_name(name, self, tok)


class _Scope:
    """Name resolution: quantifier-bound variables, functions, universe atoms."""

    def __init__(self, universe: Universe, signature: dict[str, int],
                 functions: FunctionEnv):
        self.universe = universe
        self.signature = signature
        self.functions = functions
        self.bound: list[str] = []

    def scoped(self, names: list[str]):
        scope = self

        class _Ctx:
            def __enter__(self_inner):
                scope.bound.extend(names)

            def __exit__(self_inner, *exc):
                del scope.bound[len(scope.bound) - len(names):]

        return _Ctx()

    def check_relation(self, rel: str, nargs: int, parser: _Parser, tok: Token):
        if rel not in self.signature:
            parser.fail(f"undeclared relation {rel!r}", tok)
        if self.signature[rel] != nargs:
            parser.fail(f"relation {rel!r} has arity {self.signature[rel]}, got {nargs}", tok)

    def function_arity(self, name: str, parser: _Parser, tok: Token) -> int:
        try:
            return self.functions.arity(name)
        except Exception:
            parser.fail(f"undeclared function {name!r}", tok)

    def resolve_name(self, name: str, parser: _Parser, tok: Token) -> Term:
        if name in self.bound:
            return Var(name)
        if name in self.functions.arities:
            if self.functions.arity(name) != 0:
                parser.fail(f"function {name!r} needs arguments", tok)
            return App(name, ())
        if name in self.universe:
            return Const(name)
        parser.fail(f"unknown name {name!r} (not a bound variable, function or atom)", tok)


def parse_program(text: str) -> LayeredFormula:
    return _Parser(tokenize(text)).program()
