"""Syntax of the epistemic language with assignment operators.

Terms are either variables (rigid, written ``?x``) or names (non-rigid,
written ``a``, ``bob``).  Formulas are built from equality atoms ``t = t'``,
predicate atoms ``P(t1, ..., tn)``, the Boolean connectives, the termed
knowledge operator ``K{t}`` and the assignment binder ``[?x := t]``.

``Kh{t}`` (the dual of ``K{t}``) and ``<?x := t>`` (the dual of the
assignment box) are surface sugar only: the parser expands them to
``~K{t}~`` and ``~[?x := t]~`` and the printer folds them back.

Concrete grammar (whitespace insignificant between tokens)::

    formula  := iff
    iff      := impl { "<->" impl }
    impl     := disj [ "->" impl ]
    disj     := conj { "|" conj }
    conj     := unary { "&" unary }
    unary    := "~" unary | "K" "{" term "}" unary | "Kh" "{" term "}" unary
              | "[" VAR ":=" term "]" unary | "<" VAR ":=" term ">" unary
              | atom
    atom     := term "=" term | PRED [ "(" term { "," term } ")" ]
              | "(" formula ")" | "true" | "false"
    term     := VAR | NAME
    VAR      := "?" ident          NAME := lower-initial ident
    PRED     := upper-initial ident

Precedence, tightest first: unary operators, ``&``, ``|``, ``->``
(right-associative), ``<->``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Union


class ParseError(Exception):
    """Lexical or grammatical error, with a character position."""

    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (at position {pos})")
        self.message = message
        self.pos = pos


class ArityError(ParseError):
    """The same predicate symbol was used with two different arities."""


class SubstitutionError(Exception):
    """Substitution would capture the replacement variable."""


class FreshnessError(Exception):
    """A variable required to be fresh already occurs in the input."""


# ---------------------------------------------------------------------------
# Abstract syntax

@dataclass(frozen=True)
class Var:
    id: str


@dataclass(frozen=True)
class Name:
    id: str


Term = Union[Var, Name]


@dataclass(frozen=True)
class Top:
    pass


@dataclass(frozen=True)
class Bot:
    pass


@dataclass(frozen=True)
class Eq:
    lhs: Term
    rhs: Term


@dataclass(frozen=True)
class Pred:
    sym: str
    args: tuple


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class And:
    lhs: "Formula"
    rhs: "Formula"


@dataclass(frozen=True)
class Or:
    lhs: "Formula"
    rhs: "Formula"


@dataclass(frozen=True)
class Implies:
    lhs: "Formula"
    rhs: "Formula"


@dataclass(frozen=True)
class Iff:
    lhs: "Formula"
    rhs: "Formula"


@dataclass(frozen=True)
class Knows:
    agent: Term
    body: "Formula"


@dataclass(frozen=True)
class Assign:
    var: str
    term: Term
    body: "Formula"


Formula = Union[Top, Bot, Eq, Pred, Not, And, Or, Implies, Iff, Knows, Assign]

BINARY = (And, Or, Implies, Iff)


def kh(agent: Term, body: Formula) -> Formula:
    """The dual knowledge operator Kh{t}, i.e. ~K{t}~."""
    return Not(Knows(agent, Not(body)))


def assign_diamond(var: str, term: Term, body: Formula) -> Formula:
    """The assignment diamond <?x := t>, i.e. ~[?x := t]~."""
    return Not(Assign(var, term, Not(body)))


@dataclass(frozen=True)
class Signature:
    """Finite stock of symbols a formula or model is built over."""

    predicates: dict
    names: frozenset
    variables: frozenset = frozenset()


# ---------------------------------------------------------------------------
# Lexer

_PUNCT = ("<->", ":=", "->", "(", ")", "{", "}", "[", "]", ",", "=", "~",
          "&", "|", "<", ">")


def _tokenize(text: str) -> list:
    """Yield (kind, value, pos) triples; kinds: VAR NAME PRED PUNCT TRUE FALSE."""
    tokens = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c == "?":
            j = i + 1
            if j >= n or not (text[j].isalpha() or text[j] == "_"):
                raise ParseError("expected identifier after '?'", i)
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(("VAR", text[i + 1:j], i))
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            if word == "true":
                tokens.append(("TRUE", word, i))
            elif word == "false":
                tokens.append(("FALSE", word, i))
            elif word[0].isupper():
                tokens.append(("PRED", word, i))
            else:
                tokens.append(("NAME", word, i))
            i = j
            continue
        for p in _PUNCT:
            if text.startswith(p, i):
                tokens.append(("PUNCT", p, i))
                i += len(p)
                break
        else:
            raise ParseError(f"unexpected character {c!r}", i)
    return tokens


# ---------------------------------------------------------------------------
# Parser

class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0
        self.arities: dict = {}

    def peek(self, offset: int = 0):
        i = self.pos + offset
        return self.tokens[i] if i < len(self.tokens) else (None, None, len(self.text))

    def next(self):
        tok = self.peek()
        if tok[0] is None:
            raise ParseError("unexpected end of input", tok[2])
        self.pos += 1
        return tok

    def expect(self, value: str):
        kind, val, pos = self.peek()
        if kind != "PUNCT" or val != value:
            raise ParseError(f"expected {value!r}", pos)
        self.pos += 1

    def at_punct(self, value: str) -> bool:
        kind, val, _ = self.peek()
        return kind == "PUNCT" and val == value

    def parse(self) -> Formula:
        phi = self.iff()
        kind, val, pos = self.peek()
        if kind is not None:
            raise ParseError(f"unexpected trailing input {val!r}", pos)
        return phi

    def iff(self) -> Formula:
        phi = self.impl()
        while self.at_punct("<->"):
            self.next()
            phi = Iff(phi, self.impl())
        return phi

    def impl(self) -> Formula:
        phi = self.disj()
        if self.at_punct("->"):
            self.next()
            return Implies(phi, self.impl())
        return phi

    def disj(self) -> Formula:
        phi = self.conj()
        while self.at_punct("|"):
            self.next()
            phi = Or(phi, self.conj())
        return phi

    def conj(self) -> Formula:
        phi = self.unary()
        while self.at_punct("&"):
            self.next()
            phi = And(phi, self.unary())
        return phi

    def unary(self) -> Formula:
        kind, val, pos = self.peek()
        if kind == "PUNCT" and val == "~":
            self.next()
            return Not(self.unary())
        if kind == "PRED" and val in ("K", "Kh") and self.peek(1)[:2] == ("PUNCT", "{"):
            self.next()
            self.expect("{")
            agent = self.term()
            self.expect("}")
            body = self.unary()
            return Knows(agent, body) if val == "K" else kh(agent, body)
        if kind == "PUNCT" and val in ("[", "<"):
            close = "]" if val == "[" else ">"
            self.next()
            vkind, vval, vpos = self.peek()
            if vkind != "VAR":
                raise ParseError("binder position requires a variable (?x), not a name", vpos)
            self.next()
            self.expect(":=")
            term = self.term()
            self.expect(close)
            body = self.unary()
            if close == "]":
                return Assign(vval, term, body)
            return assign_diamond(vval, term, body)
        return self.atom()

    def atom(self) -> Formula:
        kind, val, pos = self.peek()
        if kind == "TRUE":
            self.next()
            return Top()
        if kind == "FALSE":
            self.next()
            return Bot()
        if kind == "PUNCT" and val == "(":
            self.next()
            phi = self.iff()
            self.expect(")")
            return phi
        if kind == "PRED":
            self.next()
            args = []
            if self.at_punct("("):
                self.next()
                args.append(self.term())
                while self.at_punct(","):
                    self.next()
                    args.append(self.term())
                self.expect(")")
            seen = self.arities.get(val)
            if seen is not None and seen != len(args):
                raise ArityError(
                    f"predicate {val} used with arity {len(args)} after arity {seen}", pos)
            self.arities[val] = len(args)
            return Pred(val, tuple(args))
        if kind in ("VAR", "NAME"):
            lhs = self.term()
            _, eqval, eqpos = self.peek()
            if not self.at_punct("="):
                raise ParseError("expected '=' after a term", eqpos)
            self.next()
            return Eq(lhs, self.term())
        raise ParseError(f"expected a formula, found {val!r}" if kind else "unexpected end of input", pos)

    def term(self) -> Term:
        kind, val, pos = self.peek()
        if kind == "VAR":
            self.next()
            return Var(val)
        if kind == "NAME":
            self.next()
            return Name(val)
        raise ParseError("expected a term (?x or a name)", pos)


def parse_formula(text: str, signature: Signature = None) -> Formula:
    """Parse concrete syntax into a formula.

    Arities are inferred from the first occurrence of each predicate and
    must be used consistently; when a signature is supplied, every symbol
    must also agree with it.
    """
    parser = _Parser(text)
    phi = parser.parse()
    if signature is not None:
        for sym, arity in parser.arities.items():
            if sym not in signature.predicates:
                raise ParseError(f"predicate {sym} not in signature", 0)
            if signature.predicates[sym] != arity:
                raise ArityError(
                    f"predicate {sym} has arity {signature.predicates[sym]} "
                    f"in the signature, used with {arity}", 0)
        for nm in formula_signature(phi).names:
            if nm not in signature.names:
                raise ParseError(f"name {nm} not in signature", 0)
    return phi


def parse_term(text: str) -> Term:
    parser = _Parser(text)
    t = parser.term()
    kind, val, pos = parser.peek()
    if kind is not None:
        raise ParseError(f"unexpected trailing input {val!r}", pos)
    return t


# ---------------------------------------------------------------------------
# Printer

_IFF, _IMPL, _OR, _AND, _UNARY, _ATOM = range(6)


def print_term(t: Term) -> str:
    return "?" + t.id if isinstance(t, Var) else t.id


def _operand(phi: Formula) -> str:
    # Equality atoms under a unary operator get explicit parentheses:
    # [?x := b] K{a} (?x = b) reads better than the bare chain.
    if isinstance(phi, Eq):
        return "(" + _pp(phi, _IFF) + ")"
    return _pp(phi, _UNARY)


def _render(phi: Formula):
    match phi:
        case Top():
            return "true", _ATOM
        case Bot():
            return "false", _ATOM
        case Eq(lhs, rhs):
            return f"{print_term(lhs)} = {print_term(rhs)}", _ATOM
        case Pred(sym, args):
            if not args:
                return sym, _ATOM
            return sym + "(" + ", ".join(print_term(a) for a in args) + ")", _ATOM
        case Not(Knows(agent, Not(inner))):
            return "Kh{" + print_term(agent) + "} " + _operand(inner), _UNARY
        case Not(Assign(var, term, Not(inner))):
            return f"<?{var} := {print_term(term)}> " + _operand(inner), _UNARY
        case Not(body):
            return "~" + _pp(body, _UNARY), _UNARY
        case Knows(agent, body):
            return "K{" + print_term(agent) + "} " + _operand(body), _UNARY
        case Assign(var, term, body):
            return f"[?{var} := {print_term(term)}] " + _operand(body), _UNARY
        case And(lhs, rhs):
            return _pp(lhs, _AND) + " & " + _pp(rhs, _UNARY), _AND
        case Or(lhs, rhs):
            return _pp(lhs, _OR) + " | " + _pp(rhs, _AND), _OR
        case Implies(lhs, rhs):
            return _pp(lhs, _OR) + " -> " + _pp(rhs, _IMPL), _IMPL
        case Iff(lhs, rhs):
            return _pp(lhs, _IFF) + " <-> " + _pp(rhs, _IMPL), _IFF
    raise TypeError(f"not a formula: {phi!r}")


def _pp(phi: Formula, required: int) -> str:
    s, level = _render(phi)
    return "(" + s + ")" if level < required else s


def print_formula(phi: Formula) -> str:
    """Render with minimal parentheses; parse_formula(print_formula(phi)) == phi."""
    return _pp(phi, _IFF)


# ---------------------------------------------------------------------------
# Variables, substitution, relettering

def term_vars(*terms: Term) -> frozenset:
    return frozenset(t.id for t in terms if isinstance(t, Var))


def free_vars(phi: Formula) -> frozenset:
    """Free variables; the term of a binder counts as free even when it is
    the bound variable itself."""
    match phi:
        case Top() | Bot():
            return frozenset()
        case Eq(lhs, rhs):
            return term_vars(lhs, rhs)
        case Pred(_, args):
            return term_vars(*args)
        case Not(body):
            return free_vars(body)
        case And(l, r) | Or(l, r) | Implies(l, r) | Iff(l, r):
            return free_vars(l) | free_vars(r)
        case Knows(agent, body):
            return term_vars(agent) | free_vars(body)
        case Assign(var, term, body):
            return (free_vars(body) - {var}) | term_vars(term)
    raise TypeError(f"not a formula: {phi!r}")


def all_vars(phi: Formula) -> frozenset:
    """Every variable occurring in the formula, free, bound or binding."""
    match phi:
        case Top() | Bot():
            return frozenset()
        case Eq(lhs, rhs):
            return term_vars(lhs, rhs)
        case Pred(_, args):
            return term_vars(*args)
        case Not(body):
            return all_vars(body)
        case And(l, r) | Or(l, r) | Implies(l, r) | Iff(l, r):
            return all_vars(l) | all_vars(r)
        case Knows(agent, body):
            return term_vars(agent) | all_vars(body)
        case Assign(var, term, body):
            return {var} | term_vars(term) | all_vars(body)
    raise TypeError(f"not a formula: {phi!r}")


def names_of(phi: Formula) -> frozenset:
    match phi:
        case Top() | Bot():
            return frozenset()
        case Eq(lhs, rhs):
            return frozenset(t.id for t in (lhs, rhs) if isinstance(t, Name))
        case Pred(_, args):
            return frozenset(t.id for t in args if isinstance(t, Name))
        case Not(body):
            return names_of(body)
        case And(l, r) | Or(l, r) | Implies(l, r) | Iff(l, r):
            return names_of(l) | names_of(r)
        case Knows(agent, body):
            extra = {agent.id} if isinstance(agent, Name) else set()
            return frozenset(extra) | names_of(body)
        case Assign(_, term, body):
            extra = {term.id} if isinstance(term, Name) else set()
            return frozenset(extra) | names_of(body)
    raise TypeError(f"not a formula: {phi!r}")


def _pred_arities(phi: Formula, acc: dict) -> None:
    match phi:
        case Pred(sym, args):
            acc[sym] = len(args)
        case Not(body) | Knows(_, body) | Assign(_, _, body):
            _pred_arities(body, acc)
        case And(l, r) | Or(l, r) | Implies(l, r) | Iff(l, r):
            _pred_arities(l, acc)
            _pred_arities(r, acc)
        case _:
            pass


def formula_signature(phi: Formula) -> Signature:
    """Exactly the predicates, names and free variables occurring in phi."""
    preds: dict = {}
    _pred_arities(phi, preds)
    return Signature(preds, names_of(phi), free_vars(phi))


def is_el_fragment(phi: Formula) -> bool:
    """True iff the formula contains no assignment binder."""
    match phi:
        case Assign(_, _, _):
            return False
        case Not(body) | Knows(_, body):
            return is_el_fragment(body)
        case And(l, r) | Or(l, r) | Implies(l, r) | Iff(l, r):
            return is_el_fragment(l) and is_el_fragment(r)
        case _:
            return True


def _capturing_binder(phi: Formula, y: str, x: str, under: str = None):
    """Return the binder variable that would capture y, or None."""
    match phi:
        case Eq(_, _) | Pred(_, _):
            if under is not None and x in free_vars(phi):
                return under
            return None
        case Top() | Bot():
            return None
        case Not(body):
            return _capturing_binder(body, y, x, under)
        case And(l, r) | Or(l, r) | Implies(l, r) | Iff(l, r):
            return _capturing_binder(l, y, x, under) or _capturing_binder(r, y, x, under)
        case Knows(agent, body):
            if under is not None and x in term_vars(agent):
                return under
            return _capturing_binder(body, y, x, under)
        case Assign(var, term, body):
            if under is not None and x in term_vars(term):
                return under
            if var == x:
                return None          # x is bound below; no free occurrences inside
            inner = under if var != y else var
            return _capturing_binder(body, y, x, inner)
    raise TypeError(f"not a formula: {phi!r}")


def is_admissible(phi: Formula, y: str, x: str) -> bool:
    """True iff substituting y for the free occurrences of x keeps every
    introduced y occurrence free."""
    return _capturing_binder(phi, y, x) is None


def _subst_term(t: Term, y: str, x: str) -> Term:
    if isinstance(t, Var) and t.id == x:
        return Var(y)
    return t


def _subst(phi: Formula, y: str, x: str) -> Formula:
    match phi:
        case Top() | Bot():
            return phi
        case Eq(lhs, rhs):
            return Eq(_subst_term(lhs, y, x), _subst_term(rhs, y, x))
        case Pred(sym, args):
            return Pred(sym, tuple(_subst_term(a, y, x) for a in args))
        case Not(body):
            return Not(_subst(body, y, x))
        case And(l, r):
            return And(_subst(l, y, x), _subst(r, y, x))
        case Or(l, r):
            return Or(_subst(l, y, x), _subst(r, y, x))
        case Implies(l, r):
            return Implies(_subst(l, y, x), _subst(r, y, x))
        case Iff(l, r):
            return Iff(_subst(l, y, x), _subst(r, y, x))
        case Knows(agent, body):
            return Knows(_subst_term(agent, y, x), _subst(body, y, x))
        case Assign(var, term, body):
            term = _subst_term(term, y, x)   # the binder's term position is free
            if var == x:
                return Assign(var, term, body)
            return Assign(var, term, _subst(body, y, x))
    raise TypeError(f"not a formula: {phi!r}")


def substitute(phi: Formula, y: str, x: str) -> Formula:
    """phi with y substituted for the free occurrences of x.

    Raises SubstitutionError when some introduced occurrence of y would be
    captured by a binder.
    """
    binder = _capturing_binder(phi, y, x)
    if binder is not None:
        raise SubstitutionError(
            f"substituting ?{y} for ?{x} is captured by a binder on ?{binder}")
    return _subst(phi, y, x)


def reletter(phi: Formula, z: str) -> Formula:
    """Rename the outermost binder [?x := t] body to [?z := t] body[?z/?x].

    z must occur nowhere in the formula (in particular not in t).
    """
    if not isinstance(phi, Assign):
        raise ValueError("reletter expects a formula of the shape [?x := t] ...")
    if z in all_vars(phi):
        raise FreshnessError(f"?{z} already occurs in the formula")
    return Assign(z, phi.term, substitute(phi.body, z, phi.var))


def fresh_var(avoid, prefix: str = "w") -> str:
    """First of w0, w1, ... not in avoid."""
    i = 0
    while f"{prefix}{i}" in avoid:
        i += 1
    return f"{prefix}{i}"


def knows_who(knower: Term, named: str) -> Formula:
    """The knowing-who construction: the knower identifies the bearer of the
    name across all epistemic alternatives."""
    avoid = term_vars(knower)
    w = fresh_var(avoid)
    return Assign(w, Name(named), Knows(knower, Eq(Var(w), Name(named))))


def node_count(phi) -> int:
    """Number of AST nodes, counting terms; binder variables count with
    their binder node."""
    match phi:
        case Var(_) | Name(_) | Top() | Bot():
            return 1
        case Eq(lhs, rhs):
            return 1 + node_count(lhs) + node_count(rhs)
        case Pred(_, args):
            return 1 + sum(node_count(a) for a in args)
        case Not(body):
            return 1 + node_count(body)
        case And(l, r) | Or(l, r) | Implies(l, r) | Iff(l, r):
            return 1 + node_count(l) + node_count(r)
        case Knows(agent, body):
            return 1 + node_count(agent) + node_count(body)
        case Assign(_, term, body):
            return 1 + node_count(term) + node_count(body)
    raise TypeError(f"not a formula: {phi!r}")


def subformulas(phi: Formula) -> Iterator[Formula]:
    yield phi
    match phi:
        case Not(body) | Knows(_, body) | Assign(_, _, body):
            yield from subformulas(body)
        case And(l, r) | Or(l, r) | Implies(l, r) | Iff(l, r):
            yield from subformulas(l)
            yield from subformulas(r)
        case _:
            pass
