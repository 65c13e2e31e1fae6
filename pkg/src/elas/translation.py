"""Translation into two-sorted first-order logic, and a finite evaluator.

The target language has a world sort and an agent sort, a ternary relation
``R(w, v, i)`` (world v is accessible from w for agent i), one function
symbol ``f_a`` per name (the agent named a at a world) and one relation
symbol ``Q_P`` per predicate, taking a world followed by agents.

The interesting clauses, for a current world term w:

* ``K{t} phi``   becomes  ``forall_w v. (R(w, v, tr(t)) -> tr_v(phi))``
* ``[?x := t] phi`` with t distinct from ?x becomes
  ``exists_a x. (x = tr(t) & tr_w(phi))``, or equivalently the universal
  form ``forall_a x. (x = tr(t) -> tr_w(phi))``: the value of tr(t) is
  unique, so the two quantifiers agree;
* ``[?x := ?x] phi`` collapses to ``tr_w(phi)``.

Every finite Kripke model induces a finite structure for this language, and
Tarskian evaluation over that structure is an independent second route to
the truth value a formula gets from the model checker.  The translation
itself is purely syntactic (no simplification), so its output is stable
enough to pin in golden tests.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import syntax
from .semantics import KripkeModel
from .syntax import Assign, Formula, Knows, Name, Pred, Term, Var


class SortError(Exception):
    """A term or variable is used at the wrong sort."""


class FolEvalError(Exception):
    """Evaluation hit an unbound variable or an unknown symbol."""


# ---------------------------------------------------------------------------
# Two-sorted first-order syntax

@dataclass(frozen=True)
class WorldVar:
    id: str


@dataclass(frozen=True)
class AgentVar:
    id: str


@dataclass(frozen=True)
class NameApp:
    name: str
    world: "FOLTerm"


FOLTerm = object


@dataclass(frozen=True)
class AgentEq:
    lhs: FOLTerm
    rhs: FOLTerm


@dataclass(frozen=True)
class PredApp:
    sym: str
    world: FOLTerm
    args: tuple


@dataclass(frozen=True)
class RelApp:
    src: FOLTerm
    dst: FOLTerm
    agent: FOLTerm


@dataclass(frozen=True)
class FTop:
    pass


@dataclass(frozen=True)
class FBot:
    pass


@dataclass(frozen=True)
class FNot:
    body: "FOLFormula"


@dataclass(frozen=True)
class FAnd:
    lhs: "FOLFormula"
    rhs: "FOLFormula"


@dataclass(frozen=True)
class FOr:
    lhs: "FOLFormula"
    rhs: "FOLFormula"


@dataclass(frozen=True)
class FImplies:
    lhs: "FOLFormula"
    rhs: "FOLFormula"


@dataclass(frozen=True)
class FIff:
    lhs: "FOLFormula"
    rhs: "FOLFormula"


@dataclass(frozen=True)
class ForallWorld:
    var: str
    body: "FOLFormula"


@dataclass(frozen=True)
class ExistsAgent:
    var: str
    body: "FOLFormula"


@dataclass(frozen=True)
class ForallAgent:
    var: str
    body: "FOLFormula"


FOLFormula = object


# ---------------------------------------------------------------------------
# Translation

class _Translator:
    def __init__(self, universal_assign: bool):
        self.universal = universal_assign
        self.counter = 0

    def fresh_world(self) -> str:
        v = f"v{self.counter}"
        self.counter += 1
        return v

    def term(self, t: Term, w: str) -> FOLTerm:
        if isinstance(t, Var):
            return AgentVar(t.id)
        return NameApp(t.id, WorldVar(w))

    def formula(self, phi: Formula, w: str) -> FOLFormula:
        match phi:
            case syntax.Top():
                return FTop()
            case syntax.Bot():
                return FBot()
            case syntax.Eq(lhs, rhs):
                return AgentEq(self.term(lhs, w), self.term(rhs, w))
            case Pred(sym, args):
                return PredApp(sym, WorldVar(w), tuple(self.term(a, w) for a in args))
            case syntax.Not(body):
                return FNot(self.formula(body, w))
            case syntax.And(l, r):
                return FAnd(self.formula(l, w), self.formula(r, w))
            case syntax.Or(l, r):
                return FOr(self.formula(l, w), self.formula(r, w))
            case syntax.Implies(l, r):
                return FImplies(self.formula(l, w), self.formula(r, w))
            case syntax.Iff(l, r):
                return FIff(self.formula(l, w), self.formula(r, w))
            case Knows(agent, body):
                v = self.fresh_world()
                guard = RelApp(WorldVar(w), WorldVar(v), self.term(agent, w))
                return ForallWorld(v, FImplies(guard, self.formula(body, v)))
            case Assign(var, term, body):
                if isinstance(term, Var) and term.id == var:
                    return self.formula(body, w)
                value = self.term(term, w)
                inner = self.formula(body, w)
                if self.universal:
                    return ForallAgent(var, FImplies(AgentEq(AgentVar(var), value), inner))
                return ExistsAgent(var, FAnd(AgentEq(AgentVar(var), value), inner))
        raise TypeError(f"not a formula: {phi!r}")


def translate(phi: Formula, world_var: str = "w") -> FOLFormula:
    """Standard translation, existential form for the assignment binder.
    Bound world variables are v0, v1, ... in left-to-right order."""
    return _Translator(universal_assign=False).formula(phi, world_var)


def translate_universal(phi: Formula, world_var: str = "w") -> FOLFormula:
    """Standard translation using the universal form of the assignment
    clause; agrees with translate on every model."""
    return _Translator(universal_assign=True).formula(phi, world_var)


# ---------------------------------------------------------------------------
# Induced structures and evaluation

@dataclass(frozen=True)
class FOLStructure:
    worlds: tuple
    agents: tuple
    rel: frozenset            # triples (w, v, agent)
    preds: dict               # sym -> frozenset of (world, agent...) tuples
    names: dict               # (name, world) -> agent


def induce_structure(m: KripkeModel) -> FOLStructure:
    """Repackage a Kripke model as a first-order structure: R collects the
    tagged union of the per-agent relations, Q_P prepends the world to each
    rho tuple, f_a is eta."""
    rel = frozenset((w, v, agent) for agent, pairs in m.relations.items()
                    for (w, v) in pairs)
    preds: dict = {p: set() for p in m.signature.predicates}
    for (pred, world), tuples in m.rho.items():
        for tup in tuples:
            preds[pred].add((world, *tup))
    return FOLStructure(
        worlds=m.worlds,
        agents=m.agents,
        rel=rel,
        preds={p: frozenset(ts) for p, ts in preds.items()},
        names=dict(m.eta),
    )


def _eval_term(s: FOLStructure, val: dict, t: FOLTerm) -> str:
    if isinstance(t, WorldVar):
        if t.id not in val:
            raise FolEvalError(f"unbound world variable {t.id}")
        w = val[t.id]
        if w not in s.worlds:
            raise SortError(f"{t.id} is bound to {w}, not a world")
        return w
    if isinstance(t, AgentVar):
        if t.id not in val:
            raise FolEvalError(f"unbound agent variable {t.id}")
        a = val[t.id]
        if a not in s.agents:
            raise SortError(f"{t.id} is bound to {a}, not an agent")
        return a
    if isinstance(t, NameApp):
        w = _eval_term(s, val, t.world)
        key = (t.name, w)
        if key not in s.names:
            raise FolEvalError(f"no interpretation for f_{t.name} at {w}")
        return s.names[key]
    raise TypeError(f"not a first-order term: {t!r}")


def fol_eval(s: FOLStructure, valuation: dict, phi: FOLFormula) -> bool:
    """Classical satisfaction; quantifiers range over the finite domains."""
    match phi:
        case FTop():
            return True
        case FBot():
            return False
        case AgentEq(lhs, rhs):
            return _eval_term(s, valuation, lhs) == _eval_term(s, valuation, rhs)
        case PredApp(sym, world, args):
            if sym not in s.preds:
                raise FolEvalError(f"unknown relation Q_{sym}")
            tup = (_eval_term(s, valuation, world),
                   *(_eval_term(s, valuation, a) for a in args))
            return tup in s.preds[sym]
        case RelApp(src, dst, agent):
            triple = (_eval_term(s, valuation, src),
                      _eval_term(s, valuation, dst),
                      _eval_term(s, valuation, agent))
            return triple in s.rel
        case FNot(body):
            return not fol_eval(s, valuation, body)
        case FAnd(l, r):
            return fol_eval(s, valuation, l) and fol_eval(s, valuation, r)
        case FOr(l, r):
            return fol_eval(s, valuation, l) or fol_eval(s, valuation, r)
        case FImplies(l, r):
            return (not fol_eval(s, valuation, l)) or fol_eval(s, valuation, r)
        case FIff(l, r):
            return fol_eval(s, valuation, l) == fol_eval(s, valuation, r)
        case ForallWorld(var, body):
            return all(fol_eval(s, {**valuation, var: w}, body) for w in s.worlds)
        case ExistsAgent(var, body):
            return any(fol_eval(s, {**valuation, var: a}, body) for a in s.agents)
        case ForallAgent(var, body):
            return all(fol_eval(s, {**valuation, var: a}, body) for a in s.agents)
    raise TypeError(f"not a first-order formula: {phi!r}")


# ---------------------------------------------------------------------------
# Printing and sort checking

def print_fol_term(t: FOLTerm) -> str:
    if isinstance(t, (WorldVar, AgentVar)):
        return t.id
    if isinstance(t, NameApp):
        return f"f_{t.name}({print_fol_term(t.world)})"
    raise TypeError(f"not a first-order term: {t!r}")


def print_fol(phi: FOLFormula) -> str:
    """Fixed text rendering: binary connectives always parenthesised,
    quantifiers written forall_w / exists_a / forall_a."""
    match phi:
        case FTop():
            return "true"
        case FBot():
            return "false"
        case AgentEq(lhs, rhs):
            return f"{print_fol_term(lhs)} = {print_fol_term(rhs)}"
        case PredApp(sym, world, args):
            inner = ", ".join([print_fol_term(world)] + [print_fol_term(a) for a in args])
            return f"Q_{sym}({inner})"
        case RelApp(src, dst, agent):
            return f"R({print_fol_term(src)}, {print_fol_term(dst)}, {print_fol_term(agent)})"
        case FNot(body):
            inner = print_fol(body)
            if isinstance(body, (FAnd, FOr, FImplies, FIff, AgentEq)):
                inner = "(" + inner + ")"
            return "~" + inner
        case FAnd(l, r):
            return f"({print_fol(l)} & {print_fol(r)})"
        case FOr(l, r):
            return f"({print_fol(l)} | {print_fol(r)})"
        case FImplies(l, r):
            return f"({print_fol(l)} -> {print_fol(r)})"
        case FIff(l, r):
            return f"({print_fol(l)} <-> {print_fol(r)})"
        case ForallWorld(var, body):
            return f"forall_w {var}. {_quant_body(body)}"
        case ExistsAgent(var, body):
            return f"exists_a {var}. {_quant_body(body)}"
        case ForallAgent(var, body):
            return f"forall_a {var}. {_quant_body(body)}"
    raise TypeError(f"not a first-order formula: {phi!r}")


def _quant_body(body: FOLFormula) -> str:
    s = print_fol(body)
    if not s.startswith("("):
        s = "(" + s + ")"
    return s


def check_sorts(phi: FOLFormula, world_vars=frozenset(), agent_vars=frozenset()) -> list:
    """Sort problems in the formula, as strings.  Free variables are sorted
    by how they are used; a clash between uses is reported."""
    problems: list = []

    def term(t, kind, worlds, agents):
        if isinstance(t, WorldVar):
            if kind != "world":
                problems.append(f"world variable {t.id} used at agent sort")
            elif t.id in agents:
                problems.append(f"{t.id} is bound at agent sort but used as a world")
        elif isinstance(t, AgentVar):
            if kind != "agent":
                problems.append(f"agent variable {t.id} used at world sort")
            elif t.id in worlds:
                problems.append(f"{t.id} is bound at world sort but used as an agent")
        elif isinstance(t, NameApp):
            term(t.world, "world", worlds, agents)
        else:
            problems.append(f"unknown term {t!r}")

    def walk(f, worlds, agents):
        match f:
            case FTop() | FBot():
                pass
            case AgentEq(lhs, rhs):
                term(lhs, "agent", worlds, agents)
                term(rhs, "agent", worlds, agents)
            case PredApp(_, world, args):
                term(world, "world", worlds, agents)
                for a in args:
                    term(a, "agent", worlds, agents)
            case RelApp(src, dst, agent):
                term(src, "world", worlds, agents)
                term(dst, "world", worlds, agents)
                term(agent, "agent", worlds, agents)
            case FNot(body):
                walk(body, worlds, agents)
            case FAnd(l, r) | FOr(l, r) | FImplies(l, r) | FIff(l, r):
                walk(l, worlds, agents)
                walk(r, worlds, agents)
            case ForallWorld(var, body):
                walk(body, worlds | {var}, agents - {var})
            case ExistsAgent(var, body) | ForallAgent(var, body):
                walk(body, worlds - {var}, agents | {var})
            case _:
                problems.append(f"unknown formula {f!r}")

    walk(phi, frozenset(world_vars), frozenset(agent_vars))
    return problems
