"""Finite constant-domain Kripke models and the model checker.

A model carries a finite set of worlds, a finite domain of agents shared by
all worlds, one accessibility relation per agent, a world-relative
interpretation of predicates (``rho``) and a world-relative interpretation
of names (``eta``).  Variables are interpreted by an assignment ``sigma``
that does not depend on the world: variables are rigid, names are not.

Truth at a pointed model (model, world, sigma):

* ``t = t'`` iff both terms denote the same agent at the world;
* ``P(t1..tn)`` iff the tuple of denotations is in ``rho(P, world)``;
* Booleans are classical;
* ``K{t} phi`` iff phi holds at every world accessible for the agent that
  t denotes *at the current world*;
* ``[?x := t] phi`` iff phi holds at the same world once sigma maps x to
  the current denotation of t.

Models are immutable after construction and evaluation is pure, so a model
may be shared freely between threads.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .syntax import (
    And, Assign, Bot, Eq, Formula, Iff, Implies, Knows, Not, Or, Pred,
    Signature, Term, Top, Var, formula_signature,
)


class EvalError(Exception):
    """A formula refers to a variable, name or predicate the pointed model
    does not cover."""


class ModelError(Exception):
    """A model file is malformed or fails validation."""


@dataclass(frozen=True)
class KripkeModel:
    worlds: tuple
    agents: tuple
    relations: dict          # agent -> frozenset of (world, world)
    rho: dict                # (predicate, world) -> frozenset of agent tuples
    eta: dict                # (name, world) -> agent
    signature: Signature
    _succ: dict = field(default_factory=dict, repr=False, compare=False)

    def successors(self, agent: str, world: str) -> tuple:
        key = (agent, world)
        if key not in self._succ:
            rel = self.relations.get(agent, frozenset())
            self._succ[key] = tuple(sorted(v for (u, v) in rel if u == world))
        return self._succ[key]

    def rho_at(self, pred: str, world: str) -> frozenset:
        return self.rho.get((pred, world), frozenset())


def make_model(worlds, agents, relations, rho, eta, signature) -> KripkeModel:
    """Normalise plain containers into a KripkeModel (worlds and agents are
    kept sorted so iteration order is deterministic)."""
    normalised = {k: frozenset(map(tuple, v)) for k, v in rho.items()}
    return KripkeModel(
        worlds=tuple(sorted(worlds)),
        agents=tuple(sorted(agents)),
        relations={a: frozenset(map(tuple, rel)) for a, rel in relations.items()},
        rho={k: v for k, v in normalised.items() if v},   # empty is the default
        eta=dict(eta),
        signature=signature,
    )


@dataclass(frozen=True)
class PointedModel:
    model: KripkeModel
    world: str
    sigma: dict


def validate_model(m: KripkeModel) -> list:
    """All invariant violations, as human-readable strings; empty when the
    model is well formed."""
    out = []
    if not m.worlds:
        out.append("worlds: must be non-empty")
    if not m.agents:
        out.append("agents: must be non-empty")
    worlds, agents = set(m.worlds), set(m.agents)
    for agent, rel in m.relations.items():
        if agent not in agents:
            out.append(f"relations: unknown agent {agent}")
        for pair in rel:
            if len(pair) != 2 or pair[0] not in worlds or pair[1] not in worlds:
                out.append(f"relations: endpoint outside worlds in {agent}: {pair}")
    for (pred, world), tuples in m.rho.items():
        if pred not in m.signature.predicates:
            out.append(f"rho: unknown predicate {pred}")
            continue
        if world not in worlds:
            out.append(f"rho: unknown world {world} under {pred}")
            continue
        arity = m.signature.predicates[pred]
        for tup in tuples:
            if len(tup) != arity:
                out.append(f"rho: arity violation, {pred}/{arity} holds tuple {tup} at {world}")
            elif any(a not in agents for a in tup):
                out.append(f"rho: tuple member outside agents in {pred} at {world}: {tup}")
    for name in sorted(m.signature.names):
        for world in m.worlds:
            if (name, world) not in m.eta:
                out.append(f"eta not total: no denotation for {name} at {world}")
    for (name, world), agent in m.eta.items():
        if name not in m.signature.names:
            out.append(f"eta: unknown name {name}")
        elif world not in worlds:
            out.append(f"eta: unknown world {world} under {name}")
        elif agent not in agents:
            out.append(f"eta: value {agent} outside agents for {name} at {world}")
    for arity in m.signature.predicates.values():
        if arity < 0:
            out.append("signature: negative arity")
    return out


def is_epistemic(m: KripkeModel) -> bool:
    """True iff every agent's relation is an equivalence relation on the
    worlds."""
    worlds = m.worlds
    for agent in m.agents:
        rel = m.relations.get(agent, frozenset())
        if any((w, w) not in rel for w in worlds):
            return False
        if any((v, u) not in rel for (u, v) in rel):
            return False
        for (u, v) in rel:
            for (v2, w) in rel:
                if v2 == v and (u, w) not in rel:
                    return False
    return True


def denote(m: KripkeModel, sigma: dict, world: str, t: Term) -> str:
    """The agent a term picks out at a world: sigma for variables, eta for
    names."""
    if isinstance(t, Var):
        try:
            return sigma[t.id]
        except KeyError:
            raise EvalError(f"unbound variable ?{t.id}") from None
    try:
        return m.eta[(t.id, world)]
    except KeyError:
        raise EvalError(f"unknown name {t.id} at world {world}") from None


def _check_coverage(m: KripkeModel, sigma: dict, phi: Formula) -> None:
    sig = formula_signature(phi)
    for v in sorted(sig.variables):
        if v not in sigma:
            raise EvalError(f"unbound variable ?{v}")
    for n in sorted(sig.names):
        if n not in m.signature.names:
            raise EvalError(f"unknown name {n}")
    for p, arity in sorted(sig.predicates.items()):
        have = m.signature.predicates.get(p)
        if have is None:
            raise EvalError(f"unknown predicate {p}")
        if have != arity:
            raise EvalError(f"predicate {p} has arity {have} in the model, formula uses {arity}")
    for v, a in sigma.items():
        if a not in m.agents:
            raise EvalError(f"sigma maps ?{v} to {a}, which is not an agent")


def _eval(m: KripkeModel, world: str, sigma: dict, phi: Formula) -> bool:
    match phi:
        case Top():
            return True
        case Bot():
            return False
        case Eq(lhs, rhs):
            return denote(m, sigma, world, lhs) == denote(m, sigma, world, rhs)
        case Pred(sym, args):
            tup = tuple(denote(m, sigma, world, a) for a in args)
            return tup in m.rho_at(sym, world)
        case Not(body):
            return not _eval(m, world, sigma, body)
        case And(l, r):
            return _eval(m, world, sigma, l) and _eval(m, world, sigma, r)
        case Or(l, r):
            return _eval(m, world, sigma, l) or _eval(m, world, sigma, r)
        case Implies(l, r):
            return (not _eval(m, world, sigma, l)) or _eval(m, world, sigma, r)
        case Iff(l, r):
            return _eval(m, world, sigma, l) == _eval(m, world, sigma, r)
        case Knows(agent, body):
            i = denote(m, sigma, world, agent)
            return all(_eval(m, v, sigma, body) for v in m.successors(i, world))
        case Assign(var, term, body):
            value = denote(m, sigma, world, term)
            return _eval(m, world, {**sigma, var: value}, body)
    raise TypeError(f"not a formula: {phi!r}")


def eval_formula(m: KripkeModel, world: str, sigma: dict, phi: Formula) -> bool:
    """Truth of phi at (m, world, sigma).

    sigma must cover the free variables of phi and the model's signature
    must cover its names and predicates; a gap raises EvalError rather than
    defaulting to false.
    """
    if world not in m.worlds:
        raise EvalError(f"unknown world {world}")
    _check_coverage(m, sigma, phi)
    return _eval(m, world, sigma, phi)


def eval_pointed(p: PointedModel, phi: Formula) -> bool:
    return eval_formula(p.model, p.world, p.sigma, phi)


def eval_all_worlds(m: KripkeModel, sigma: dict, phi: Formula) -> dict:
    """Truth of phi at every world under the same sigma."""
    _check_coverage(m, sigma, phi)
    return {w: _eval(m, w, sigma, phi) for w in m.worlds}


# ---------------------------------------------------------------------------
# Model files

def model_from_dict(data: dict) -> KripkeModel:
    """Build and validate a model from the JSON document structure.

    Keys: worlds, agents, relations {agent: [[w, v], ...]},
    rho {pred: {world: [[agent, ...], ...]}}, eta {name: {world: agent}},
    signature {predicates: {pred: arity}, names: [...]}, epistemic (bool).

    When "epistemic" is true the relations must already be equivalence
    relations; no closure is applied on the loader's behalf.
    """
    try:
        sig = Signature(
            predicates=dict(data["signature"].get("predicates", {})),
            names=frozenset(data["signature"].get("names", [])),
        )
        rho = {}
        for pred, per_world in data.get("rho", {}).items():
            for world, tuples in per_world.items():
                rho[(pred, world)] = frozenset(tuple(t) for t in tuples)
        eta = {}
        for name, per_world in data.get("eta", {}).items():
            for world, agent in per_world.items():
                eta[(name, world)] = agent
        m = make_model(
            worlds=data["worlds"],
            agents=data["agents"],
            relations=data.get("relations", {}),
            rho=rho,
            eta=eta,
            signature=sig,
        )
    except (KeyError, TypeError, AttributeError) as exc:
        raise ModelError(f"malformed model document: {exc}") from exc
    problems = validate_model(m)
    if problems:
        raise ModelError("invalid model: " + "; ".join(problems))
    if data.get("epistemic") and not is_epistemic(m):
        raise ModelError(
            "model is declared epistemic but some relation is not an "
            "equivalence relation (no closure is applied automatically)")
    return m


def model_to_dict(m: KripkeModel) -> dict:
    rho: dict = {}
    for (pred, world), tuples in sorted(m.rho.items()):
        rho.setdefault(pred, {})[world] = sorted(list(t) for t in tuples)
    eta: dict = {}
    for (name, world), agent in sorted(m.eta.items()):
        eta.setdefault(name, {})[world] = agent
    return {
        "worlds": list(m.worlds),
        "agents": list(m.agents),
        "relations": {a: sorted(list(p) for p in rel)
                      for a, rel in sorted(m.relations.items())},
        "rho": rho,
        "eta": eta,
        "signature": {
            "predicates": dict(sorted(m.signature.predicates.items())),
            "names": sorted(m.signature.names),
        },
        "epistemic": is_epistemic(m),
    }


def load_model(path: str) -> KripkeModel:
    with open(path, "r", encoding="utf-8") as fh:
        return model_from_dict(json.load(fh))
