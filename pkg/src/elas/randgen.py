"""Seeded random formulas, models and assignments for the spot-check suites.

Everything here takes an explicit random.Random so runs are reproducible;
the epistemic sampler is exactly uniform over the bounded model space (each
block of fixed world/agent counts is weighted by its true size).
"""

from __future__ import annotations

import itertools
import random

from .semantics import KripkeModel, make_model
from .syntax import (
    And, Assign, Bot, Eq, Formula, Iff, Implies, Knows, Name, Not, Or, Pred,
    Signature, Term, Top, Var,
)


def set_partitions(n: int) -> list:
    """All partitions of range(n) as restricted-growth strings, in
    lexicographic order."""
    if n == 0:
        return [()]
    out = []

    def extend(prefix, used):
        if len(prefix) == n:
            out.append(tuple(prefix))
            return
        for block in range(used + 1):
            extend(prefix + [block], max(used, block + 1))

    extend([0], 1)
    return out


def partition_relation(rgs, worlds) -> frozenset:
    """The equivalence relation whose blocks are given by the growth string."""
    return frozenset((worlds[i], worlds[j])
                     for i in range(len(worlds)) for j in range(len(worlds))
                     if rgs[i] == rgs[j])


def world_labels(n: int) -> tuple:
    return tuple(f"w{i}" for i in range(1, n + 1))


def agent_labels(k: int) -> tuple:
    return tuple(f"i{i}" for i in range(1, k + 1))


def rho_bit_count(sig: Signature, n: int, k: int) -> int:
    return sum(n * k ** arity for arity in sig.predicates.values())


def epistemic_block_size(sig: Signature, n: int, k: int) -> int:
    return (len(set_partitions(n)) ** k
            * 2 ** rho_bit_count(sig, n, k)
            * k ** (n * len(sig.names)))


def arbitrary_block_size(sig: Signature, n: int, k: int) -> int:
    return ((2 ** (n * n)) ** k
            * 2 ** rho_bit_count(sig, n, k)
            * k ** (n * len(sig.names)))


def _assemble(sig: Signature, worlds, agents, relations, rng) -> KripkeModel:
    rho = {}
    for pred, arity in sorted(sig.predicates.items()):
        tuples = list(_agent_tuples(agents, arity))
        for w in worlds:
            chosen = frozenset(t for t in tuples if rng.random() < 0.5)
            if chosen:
                rho[(pred, w)] = chosen
    eta = {}
    for name in sorted(sig.names):
        for w in worlds:
            eta[(name, w)] = rng.choice(agents)
    return make_model(worlds, agents, relations, rho, eta, sig)


def _agent_tuples(agents, arity):
    if arity == 0:
        yield ()
        return
    yield from itertools.product(agents, repeat=arity)


def random_epistemic_model(rng: random.Random, sig: Signature,
                           max_worlds: int = 3, max_agents: int = 3) -> KripkeModel:
    """Uniform over all epistemic models with at most the given numbers of
    worlds and agents over the signature."""
    sizes = {(n, k): epistemic_block_size(sig, n, k)
             for n in range(1, max_worlds + 1)
             for k in range(1, max_agents + 1)}
    total = sum(sizes.values())
    ticket = rng.randrange(total)
    for (n, k), size in sorted(sizes.items()):
        if ticket < size:
            break
        ticket -= size
    worlds, agents = world_labels(n), agent_labels(k)
    partitions = set_partitions(n)
    relations = {agent: partition_relation(rng.choice(partitions), worlds)
                 for agent in agents}
    return _assemble(sig, worlds, agents, relations, rng)


def random_model(rng: random.Random, sig: Signature,
                 max_worlds: int = 3, max_agents: int = 3) -> KripkeModel:
    """Arbitrary-frame counterpart of random_epistemic_model."""
    sizes = {(n, k): arbitrary_block_size(sig, n, k)
             for n in range(1, max_worlds + 1)
             for k in range(1, max_agents + 1)}
    total = sum(sizes.values())
    ticket = rng.randrange(total)
    for (n, k), size in sorted(sizes.items()):
        if ticket < size:
            break
        ticket -= size
    worlds, agents = world_labels(n), agent_labels(k)
    relations = {}
    for agent in agents:
        pairs = frozenset((u, v) for u in worlds for v in worlds
                          if rng.random() < 0.5)
        relations[agent] = pairs
    return _assemble(sig, worlds, agents, relations, rng)


def random_sigma(rng: random.Random, variables, model: KripkeModel) -> dict:
    return {v: rng.choice(model.agents) for v in variables}


def random_term(rng: random.Random, variables, names) -> Term:
    pool = [Var(v) for v in variables] + [Name(n) for n in names]
    return rng.choice(pool)


def random_formula(rng: random.Random, variables, names, predicates,
                   depth: int, allow_assign: bool = True) -> Formula:
    """A random formula of at most the given operator depth."""
    if depth <= 0:
        kind = rng.randrange(8)
        if kind == 0:
            return Top()
        if kind == 1:
            return Bot()
        if kind in (2, 3):
            return Eq(random_term(rng, variables, names),
                      random_term(rng, variables, names))
        sym, arity = rng.choice(sorted(predicates.items()))
        return Pred(sym, tuple(random_term(rng, variables, names)
                               for _ in range(arity)))
    kind = rng.randrange(8 if allow_assign else 7)
    sub = lambda: random_formula(rng, variables, names, predicates,
                                 depth - 1, allow_assign)
    if kind == 0:
        return random_formula(rng, variables, names, predicates, 0, allow_assign)
    if kind == 1:
        return Not(sub())
    if kind == 2:
        return And(sub(), sub())
    if kind == 3:
        return Or(sub(), sub())
    if kind == 4:
        return Implies(sub(), sub())
    if kind == 5:
        return Iff(sub(), sub())
    if kind == 6:
        return Knows(random_term(rng, variables, names), sub())
    return Assign(rng.choice(sorted(variables)),
                  random_term(rng, variables, names), sub())
