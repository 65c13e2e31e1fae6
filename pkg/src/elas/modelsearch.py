"""Bounded model enumeration, countermodel and witness search.

The search space for a formula is every model over exactly the symbols the
formula mentions, with worlds labelled w1..wn and agents i1..ik, up to the
requested bounds.  Enumeration order is fixed and documented: world count,
then agent count, then the per-agent relations, then the predicate
interpretation, then the name interpretation, each lexicographically; a
model's worlds and then the covering assignments are scanned in order too.
Isomorphic duplicates are enumerated (correctness over speed).

``enumerate_models`` materialises that stream.  ``find_countermodel`` and
``find_witness`` walk the same order but keep the candidate model in a
compact form: for a fixed choice of relations and name interpretation the
truth value of the formula at every (world, assignment) cell is computed
for *all* predicate interpretations at once, as a bitmask indexed by the
interpretation's position in the enumeration (Python integers as bit
vectors).  The first hit in canonical order is rebuilt as a real model and
re-verified with the reference evaluator before it is returned; the fast
path is never trusted on its own.

Bounded search is deliberately incomplete: a negative answer only speaks
for the models within the bounds, and verdicts say so.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .randgen import agent_labels, set_partitions, world_labels
from .semantics import (
    KripkeModel, PointedModel, eval_formula, make_model,
)
from .syntax import (
    And, Assign, Bot, Eq, Formula, Iff, Implies, Knows, Name, Not, Or, Pred,
    Signature, Top, Var, all_vars, formula_signature, free_vars, node_count,
)

_VECTOR_BITS = 16        # rho choices handled per bitmask chunk: 2**16


@dataclass(frozen=True)
class SearchBounds:
    max_worlds: int = 3
    max_agents: int = 3
    epistemic: bool = True
    max_random_trials: int = 0

    def __post_init__(self):
        if self.max_worlds < 1 or self.max_agents < 1:
            raise ValueError("bounds must allow at least one world and one agent")


@dataclass(frozen=True)
class Countermodel:
    pointed: PointedModel


@dataclass(frozen=True)
class NoCountermodelUpTo:
    bounds: SearchBounds


@dataclass(frozen=True)
class Witness:
    pointed: PointedModel


@dataclass(frozen=True)
class UnsatisfiableUpTo:
    bounds: SearchBounds


Verdict = object


# ---------------------------------------------------------------------------
# Block layout: everything that is fixed once (n, k, signature) are chosen

class _Layout:
    def __init__(self, sig: Signature, n: int, k: int, epistemic: bool,
                 variables, free):
        self.n, self.k = n, k
        self.worlds = world_labels(n)
        self.agents = agent_labels(k)
        self.preds = sorted(sig.predicates.items())
        self.names = sorted(sig.names)
        self.epistemic = epistemic

        # rho bit layout: blocks in (predicate, world) order, first block in
        # the most significant position so that the integer enumeration of
        # interpretations matches nested lexicographic choice.
        self.tuples = {sym: list(itertools.product(range(k), repeat=arity))
                       for sym, arity in self.preds}
        blocks = [(sym, w) for sym, _ in self.preds for w in range(n)]
        self.offsets = {}
        position = 0
        for sym, w in reversed(blocks):
            self.offsets[(sym, w)] = position
            position += len(self.tuples[sym])
        self.rho_bits = position
        self.vec_bits = min(self.rho_bits, _VECTOR_BITS)
        self.high_bits = self.rho_bits - self.vec_bits
        self.vec_size = 1 << self.vec_bits
        self.all_mask = (1 << self.vec_size) - 1
        self.bit_masks = [self._periodic_mask(p) for p in range(self.vec_bits)]

        # relations pool (shared by every agent)
        if epistemic:
            self.partitions = set_partitions(n)
            self.rel_pool = [self._succ_from_partition(p) for p in self.partitions]
        else:
            self.rel_pool = [self._succ_from_bits(r) for r in range(1 << (n * n))]

        # assignment grid: one column per total assignment of the formula's
        # variables (bound ones included); scanning covers the free ones.
        self.vars = sorted(variables)
        self.var_pos = {v: i for i, v in enumerate(self.vars)}
        self.sigmas = list(itertools.product(range(k), repeat=len(self.vars)))
        self.S = len(self.sigmas)
        self.strides = [k ** (len(self.vars) - 1 - i) for i in range(len(self.vars))]
        self.free = sorted(free)
        self.free_cells = []
        for combo in itertools.product(range(k), repeat=len(self.free)):
            s = 0
            for v, g in zip(self.free, combo):
                s += self.strides[self.var_pos[v]] * g
            self.free_cells.append((combo, s))
        self.eta_digits = len(self.names) * n

    def _periodic_mask(self, p: int) -> int:
        chunk = ((1 << (1 << p)) - 1) << (1 << p)
        width = 1 << (p + 1)
        mask = chunk
        while width < self.vec_size:
            mask |= mask << width
            width *= 2
        return mask

    def _succ_from_partition(self, rgs) -> tuple:
        return tuple(tuple(v for v in range(self.n) if rgs[v] == rgs[w])
                     for w in range(self.n))

    def _succ_from_bits(self, r: int) -> tuple:
        return tuple(tuple(v for v in range(self.n) if (r >> (w * self.n + v)) & 1)
                     for w in range(self.n))

    def bit_position(self, sym: str, w: int, digits) -> int:
        index = 0
        for d in digits:
            index = index * self.k + d
        return self.offsets[(sym, w)] + index

    # -- materialisation ---------------------------------------------------

    def relation_pairs(self, pool_index: int) -> frozenset:
        succ = self.rel_pool[pool_index]
        return frozenset((self.worlds[w], self.worlds[v])
                         for w in range(self.n) for v in succ[w])

    def build_model(self, sig: Signature, rel_combo, rho_index: int, eta) -> KripkeModel:
        relations = {agent: self.relation_pairs(rel_combo[i])
                     for i, agent in enumerate(self.agents)}
        rho = {}
        for sym, _arity in self.preds:
            for w in range(self.n):
                offset = self.offsets[(sym, w)]
                chosen = []
                for t, digits in enumerate(self.tuples[sym]):
                    if (rho_index >> (offset + t)) & 1:
                        chosen.append(tuple(self.agents[d] for d in digits))
                if chosen:
                    rho[(sym, self.worlds[w])] = frozenset(chosen)
        eta_map = {}
        for ni, name in enumerate(self.names):
            for w in range(self.n):
                eta_map[(name, self.worlds[w])] = self.agents[eta[ni * self.n + w]]
        return make_model(self.worlds, self.agents, relations, rho, eta_map, sig)


def _compile(phi: Formula, lay: _Layout):
    """Compile a formula to a function (eta, succ_by_agent, high) -> list of
    per-cell bitmasks over the low chunk of the rho enumeration."""
    n, S, k = lay.n, lay.S, lay.k
    cells = n * S
    ALL = lay.all_mask

    def den(term):
        if isinstance(term, Var):
            pos = lay.var_pos[term.id]
            return lambda eta, w, s: lay.sigmas[s][pos]
        ni = lay.names.index(term.id)
        return lambda eta, w, s: eta[ni * n + w]

    match phi:
        case Top():
            return lambda ctx: [ALL] * cells
        case Bot():
            return lambda ctx: [0] * cells
        case Eq(lhs, rhs):
            d1, d2 = den(lhs), den(rhs)

            def run(ctx):
                eta, _, _ = ctx
                return [ALL if d1(eta, w, s) == d2(eta, w, s) else 0
                        for w in range(n) for s in range(S)]
            return run
        case Pred(sym, args):
            dens = [den(a) for a in args]

            def run(ctx):
                eta, _, high = ctx
                out = []
                for w in range(n):
                    for s in range(S):
                        p = lay.bit_position(sym, w, [d(eta, w, s) for d in dens])
                        if p < lay.vec_bits:
                            out.append(lay.bit_masks[p])
                        else:
                            out.append(ALL if (high >> (p - lay.vec_bits)) & 1 else 0)
                return out
            return run
        case Not(body):
            sub = _compile(body, lay)
            return lambda ctx: [m ^ ALL for m in sub(ctx)]
        case And(l, r):
            sl, sr = _compile(l, lay), _compile(r, lay)
            return lambda ctx: [a & b for a, b in zip(sl(ctx), sr(ctx))]
        case Or(l, r):
            sl, sr = _compile(l, lay), _compile(r, lay)
            return lambda ctx: [a | b for a, b in zip(sl(ctx), sr(ctx))]
        case Implies(l, r):
            sl, sr = _compile(l, lay), _compile(r, lay)
            return lambda ctx: [(a ^ ALL) | b for a, b in zip(sl(ctx), sr(ctx))]
        case Iff(l, r):
            sl, sr = _compile(l, lay), _compile(r, lay)
            return lambda ctx: [(a ^ b) ^ ALL for a, b in zip(sl(ctx), sr(ctx))]
        case Knows(agent, body):
            d = den(agent)
            sub = _compile(body, lay)

            def run(ctx):
                eta, succ, _ = ctx
                bm = sub(ctx)
                out = []
                for w in range(n):
                    for s in range(S):
                        m = ALL
                        for v in succ[d(eta, w, s)][w]:
                            m &= bm[v * S + s]
                            if not m:
                                break
                        out.append(m)
                return out
            return run
        case Assign(var, term, body):
            d = den(term)
            pos = lay.var_pos[var]
            stride = lay.strides[pos]
            sub = _compile(body, lay)

            def run(ctx):
                eta, _, _ = ctx
                bm = sub(ctx)
                out = []
                for w in range(n):
                    for s in range(S):
                        g = d(eta, w, s)
                        s2 = s - lay.sigmas[s][pos] * stride + g * stride
                        out.append(bm[w * S + s2])
                return out
            return run
    raise TypeError(f"not a formula: {phi!r}")


def _blocks(bounds: SearchBounds):
    for n in range(1, bounds.max_worlds + 1):
        for k in range(1, bounds.max_agents + 1):
            yield n, k


def _scan_slice(phi, sig, n, k, epistemic, want_false, rel_slice):
    """Scan a contiguous slice of the relation choices of one block; return
    the canonically first hit in the slice, or None.

    The hit is reported as (rel position, rho index, eta position, world
    index, free-assignment position) plus the data needed to rebuild it.
    """
    lay = _Layout(sig, n, k, epistemic, all_vars(phi), free_vars(phi))
    run = _compile(phi, lay)
    ALL = lay.all_mask
    rel_indices = range(len(lay.rel_pool))
    for rel_pos, rel_combo in enumerate(itertools.product(rel_indices, repeat=k)):
        if rel_slice is not None and not (rel_slice[0] <= rel_pos < rel_slice[1]):
            continue
        succ = tuple(lay.rel_pool[i] for i in rel_combo)
        for high in range(1 << lay.high_bits):
            best = None
            for eta_pos, eta in enumerate(
                    itertools.product(range(k), repeat=lay.eta_digits)):
                masks = run((eta, succ, high))
                for w in range(lay.n):
                    for cell_pos, (combo, s) in enumerate(lay.free_cells):
                        m = masks[w * lay.S + s]
                        hits = (m ^ ALL) if want_false else m
                        if hits:
                            low = (hits & -hits).bit_length() - 1
                            key = (low, eta_pos, w, cell_pos)
                            if best is None or key < best[0]:
                                best = (key, eta, combo)
            if best is not None:
                (low, _eta_pos, w, _cell_pos), eta, combo = best
                rho_index = (high << lay.vec_bits) | low
                return (rel_pos, rho_index, best[0][1], w, best[0][3],
                        rel_combo, eta, combo)
    return None


def _materialize(phi, sig, n, k, epistemic, hit) -> PointedModel:
    lay = _Layout(sig, n, k, epistemic, all_vars(phi), free_vars(phi))
    _relpos, rho_index, _etapos, w, _cellpos, rel_combo, eta, combo = hit
    model = lay.build_model(sig, rel_combo, rho_index, eta)
    sigma = {v: lay.agents[g] for v, g in zip(lay.free, combo)}
    return PointedModel(model, lay.worlds[w], sigma)


def _search(phi: Formula, bounds: SearchBounds, want_false: bool,
            jobs: int = 1):
    sig = formula_signature(phi)
    sig = Signature(sig.predicates, sig.names)   # variables live in sigma
    for n, k in _blocks(bounds):
        if jobs > 1 and bounds.epistemic:
            hit = _parallel_block(phi, sig, n, k, bounds.epistemic,
                                  want_false, jobs)
        else:
            hit = _scan_slice(phi, sig, n, k, bounds.epistemic, want_false, None)
        if hit is not None:
            pointed = _materialize(phi, sig, n, k, bounds.epistemic, hit)
            value = eval_formula(pointed.model, pointed.world, pointed.sigma, phi)
            if value == want_false:
                raise RuntimeError(
                    "internal error: fast scan and reference evaluator disagree")
            return pointed
    return None


def _parallel_block(phi, sig, n, k, epistemic, want_false, jobs):
    total = (len(set_partitions(n)) if epistemic else 1 << (n * n)) ** k
    jobs = min(jobs, total)
    step = (total + jobs - 1) // jobs
    slices = [(lo, min(lo + step, total)) for lo in range(0, total, step)]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        results = list(pool.map(
            _scan_worker,
            [(phi, sig, n, k, epistemic, want_false, sl) for sl in slices]))
    hits = [h for h in results if h is not None]
    if not hits:
        return None
    return min(hits, key=lambda h: h[:5])


def _scan_worker(args):
    return _scan_slice(*args)


def find_countermodel(phi: Formula, bounds: SearchBounds,
                      jobs: int = 1) -> Verdict:
    """First pointed model within the bounds where phi is false, scanning
    the canonical enumeration; the hit is re-verified by the reference
    evaluator."""
    pointed = _search(phi, bounds, want_false=True, jobs=jobs)
    if pointed is None:
        return NoCountermodelUpTo(bounds)
    return Countermodel(pointed)


def find_witness(phi: Formula, bounds: SearchBounds, jobs: int = 1) -> Verdict:
    """Dual of find_countermodel: first pointed model where phi is true."""
    pointed = _search(phi, bounds, want_false=False, jobs=jobs)
    if pointed is None:
        return UnsatisfiableUpTo(bounds)
    return Witness(pointed)


def enumerate_models(sig: Signature, bounds: SearchBounds):
    """Yield every model over the signature within the bounds, in the
    canonical order the searches use.  The stream is exponential in the
    bounds; it is meant for desk-scale signatures."""
    for n, k in _blocks(bounds):
        lay = _Layout(sig, n, k, bounds.epistemic, (), ())
        rel_indices = range(len(lay.rel_pool))
        for rel_combo in itertools.product(rel_indices, repeat=k):
            for rho_index in range(1 << lay.rho_bits):
                for eta in itertools.product(range(k), repeat=lay.eta_digits):
                    yield lay.build_model(sig, rel_combo, rho_index, eta)


def count_models(sig: Signature, n: int, k: int, epistemic: bool) -> int:
    """Closed-form size of the (n, k) block, for cross-checking the
    generator."""
    rel = len(set_partitions(n)) if epistemic else 1 << (n * n)
    rho_bits = sum(n * k ** arity for arity in sig.predicates.values())
    return rel ** k * (1 << rho_bits) * k ** (n * len(sig.names))


# ---------------------------------------------------------------------------
# Distinguishing two pointed models by enumerated formulas

class _ProfileSpace:
    """Truth profiles of formulas over two pointed models.

    A profile has one bit per (model, world, assignment) cell, where the
    assignments range over every map from the chosen variables into the
    model's agents.  Profiles compose: every connective acts on profiles,
    so formula enumeration can deduplicate semantically and saturate.
    """

    def __init__(self, p1: PointedModel, p2: PointedModel, variables):
        self.vars = sorted(variables)
        self.models = (p1.model, p2.model)
        self.cells = []          # (model index, world, sigma dict)
        self.start = []
        for mi, pointed in enumerate((p1, p2)):
            model = pointed.model
            combos = list(itertools.product(model.agents, repeat=len(self.vars)))
            base = {v: pointed.sigma[v] for v in self.vars}
            for w in model.worlds:
                for combo in combos:
                    sigma = dict(zip(self.vars, combo))
                    self.cells.append((mi, w, sigma))
                    if w == pointed.world and sigma == base:
                        self.start.append(len(self.cells) - 1)
        if len(self.start) != 2:
            raise ValueError("pointed assignments must cover the shared variables")
        self.all_mask = (1 << len(self.cells)) - 1
        self.cell_index = {}
        for idx, (mi, w, sigma) in enumerate(self.cells):
            key = (mi, w, tuple(sigma[v] for v in self.vars))
            self.cell_index[key] = idx

    def _den(self, mi, w, sigma, term):
        if isinstance(term, Var):
            return sigma[term.id]
        return self.models[mi].eta[(term.id, w)]

    def atom_profile(self, phi: Formula) -> int:
        bits = 0
        for idx, (mi, w, sigma) in enumerate(self.cells):
            if eval_formula(self.models[mi], w, sigma, phi):
                bits |= 1 << idx
        return bits

    def negate(self, p: int) -> int:
        return p ^ self.all_mask

    def knows_map(self, term) -> list:
        """For each cell, the list of cell indices the box quantifies over."""
        out = []
        for (mi, w, sigma) in self.cells:
            agent = self._den(mi, w, sigma, term)
            key = tuple(sigma[v] for v in self.vars)
            out.append([self.cell_index[(mi, v, key)]
                        for v in self.models[mi].successors(agent, w)])
        return out

    def assign_map(self, var, term) -> list:
        """For each cell, the cell the body is read at after the binding."""
        out = []
        for (mi, w, sigma) in self.cells:
            value = self._den(mi, w, sigma, term)
            moved = dict(sigma)
            moved[var] = value
            key = tuple(moved[v] for v in self.vars)
            out.append(self.cell_index[(mi, w, key)])
        return out

    def apply_cellmap_all(self, p: int, cellmap: list) -> int:
        bits = 0
        for idx, sources in enumerate(cellmap):
            if all((p >> s) & 1 for s in sources):
                bits |= 1 << idx
        return bits

    def apply_cellmap_move(self, p: int, cellmap: list) -> int:
        bits = 0
        for idx, source in enumerate(cellmap):
            if (p >> source) & 1:
                bits |= 1 << idx
        return bits

    def distinguishes(self, p: int) -> bool:
        a, b = self.start
        return ((p >> a) & 1) != ((p >> b) & 1)


def el_distinguishes(p1: PointedModel, p2: PointedModel, max_size: int,
                     language: str = "el"):
    """Smallest formula (by node count, up to max_size) with different truth
    values at the two pointed models, or None.

    With language="el" only binder-free formulas are enumerated; with
    language="elas" assignment binders over the shared variables are
    allowed as well.  Enumeration is by truth profile, which is exhaustive:
    two formulas with the same profile are interchangeable inside every
    larger formula over these two models.
    """
    if language not in ("el", "elas"):
        raise ValueError("language must be 'el' or 'elas'")
    sig1, sig2 = p1.model.signature, p2.model.signature
    if sig1.predicates != sig2.predicates or sig1.names != sig2.names:
        raise ValueError("pointed models must share a signature")
    variables = sorted(set(p1.sigma) & set(p2.sigma)) if language == "elas" else []
    if language == "el":
        # sigma never changes below a binder-free formula, so the profile
        # only needs the given assignments; variables still occur as terms.
        shared = sorted(set(p1.sigma) & set(p2.sigma))
        space = _ELSpace(p1, p2, shared)
    else:
        space = _ProfileSpace(p1, p2, variables)

    terms = [Var(v) for v in sorted(set(p1.sigma) & set(p2.sigma))]
    terms += [Name(nm) for nm in sorted(sig1.names)]
    preds = sorted(sig1.predicates.items())

    atoms = [Top(), Bot()]
    atoms += [Eq(a, b) for a in terms for b in terms]
    for sym, arity in preds:
        atoms += [Pred(sym, args)
                  for args in itertools.product(terms, repeat=arity)]

    knows_ops = [(t, space.knows_map(t)) for t in terms]
    assign_ops = []
    if language == "elas":
        assign_ops = [(v.id, t, space.assign_map(v.id, t))
                      for v in (Var(x) for x in variables) for t in terms]

    best: dict = {}
    by_size: dict = {}

    def consider(profile, formula, size):
        if profile in best:
            return None
        best[profile] = (formula, size)
        by_size.setdefault(size, []).append(profile)
        if space.distinguishes(profile):
            return formula
        return None

    for size in range(1, max_size + 1):
        for atom in atoms:
            if node_count(atom) == size:
                found = consider(space.atom_profile(atom), atom, size)
                if found is not None:
                    return _verified(found, p1, p2)
        for profile in list(by_size.get(size - 1, [])):
            sub, _ = best[profile]
            found = consider(space.negate(profile), Not(sub), size)
            if found is not None:
                return _verified(found, p1, p2)
        for profile in list(by_size.get(size - 2, [])):
            sub, _ = best[profile]
            for term, cellmap in knows_ops:
                found = consider(space.apply_cellmap_all(profile, cellmap),
                                 Knows(term, sub), size)
                if found is not None:
                    return _verified(found, p1, p2)
            for var, term, cellmap in assign_ops:
                found = consider(space.apply_cellmap_move(profile, cellmap),
                                 Assign(var, term, sub), size)
                if found is not None:
                    return _verified(found, p1, p2)
        for left_size in range(1, size - 1):
            right_size = size - 1 - left_size
            for pl in list(by_size.get(left_size, [])):
                fl, _ = best[pl]
                for pr in list(by_size.get(right_size, [])):
                    fr, _ = best[pr]
                    for ctor, profile in (
                            (And, pl & pr),
                            (Or, pl | pr),
                            (Implies, space.negate(pl) | pr),
                            (Iff, space.negate(pl ^ pr))):
                        found = consider(profile, ctor(fl, fr), size)
                        if found is not None:
                            return _verified(found, p1, p2)
    return None


class _ELSpace(_ProfileSpace):
    """Profile space for binder-free enumeration: one cell per world, with
    each pointed model's own fixed assignment."""

    def __init__(self, p1: PointedModel, p2: PointedModel, shared_vars):
        self.vars = list(shared_vars)
        self.models = (p1.model, p2.model)
        self.sigmas = ({v: p1.sigma[v] for v in shared_vars},
                       {v: p2.sigma[v] for v in shared_vars})
        self.cells = []
        self.start = []
        for mi, pointed in enumerate((p1, p2)):
            for w in pointed.model.worlds:
                self.cells.append((mi, w, self.sigmas[mi]))
                if w == pointed.world:
                    self.start.append(len(self.cells) - 1)
        self.all_mask = (1 << len(self.cells)) - 1
        self.cell_index = {}
        for idx, (mi, w, _sigma) in enumerate(self.cells):
            self.cell_index[(mi, w)] = idx

    def knows_map(self, term) -> list:
        out = []
        for (mi, w, sigma) in self.cells:
            agent = self._den(mi, w, sigma, term)
            out.append([self.cell_index[(mi, v)]
                        for v in self.models[mi].successors(agent, w)])
        return out

    def assign_map(self, var, term):
        raise ValueError("binder-free enumeration has no assignment operator")


def _verified(formula, p1, p2):
    v1 = eval_formula(p1.model, p1.world, p1.sigma, formula)
    v2 = eval_formula(p2.model, p2.world, p2.sigma, formula)
    if v1 == v2:
        raise RuntimeError("internal error: profile search returned a "
                           "non-distinguishing formula")
    return formula
