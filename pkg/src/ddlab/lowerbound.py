"""Fooling-set experiments, frontier location, injectivity certificates, and
the brute-force minimal-OBDD oracle.

An experiment fixes a graph, an induced matching listed as (u_i, w_i) pairs,
an engine, and a variable order whose prefix ends at the last u-side
element. The and-decomposable engine works on the doubled-graph formula with
its two long clauses and identifies u(g) through the unbreakable set; the
plain OBDD engine works on the vertex-cover formula where the frontier is a
singleton. Certificates record the verified injectivity and the implied size
bound, plus a content hash of the diagram they were checked against.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import random
import time
from dataclasses import dataclass

from . import config, kernels
from .alignment import frontier
from .assignments import Assignment, AssignmentSet
from .cnf import evaluate as cnf_evaluate, truth_table as cnf_truth_table
from .diagrams import (DiagramBuilder, to_json,
                       truth_table as diagram_truth_table, validate)
from .errors import PreconditionError, ScaleError, SoundnessError
from .formulas import psi_formula, vc_formula
from .graphs import LinearOrder, double, is_induced_matching, tag
from .version import BUILD_ID


@dataclass(frozen=True)
class FoolingExperiment:
    graph: object
    pairs: tuple  # ((u_1, w_1), ..., (u_q, w_q)) in index order
    engine: str  # "and-obdd" | "obdd"
    order: LinearOrder
    prefix_len: int

    @property
    def q(self):
        return len(self.pairs)

    @property
    def u_vars(self):
        """The prefix-side variables carrying the fooling bits."""
        if self.engine == "and-obdd":
            return tuple(tag(u, 1) for u, _ in self.pairs)
        return tuple(u for u, _ in self.pairs)

    @property
    def w_vars(self):
        if self.engine == "and-obdd":
            return tuple(tag(w, 2) for _, w in self.pairs)
        return tuple(w for _, w in self.pairs)

    @property
    def prefix_vars(self):
        return frozenset(self.order.names[:self.prefix_len])

    def formula(self):
        if self.engine == "and-obdd":
            return psi_formula(self.graph)
        return vc_formula(self.graph)

    def describe(self):
        return {
            "engine": self.engine,
            "graph": {
                "vertices": sorted(self.graph.vertices),
                "edges": sorted(sorted(e) for e in self.graph.edges),
            },
            "matching": [list(p) for p in self.pairs],
            "order": list(self.order.names),
            "prefix_len": self.prefix_len,
        }


def make_experiment(graph, pairs, engine, order=None):
    """Build and verify an experiment; no order means the canonical bad one
    (all u-side variables first, everything else after, each block sorted)."""
    pairs = tuple((u, w) for u, w in pairs)
    edges = [frozenset(p) for p in pairs]
    if engine not in ("and-obdd", "obdd"):
        raise ValueError(f"unknown engine {engine!r}")
    if not set(edges) <= graph.edges:
        raise PreconditionError("matching pairs must be edges of the graph")
    if not is_induced_matching(graph, edges):
        raise PreconditionError("the pairs must form an induced matching")
    if engine == "and-obdd":
        space = double(graph)
        u_block = sorted(tag(u, 1) for u, _ in pairs)
    else:
        space = graph
        u_block = sorted(u for u, _ in pairs)
    if order is None:
        order = LinearOrder(u_block + sorted(set(space.vertices) - set(u_block)))
    if set(order.names) != set(space.vertices):
        raise PreconditionError("order must cover the formula's variables")
    u_pos = [order.position(u) for u in u_block]
    prefix_len = max(u_pos) + 1
    w_vars = ([tag(w, 2) for _, w in pairs] if engine == "and-obdd"
              else [w for _, w in pairs])
    if min(order.position(w) for w in w_vars) < prefix_len:
        raise PreconditionError("every u-side element must precede every w-side element")
    exp = FoolingExperiment(graph, pairs, engine, order, prefix_len)
    if engine == "and-obdd":
        lifted = frozenset(frozenset((tag(u, 1), tag(w, 2))) for u, w in pairs)
        if not is_induced_matching(space, lifted):
            raise PreconditionError("lifted matching is not induced in the doubled graph")
        from .graphs import neatly_crosses
        if neatly_crosses(order, lifted) is None:
            raise PreconditionError("matching does not neatly cross the order")
    return exp


def fooling_set(exp):
    """All fooling assignments over the experiment's prefix."""
    u_vars = exp.u_vars
    fixed = [(v, 1) for v in sorted(exp.prefix_vars - set(u_vars))]
    out = []
    if exp.engine == "and-obdd":
        if exp.q < 3:
            raise PreconditionError(
                "the and-obdd engine needs q >= 3: one zero and two ones "
                "cannot coexist on fewer positions")
        for bits in itertools.product((0, 1), repeat=exp.q):
            if sum(bits) >= 2 and sum(bits) <= exp.q - 1:
                out.append(Assignment(fixed + list(zip(u_vars, bits))))
    else:
        if exp.q < 1:
            raise PreconditionError("the obdd engine needs q >= 1")
        for bits in itertools.product((0, 1), repeat=exp.q):
            if sum(bits) <= exp.q - 1:
                out.append(Assignment(fixed + list(zip(u_vars, bits))))
    return AssignmentSet(out)


def is_fooling(exp, g):
    if g.vars != exp.prefix_vars:
        return False
    u_vars = set(exp.u_vars)
    if any(g[v] != 1 for v in exp.prefix_vars - u_vars):
        return False
    ones = sum(g[v] for v in u_vars)
    if exp.engine == "and-obdd":
        return ones >= 2 and ones <= exp.q - 1
    return ones <= exp.q - 1


def unbreakable(exp, g):
    """The index set, its unbreakable w-side variables, and the extender.

    The extender builds the canonical total extension that zeroes a chosen
    subset of the unbreakable set and ones everything else; the satisfaction
    iff-condition over all subsets is asserted on the spot.
    """
    if exp.engine != "and-obdd":
        raise PreconditionError("unbreakable sets belong to the and-obdd engine")
    if not is_fooling(exp, g):
        raise PreconditionError("assignment is not fooling for this experiment")
    index_set = tuple(i for i, (u, _) in enumerate(exp.pairs, start=1)
                      if g[tag(u, 1)] == 1)
    ub = frozenset(tag(w, 2) for i, (_, w) in enumerate(exp.pairs, start=1)
                   if i in index_set)
    space = double(exp.graph)

    def extender(subset):
        subset = frozenset(subset)
        if not subset <= frozenset(index_set):
            raise PreconditionError("subset must consist of the one-indices")
        zeros = {tag(w, 2) for i, (_, w) in enumerate(exp.pairs, start=1) if i in subset}
        full = dict.fromkeys(space.vertices, 1)
        full.update({v: 0 for v in zeros})
        full.update(dict(g))
        return Assignment(full.items())

    phi = exp.formula()
    for r in range(len(index_set) + 1):
        for subset in itertools.combinations(index_set, r):
            sat = cnf_evaluate(phi, extender(subset))
            if sat != (1 if subset else 0):
                raise SoundnessError(
                    f"extension for subset {subset} evaluates to {sat}")
    return index_set, ub, extender


def _check_computes(b, phi):
    if b.vars != phi.vars:
        raise SoundnessError(
            f"diagram tests {sorted(b.vars)} but the formula needs {sorted(phi.vars)}")
    order = sorted(phi.vars)
    if diagram_truth_table(b, order) != cnf_truth_table(phi, order):
        raise SoundnessError("diagram does not compute the experiment's formula")


def locate(b, pi, exp, g, check_input=True):
    """The unique frontier node owning the unbreakable set (and-obdd engine)
    or the singleton frontier node (obdd engine)."""
    cls = validate(b, pi)
    if exp.engine == "and-obdd":
        if not cls.is_and_obdd:
            raise SoundnessError("diagram is not an ordered and-decomposable diagram")
    elif not cls.is_obdd:
        raise SoundnessError("diagram is not an OBDD")
    if check_input:
        _check_computes(b, exp.formula())
    if not is_fooling(exp, g):
        raise PreconditionError("assignment is not fooling for this experiment")
    fr = frontier(b, pi, g)
    if exp.engine == "obdd":
        if len(fr.l_nodes) != 1:
            raise SoundnessError(
                f"expected a singleton frontier, got {sorted(fr.l_nodes)}")
        return next(iter(fr.l_nodes))
    _, ub, _ = unbreakable(exp, g)
    owners = [u for u in sorted(fr.l_nodes) if ub <= b.vars_below(u)]
    if len(owners) != 1:
        raise SoundnessError(
            f"{len(owners)} frontier nodes contain the unbreakable set; expected one")
    return owners[0]


@dataclass(frozen=True)
class Certificate:
    experiment: dict
    diagram_sha256: str
    diagram_size: int
    fooling_size: int
    u_map: tuple  # ((rendered assignment, node id), ...) in assignment order
    injective: bool
    bound: int
    wall_clock_ms: float | None

    def to_json(self, include_timing=False):
        doc = {
            "build": BUILD_ID,
            "experiment": self.experiment,
            "diagram_sha256": self.diagram_sha256,
            "diagram_size": self.diagram_size,
            "fooling_size": self.fooling_size,
            "u_map": [list(pair) for pair in self.u_map],
            "injective": self.injective,
            "bound": self.bound,
            "wall_clock_ms": self.wall_clock_ms if include_timing else None,
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def certify(b, pi, exp):
    """Run every fooling assignment through locate and certify injectivity.

    Injectivity is a theorem for valid inputs, so a collision raises rather
    than producing a failed certificate.
    """
    start = time.perf_counter()
    cls = validate(b, pi)
    if exp.engine == "and-obdd" and not cls.is_and_obdd:
        raise SoundnessError("diagram is not an ordered and-decomposable diagram")
    if exp.engine == "obdd" and not cls.is_obdd:
        raise SoundnessError("diagram is not an OBDD")
    _check_computes(b, exp.formula())
    fools = sorted(fooling_set(exp), key=lambda a: a.render())
    u_map = []
    seen = {}
    for g in fools:
        node = locate(b, pi, exp, g, check_input=False)
        if node in seen:
            raise SoundnessError(
                f"u(g) collision at node {node} for {seen[node]!r} and {g.render()!r}")
        seen[node] = g.render()
        u_map.append((g.render(), node))
    bound = len(fools)
    if b.size < bound:
        raise SoundnessError(
            f"diagram of size {b.size} beats the certified bound {bound}")
    elapsed = (time.perf_counter() - start) * 1000.0
    return Certificate(
        experiment=exp.describe(),
        diagram_sha256=hashlib.sha256(to_json(b).encode()).hexdigest(),
        diagram_size=b.size,
        fooling_size=len(fools),
        u_map=tuple(u_map),
        injective=True,
        bound=bound,
        wall_clock_ms=elapsed,
    )


# ---------------------------------------------------------------------------
# the minimal-OBDD oracle


def _position_clauses(phi, order):
    pos = {name: p + 1 for p, name in enumerate(order)}
    out = []
    for c in phi.sorted_clauses():
        out.append([pos[n] if s else -pos[n] for n, s in sorted(c)])
    return out


def obdd_size(phi, order):
    """Reduced-OBDD node count for one order, via the kernels."""
    names = list(order.names if isinstance(order, LinearOrder) else order)
    if set(names) != set(phi.vars):
        raise PreconditionError("order must cover exactly the formula's variables")
    if len(names) > 20:
        raise ScaleError("per-order OBDD sizing caps at 20 variables")
    return kernels.obdd_size_for_order(len(names), _position_clauses(phi, names))


def obdd_for_order(phi, order, universe=None):
    """The reduced OBDD for one order, as an actual diagram.

    Hash-conses on (position, residual truth table), skipping positions the
    residual does not depend on; that is exactly the canonical reduced form,
    so its node count is minimal for the order.
    """
    names = list(order.names if isinstance(order, LinearOrder) else order)
    universe = frozenset(universe) if universe is not None else phi.vars
    if set(names) != set(universe) or not phi.vars <= universe:
        raise PreconditionError("order must cover the build universe")
    n = len(names)
    table = cnf_truth_table(phi, names)
    builder = DiagramBuilder()
    memo = {}

    def node_for(p, tt):
        width = 1 << (n - p)
        if tt == 0:
            return builder.sink(0)
        if tt == (1 << width) - 1:
            return builder.sink(1)
        half = width >> 1
        lo = tt & ((1 << half) - 1)
        hi = tt >> half
        if lo == hi:
            return node_for(p + 1, lo)
        key = (p, tt)
        if key not in memo:
            memo[key] = builder.decision(names[p], node_for(p + 1, lo), node_for(p + 1, hi))
        return memo[key]

    return builder.finalize(node_for(0, table))


def min_obdd(phi, search="exhaustive", count=None, seed=None, cap=None, verify=False):
    """Minimal (or sampled-minimal) OBDD size with a realizing order."""
    names = sorted(phi.vars)
    n = len(names)
    if n == 0:
        return 1, LinearOrder(())
    if n > 20:
        raise ScaleError("per-order OBDD sizing caps at 20 variables")
    best = None
    if search == "exhaustive":
        cap = config.resolve(cap, config.EXHAUSTIVE_ORDER_CAP)
        if n > cap:
            raise ScaleError(f"{n} variables exceed the exhaustive order cap {cap}")
        candidates = itertools.permutations(names)
    elif search == "sampled":
        if count is None or seed is None:
            raise ValueError("sampled search needs count and seed")
        rng = random.Random(seed)

        def shuffled():
            for _ in range(count):
                order = list(names)
                rng.shuffle(order)
                yield tuple(order)

        candidates = shuffled()
    else:
        raise ValueError(f"unknown search {search!r}")
    for order in candidates:
        size = kernels.obdd_size_for_order(n, _position_clauses(phi, order))
        if best is None or size < best[0]:
            best = (size, order)
    size, order = best
    if verify:
        built = obdd_for_order(phi, order)
        if built.size != size:
            raise SoundnessError("kernel size disagrees with the constructed OBDD")
        if diagram_truth_table(built, names) != cnf_truth_table(phi, names):
            raise SoundnessError("constructed OBDD does not compute the formula")
    return size, LinearOrder(order)
