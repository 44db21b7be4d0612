"""Upper-bound constructions: the falsifying-spine decision tree, the
decomposition-guided structured compiler, the split pipeline for CNFs with a
few long clauses, the grid junction diagram, the layered grid OBDDs, and
vtree structuredness checking.

The decomposition-guided compiler processes a rooted tree decomposition: one
memo entry per (bag, interface assignment), a decision ladder enumerating the
bag's own variables, clause checks at the unique highest bag containing the
clause, and a conjunction chain over the child subtrees. Its vtree is the
recursive split the rooted decomposition induces, so every residual CNF of
the same decomposition compiles against one fixed vtree; the split pipeline
relies on exactly that.
"""

from __future__ import annotations

from dataclasses import dataclass

from .assignments import Assignment
from .cnf import Cnf, clause_key, graphs_of, reduce as cnf_reduce
from .diagrams import DiagramBuilder, graft, validate
from .errors import FormatError, PreconditionError, ScopeError, SoundnessError
from .graphs import LinearOrder, grid, grid_name, grid_order, tag, validate_decomposition
from .formulas import JUNCTION


# ---------------------------------------------------------------------------
# decision trees


@dataclass(frozen=True)
class DTLeaf:
    value: bool


@dataclass(frozen=True)
class DTTest:
    var: str
    lo: object
    hi: object


def dt_size(t):
    if isinstance(t, DTLeaf):
        return 1
    return 1 + dt_size(t.lo) + dt_size(t.hi)


def dt_vars(t):
    if isinstance(t, DTLeaf):
        return frozenset()
    return frozenset({t.var}) | dt_vars(t.lo) | dt_vars(t.hi)


def dt_evaluate(t, a):
    while isinstance(t, DTTest):
        t = t.hi if a[t.var] else t.lo
    return 1 if t.value else 0


def dt_paths(t, prefix=()):
    """Yield (path assignment, leaf value) over all root-leaf paths."""
    if isinstance(t, DTLeaf):
        yield Assignment(prefix), t.value
        return
    yield from dt_paths(t.lo, prefix + ((t.var, 0),))
    yield from dt_paths(t.hi, prefix + ((t.var, 1),))


def dt_to_diagram(t):
    """The tree as a conjunction-free diagram with shared sinks."""
    builder = DiagramBuilder()

    def build(node):
        if isinstance(node, DTLeaf):
            return builder.sink(1 if node.value else 0)
        return builder.decision(node.var, build(node.lo), build(node.hi))

    return builder.finalize(build(t))


def _spine_clause(phi):
    """Deterministic clause choice: least by sorted variable names, then by
    the canonical literal key."""
    return min(phi.clauses,
               key=lambda c: (tuple(sorted(n for n, _ in c)), clause_key(c)))


def decision_tree(phi):
    """The falsifying-spine recursion.

    No clauses: a lone true leaf. An empty clause: a lone false leaf.
    Otherwise one spine walks the chosen clause's variables towards its
    unique falsification, and each satisfying turn-off recurses on the
    reduced clause set.
    """
    if not phi.clauses:
        return DTLeaf(True)
    if frozenset() in phi.clauses:
        return DTLeaf(False)
    c = _spine_clause(phi)
    polarity = dict(c)
    spine = sorted(polarity)
    g = {}
    branches = []
    for x in spine:
        side = dict(g)
        side[x] = polarity[x]
        branches.append(decision_tree(cnf_reduce(phi, Assignment(side))))
        g[x] = 1 - polarity[x]
    node = DTLeaf(False)
    for x, side in zip(reversed(spine), reversed(branches)):
        if polarity[x]:
            node = DTTest(x, lo=node, hi=side)
        else:
            node = DTTest(x, lo=side, hi=node)
    return node


# ---------------------------------------------------------------------------
# vtrees


class Vtree:
    """A rooted binary tree whose leaves are the variables, stored densely
    with children before parents (the root is the last node)."""

    __slots__ = ("kinds", "payload", "_vars")

    def __init__(self, nested):
        kinds = []
        payload = []

        def build(part):
            if isinstance(part, str):
                kinds.append("leaf")
                payload.append(part)
                return len(kinds) - 1
            left, right = part
            li = build(left)
            ri = build(right)
            kinds.append("internal")
            payload.append((li, ri))
            return len(kinds) - 1

        build(nested)
        self.kinds = tuple(kinds)
        self.payload = tuple(payload)
        names = [p for k, p in zip(kinds, payload) if k == "leaf"]
        if len(set(names)) != len(names):
            raise ValueError("vtree leaves must carry distinct variables")
        vars_of = []
        for k, p in zip(self.kinds, self.payload):
            if k == "leaf":
                vars_of.append(frozenset((p,)))
            else:
                vars_of.append(vars_of[p[0]] | vars_of[p[1]])
        self._vars = tuple(vars_of)

    @property
    def root(self):
        return len(self.kinds) - 1

    @property
    def vars(self):
        return self._vars[self.root]

    def vars_of(self, node_id):
        return self._vars[node_id]

    def internal_splits(self):
        return [(self._vars[p[0]], self._vars[p[1]])
                for k, p in zip(self.kinds, self.payload) if k == "internal"]

    def __eq__(self, other):
        return (isinstance(other, Vtree) and self.kinds == other.kinds
                and self.payload == other.payload)

    def __hash__(self):
        return hash((self.kinds, self.payload))


def write_vtree(vt, path=None):
    lines = []
    for i, (k, p) in enumerate(zip(vt.kinds, vt.payload)):
        if k == "leaf":
            lines.append(f"L {i} {p}")
        else:
            lines.append(f"I {i} {p[0]} {p[1]}")
    text = "\n".join(lines) + "\n"
    if path is not None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text


def read_vtree(source):
    if "\n" not in source:
        with open(source, encoding="utf-8") as fh:
            source = fh.read()
    entries = {}
    for raw in source.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] == "L" and len(parts) == 3:
            entries[int(parts[1])] = parts[2]
        elif parts[0] == "I" and len(parts) == 4:
            entries[int(parts[1])] = (int(parts[2]), int(parts[3]))
        else:
            raise FormatError(f"bad vtree line {raw!r}")
    if sorted(entries) != list(range(len(entries))):
        raise FormatError("vtree ids must be dense 0..n-1")

    def nested(i):
        e = entries[i]
        if isinstance(e, str):
            return e
        return (nested(e[0]), nested(e[1]))

    return Vtree(nested(len(entries) - 1))


def _right_comb(parts):
    """Right-leaning combination; None parts drop out."""
    parts = [p for p in parts if p is not None]
    if not parts:
        return None
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = (p, out)
    return out


def _left_comb(parts):
    parts = [p for p in parts if p is not None]
    if not parts:
        return None
    out = parts[0]
    for p in parts[1:]:
        out = (out, p)
    return out


# ---------------------------------------------------------------------------
# rooted decompositions


class _Rooted:
    """A pruned, rooted view of a tree decomposition."""

    def __init__(self, d):
        bags = dict(d.bags)
        adj = {b: set() for b in bags}
        for e in d.tree:
            a, b = sorted(e)
            adj[a].add(b)
            adj[b].add(a)
        # contract edges whose bags nest; shrinks to <= |V| useful bags
        changed = True
        while changed:
            changed = False
            for a in sorted(bags):
                for b in sorted(adj[a]):
                    drop = None
                    if bags[a] <= bags[b]:
                        drop = a
                        keep = b
                    elif bags[b] <= bags[a]:
                        drop = b
                        keep = a
                    if drop is not None and len(bags) > 1:
                        for other in adj[drop] - {keep}:
                            adj[other].discard(drop)
                            adj[other].add(keep)
                            adj[keep].add(other)
                        adj[keep].discard(drop)
                        del bags[drop], adj[drop]
                        changed = True
                        break
                if changed:
                    break
        self.bags = bags
        self.root = min(bags)
        self.children = {b: [] for b in bags}
        self.parent = {self.root: None}
        order = [self.root]
        seen = {self.root}
        k = 0
        while k < len(order):
            cur = order[k]
            k += 1
            for nxt in sorted(adj[cur]):
                if nxt not in seen:
                    seen.add(nxt)
                    self.parent[nxt] = cur
                    self.children[cur].append(nxt)
                    order.append(nxt)
        self.order = order  # parents before children
        depth = {self.root: 0}
        for b in order[1:]:
            depth[b] = depth[self.parent[b]] + 1
        self.depth = depth

    def interface(self, b):
        p = self.parent[b]
        return frozenset() if p is None else self.bags[b] & self.bags[p]

    def local(self, b):
        return sorted(self.bags[b] - self.interface(b))

    def clause_home(self, clause_vars):
        holders = [b for b in self.order if clause_vars <= self.bags[b]]
        if not holders:
            return None
        return min(holders, key=lambda b: (self.depth[b], b))


def vtree_from_decomposition(d, extra_vars=()):
    """The recursive variable split a rooted decomposition induces.

    Per bag: a right-leaning comb over the bag's own variables ending in a
    left-leaning comb over the child subtrees. Extra variables (not placed by
    any bag) comb on top in sorted order. None when there are no variables.
    """
    return vtree_from_decomposition_rooted(_Rooted(d), extra_vars)


# ---------------------------------------------------------------------------
# the decomposition-guided compiler


def compile_primal(phi, d):
    """Compile through a tree decomposition of the primal graph.

    Returns ``(Diagram, Vtree)``; the diagram is a structured and-decomposable
    FBDD for the clause set, respecting the returned vtree in both the
    conjunction-only and the stronger decision-level sense.
    """
    primal, _ = graphs_of(phi)
    validate_decomposition(primal, d)
    return _compile_rooted(phi, _Rooted(d))


def _compile_rooted(phi, rooted, builder=None, standalone=True):
    own_builder = builder is None
    if own_builder:
        builder = DiagramBuilder()
    clauses_at = {}
    for c in phi.clauses:
        cv = frozenset(n for n, _ in c)
        home = rooted.clause_home(cv)
        if home is None:
            raise PreconditionError(f"no bag contains clause {sorted(c)}")
        clauses_at.setdefault(home, []).append(c)
    relevant = phi.vars
    memo = {}

    def leaf(b, assign):
        for c in clauses_at.get(b, ()):
            if not any(assign.get(n) == s for n, s in c):
                return builder.sink(0)
        acc = None
        for child in rooted.children[b]:
            iface = {v: assign[v] for v in sorted(rooted.bags[child] & rooted.bags[b])
                     if v in assign}
            sub = entry(child, iface)
            if sub == builder.sink(0):
                return builder.sink(0)
            if sub == builder.sink(1):
                continue
            acc = sub if acc is None else builder.conj(acc, sub)
        return builder.sink(1) if acc is None else acc

    def ladder(b, assign, todo):
        if not todo:
            return leaf(b, assign)
        x = todo[0]
        lo = ladder(b, {**assign, x: 0}, todo[1:])
        hi = ladder(b, {**assign, x: 1}, todo[1:])
        if lo == hi:
            return lo
        return builder.decision(x, lo, hi)

    def entry(b, iface):
        key = (b, tuple(sorted(iface.items())))
        if key not in memo:
            todo = [v for v in rooted.local(b) if v in relevant]
            memo[key] = ladder(b, dict(iface), todo)
        return memo[key]

    source = entry(rooted.root, {})
    if not standalone:
        return source
    diagram = builder.finalize(source)
    vtree = vtree_from_decomposition_rooted(rooted)
    return diagram, vtree


def vtree_from_decomposition_rooted(rooted, extra_vars=()):
    def part(b):
        child_parts = _left_comb([part(c) for c in rooted.children[b]])
        return _right_comb([*rooted.local(b), child_parts])

    nested = _right_comb([*sorted(extra_vars), part(rooted.root)])
    return None if nested is None else Vtree(nested)


def compile_split(phi, long_clauses, d):
    """Three-stage pipeline for a CNF whose long clauses are few.

    Stage 1 builds the decision tree of the long clauses; stage 2 hangs a
    decomposition-guided compilation of the reduced remainder off every true
    leaf, all respecting the one vtree the decomposition induces; stage 3
    shares the sinks and prepends a don't-care chain over any untested
    variables.
    """
    long_set = frozenset(frozenset(c) for c in long_clauses)
    if not long_set <= phi.clauses:
        raise PreconditionError("long clauses must come from the clause set")
    rest = Cnf(phi.clauses - long_set)
    primal, _ = graphs_of(rest)
    validate_decomposition(primal, d)
    rooted = _Rooted(d)
    dt = decision_tree(Cnf(long_set))
    builder = DiagramBuilder()

    def walk(t, g):
        if isinstance(t, DTLeaf):
            if not t.value:
                return builder.sink(0)
            residual = cnf_reduce(rest, Assignment(g))
            return _compile_rooted(residual, rooted, builder, standalone=False)
        lo = walk(t.lo, {**g, t.var: 0})
        hi = walk(t.hi, {**g, t.var: 1})
        if lo == hi:
            return lo
        return builder.decision(t.var, lo, hi)

    source = walk(dt, {})
    body = builder.finalize(source)
    untested = sorted(phi.vars - body.vars)
    if not untested:
        return body
    chained = DiagramBuilder()
    cur = graft(chained, body)
    for x in reversed(untested):
        cur = chained.decision(x, cur, cur)
    return chained.finalize(cur)


def split_vtree(phi, long_clauses, d):
    """The fixed vtree every stage-2 residual of compile_split respects."""
    long_set = frozenset(frozenset(c) for c in long_clauses)
    rest = Cnf(phi.clauses - long_set)
    return vtree_from_decomposition_rooted(_Rooted(d), extra_vars=sorted(phi.vars - rest.vars))


# ---------------------------------------------------------------------------
# grid constructions


def _path_obdd(builder, names):
    """Linear OBDD for the conjunction of consecutive-pair clauses along a
    path of variables, O(1) nodes per layer (tests with equal branches are
    skipped, which makes each path component canonically minimal)."""
    def mknode(var, lo, hi):
        return lo if lo == hi else builder.decision(var, lo, hi)

    m = len(names)
    t = builder.sink(1)
    f = builder.sink(0)
    nxt = {0: t, 1: t}
    for j in range(m - 1, 0, -1):
        zero_prev = mknode(names[j], f, nxt[1])
        one_prev = mknode(names[j], nxt[0], nxt[1])
        nxt = {0: zero_prev, 1: one_prev}
    return mknode(names[0], nxt[0], nxt[1])


def _conj_balanced(builder, ids):
    ids = list(ids)
    if not ids:
        return builder.sink(1)
    while len(ids) > 1:
        nxt = []
        for k in range(0, len(ids) - 1, 2):
            nxt.append(builder.conj(ids[k], ids[k + 1]))
        if len(ids) % 2:
            nxt.append(ids[-1])
        ids = nxt
    return ids[0]


def junction_order(n):
    """The grid junction order: the selector first, then dictionary order."""
    return LinearOrder((JUNCTION, *grid_order(n).names))


def grid_junction_diagram(n):
    """Linear-size ordered diagram for the junction vertex-cover formula.

    The selector's 1-branch conjoins the n row OBDDs, its 0-branch the n
    column OBDDs; each row/column is a consecutive run of the dictionary
    order, so the whole diagram obeys the junction order.
    """
    if n < 2:
        raise ValueError("grid junction needs n >= 2")
    builder = DiagramBuilder()
    rows = [_path_obdd(builder, [grid_name(i, j) for j in range(1, n + 1)])
            for i in range(1, n + 1)]
    cols = [_path_obdd(builder, [grid_name(i, j) for i in range(1, n + 1)])
            for j in range(1, n + 1)]
    root = builder.decision(JUNCTION, _conj_balanced(builder, cols),
                            _conj_balanced(builder, rows))
    diagram = builder.finalize(root)
    cls = validate(diagram, junction_order(n))
    if not cls.is_and_obdd:
        raise SoundnessError("grid junction construction broke its order")
    return diagram


def psi_interleaved_order(n, orientation="hor"):
    """Copy-interleaved dictionary (or transposed) order of the doubled grid."""
    names = []
    for v in grid_order(n, transposed=(orientation == "vert")):
        names.append(tag(v, 1))
        names.append(tag(v, 2))
    return LinearOrder(names)


def psi_layer_obdd(n, orientation="hor"):
    """Layered OBDD for the doubled one-orientation grid formula.

    The state between layers is the previous vertex's two copy values plus
    the two saw-a-zero flags (at most sixteen states per layer); edge clauses
    resolve against the previous vertex, the long clauses against the flags
    at the end. Row starts reset the previous-vertex part.
    """
    if n < 2:
        raise ValueError("layered grid formula needs n >= 2")
    traversal = list(grid_order(n, transposed=(orientation == "vert")))
    layers = []
    for k, v in enumerate(traversal):
        layers.append(("first", k, tag(v, 1)))
        layers.append(("second", k, tag(v, 2)))
    start = ("v", 2, 2, 0, 0)  # 2 = no previous vertex

    def step(layer, state, bit):
        phase, k, _ = layer
        if phase == "first":
            _, p1, p2, z1, z2 = state
            if p2 == 0 and bit == 0:
                return None
            return ("m", p1, bit, z1 | (bit == 0), z2)
        _, p1, b1, z1, z2 = state
        if p1 == 0 and bit == 0:
            return None
        z2 = z2 | (bit == 0)
        if k + 1 < len(traversal) and (k + 1) % n != 0:
            return ("v", b1, bit, z1, z2)
        return ("v", 2, 2, z1, z2)

    reachable = [{start}]
    for layer in layers:
        nxt = set()
        for s in reachable[-1]:
            for bit in (0, 1):
                out = step(layer, s, bit)
                if out is not None:
                    nxt.add(out)
        reachable.append(nxt)
    builder = DiagramBuilder()
    node_at = {}
    for s in sorted(reachable[-1]):
        _, _, _, z1, z2 = s
        node_at[(len(layers), s)] = builder.sink(1 if (z1 and z2) else 0)

    for idx in range(len(layers) - 1, -1, -1):
        layer = layers[idx]
        for s in sorted(reachable[idx]):
            kids = []
            for bit in (0, 1):
                out = step(layer, s, bit)
                kids.append(builder.sink(0) if out is None
                            else node_at[(idx + 1, out)])
            if kids[0] == kids[1]:
                node_at[(idx, s)] = kids[0]
            else:
                node_at[(idx, s)] = builder.decision(layer[2], kids[0], kids[1])
    diagram = builder.finalize(node_at[(0, start)])
    cls = validate(diagram, psi_interleaved_order(n, orientation))
    if not cls.is_obdd:
        raise SoundnessError("layered construction broke its order")
    return diagram


def psi_grid_junction_fbdd(n):
    """Selector-rooted combination of the two layered OBDDs; a plain FBDD
    for the doubled-grid junction formula."""
    builder = DiagramBuilder()
    hor = graft(builder, psi_layer_obdd(n, "hor"))
    vert = graft(builder, psi_layer_obdd(n, "vert"))
    root = builder.decision(JUNCTION, vert, hor)
    diagram = builder.finalize(root)
    cls = validate(diagram)
    if not cls.is_fbdd:
        raise SoundnessError("junction combination is not conjunction-free")
    return diagram


# ---------------------------------------------------------------------------
# structuredness


def respects(b, vt, mode="conjunction-only"):
    """Does the diagram respect the vtree?

    Conjunction-only: every conjunction node's child variable sets fit under
    the two sides of some vtree node. The stronger decision-level mode
    additionally reads each decision node as its or-of-conjunctions trace and
    requires the tested variable separated from each child's variables by
    some vtree split (children testing nothing pass). Returns ``(ok,
    witness)`` with the first violating node id.
    """
    if not b.vars <= vt.vars:
        raise ScopeError(f"vtree misses {sorted(b.vars - vt.vars)}")
    splits = vt.internal_splits()

    def split_exists(one, other):
        for left, right in splits:
            if (one <= left and other <= right) or (one <= right and other <= left):
                return True
        return False

    for i in b.topo():
        node = b.node(i)
        if node.kind == "and":
            if not split_exists(b.vars_below(node.left), b.vars_below(node.right)):
                return False, i
    if mode == "decision-dnnf":
        for i in b.topo():
            node = b.node(i)
            if node.kind != "decision":
                continue
            x = frozenset((node.var,))
            for c in (node.lo, node.hi):
                below = b.vars_below(c)
                if below and not split_exists(x, below):
                    return False, i
    elif mode != "conjunction-only":
        raise ValueError(f"unknown mode {mode!r}")
    return True, None
