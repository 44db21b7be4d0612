"""Graphs, grids, doubling, crossing matchings, width search, and
decompositions.

The width machinery is exhaustive by construction: crossing widths are
maximized per prefix cut (a maximum matching for the plain mode, a maximum
independent set in the edge-conflict graph for the induced mode), and order
minima run either over all orders via a subset DP or over seeded samples.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from . import config
from .errors import (DecompositionError, PreconditionError, ScaleError,
                     ScopeError, SoundnessError)


def edge(a, b):
    if a == b:
        raise ValueError(f"self-loop at {a!r}")
    return frozenset((a, b))


class Graph:
    """An immutable undirected graph over named vertices."""

    __slots__ = ("vertices", "edges", "_adj")

    def __init__(self, vertices, edges=()):
        self.vertices = frozenset(vertices)
        es = set()
        for e in edges:
            e = frozenset(e)
            if len(e) != 2:
                raise ValueError(f"edge {sorted(e)} is not a vertex pair")
            if not e <= self.vertices:
                raise ValueError(f"edge {sorted(e)} uses undeclared vertices")
            es.add(e)
        self.edges = frozenset(es)
        adj = {v: set() for v in self.vertices}
        for e in self.edges:
            a, b = sorted(e)
            adj[a].add(b)
            adj[b].add(a)
        self._adj = {v: frozenset(ns) for v, ns in adj.items()}

    def neighbors(self, v):
        return self._adj[v]

    def degree(self, v):
        return len(self._adj[v])

    def max_degree(self):
        return max((len(ns) for ns in self._adj.values()), default=0)

    def isolated(self):
        return frozenset(v for v, ns in self._adj.items() if not ns)

    def subgraph_of_edges(self, edges):
        """Same vertex set, restricted edge set."""
        return Graph(self.vertices, edges)

    def __eq__(self, other):
        return (isinstance(other, Graph) and self.vertices == other.vertices
                and self.edges == other.edges)

    def __hash__(self):
        return hash((self.vertices, self.edges))

    def __repr__(self):
        return f"Graph(<{len(self.vertices)} vertices, {len(self.edges)} edges>)"


class LinearOrder:
    """A permutation of a ground set, with O(1) position lookup."""

    __slots__ = ("names", "_pos")

    def __init__(self, names):
        self.names = tuple(names)
        self._pos = {n: i for i, n in enumerate(self.names)}
        if len(self._pos) != len(self.names):
            raise ValueError("order repeats a name")

    def position(self, name):
        return self._pos[name]

    def __contains__(self, name):
        return name in self._pos

    def __len__(self):
        return len(self.names)

    def __iter__(self):
        return iter(self.names)

    def __eq__(self, other):
        return isinstance(other, LinearOrder) and self.names == other.names

    def __hash__(self):
        return hash(self.names)

    def prefix(self, k):
        return frozenset(self.names[:k])

    def restricted(self, keep):
        keep = set(keep)
        return LinearOrder(n for n in self.names if n in keep)

    def __repr__(self):
        return f"LinearOrder({list(self.names)!r})"


@dataclass(frozen=True)
class Matching:
    """Disjoint edges, optionally with a bipartition witness."""

    edges: frozenset
    u_side: frozenset | None = None
    w_side: frozenset | None = None

    def __post_init__(self):
        seen = set()
        for e in self.edges:
            if seen & e:
                raise ValueError(f"matching edges share vertex {sorted(seen & e)}")
            seen.update(e)
        if (self.u_side is None) != (self.w_side is None):
            raise ValueError("both witness sides or neither")
        if self.u_side is not None:
            if self.u_side | self.w_side != frozenset(seen) or self.u_side & self.w_side:
                raise ValueError("witness sides must partition the matched vertices")
            for e in self.edges:
                if len(e & self.u_side) != 1:
                    raise ValueError(f"edge {sorted(e)} not between the witness sides")

    def __len__(self):
        return len(self.edges)

    def sorted_edges(self):
        return sorted(tuple(sorted(e)) for e in self.edges)


@dataclass(frozen=True)
class Decomposition:
    """Bags over a tree of bag ids; width is the largest bag minus one."""

    bags: dict
    tree: frozenset

    def __post_init__(self):
        object.__setattr__(self, "bags", {k: frozenset(v) for k, v in self.bags.items()})
        edges = set()
        for e in self.tree:
            e = frozenset(e)
            if len(e) != 2 or not e <= set(self.bags):
                raise ValueError(f"bad tree edge {sorted(e)}")
            edges.add(e)
        object.__setattr__(self, "tree", frozenset(edges))

    @property
    def width(self):
        return max((len(b) for b in self.bags.values()), default=0) - 1

    def is_path(self):
        deg = {b: 0 for b in self.bags}
        for e in self.tree:
            for b in e:
                deg[b] += 1
        return all(d <= 2 for d in deg.values()) and _tree_connected(set(self.bags), self.tree)


def _tree_connected(nodes, edges):
    if not nodes:
        return True
    adj = {v: set() for v in nodes}
    for e in edges:
        a, b = sorted(e)
        adj[a].add(b)
        adj[b].add(a)
    seen = set()
    stack = [next(iter(sorted(nodes)))]
    while stack:
        v = stack.pop()
        if v in seen:
            continue
        seen.add(v)
        stack.extend(adj[v] - seen)
    return seen == nodes


# ---------------------------------------------------------------------------
# grids and doubling


def grid_name(i, j):
    return f"({i},{j})"


@dataclass(frozen=True)
class GridGraph:
    graph: Graph
    hor: frozenset
    vert: frozenset


def grid(n):
    """The n-by-n grid with its horizontal/vertical edge partition."""
    if n < 1:
        raise ValueError("grid size must be positive")
    vertices = {grid_name(i, j) for i in range(1, n + 1) for j in range(1, n + 1)}
    hor = {edge(grid_name(i, j), grid_name(i, j + 1))
           for i in range(1, n + 1) for j in range(1, n)}
    vert = {edge(grid_name(i, j), grid_name(i + 1, j))
            for i in range(1, n) for j in range(1, n + 1)}
    return GridGraph(Graph(vertices, hor | vert), frozenset(hor), frozenset(vert))


def grid_order(n, transposed=False):
    """Dictionary (row-major) vertex order; transposed flips the roles."""
    if transposed:
        return LinearOrder(grid_name(i, j) for j in range(1, n + 1) for i in range(1, n + 1))
    return LinearOrder(grid_name(i, j) for i in range(1, n + 1) for j in range(1, n + 1))


def tag(v, copy):
    return f"{v}#{copy}"


def untag(name):
    base, sep, copy = name.rpartition("#")
    if not sep or copy not in ("1", "2"):
        raise ScopeError(f"{name!r} carries no copy tag")
    return base, int(copy)


def double(g):
    """Two tagged copies of every vertex; each edge becomes its two
    cross-copy versions."""
    bad = g.isolated()
    if bad:
        raise PreconditionError(f"isolated vertices {sorted(bad)} admit no doubling")
    vertices = {tag(v, 1) for v in g.vertices} | {tag(v, 2) for v in g.vertices}
    edges = set()
    for e in g.edges:
        u, v = sorted(e)
        edges.add(edge(tag(u, 1), tag(v, 2)))
        edges.add(edge(tag(v, 1), tag(u, 2)))
    return Graph(vertices, edges)


def lift_edges(edges):
    """Doubled versions of a plain edge set."""
    out = set()
    for e in edges:
        u, v = sorted(e)
        out.add(edge(tag(u, 1), tag(v, 2)))
        out.add(edge(tag(v, 1), tag(u, 2)))
    return frozenset(out)


# ---------------------------------------------------------------------------
# matchings crossing orders


def is_matching(edges):
    seen = set()
    for e in edges:
        if seen & e:
            return False
        seen.update(e)
    return True


def is_induced_matching(g, edges):
    """No edge of g joins matched vertices apart from the matching itself."""
    if not is_matching(edges):
        return False
    matched = set()
    for e in edges:
        matched.update(e)
    for e in g.edges:
        if e <= matched and e not in frozenset(edges):
            return False
    return True


def crosses(order, edges, cut=None):
    """Does the matching cross the order? Optionally check one specific cut."""
    cuts = [cut] if cut is not None else range(1, len(order))
    for k in cuts:
        prefix = order.prefix(k)
        if all(len(e & prefix) == 1 for e in edges):
            return k
    return None


def neat_sides(edges, order, cut):
    """Copy tags of the prefix/suffix endpoints at the cut; None if mixed."""
    prefix = order.prefix(cut)
    ptags = set()
    stags = set()
    for e in edges:
        for v in e:
            _, c = untag(v)
            (ptags if v in prefix else stags).add(c)
    if len(ptags) <= 1 and len(stags) <= 1 and ptags != stags:
        return (next(iter(ptags), None), next(iter(stags), None))
    return None


def neatly_crosses(order, edges):
    """First cut witnessing a neat crossing, or None."""
    for k in range(1, len(order)):
        prefix = order.prefix(k)
        if all(len(e & prefix) == 1 for e in edges) and neat_sides(edges, order, k):
            return k
    return None


def _max_bipartite_matching(cands, left_of):
    """Deterministic augmenting-path maximum matching among candidate edges.

    ``left_of[e]`` is the prefix-side endpoint of edge e. Returns the edges.
    """
    left = sorted({left_of[e] for e in cands})
    adj = {u: sorted({tuple(sorted(e)) for e in cands if left_of[e] == u}) for u in left}
    match_right = {}

    def try_augment(u, banned):
        for e in adj[u]:
            r = e[0] if e[1] == u else e[1]
            if r in banned:
                continue
            banned.add(r)
            if r not in match_right or try_augment(match_right[r][0], banned):
                match_right[r] = (u, frozenset(e))
                return True
        return False

    for u in left:
        try_augment(u, set())
    return frozenset(e for _, e in match_right.values())


def _max_conflict_free(cands, conflict):
    """Maximum conflict-free edge subset, deterministic witness.

    Branch and bound over the sorted candidate list; ties prefer the
    lexicographically smaller edge tuple set.
    """
    cands = sorted(cands, key=lambda e: tuple(sorted(e)))
    best = []

    def recurse(idx, chosen, alive):
        nonlocal best
        if len(chosen) + len(alive) <= len(best):
            return
        if idx == len(cands):
            if len(chosen) > len(best):
                best = list(chosen)
            return
        e = cands[idx]
        if e in alive:
            recurse(idx + 1, chosen + [e], alive - conflict[e] - {e})
        recurse(idx + 1, chosen, alive - {e})

    recurse(0, [], frozenset(cands))
    return frozenset(best)


def _conflicts(g, cands):
    conflict = {e: set() for e in cands}
    cl = sorted(cands, key=lambda e: tuple(sorted(e)))
    for i, e in enumerate(cl):
        ne = set()
        for v in e:
            ne.update(g.neighbors(v))
        ne.update(e)
        for f in cl[i + 1:]:
            if f & ne != frozenset() or any(w in ne for w in f):
                conflict[e].add(f)
                conflict[f].add(e)
    return {e: frozenset(s) for e, s in conflict.items()}


def _best_at_cut(g, order, k, mode, neat):
    prefix = order.prefix(k)
    cands = [e for e in g.edges if len(e & prefix) == 1]
    if neat:
        groups = {(1, 2): [], (2, 1): []}
        for e in cands:
            (p,) = e & prefix
            (s,) = e - prefix
            key = (untag(p)[1], untag(s)[1])
            groups[key].append(e)
        results = []
        for part in (groups[(1, 2)], groups[(2, 1)]):
            results.append(_pick(g, part, prefix, mode))
        return max(results, key=lambda m: (len(m), [tuple(sorted(e)) for e in sorted(m)]))
    return _pick(g, cands, prefix, mode)


def _pick(g, cands, prefix, mode):
    if not cands:
        return frozenset()
    if mode == "matching":
        left_of = {e: next(iter(e & prefix)) for e in cands}
        return _max_bipartite_matching(cands, left_of)
    if mode == "induced-matching":
        conflict = _conflicts(g, cands)
        return _max_conflict_free(cands, conflict)
    raise ValueError(f"unknown mode {mode!r}")


def crossing_width(g, pi, mode="matching", neat=False):
    """Largest (induced/neat) matching crossing the order, with a witness.

    Returns ``(size, (cut, Matching))``; the witness matching carries its
    bipartition sides. Exhaustive over the |V|-1 prefix cuts.
    """
    if set(pi.names) != set(g.vertices):
        raise ScopeError("order must cover exactly the vertex set")
    if neat:
        for v in g.vertices:
            untag(v)
    best = frozenset()
    best_cut = 1
    for k in range(1, len(pi)):
        m = _best_at_cut(g, pi, k, mode, neat)
        if len(m) > len(best):
            best, best_cut = m, k
    prefix = pi.prefix(best_cut)
    matched_p = frozenset().union(*(e & prefix for e in best)) if best else frozenset()
    matched_s = frozenset().union(*(e - prefix for e in best)) if best else frozenset()
    witness = Matching(best, matched_p or None, matched_s or None)
    return len(best), (best_cut, witness)


def _cut_value(g, subset, mode, cache):
    key = frozenset(subset)
    if key not in cache:
        cands = [e for e in g.edges if len(e & key) == 1]
        cache[key] = len(_pick(g, cands, key, mode))
    return cache[key]


def width_min(g, mode="lsim", search="exhaustive", count=None, seed=None, cap=None):
    """Minimum crossing width over vertex orders.

    ``mode`` selects induced (lsim) or plain (lmm) matchings. Exhaustive
    search runs a subset DP equivalent to trying every order (cut values
    depend only on the prefix set); sampling shuffles with a seeded RNG.
    Returns ``(width, LinearOrder)``.
    """
    inner = {"lsim": "induced-matching", "lmm": "matching"}[mode]
    verts = sorted(g.vertices)
    n = len(verts)
    if n == 0:
        return 0, LinearOrder(())
    cache = {}
    if search == "exhaustive":
        cap = config.resolve(cap, config.EXHAUSTIVE_ORDER_CAP)
        if n > cap:
            raise ScaleError(f"{n} vertices exceed the exhaustive order cap {cap}")
        full = frozenset(verts)
        memo = {}

        def dp(state):
            if len(state) == n:
                return 0, ()
            if state in memo:
                return memo[state]
            best = None
            for v in verts:
                if v in state:
                    continue
                nxt = state | {v}
                here = _cut_value(g, nxt, inner, cache) if len(nxt) < n else 0
                rest, tail = dp(frozenset(nxt))
                cand = (max(here, rest), (v,) + tail)
                if best is None or cand[0] < best[0]:
                    best = cand
            memo[state] = best
            return best

        width, names = dp(frozenset())
        return width, LinearOrder(names)
    if search == "sampled":
        if count is None or seed is None:
            raise ValueError("sampled search needs count and seed")
        rng = random.Random(seed)
        best = None
        for _ in range(count):
            names = list(verts)
            rng.shuffle(names)
            w = 0
            for k in range(1, n):
                w = max(w, _cut_value(g, frozenset(names[:k]), inner, cache))
                if best is not None and w >= best[0]:
                    break
            if best is None or w < best[0]:
                best = (w, LinearOrder(names))
        return best
    raise ValueError(f"unknown search {search!r}")


# ---------------------------------------------------------------------------
# the neat-matching extraction of the doubled graph


def extract_neat(g, pi_star):
    """Find an induced matching of double(g) neatly crossing the order.

    Follows the constructive argument: read off a plain-graph order from the
    first-copy positions, take a maximum induced matching crossing it, keep
    the majority copy-side of its prefix endpoints, and lift that side back
    to the doubled graph. The result is self-checked (induced, neat crossing)
    and has at least ceil(lsimw(g)/2) edges.
    """
    dg = double(g)
    if set(pi_star.names) != set(dg.vertices):
        raise ScopeError("order must cover the doubled vertex set")
    ind = {}
    for v in sorted(g.vertices):
        ind[v] = 1 if pi_star.position(tag(v, 1)) < pi_star.position(tag(v, 2)) else 2
    pi = LinearOrder(sorted(g.vertices, key=lambda v: pi_star.position(tag(v, ind[v]))))
    size, (cut, witness) = crossing_width(g, pi, mode="induced-matching")
    if size == 0:
        return Matching(frozenset())
    prefix = pi.prefix(cut)
    u_all = frozenset().union(*(e & prefix for e in witness.edges))
    sides = {1: frozenset(u for u in u_all if ind[u] == 1),
             2: frozenset(u for u in u_all if ind[u] == 2)}

    def lifted(side):
        out = set()
        u_vs = set()
        w_vs = set()
        for e in witness.edges:
            us = e & sides[side]
            if not us:
                continue
            (u,) = us
            (w,) = e - {u}
            out.add(edge(tag(u, side), tag(w, 3 - side)))
            u_vs.add(tag(u, side))
            w_vs.add(tag(w, 3 - side))
        return Matching(frozenset(out), frozenset(u_vs) or None, frozenset(w_vs) or None)

    if len(sides[1]) > len(sides[2]):
        side = 1
    elif len(sides[2]) > len(sides[1]):
        side = 2
    else:
        side = 1 if lifted(1).sorted_edges() <= lifted(2).sorted_edges() else 2
    result = lifted(side)
    if not is_induced_matching(dg, result.edges):
        raise SoundnessError("extracted matching is not induced in the doubled graph")
    if neatly_crosses(pi_star, result.edges) is None:
        raise SoundnessError("extracted matching does not neatly cross the order")
    return result


def split_neat(g, e1, e2, pi_star):
    """Majority side of the extracted neat matching across an edge bipartition."""
    e1 = frozenset(frozenset(e) for e in e1)
    e2 = frozenset(frozenset(e) for e in e2)
    if e1 & e2 or (e1 | e2) != g.edges:
        raise PreconditionError("edge sets must partition the graph's edges")
    for name, part in (("first", e1), ("second", e2)):
        spanned = frozenset().union(*part) if part else frozenset()
        if spanned != g.vertices:
            raise PreconditionError(f"the {name} edge set does not span the vertex set")
    whole = extract_neat(g, pi_star)
    parts = {1: whole.edges & lift_edges(e1), 2: whole.edges & lift_edges(e2)}

    def witness(edges):
        if not edges:
            return Matching(frozenset())
        u = whole.u_side & frozenset().union(*edges)
        w = whole.w_side & frozenset().union(*edges)
        return Matching(edges, u, w)

    if len(parts[1]) > len(parts[2]):
        side = 1
    elif len(parts[2]) > len(parts[1]):
        side = 2
    else:
        side = 1 if sorted(map(sorted, parts[1])) <= sorted(map(sorted, parts[2])) else 2
    return side, witness(parts[side])


# ---------------------------------------------------------------------------
# exact treewidth / pathwidth and decomposition checking


def _as_masks(g):
    verts = sorted(g.vertices)
    idx = {v: i for i, v in enumerate(verts)}
    adj = [0] * len(verts)
    for e in g.edges:
        a, b = sorted(e)
        adj[idx[a]] |= 1 << idx[b]
        adj[idx[b]] |= 1 << idx[a]
    return verts, adj


def _fill_neighbors(adj, v, eliminated):
    """Neighbors of v in the graph with `eliminated` contracted away."""
    seen = 1 << v
    frontier = adj[v]
    reach = 0
    while frontier:
        low = frontier & -frontier
        u = low.bit_length() - 1
        frontier ^= low
        if (1 << u) & seen:
            continue
        seen |= 1 << u
        if (1 << u) & eliminated:
            frontier |= adj[u] & ~seen
        else:
            reach |= 1 << u
    return reach


def treewidth_exact(g, cap=None):
    """Exact treewidth by elimination-order search with subset memoization."""
    cap = config.resolve(cap, config.TREEWIDTH_CAP)
    n = len(g.vertices)
    if n > cap:
        raise ScaleError(f"{n} vertices exceed the treewidth cap {cap}")
    if n == 0:
        return -1
    width, _ = _elimination_dp(g)
    return width


def exact_elimination_order(g, cap=None):
    """Treewidth together with an optimal elimination order."""
    cap = config.resolve(cap, config.TREEWIDTH_CAP)
    if len(g.vertices) > cap:
        raise ScaleError(f"{len(g.vertices)} vertices exceed the treewidth cap {cap}")
    if not g.vertices:
        return -1, ()
    return _elimination_dp(g)


def _elimination_dp(g):
    verts, adj = _as_masks(g)
    n = len(verts)
    full = (1 << n) - 1
    memo = {}

    def best(eliminated):
        if eliminated == full:
            return -1, ()
        if eliminated in memo:
            return memo[eliminated]
        out = None
        for v in range(n):
            if (1 << v) & eliminated:
                continue
            deg = _fill_neighbors(adj, v, eliminated).bit_count()
            rest, tail = best(eliminated | (1 << v))
            cand = (max(deg, rest), (verts[v],) + tail)
            if out is None or cand[0] < out[0]:
                out = cand
        memo[eliminated] = out
        return out

    return best(0)


def pathwidth_exact(g, cap=None):
    """Exact pathwidth via the vertex-separation subset DP."""
    cap = config.resolve(cap, config.TREEWIDTH_CAP)
    n = len(g.vertices)
    if n > cap:
        raise ScaleError(f"{n} vertices exceed the pathwidth cap {cap}")
    if n == 0:
        return -1
    verts, adj = _as_masks(g)
    full = (1 << n) - 1
    memo = {}

    def boundary(placed):
        count = 0
        rest = placed
        while rest:
            low = rest & -rest
            v = low.bit_length() - 1
            rest ^= low
            if adj[v] & ~placed:
                count += 1
        return count

    def best(placed):
        if placed == full:
            return 0
        if placed in memo:
            return memo[placed]
        out = None
        for v in range(n):
            if (1 << v) & placed:
                continue
            nxt = placed | (1 << v)
            cand = max(boundary(nxt), best(nxt))
            if out is None or cand < out:
                out = cand
        memo[placed] = out
        return out

    return best(0)


def decomposition_from_elimination(g, order):
    """Tree decomposition induced by an elimination order (fill-in bags)."""
    order = list(order)
    if set(order) != set(g.vertices):
        raise ScopeError("elimination order must cover the vertex set")
    pos = {v: i for i, v in enumerate(order)}
    adj = {v: set(g.neighbors(v)) for v in g.vertices}
    bags = {}
    for v in order:
        later = {u for u in adj[v] if pos[u] > pos[v]}
        bags[f"b{pos[v]}"] = frozenset(later | {v})
        for a in later:
            for b in later:
                if a != b:
                    adj[a].add(b)
    tree = set()
    roots = []
    for v in order:
        later = sorted(bags[f"b{pos[v]}"] - {v}, key=pos.get)
        if later:
            tree.add(frozenset((f"b{pos[v]}", f"b{pos[later[0]]}")))
        else:
            roots.append(f"b{pos[v]}")
    # a disconnected graph yields a forest; chain the component roots
    for a, b in zip(roots, roots[1:]):
        tree.add(frozenset((a, b)))
    return Decomposition(bags, tree)


def validate_decomposition(g, d):
    """Check containment and connectivity; returns the width or raises."""
    ids = set(d.bags)
    if not ids:
        raise DecompositionError("tree", None, "no bags")
    if len(d.tree) != len(ids) - 1 or not _tree_connected(ids, d.tree):
        raise DecompositionError("tree", None, "bag graph is not a tree")
    for bid, bag in d.bags.items():
        foreign = bag - g.vertices
        if foreign:
            raise DecompositionError("containment", sorted(foreign)[0],
                                     f"bag {bid} mentions unknown vertex {sorted(foreign)[0]!r}")
    covered = frozenset().union(*d.bags.values()) if d.bags else frozenset()
    missing = g.vertices - covered
    if missing:
        raise DecompositionError("containment", sorted(missing)[0],
                                 f"vertex {sorted(missing)[0]!r} appears in no bag")
    for e in sorted(g.edges, key=sorted):
        if not any(e <= bag for bag in d.bags.values()):
            raise DecompositionError("containment", tuple(sorted(e)),
                                     f"edge {sorted(e)} inside no bag")
    adj = {b: set() for b in ids}
    for e in d.tree:
        a, b = sorted(e)
        adj[a].add(b)
        adj[b].add(a)
    for v in sorted(g.vertices):
        holding = {b for b, bag in d.bags.items() if v in bag}
        start = next(iter(sorted(holding)))
        seen = set()
        stack = [start]
        while stack:
            b = stack.pop()
            if b in seen:
                continue
            seen.add(b)
            stack.extend(u for u in adj[b] if u in holding and u not in seen)
        if seen != holding:
            raise DecompositionError("connectivity", v,
                                     f"bags holding {v!r} are disconnected")
    return d.width


def greedy_induced(g, m):
    """Greedy induced sub-matching; at least ceil(|m| / (2*maxdeg+1)) edges."""
    if not is_matching(m.edges if isinstance(m, Matching) else m):
        raise PreconditionError("input edge set is not a matching")
    remaining = sorted((frozenset(e) for e in (m.edges if isinstance(m, Matching) else m)),
                       key=lambda e: tuple(sorted(e)))
    chosen = []
    while remaining:
        e = remaining.pop(0)
        chosen.append(e)
        blocked = set(e)
        for v in e:
            blocked.update(g.neighbors(v))
        remaining = [f for f in remaining if not f & blocked]
    return Matching(frozenset(chosen))


# ---------------------------------------------------------------------------
# file formats


def write_graph(g, path=None):
    lines = [f"v {v}" for v in sorted(g.vertices)]
    lines += [f"e {a} {b}" for a, b in sorted(tuple(sorted(e)) for e in g.edges)]
    text = "\n".join(lines) + "\n"
    if path is not None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text


def read_graph(source):
    if "\n" not in source:
        with open(source, encoding="utf-8") as fh:
            source = fh.read()
    vertices = set()
    edges = set()
    for raw in source.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] == "v" and len(parts) == 2:
            vertices.add(parts[1])
        elif parts[0] == "e" and len(parts) == 3:
            edges.add(frozenset(parts[1:]))
        else:
            raise ValueError(f"bad graph line {raw!r}")
    return Graph(vertices, edges)


def write_order(order, path=None):
    text = "".join(f"{n}\n" for n in order)
    if path is not None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text


def read_order(source):
    if "\n" not in source:
        with open(source, encoding="utf-8") as fh:
            source = fh.read()
    return LinearOrder(line.strip() for line in source.splitlines() if line.strip())


def write_decomposition(d, path=None):
    lines = []
    for bid in sorted(d.bags):
        members = " ".join(sorted(d.bags[bid]))
        lines.append(f"B {bid} {members}".rstrip())
    lines += [f"T {a} {b}" for a, b in sorted(tuple(sorted(e)) for e in d.tree)]
    text = "\n".join(lines) + "\n"
    if path is not None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text


def read_decomposition(source):
    if "\n" not in source:
        with open(source, encoding="utf-8") as fh:
            source = fh.read()
    bags = {}
    tree = set()
    for raw in source.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] == "B" and len(parts) >= 2:
            bags[parts[1]] = frozenset(parts[2:])
        elif parts[0] == "T" and len(parts) == 3:
            tree.add(frozenset(parts[1:]))
        else:
            raise ValueError(f"bad decomposition line {raw!r}")
    return Decomposition(bags, tree)
