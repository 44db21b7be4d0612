"""Alignment of a diagram by an assignment, frontiers, and the model-set
decomposition they induce.

Aligning by g drops every decision out-edge that contradicts g and prunes
what the source can no longer reach. Decision nodes left with a single
out-edge are incomplete; walking from the source through incomplete decision
nodes only (conjunctions pass through) reaches the frontier: the minimal
complete decision nodes L(g). For an ordered diagram and a prefix
assignment, the restricted model set factors exactly into a cube over the
free variables and the product of the frontier subdiagrams' model sets; the
checker here verifies that equation by brute force on both sides.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import config
from .assignments import cube, product_all, restrict_set
from .diagrams import DiagramBuilder, validate
from .errors import (EssentialityError, PreconditionError, ScaleError,
                     SoundnessError)


@dataclass(frozen=True)
class AlignedDiagram:
    """The subgraph surviving alignment; the base diagram is untouched."""

    base: Diagram
    g: object
    kept_nodes: frozenset
    kept_edges: frozenset  # (parent, slot, child) with slot in lo/hi/left/right
    incomplete: frozenset  # kept decision nodes with a single out-edge

    def out_edges(self, node_id):
        return sorted((slot, child) for parent, slot, child in self.kept_edges
                      if parent == node_id)


def align(b, g):
    """Alignment of the diagram by an assignment (any assignment; prefix-ness
    matters only to the lemma checkers downstream)."""
    edges = []
    for i, node in enumerate(b.nodes):
        if node.kind == "decision":
            bit = g.get(node.var)
            if bit is None or bit == 0:
                edges.append((i, "lo", node.lo))
            if bit is None or bit == 1:
                edges.append((i, "hi", node.hi))
        elif node.kind == "and":
            edges.append((i, "left", node.left))
            edges.append((i, "right", node.right))
    out = {}
    for parent, slot, child in edges:
        out.setdefault(parent, []).append((slot, child))
    keep = set()
    stack = [b.source]
    while stack:
        i = stack.pop()
        if i in keep:
            continue
        keep.add(i)
        stack.extend(child for _, child in out.get(i, ()))
    kept_edges = frozenset((p, s, c) for p, s, c in edges if p in keep)
    incomplete = frozenset(
        i for i in keep
        if b.node(i).kind == "decision" and len([e for e in kept_edges if e[0] == i]) == 1)
    return AlignedDiagram(b, g, frozenset(keep), kept_edges, incomplete)


@dataclass(frozen=True)
class Frontier:
    """L(g), the incomplete-path tree T(g) as parent links, and the free set X(g)."""

    l_nodes: frozenset
    tree_parent: dict
    free_vars: frozenset

    def tree_pairs(self):
        return sorted((child, parent) for child, parent in self.tree_parent.items()
                      if parent is not None)


def frontier(b, pi, g):
    """Compute the frontier of an ordered diagram under a prefix assignment.

    Asserts the structural facts the construction is entitled to: the
    subdiagrams hanging off L(g) are complete and pairwise variable-disjoint,
    and the union of incomplete paths is a tree. Their failure indicates an
    invalid input diagram and raises a soundness error.
    """
    names = tuple(pi.names if hasattr(pi, "names") else pi)
    validate(b, names)
    _require_prefix(g, names)
    aligned = align(b, g)
    l_nodes = set()
    visited = set()
    taken = set()  # incomplete-path edges, as (parent, child)
    stack = [b.source]
    while stack:
        i = stack.pop()
        if i in visited:
            continue
        visited.add(i)
        node = b.node(i)
        if node.kind == "decision" and i not in aligned.incomplete:
            l_nodes.add(i)
            continue
        for _, child in aligned.out_edges(i):
            taken.add((i, child))
            stack.append(child)
    # T(g): the part of the walk on paths that end at frontier nodes. Paths
    # ending at sinks are discarded; those may legally remeet at a shared
    # sink, the L-bound union may not.
    reaches = set(l_nodes)
    changed = True
    while changed:
        changed = False
        for parent_id, child in taken:
            if child in reaches and parent_id not in reaches:
                reaches.add(parent_id)
                changed = True
    tree_parent = {}
    if l_nodes:
        tree_parent[b.source] = None
    for parent_id, child in sorted(taken):
        if parent_id in reaches and child in reaches:
            if child in tree_parent:
                raise SoundnessError(
                    f"incomplete paths remeet at node {child}; T(g) is not a tree")
            tree_parent[child] = parent_id
    # completeness below the frontier (first statement of the path lemma)
    for u in l_nodes:
        for i in _reachable_in_aligned(aligned, u):
            node = b.node(i)
            if node.kind == "decision" and i in aligned.incomplete:
                raise SoundnessError(
                    f"incomplete decision node {i} below frontier node {u}")
    seen = {}
    for u in sorted(l_nodes):
        for v in sorted(l_nodes):
            if u < v and b.vars_below(u) & b.vars_below(v):
                raise SoundnessError(
                    f"frontier subdiagrams {u} and {v} share variables "
                    f"{sorted(b.vars_below(u) & b.vars_below(v))}")
        seen[u] = b.vars_below(u)
    free = (b.vars - g.vars) - frozenset().union(*seen.values()) if seen else (b.vars - g.vars)
    return Frontier(frozenset(l_nodes), tree_parent, frozenset(free))


def _reachable_in_aligned(aligned, start):
    seen = set()
    stack = [start]
    while stack:
        i = stack.pop()
        if i in seen:
            continue
        seen.add(i)
        stack.extend(child for _, child in aligned.out_edges(i))
    return seen


def _require_prefix(g, names):
    k = len(g.vars)
    if set(names[:k]) != g.vars:
        raise PreconditionError(
            f"assignment variables {sorted(g.vars)} are not the length-{k} prefix of the order")


def subdiagram(b, root):
    """The diagram rooted at a node, renumbered densely."""
    return subdiagram_with_map(b, root)[0]


def subdiagram_with_map(b, root):
    """Subdiagram plus the old-id to new-id correspondence."""
    wanted = _descendants(b, root)
    builder = DiagramBuilder()
    remap = {}
    for i in b.topo():
        if i not in wanted:
            continue
        node = b.node(i)
        if node.kind == "sink":
            remap[i] = builder.sink(node.value)
        elif node.kind == "decision":
            remap[i] = builder.decision(node.var, remap[node.lo], remap[node.hi])
        else:
            remap[i] = builder.conj(remap[node.left], remap[node.right])
    return builder.finalize(remap[root], prune=False), remap


def _descendants(b, root):
    seen = set()
    stack = [root]
    while stack:
        i = stack.pop()
        if i in seen:
            continue
        seen.add(i)
        stack.extend(b.node(i).children())
    return seen


def check_model_decomposition(b, pi, g, cap=None):
    """Brute-force both sides of the restricted-model factorization.

    Left: the diagram's satisfying set restricted by g. Right: the cube over
    the free variables times the product of the frontier subdiagrams'
    satisfying sets. Exact set equality decides.
    """
    from .diagrams import satisfying_set
    cap = config.resolve(cap, config.BRUTE_FORCE_VAR_CAP)
    if len(b.vars) > cap:
        raise ScaleError(f"{len(b.vars)} variables exceed the cap {cap}")
    fr = frontier(b, pi, g)
    left = restrict_set(satisfying_set(b), g)
    if not left.elements:
        raise PreconditionError("restricted model set is empty")
    factors = [cube(fr.free_vars)]
    for u in sorted(fr.l_nodes):
        factors.append(satisfying_set(subdiagram(b, u)))
    right = product_all(factors)
    return left == right


def restrict_diagram(b, x, i, check_essential=True, cap=None):
    """Fix one variable by edge surgery: drop the refuted branch of every
    x-node, contract the confirmed branch, prune.

    The clean function equality f(B') = f(B)|x=i needs every variable of the
    restricted function to be essential; that is checked by brute force
    unless the caller explicitly waives it (``check_essential=False``), in
    which case only the weaker cube-factoring claim holds.
    """
    i = int(i)
    if check_essential:
        _check_essentials(b, x, i, cap)
    if x not in b.vars:
        return b
    redirect = {}
    for idx, node in enumerate(b.nodes):
        if node.kind == "decision" and node.var == x:
            redirect[idx] = node.hi if i else node.lo
    builder = DiagramBuilder()
    remap = {}
    for idx in b.topo():
        node = b.node(idx)
        if idx in redirect:
            remap[idx] = remap[redirect[idx]]
        elif node.kind == "sink":
            remap[idx] = builder.sink(node.value)
        elif node.kind == "decision":
            remap[idx] = builder.decision(node.var, remap[node.lo], remap[node.hi])
        else:
            remap[idx] = builder.conj(remap[node.left], remap[node.right])
    return builder.finalize(remap[b.source])


def _check_essentials(b, x, i, cap):
    from .diagrams import truth_table
    cap = config.resolve(cap, config.BRUTE_FORCE_VAR_CAP)
    if len(b.vars) > cap:
        raise ScaleError(
            f"{len(b.vars)} variables exceed the essentiality cap {cap}; "
            "pass check_essential=False to waive")
    rest = sorted(b.vars - {x})
    if x in b.vars:
        order = [x] + rest
        table = truth_table(b, order)
        half = 1 << len(rest)
        table = (table >> half) if i else (table & ((1 << half) - 1))
    else:
        table = truth_table(b, rest)
        half = 1 << len(rest)
    from ._kernels_py import _pattern
    n = len(rest)
    full = (1 << (1 << n)) - 1
    for p, y in enumerate(rest):
        pat = _pattern(n, p)
        width = 1 << (n - 1 - p)
        hi = table & pat
        lo = table & (full ^ pat)
        if (hi >> width) == lo:
            raise EssentialityError(y)
