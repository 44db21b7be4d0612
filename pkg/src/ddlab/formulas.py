"""CNF families over graphs: vertex-cover clauses, the doubled two-copy
variant with its two long negative clauses, junction-guarded combinations,
and the single-long-clause star variant.

Variable naming is stable across the package: doubled copies are ``v#1`` /
``v#2`` and the junction selector is ``jn``.
"""

from __future__ import annotations

from .cnf import Cnf, clause_labels
from .errors import PreconditionError
from .graphs import Decomposition, double, grid, grid_order, tag

JUNCTION = "jn"


def _no_isolated(g):
    bad = g.isolated()
    if bad:
        raise PreconditionError(f"isolated vertices {sorted(bad)}")


def vc_formula(g):
    """One positive binary clause per edge; models are the vertex covers."""
    _no_isolated(g)
    return Cnf([(v, 1) for v in sorted(e)] for e in g.edges)


def psi_formula(g):
    """Vertex-cover clauses of the doubled graph plus the two all-negative
    clauses, one per copy class."""
    _no_isolated(g)
    dg = double(g)
    clauses = [[(v, 1) for v in sorted(e)] for e in dg.edges]
    clauses.append([(tag(v, 1), 0) for v in sorted(g.vertices)])
    clauses.append([(tag(v, 2), 0) for v in sorted(g.vertices)])
    return Cnf(clauses)


def star_formula(g):
    """Vertex-cover clauses plus the single all-negative clause."""
    _no_isolated(g)
    clauses = [[(v, 1) for v in sorted(e)] for e in g.edges]
    clauses.append([(v, 0) for v in sorted(g.vertices)])
    return Cnf(clauses)


def _check_partition(g, e1, e2):
    e1 = frozenset(frozenset(e) for e in e1)
    e2 = frozenset(frozenset(e) for e in e2)
    if e1 & e2 or (e1 | e2) != g.edges:
        raise PreconditionError("edge sets must partition the graph's edges")
    for name, part in (("first", e1), ("second", e2)):
        spanned = frozenset().union(*part) if part else frozenset()
        if spanned != g.vertices:
            raise PreconditionError(f"the {name} edge set does not span the vertex set")
    return e1, e2


def junction_formula(g, e1, e2, kind="vc"):
    """Selector-guarded union of the two side formulas.

    The guard literal resolves under jn=1 to the first side's formula and
    under jn=0 to the second side's; guarding clause by clause keeps the
    result a CNF for either kind.
    """
    e1, e2 = _check_partition(g, e1, e2)
    if kind == "vc":
        side1 = [[(v, 1) for v in sorted(e)] for e in e1]
        side2 = [[(v, 1) for v in sorted(e)] for e in e2]
    elif kind == "psi":
        side1 = [sorted(c) for c in psi_formula(g.subgraph_of_edges(e1)).clauses]
        side2 = [sorted(c) for c in psi_formula(g.subgraph_of_edges(e2)).clauses]
    else:
        raise ValueError(f"unknown junction kind {kind!r}")
    clauses = [[(JUNCTION, 0)] + list(c) for c in side1]
    clauses += [[(JUNCTION, 1)] + list(c) for c in side2]
    return Cnf(clauses)


def grid_junction_formula(n, kind="vc"):
    gg = grid(n)
    return junction_formula(gg.graph, gg.hor, gg.vert, kind)


def psi_path_decomposition(n, orientation="hor"):
    """The hand-built width-7 path decomposition of the incidence graph of
    the doubled one-orientation grid formula.

    Bags follow the dictionary traversal: a row-start vertex contributes its
    two copies and the two long-clause vertices; every later vertex adds the
    previous vertex's copies and the two connecting edge clauses.
    """
    if n < 2:
        raise ValueError("needs n >= 2")
    gg = grid(n)
    part = gg.hor if orientation == "hor" else gg.vert
    phi = psi_formula(gg.graph.subgraph_of_edges(part))
    by_clause = {c: name for name, c in clause_labels(phi)}

    def edge_clause(a, b):
        return by_clause[frozenset([(tag(a, 1), 1), (tag(b, 2), 1)])]

    long1 = by_clause[frozenset((tag(v, 1), 0) for v in gg.graph.vertices)]
    long2 = by_clause[frozenset((tag(v, 2), 0) for v in gg.graph.vertices)]
    traversal = list(grid_order(n, transposed=(orientation == "vert")))
    bags = {}
    tree = set()
    for k, v in enumerate(traversal):
        members = {tag(v, 1), tag(v, 2), long1, long2}
        if k % n != 0:
            prev = traversal[k - 1]
            members |= {tag(prev, 1), tag(prev, 2),
                        edge_clause(prev, v), edge_clause(v, prev)}
        bags[f"p{k:03d}"] = frozenset(members)
        if k:
            tree.add(frozenset((f"p{k - 1:03d}", f"p{k:03d}")))
    return Decomposition(bags, tree)
