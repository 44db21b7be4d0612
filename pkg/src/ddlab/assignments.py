"""Partial truth assignments and finite sets of them.

An :class:`Assignment` is a finite map from variable names to bits; an
:class:`AssignmentSet` is a finite set of assignments together with the union
of their variable sets. The operations here are the set algebra the rest of
the package is verified against: Cartesian product over disjoint universes,
projection, restriction, and the rectangle "breaks" test.
"""

from __future__ import annotations

import itertools

from .errors import DomainOverlapError, ScopeError, UniformityError


class Assignment:
    """An immutable partial truth assignment."""

    __slots__ = ("_items", "_map", "_hash")

    def __init__(self, bindings=()):
        if isinstance(bindings, Assignment):
            self._items = bindings._items
            self._map = bindings._map
            self._hash = bindings._hash
            return
        if isinstance(bindings, dict):
            pairs = bindings.items()
        else:
            pairs = bindings
        m = {}
        for name, bit in pairs:
            bit = int(bit)
            if bit not in (0, 1):
                raise ValueError(f"bit for {name!r} must be 0 or 1, got {bit}")
            if name in m and m[name] != bit:
                raise ValueError(f"variable {name!r} bound twice with conflicting bits")
            m[name] = bit
        self._map = m
        self._items = tuple(sorted(m.items()))
        self._hash = hash(self._items)

    @property
    def vars(self):
        return frozenset(self._map)

    def __len__(self):
        return len(self._map)

    def __iter__(self):
        return iter(self._items)

    def __contains__(self, name):
        return name in self._map

    def __getitem__(self, name):
        return self._map[name]

    def get(self, name, default=None):
        return self._map.get(name, default)

    def __eq__(self, other):
        return isinstance(other, Assignment) and self._items == other._items

    def __hash__(self):
        return self._hash

    def __le__(self, other):
        """Containment: self is a sub-assignment of other."""
        if len(self._map) > len(other._map):
            return False
        get = other._map.get
        return all(get(n) == b for n, b in self._items)

    def union(self, other):
        """Join two consistent assignments; raises on a conflicting bit."""
        m = dict(self._map)
        for n, b in other._items:
            if m.setdefault(n, b) != b:
                raise ValueError(f"inconsistent union at variable {n!r}")
        return Assignment(m)

    def minus(self, other):
        """Drop the bindings of ``other``'s variables."""
        drop = other._map if isinstance(other, Assignment) else set(other)
        return Assignment((n, b) for n, b in self._items if n not in drop)

    def project(self, names):
        names = set(names)
        return Assignment((n, b) for n, b in self._items if n in names)

    def render(self):
        return ",".join(f"{n}={b}" for n, b in self._items)

    def __repr__(self):
        return f"Assignment({{{self.render()}}})"

    @staticmethod
    def parse(text):
        """Inverse of :meth:`render`; empty string is the empty assignment.

        Names may contain commas (grid vertices do), so tokens are delimited
        by the ``=bit`` tail rather than by splitting on commas.
        """
        import re
        text = text.strip()
        if not text:
            return Assignment()
        pairs = []
        pos = 0
        for m in re.finditer(r"(.+?)=([01])(?:,|$)", text):
            if m.start() != pos:
                raise ValueError(f"bad assignment text at {text[pos:]!r}")
            pairs.append((m.group(1).strip(), int(m.group(2))))
            pos = m.end()
        if pos != len(text):
            raise ValueError(f"bad assignment text at {text[pos:]!r}")
        return Assignment(pairs)


EMPTY = Assignment()


class AssignmentSet:
    """A finite set of assignments; the universe is the union of member vars."""

    __slots__ = ("elements", "universe")

    def __init__(self, elements=()):
        self.elements = frozenset(Assignment(e) if not isinstance(e, Assignment) else e
                                  for e in elements)
        u = set()
        for a in self.elements:
            u.update(a.vars)
        self.universe = frozenset(u)

    @property
    def is_uniform(self):
        return all(a.vars == self.universe for a in self.elements)

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, a):
        return a in self.elements

    def __eq__(self, other):
        return isinstance(other, AssignmentSet) and self.elements == other.elements

    def __hash__(self):
        return hash(self.elements)

    def __or__(self, other):
        return AssignmentSet(self.elements | other.elements)

    def render(self):
        return "".join(a.render() + "\n" for a in sorted(self.elements, key=lambda a: a._items))

    def __repr__(self):
        return f"AssignmentSet(<{len(self.elements)} over {sorted(self.universe)}>)"


def cube(names):
    """All total assignments over ``names``; cube(()) is {empty}."""
    names = sorted(set(names))
    return AssignmentSet(Assignment(zip(names, bits))
                         for bits in itertools.product((0, 1), repeat=len(names)))


def product(h1, h2):
    """Cartesian product of assignment sets over disjoint universes."""
    if h1.universe & h2.universe:
        raise DomainOverlapError(
            f"universes overlap on {sorted(h1.universe & h2.universe)}")
    return AssignmentSet(a.union(b) for a in h1 for b in h2)


def product_all(sets):
    acc = AssignmentSet([EMPTY])
    for h in sets:
        acc = product(acc, h)
    return acc


def project(a, names):
    """Projection of an assignment onto a variable set."""
    return a.project(names)


def project_set(h, names):
    """Memberwise projection; the result universe shrinks accordingly."""
    names = set(names)
    return AssignmentSet(a.project(names) for a in h)


def restrict_set(h, a):
    """Restriction of a set by an assignment.

    Members extending the projection of ``a`` onto the set's universe survive,
    with that projection's bindings removed.
    """
    a0 = a.project(h.universe)
    return AssignmentSet(b.minus(a0) for b in h if a0 <= b)


def breaks(h, y):
    """Decide whether the uniform set ``h`` breaks ``y``, with a witness.

    Returns ``(False, None)`` or ``(True, (v1, v2))`` where ``v1, v2`` is a
    bipartition of the universe splitting ``y`` with
    ``h == project_set(h, v1) x project_set(h, v2)``. Only projections need be
    tested as factor candidates: any factoring of a uniform set equals the
    pair of projections onto its variable bipartition. Exhaustive over the
    2^|universe| bipartitions, so desk scale only.
    """
    if not h.is_uniform:
        raise UniformityError("breaks requires a uniform assignment set")
    y = frozenset(y)
    if not y <= h.universe:
        raise ScopeError(f"break set {sorted(y - h.universe)} outside the universe")
    if len(y) < 2 or not h.elements:
        return False, None
    names = sorted(h.universe)
    n = len(names)
    size = len(h.elements)
    for mask in range(1, 2 ** (n - 1)):  # complement-symmetric, skip empty/full
        v1 = frozenset(names[i] for i in range(n) if mask >> i & 1)
        v2 = h.universe - v1
        if not (y & v1) or not (y & v2):
            continue
        p1 = project_set(h, v1)
        p2 = project_set(h, v2)
        # h is always a subset of p1 x p2, so equality is exactly the size test
        if len(p1) * len(p2) == size:
            return True, (v1, v2)
    return False, None
