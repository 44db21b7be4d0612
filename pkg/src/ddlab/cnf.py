"""CNF clause sets: evaluation, brute-force model enumeration, reduction,
derived graphs, and DIMACS round-trip.

A literal is a ``(name, sign)`` pair with sign 1 for the positive literal; a
clause is a frozenset of literals well-formed in the sense that no variable
occurs twice (so a clause can never contain both x and its negation). A
:class:`Cnf` is a set of clauses; duplicate clauses collapse. The variable set
is always the union of clause variables.

``models`` is an oracle, not a solver: it enumerates the full cube through
the truth-table kernels and is capped accordingly.
"""

from __future__ import annotations

from . import config, kernels
from .assignments import Assignment, AssignmentSet
from .errors import FormatError, ScaleError, ScopeError
from .graphs import Graph


def literal(name, sign):
    sign = int(sign)
    if sign not in (0, 1):
        raise ValueError("literal sign must be 0 or 1")
    return (name, sign)


def clause(literals):
    """Build a well-formed clause; rejects a variable occurring twice."""
    lits = frozenset((n, int(s)) for n, s in literals)
    names = [n for n, _ in lits]
    if len(set(names)) != len(names):
        bad = sorted(n for n in set(names) if names.count(n) > 1)
        raise ValueError(f"clause mentions {bad} with both polarities")
    return lits


def clause_key(c):
    """Canonical sort key: short clauses first, then lexicographic literals."""
    return (len(c), tuple(sorted(c)))


class Cnf:
    """An immutable clause set over named variables."""

    __slots__ = ("clauses", "vars", "_hash")

    def __init__(self, clauses_in=()):
        self.clauses = frozenset(clause(c) for c in clauses_in)
        v = set()
        for c in self.clauses:
            v.update(n for n, _ in c)
        self.vars = frozenset(v)
        self._hash = hash(self.clauses)

    def __eq__(self, other):
        return isinstance(other, Cnf) and self.clauses == other.clauses

    def __hash__(self):
        return self._hash

    def __len__(self):
        return len(self.clauses)

    def sorted_clauses(self):
        return sorted(self.clauses, key=clause_key)

    def __repr__(self):
        return f"Cnf(<{len(self.clauses)} clauses over {len(self.vars)} vars>)"


def evaluate(phi, a):
    """1 iff every clause shares a literal with the assignment's literal set."""
    if not phi.vars <= a.vars:
        missing = sorted(phi.vars - a.vars)
        raise ScopeError(f"assignment leaves {missing} unset")
    for c in phi.clauses:
        if not any(a[n] == s for n, s in c):
            return 0
    return 1


def _encode(phi, order):
    """Clauses in position space for the kernels; order fixes positions."""
    pos = {name: p for p, name in enumerate(order)}
    out = []
    for c in phi.sorted_clauses():
        out.append([(pos[n] + 1) if s else -(pos[n] + 1) for n, s in sorted(c)])
    return out


def truth_table(phi, order):
    """Model indicator bitset of phi over the ordered universe ``order``."""
    return kernels.cnf_truth_table(len(order), _encode(phi, order))


def assignment_from_index(order, m):
    n = len(order)
    return Assignment((name, (m >> (n - 1 - p)) & 1) for p, name in enumerate(order))


def models(phi, universe, cap=None):
    """The uniform set of all satisfying assignments over ``universe``."""
    universe = frozenset(universe)
    if not phi.vars <= universe:
        raise ScopeError(f"universe misses {sorted(phi.vars - universe)}")
    cap = config.resolve(cap, config.BRUTE_FORCE_VAR_CAP)
    if len(universe) > cap:
        raise ScaleError(f"{len(universe)} variables exceed the brute-force cap {cap}")
    order = sorted(universe)
    table = truth_table(phi, order)
    nbytes = ((1 << len(order)) + 7) // 8 if order else 1
    raw = table.to_bytes(nbytes, "little")
    out = []
    for byte_index, byte in enumerate(raw):
        while byte:
            bit = byte & -byte
            m = byte_index * 8 + bit.bit_length() - 1
            out.append(assignment_from_index(order, m))
            byte ^= bit
    return AssignmentSet(out)


def count_models(phi, universe, cap=None):
    universe = frozenset(universe)
    if not phi.vars <= universe:
        raise ScopeError(f"universe misses {sorted(phi.vars - universe)}")
    cap = config.resolve(cap, config.BRUTE_FORCE_VAR_CAP)
    if len(universe) > cap:
        raise ScaleError(f"{len(universe)} variables exceed the brute-force cap {cap}")
    return kernels.count_ones(truth_table(phi, sorted(universe)))


def reduce(phi, g):
    """The clause-surgery reduction: drop satisfied clauses, erase assigned
    occurrences from the rest. Empty clauses are kept; they mark contradiction."""
    out = []
    for c in phi.clauses:
        if any(g.get(n) == s for n, s in c):
            continue
        out.append(frozenset((n, s) for n, s in c if n not in g))
    return Cnf(out)


def clause_labels(phi):
    """Deterministic clause vertex names, canonical order: [(name, clause)]."""
    return [(f"c{i}", c) for i, c in enumerate(phi.sorted_clauses())]


def graphs_of(phi):
    """Primal and incidence graphs of a clause set.

    Incidence clause vertices are named per :func:`clause_labels`; a variable
    named like one of them would collide, which is rejected loudly.
    """
    labels = clause_labels(phi)
    primal_edges = set()
    for _, c in labels:
        names = sorted(n for n, _ in c)
        for i in range(len(names)):
            for j in range(i + 1, len(names)):
                primal_edges.add(frozenset((names[i], names[j])))
    primal = Graph(phi.vars, primal_edges)
    clash = phi.vars & {name for name, _ in labels}
    if clash:
        raise FormatError(f"variable names collide with clause vertex names: {sorted(clash)}")
    inc_vertices = set(phi.vars) | {name for name, _ in labels}
    inc_edges = set()
    for name, c in labels:
        for n, _ in c:
            inc_edges.add(frozenset((name, n)))
    incidence = Graph(inc_vertices, inc_edges)
    return primal, incidence


def write_dimacs(phi, path=None):
    """DIMACS text with a `c var <index> <name>` map preserving names."""
    names = sorted(phi.vars)
    index = {n: i + 1 for i, n in enumerate(names)}
    lines = [f"c var {i + 1} {n}" for i, n in enumerate(names)]
    lines.append(f"p cnf {len(names)} {len(phi.clauses)}")
    for c in phi.sorted_clauses():
        lits = sorted(((index[n] if s else -index[n]) for n, s in c), key=abs)
        lines.append(" ".join(str(l) for l in lits + [0]))
    text = "\n".join(lines) + "\n"
    if path is not None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text


def read_dimacs(source):
    """Parse DIMACS text or a file path; returns a :class:`Cnf`.

    Unnamed indices fall back to x<i> names.
    """
    if "\n" not in source:
        with open(source, encoding="utf-8") as fh:
            text = fh.read()
    else:
        text = source
    names = {}
    nvars = None
    claimed = None
    clauses = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "c":
            if len(parts) == 4 and parts[1] == "var":
                try:
                    names[int(parts[2])] = parts[3]
                except ValueError as exc:
                    raise FormatError(f"bad name-map line: {raw!r}") from exc
            continue
        if parts[0] == "p":
            if len(parts) != 4 or parts[1] != "cnf":
                raise FormatError(f"bad problem line: {raw!r}")
            if nvars is not None:
                raise FormatError("multiple problem lines")
            nvars, claimed = int(parts[2]), int(parts[3])
            continue
        if nvars is None:
            raise FormatError("clause line before problem line")
        try:
            ints = [int(t) for t in parts]
        except ValueError as exc:
            raise FormatError(f"non-integer literal in {raw!r}") from exc
        if not ints or ints[-1] != 0:
            raise FormatError(f"clause line not 0-terminated: {raw!r}")
        lits = []
        for l in ints[:-1]:
            idx = abs(l)
            if idx == 0 or idx > nvars:
                raise FormatError(f"literal {l} out of range 1..{nvars}")
            lits.append((names.get(idx, f"x{idx}"), 1 if l > 0 else 0))
        clauses.append(clause(lits))
    if nvars is None:
        raise FormatError("missing problem line")
    if claimed is not None and claimed != len(clauses):
        raise FormatError(f"header claims {claimed} clauses, found {len(clauses)}")
    return Cnf(clauses)
