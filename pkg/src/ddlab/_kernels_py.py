"""Pure-Python hot kernels: truth-table bitsets and per-order OBDD size.

Truth tables are Python big ints with one bit per total assignment. The
assignment with index ``m`` gives the variable at position ``p`` (in the
caller's fixed order) the value ``(m >> (n-1-p)) & 1``, so the first variable
is the most significant bit and the two cofactors of a table are its halves.

Clauses arrive in position space: a literal is ``+(p+1)`` for the positive
literal of the variable at position ``p`` and ``-(p+1)`` for its negation.

The compiled twin (``ddlab._kernels``) implements the same contract; the
selection happens in :mod:`ddlab.kernels`.
"""

from functools import lru_cache

BACKEND = "python"


@lru_cache(maxsize=4096)
def _pattern(n, p):
    """Bit i is 1 iff assignment i sets the variable at position p to 1."""
    block = 1 << (n - 1 - p)
    piece = ((1 << block) - 1) << block
    out = 0
    step = 2 * block
    for base in range(0, 1 << n, step):
        out |= piece << base
    return out


def cnf_truth_table(n, clauses):
    """Truth table of a clause set over n position-indexed variables."""
    full = (1 << (1 << n)) - 1
    table = full
    for clause in clauses:
        mask = 0
        for lit in clause:
            p = abs(lit) - 1
            pat = _pattern(n, p)
            mask |= pat if lit > 0 else full ^ pat
        table &= mask
        if table == 0:
            break
    return table


def count_ones(table):
    return table.bit_count()


def obdd_size_for_table(n, table):
    """Node count of the reduced OBDD for the function given as a truth table.

    Bottom-up over levels: the subfunctions after fixing the first p variables
    are exactly the 2^p aligned blocks of the table. Blocks with equal
    cofactors pass the child through (no test node); distinct (lo, hi) pairs
    at a level are hash-consed. Sinks count only if referenced.
    """
    size = 1 << n
    ids = [(table >> i) & 1 for i in range(size)]  # level-n sink ids: 0 / 1
    next_internal = 2
    used_sinks = set()
    internal = 0
    for level in range(n - 1, -1, -1):
        unique = {}
        nxt = []
        for i in range(0, len(ids), 2):
            lo, hi = ids[i], ids[i + 1]
            if lo == hi:
                nxt.append(lo)
                continue
            key = (lo, hi)
            node = unique.get(key)
            if node is None:
                node = next_internal
                next_internal += 1
                internal += 1
                unique[key] = node
                if lo < 2:
                    used_sinks.add(lo)
                if hi < 2:
                    used_sinks.add(hi)
            nxt.append(node)
        ids = nxt
    if ids[0] < 2:
        used_sinks.add(ids[0])
    return internal + len(used_sinks)


def obdd_size_for_order(n, clauses):
    return obdd_size_for_table(n, cnf_truth_table(n, clauses))
