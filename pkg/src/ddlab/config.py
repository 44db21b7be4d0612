"""Runtime caps for the brute-force oracles.

Every enumeration in this package is desk scale on purpose; the caps make the
scale explicit and overridable per call. A ``None`` cap argument means "use the
default below".
"""

# Largest universe (in variables) the 2^n enumerations accept.
BRUTE_FORCE_VAR_CAP = 22

# Largest vertex count for exhaustive linear-order search (n! orders).
EXHAUSTIVE_ORDER_CAP = 8

# Largest vertex count for the exact treewidth/pathwidth subset DP.
TREEWIDTH_CAP = 10


def resolve(cap, default):
    return default if cap is None else cap
