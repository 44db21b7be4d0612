# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled twin of ddlab._kernels_py; same contract, C inner loops."""

from libc.stdlib cimport free, malloc
from libcpp.unordered_map cimport unordered_map

from cpython.bytes cimport PyBytes_FromStringAndSize

import cython

BACKEND = "cython"

ctypedef unsigned long long u64
ctypedef long long i64


def cnf_truth_table(int n, clauses):
    """Truth table of position-space clauses as a Python int (bit m = sat)."""
    if n < 0 or n > 24:
        raise ValueError("kernel supports 0 <= n <= 24")
    cdef Py_ssize_t size = (<Py_ssize_t> 1) << n
    cdef Py_ssize_t nbytes = (size + 7) >> 3
    cdef int nclauses = len(clauses)
    cdef u64 *apos = NULL
    cdef u64 *aneg = NULL
    cdef unsigned char *buf = NULL
    cdef Py_ssize_t m
    cdef int c, ok
    cdef u64 bits
    try:
        apos = <u64 *> malloc(max(1, nclauses) * sizeof(u64))
        aneg = <u64 *> malloc(max(1, nclauses) * sizeof(u64))
        buf = <unsigned char *> malloc(max(1, nbytes))
        if apos is NULL or aneg is NULL or buf is NULL:
            raise MemoryError()
        for c in range(nclauses):
            apos[c] = 0
            aneg[c] = 0
            for lit in clauses[c]:
                p = abs(lit) - 1
                if p >= n:
                    raise ValueError("literal position out of range")
                if lit > 0:
                    apos[c] |= (<u64> 1) << (n - 1 - p)
                else:
                    aneg[c] |= (<u64> 1) << (n - 1 - p)
        for m in range(nbytes):
            buf[m] = 0
        for m in range(size):
            bits = <u64> m
            ok = 1
            for c in range(nclauses):
                # falsified iff no positive literal true and no negative true
                if (bits & apos[c]) == 0 and (bits & aneg[c]) == aneg[c]:
                    ok = 0
                    break
            if ok:
                buf[m >> 3] |= <unsigned char> (1 << (m & 7))
        out = PyBytes_FromStringAndSize(<char *> buf, nbytes)
    finally:
        free(apos)
        free(aneg)
        free(buf)
    return int.from_bytes(out, "little")


@cython.cdivision(True)
def obdd_size_for_order(int n, clauses):
    """Reduced-OBDD node count for the clause set under the given order."""
    if n < 0 or n > 20:
        raise ValueError("obdd kernel supports 0 <= n <= 20")
    cdef Py_ssize_t size = (<Py_ssize_t> 1) << n
    cdef int nclauses = len(clauses)
    cdef u64 *apos = NULL
    cdef u64 *aneg = NULL
    cdef i64 *ids = NULL
    cdef Py_ssize_t m, half, i
    cdef int c, level
    cdef u64 bits, key
    cdef i64 lo, hi, node
    cdef i64 next_internal = 2
    cdef i64 internal = 0
    cdef int used0 = 0, used1 = 0
    cdef unordered_map[u64, i64] unique
    cdef unordered_map[u64, i64].iterator it
    try:
        apos = <u64 *> malloc(max(1, nclauses) * sizeof(u64))
        aneg = <u64 *> malloc(max(1, nclauses) * sizeof(u64))
        ids = <i64 *> malloc(max(1, size) * sizeof(i64))
        if apos is NULL or aneg is NULL or ids is NULL:
            raise MemoryError()
        for c in range(nclauses):
            apos[c] = 0
            aneg[c] = 0
            for lit in clauses[c]:
                p = abs(lit) - 1
                if p >= n:
                    raise ValueError("literal position out of range")
                if lit > 0:
                    apos[c] |= (<u64> 1) << (n - 1 - p)
                else:
                    aneg[c] |= (<u64> 1) << (n - 1 - p)
        for m in range(size):
            bits = <u64> m
            ids[m] = 1
            for c in range(nclauses):
                if (bits & apos[c]) == 0 and (bits & aneg[c]) == aneg[c]:
                    ids[m] = 0
                    break
        half = size
        for level in range(n - 1, -1, -1):
            half >>= 1
            unique.clear()
            for i in range(half):
                lo = ids[2 * i]
                hi = ids[2 * i + 1]
                if lo == hi:
                    ids[i] = lo
                    continue
                key = (<u64> lo << 32) | <u64> hi
                it = unique.find(key)
                if it == unique.end():
                    node = next_internal
                    next_internal += 1
                    internal += 1
                    unique[key] = node
                    if lo == 0 or hi == 0:
                        used0 = 1
                    if lo == 1 or hi == 1:
                        used1 = 1
                    ids[i] = node
                else:
                    ids[i] = cython.operator.dereference(it).second
        if ids[0] == 0:
            used0 = 1
        elif ids[0] == 1:
            used1 = 1
        return internal + used0 + used1
    finally:
        free(apos)
        free(aneg)
        free(ids)
