# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled preference-sweep kernels.

Semantics are locked to the NumPy fallback in _pure.py: bucket sums in
partner-index order, keep-current on tied maximum, otherwise lowest index.
Any change here must keep the two backends bit-identical.
"""


def sweep(const double[:, ::1] coupling_t,
          signed char[::1] prefs,
          const int[::1] order,
          double[::1] scratch):
    """One asynchronous update pass over `order`; mutates prefs in place."""
    cdef Py_ssize_t n = coupling_t.shape[0]
    cdef Py_ssize_t k = scratch.shape[0]
    cdef Py_ssize_t no = order.shape[0]
    cdef Py_ssize_t oi, c, cp, j, cur, best
    cdef double m
    cdef int changes = 0
    with nogil:
        for oi in range(no):
            c = <Py_ssize_t> order[oi]
            for j in range(k):
                scratch[j] = 0.0
            for cp in range(n):
                scratch[prefs[cp]] += coupling_t[c, cp]
            cur = prefs[c]
            m = scratch[cur]
            best = cur
            for j in range(k):
                if scratch[j] > m:
                    m = scratch[j]
                    best = j
            if best != cur:
                prefs[c] = <signed char> best
                changes += 1
    return changes


def fixed_point(const double[:, ::1] coupling_t,
                const signed char[::1] prefs,
                const int[::1] order,
                double[::1] scratch):
    """True when no country in `order` would change preference."""
    cdef Py_ssize_t n = coupling_t.shape[0]
    cdef Py_ssize_t k = scratch.shape[0]
    cdef Py_ssize_t no = order.shape[0]
    cdef Py_ssize_t oi, c, cp, j, cur
    cdef double m
    cdef bint moved = 0
    with nogil:
        for oi in range(no):
            c = <Py_ssize_t> order[oi]
            for j in range(k):
                scratch[j] = 0.0
            for cp in range(n):
                scratch[prefs[cp]] += coupling_t[c, cp]
            cur = prefs[c]
            m = scratch[cur]
            for j in range(k):
                if scratch[j] > m:
                    moved = 1
                    break
            if moved:
                break
    return not moved
