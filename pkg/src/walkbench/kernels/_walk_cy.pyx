# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled first-passage kernel; see ``_walk_py`` for the reference semantics."""

import numpy as np

from cpython.pycapsule cimport PyCapsule_GetPointer
from libc.stdint cimport int64_t
from numpy.random cimport bitgen_t


def run_chunk(const double[:, ::1] cum_t, const int64_t[::1] start, Py_ssize_t target,
              object bit_generator, bint count_return, int64_t budget):
    cdef Py_ssize_t k = start.shape[0]
    cdef Py_ssize_t n = cum_t.shape[0]
    cdef Py_ssize_t a, w, na, i, j, cur
    cdef int64_t total = 0
    cdef double u

    state_arr = np.array(start, dtype=np.int64)
    steps_arr = np.zeros(k, dtype=np.int64)
    active_arr = np.empty(k, dtype=np.intp)
    cdef int64_t[::1] state = state_arr
    cdef int64_t[::1] steps = steps_arr
    cdef Py_ssize_t[::1] active = active_arr

    na = 0
    for i in range(k):
        if count_return or state[i] != target:
            active[na] = i
            na += 1

    cdef bitgen_t *rng = <bitgen_t *> PyCapsule_GetPointer(bit_generator.capsule, "BitGenerator")
    with bit_generator.lock, nogil:
        while na > 0:
            w = 0
            for a in range(na):
                i = active[a]
                u = rng.next_double(rng.state)
                cur = state[i]
                j = 0
                while j < n - 1 and u >= cum_t[cur, j]:
                    j += 1
                state[i] = j
                steps[i] += 1
                if j != target:
                    active[w] = i
                    w += 1
            total += na
            na = w
            if total > budget:
                break
    return steps_arr, total
