# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; draw-for-draw identical to the pure versions in _slow.py."""

import numpy as np

cimport numpy as cnp
from cpython.pycapsule cimport PyCapsule_GetPointer
from libc.math cimport INFINITY, cos, exp, isfinite, log, sqrt
from numpy.random cimport bitgen_t

cnp.import_array()

BACKEND = "compiled"

STOP_JUMPS = 0
STOP_HORIZON = 1
STOP_HIT = 2

DEF TWO_PI = 6.283185307179586476925286766559


cdef inline bitgen_t *_bitgen(object gen):
    capsule = gen.bit_generator.capsule
    return <bitgen_t *> PyCapsule_GetPointer(capsule, "BitGenerator")


cdef inline double _next(bitgen_t *bg) noexcept nogil:
    return bg.next_double(bg.state)


# Slab sampling is numpy-vectorized either way; share the one implementation
# so both backends are bit-identical (SIMD vs libm transcendentals differ by
# an ulp otherwise).  The compiled win lives in the event loop below.
from treejump._slow import increment_slab


def neumaier_sum(cnp.ndarray values):
    """Compensated (Neumaier) summation of a float64 array."""
    cdef double[:] v = np.ascontiguousarray(values, dtype=np.float64)
    cdef double s = 0.0, c = 0.0, t, x
    cdef Py_ssize_t i
    with nogil:
        for i in range(v.shape[0]):
            x = v[i]
            t = s + x
            if (s >= x) == (s >= -x):  # |s| >= |x|
                c += (s - t) + x
            else:
                c += (x - t) + s
            s = t
    return s + c


def vrjp_walk(
    object gen,
    cnp.ndarray[cnp.int64_t, ndim=1] indptr,
    cnp.ndarray[cnp.int64_t, ndim=1] indices,
    cnp.ndarray[cnp.float64_t, ndim=1] weights,
    Py_ssize_t start,
    bint reinforced,
    long long max_jumps,
    double horizon,
    hit_mask,
    bint record,
    double discount_h,
    long long discount_target,
):
    """Event-driven jump-process loop; see _slow.vrjp_walk for the contract."""
    cdef bitgen_t *bg = _bitgen(gen)
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef cnp.ndarray[cnp.float64_t, ndim=1] local_a = np.zeros(n, dtype=np.float64)
    cdef double[:] local = local_a
    cdef long long[:] iptr = indptr
    cdef long long[:] idx = indices
    cdef double[:] w = weights
    cdef cnp.uint8_t[:] hits
    cdef bint has_hits = hit_mask is not None
    if has_hits:
        hits = np.ascontiguousarray(hit_mask, dtype=np.uint8)
    else:
        hits = np.zeros(1, dtype=np.uint8)

    cdef Py_ssize_t cap = 4096
    cdef cnp.ndarray rec_v_a = np.empty(cap if record else 0, dtype=np.int64)
    cdef cnp.ndarray rec_t_a = np.empty(cap if record else 0, dtype=np.float64)
    cdef long long[:] rec_v = rec_v_a
    cdef double[:] rec_t = rec_t_a

    cdef double t = 0.0, disc = 0.0, total, dt, u, v, acc
    cdef Py_ssize_t x = start, target, k, lo, hi
    cdef long long jumps = 0
    cdef int reason = STOP_JUMPS

    while True:
        lo = iptr[x]
        hi = iptr[x + 1]
        total = 0.0
        if reinforced:
            for k in range(lo, hi):
                total += w[k] * (1.0 + local[idx[k]])
        else:
            for k in range(lo, hi):
                total += w[k]
        if total > 0.0:
            u = 1.0 - _next(bg)
            dt = -log(u) / total
        else:
            if not isfinite(horizon):
                raise ValueError("walk stuck at a vertex with zero total rate and no horizon")
            dt = INFINITY
        if isfinite(horizon) and t + dt >= horizon:
            dt = horizon - t
            local[x] += dt
            if discount_h > 0.0 and x == discount_target:
                disc += (exp(-discount_h * t) - exp(-discount_h * (t + dt))) / discount_h
            t = horizon
            reason = STOP_HORIZON
            break
        if discount_h > 0.0 and x == discount_target:
            disc += (exp(-discount_h * t) - exp(-discount_h * (t + dt))) / discount_h
        t += dt
        local[x] += dt
        v = _next(bg) * total
        acc = 0.0
        target = x
        for k in range(lo, hi):
            if reinforced:
                acc += w[k] * (1.0 + local[idx[k]])
            else:
                acc += w[k]
            if acc >= v:
                target = idx[k]
                break
        else:
            target = idx[hi - 1]
        if record:
            if jumps >= cap:
                cap *= 2
                rec_v_a = np.resize(rec_v_a, cap)
                rec_t_a = np.resize(rec_t_a, cap)
                rec_v = rec_v_a
                rec_t = rec_t_a
            rec_v[jumps] = x
            rec_t[jumps] = t
        jumps += 1
        x = target
        if has_hits and hits[x]:
            reason = STOP_HIT
            break
        if jumps >= max_jumps:
            reason = STOP_JUMPS
            break

    if record:
        out_v = np.empty(jumps + 1, dtype=np.int64)
        out_v[:jumps] = rec_v_a[:jumps]
        out_v[jumps] = x
        out_t = rec_t_a[:jumps].copy()
    else:
        out_v = np.empty(0, dtype=np.int64)
        out_t = np.empty(0, dtype=np.float64)
    return local_a, int(jumps), t, out_v, out_t, disc, reason
