# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled inner loops: box enumeration, residue histograms, phase sums.

Every function here has a numpy fallback in cubearc.kernels with identical
semantics; this module only exists to make the hot paths fast.  Forms arrive
flattened as an (m, 4) int64 array of rows (i, j, k, coeff) with 0-based
variable indices.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport cos, sin

cnp.import_array()

ctypedef cnp.int64_t i64

DEF MAXVARS = 64


cdef inline i64 _eval_point(const i64[:, ::1] tri, const i64 *x) noexcept nogil:
    cdef Py_ssize_t t, m = tri.shape[0]
    cdef i64 s = 0
    for t in range(m):
        s += tri[t, 3] * x[tri[t, 0]] * x[tri[t, 1]] * x[tri[t, 2]]
    return s


def box_values(const i64[:, ::1] tri, const i64[::1] lows, const i64[::1] highs):
    """Values of the form at every lattice point of the box, C-order."""
    cdef Py_ssize_t n = lows.shape[0]
    cdef Py_ssize_t d
    cdef i64 total = 1
    for d in range(n):
        total *= highs[d] - lows[d] + 1
    out = np.empty(total, dtype=np.int64)
    cdef i64[::1] ov = out
    cdef i64 x[MAXVARS]
    cdef Py_ssize_t pos
    cdef i64 idx
    with nogil:
        for d in range(n):
            x[d] = lows[d]
        for idx in range(total):
            ov[idx] = _eval_point(tri, x)
            pos = n - 1
            while pos >= 0:
                x[pos] += 1
                if x[pos] <= highs[pos]:
                    break
                x[pos] = lows[pos]
                pos -= 1
    return out


def zero_count_box(const i64[:, ::1] tri, const i64[::1] lows, const i64[::1] highs):
    """Number of lattice points of the box where the form vanishes."""
    cdef Py_ssize_t n = lows.shape[0]
    cdef Py_ssize_t d, pos
    cdef i64 total = 1
    for d in range(n):
        total *= highs[d] - lows[d] + 1
    cdef i64 x[MAXVARS]
    cdef i64 idx, count = 0
    with nogil:
        for d in range(n):
            x[d] = lows[d]
        for idx in range(total):
            if _eval_point(tri, x) == 0:
                count += 1
            pos = n - 1
            while pos >= 0:
                x[pos] += 1
                if x[pos] <= highs[pos]:
                    break
                x[pos] = lows[pos]
                pos -= 1
    return int(count)


def residue_histogram(const i64[:, ::1] tri, Py_ssize_t n, i64 q):
    """Histogram of form values mod q over the full residue cube (Z/q)^n."""
    cdef i64 total = 1
    cdef Py_ssize_t d, pos
    for d in range(n):
        total *= q
    out = np.zeros(q, dtype=np.int64)
    cdef i64[::1] ov = out
    cdef i64 x[MAXVARS]
    cdef i64 idx, v
    with nogil:
        for d in range(n):
            x[d] = 0
        for idx in range(total):
            v = _eval_point(tri, x) % q
            if v < 0:
                v += q
            ov[v] += 1
            pos = n - 1
            while pos >= 0:
                x[pos] += 1
                if x[pos] < q:
                    break
                x[pos] = 0
                pos -= 1
    return out


def phase_sum_box(const i64[:, ::1] tri, const i64[::1] lows,
                  const i64[::1] highs, double alpha):
    """sum of exp(2 pi i alpha C(x)) over the box, compensated accumulation."""
    cdef Py_ssize_t n = lows.shape[0]
    cdef Py_ssize_t d, pos
    cdef i64 total = 1
    for d in range(n):
        total *= highs[d] - lows[d] + 1
    cdef i64 x[MAXVARS]
    cdef i64 idx
    cdef double TWO_PI = 6.283185307179586476925286766559
    cdef double ph, re = 0.0, im = 0.0, cre = 0.0, cim = 0.0
    cdef double y, t
    with nogil:
        for d in range(n):
            x[d] = lows[d]
        for idx in range(total):
            ph = TWO_PI * (alpha * <double>_eval_point(tri, x))
            # Kahan update keeps 4000+-term sums stable to ~1e-13.
            y = cos(ph) - cre
            t = re + y
            cre = (t - re) - y
            re = t
            y = sin(ph) - cim
            t = im + y
            cim = (t - im) - y
            im = t
            pos = n - 1
            while pos >= 0:
                x[pos] += 1
                if x[pos] <= highs[pos]:
                    break
                x[pos] = lows[pos]
                pos -= 1
    return complex(re, im)


def convolve_square_sum(const i64[::1] vals1, const i64[::1] cnts1,
                        const i64[::1] vals2, const i64[::1] cnts2,
                        i64 offset, Py_ssize_t length):
    """sum over u of (number of pairs v1+v2=u, weighted)**2.

    Computes sum_u ((c1*c2 convolution at u))^2 through a dense accumulator
    of the given length, where index = v1 + v2 - offset.
    """
    dense = np.zeros(length, dtype=np.int64)
    cdef i64[::1] dv = dense
    cdef Py_ssize_t a, b, m1 = vals1.shape[0], m2 = vals2.shape[0]
    cdef i64 base, w, acc = 0
    with nogil:
        for a in range(m1):
            base = vals1[a] - offset
            w = cnts1[a]
            for b in range(m2):
                dv[base + vals2[b]] += w * cnts2[b]
        for a in range(length):
            acc += dv[a] * dv[a]
    return int(acc)


def convolve_self_square_sum(const i64[::1] vals, const i64[::1] cnts,
                             i64 offset, Py_ssize_t length):
    """Symmetric variant: both distributions identical, half the pair loop."""
    dense = np.zeros(length, dtype=np.int64)
    cdef i64[::1] dv = dense
    cdef Py_ssize_t a, b, m = vals.shape[0]
    cdef i64 base, w, acc = 0
    with nogil:
        for a in range(m):
            base = vals[a] - offset
            w = cnts[a]
            dv[base + vals[a]] += w * w
            for b in range(a + 1, m):
                dv[base + vals[b]] += 2 * w * cnts[b]
        for a in range(length):
            acc += dv[a] * dv[a]
    return int(acc)
