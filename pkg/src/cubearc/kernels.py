"""Dispatch layer for the hot loops: compiled core if available, numpy if not.

Selection happens once at import; CUBEARC_FORCE_FALLBACK=1 pins the pure
path.  Both backends implement identical semantics; integer results agree
bit-for-bit and float results agree to ~1e-12, which the test suite checks.

Work is partitioned into stripes along the first axis whose boundaries depend
only on the problem, never on the thread count, and partial results are
reduced in stripe order, so multi-threaded runs are reproducible.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .errors import Budget, PreconditionError

try:
    if os.environ.get("CUBEARC_FORCE_FALLBACK") == "1":
        _core = None
    else:
        from . import _core
except ImportError:
    _core = None

HAVE_CORE = _core is not None

_CHUNK = 1 << 20
_MAXVARS = 64


def backend_name() -> str:
    return "compiled" if HAVE_CORE else "fallback"


def form_rows(form) -> np.ndarray:
    """Flatten a CubicForm to the (m,4) int64 row format the kernels eat."""
    rows = [(i - 1, j - 1, k - 1, c) for (i, j, k), c in form.coeffs.items()]
    if not rows:
        rows = [(0, 0, 0, 0)]
    return np.array(rows, dtype=np.int64)


def _check_box(lows, highs):
    lows = np.asarray(lows, dtype=np.int64)
    highs = np.asarray(highs, dtype=np.int64)
    if lows.shape != highs.shape or lows.ndim != 1:
        raise PreconditionError("box bounds must be two equal-length vectors")
    if lows.shape[0] > _MAXVARS:
        raise PreconditionError(f"at most {_MAXVARS} variables supported")
    if np.any(highs < lows):
        raise PreconditionError("empty box: some high bound below its low bound")
    return lows, highs


def _box_size(lows, highs) -> int:
    return int(np.prod((highs - lows + 1).astype(object)))


def _value_bound(tri, lows, highs) -> int:
    bound = 0
    mags = [max(abs(int(lo)), abs(int(hi))) for lo, hi in zip(lows, highs)]
    for i, j, k, c in tri:
        bound += abs(int(c)) * mags[int(i)] * mags[int(j)] * mags[int(k)]
    return bound


def _guard_overflow(tri, lows, highs):
    if _value_bound(tri, lows, highs) >= 2 ** 62:
        raise PreconditionError(
            "form values may overflow 64-bit integers on this box")


def _stripes(lows, highs, target=_CHUNK):
    """Deterministic partition of the box along axis 0."""
    total = _box_size(lows, highs)
    len0 = int(highs[0] - lows[0] + 1)
    per_row = max(total // len0, 1)
    step = max(1, min(len0, target // per_row if per_row < target else 1))
    out = []
    a = int(lows[0])
    while a <= int(highs[0]):
        b = min(a + step - 1, int(highs[0]))
        lo = lows.copy()
        hi = highs.copy()
        lo[0], hi[0] = a, b
        out.append((lo, hi))
        a = b + 1
    return out


def _run_striped(func, lows, highs, threads):
    jobs = _stripes(lows, highs)
    if threads <= 1 or len(jobs) == 1:
        return [func(lo, hi) for lo, hi in jobs]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futs = [pool.submit(func, lo, hi) for lo, hi in jobs]
        return [f.result() for f in futs]


def _np_eval_chunk(tri, coords):
    acc = np.zeros(coords.shape[1], dtype=np.int64)
    for i, j, k, c in tri:
        acc += int(c) * coords[int(i)] * coords[int(j)] * coords[int(k)]
    return acc


def _np_box_iter(tri, lows, highs):
    """Yield value chunks over the box in C order (last axis fastest)."""
    dims = tuple(int(h - l + 1) for l, h in zip(lows, highs))
    total = int(np.prod([int(d) for d in dims], dtype=object))
    for start in range(0, total, _CHUNK):
        stop = min(start + _CHUNK, total)
        flat = np.arange(start, stop, dtype=np.int64)
        coords = np.array(np.unravel_index(flat, dims), dtype=np.int64)
        coords += lows[:, None]
        yield _np_eval_chunk(tri, coords)


def box_values(form, lows, highs, budget: Budget | None = None,
               threads: int = 1) -> np.ndarray:
    """Form values at every lattice point of the box, C-order flattened."""
    tri = form_rows(form)
    lows, highs = _check_box(lows, highs)
    _guard_overflow(tri, lows, highs)
    budget = budget or Budget()
    total = _box_size(lows, highs)
    budget.spend(total, "box enumeration")
    budget.table(total, "box value table")

    if HAVE_CORE:
        parts = _run_striped(lambda lo, hi: _core.box_values(tri, lo, hi),
                             lows, highs, threads)
    else:
        parts = _run_striped(
            lambda lo, hi: np.concatenate(list(_np_box_iter(tri, lo, hi))),
            lows, highs, threads)
    return np.concatenate(parts)


def zero_count_box(form, lows, highs, budget: Budget | None = None,
                   threads: int = 1) -> int:
    """Count lattice zeros of the form in the box by direct enumeration."""
    tri = form_rows(form)
    lows, highs = _check_box(lows, highs)
    _guard_overflow(tri, lows, highs)
    budget = budget or Budget()
    budget.spend(_box_size(lows, highs), "zero-count enumeration")

    if HAVE_CORE:
        parts = _run_striped(lambda lo, hi: _core.zero_count_box(tri, lo, hi),
                             lows, highs, threads)
    else:
        parts = _run_striped(
            lambda lo, hi: sum(int((chunk == 0).sum())
                               for chunk in _np_box_iter(tri, lo, hi)),
            lows, highs, threads)
    return int(sum(parts))


def residue_histogram(form, q: int, budget: Budget | None = None,
                      threads: int = 1) -> np.ndarray:
    """Histogram of C(y) mod q over the full residue cube (Z/q)^n."""
    if q < 1:
        raise PreconditionError("modulus must be positive")
    tri = form_rows(form)
    n = form.n
    if n > _MAXVARS:
        raise PreconditionError(f"at most {_MAXVARS} variables supported")
    budget = budget or Budget()
    budget.spend(q ** n, "residue enumeration")

    lows = np.zeros(n, dtype=np.int64)
    highs = np.full(n, q - 1, dtype=np.int64)
    if HAVE_CORE:
        if threads <= 1:
            return np.asarray(_core.residue_histogram(tri, n, q))

        def job(lo, hi):
            sub = _core.box_values(tri, lo, hi)
            return np.bincount(sub % q, minlength=q)
        parts = _run_striped(job, lows, highs, threads)
    else:
        def job(lo, hi):
            h = np.zeros(q, dtype=np.int64)
            for chunk in _np_box_iter(tri, lo, hi):
                h += np.bincount(chunk % q, minlength=q)
            return h
        parts = _run_striped(job, lows, highs, threads)
    return np.sum(parts, axis=0, dtype=np.int64)


def phase_sum_box(form, lows, highs, alpha: float,
                  budget: Budget | None = None, threads: int = 1) -> complex:
    """sum of exp(2 pi i alpha C(x)) over the box."""
    tri = form_rows(form)
    lows, highs = _check_box(lows, highs)
    _guard_overflow(tri, lows, highs)
    budget = budget or Budget()
    budget.spend(_box_size(lows, highs), "phase-sum enumeration")

    if HAVE_CORE:
        parts = _run_striped(
            lambda lo, hi: _core.phase_sum_box(tri, lo, hi, float(alpha)),
            lows, highs, threads)
    else:
        def job(lo, hi):
            acc = 0 + 0j
            for chunk in _np_box_iter(tri, lo, hi):
                ph = (alpha * chunk) % 1.0
                acc += complex(np.exp(2j * np.pi * ph).sum())
            return acc
        parts = _run_striped(job, lows, highs, threads)
    return complex(sum(parts))


def convolve_square_sum(vals1, cnts1, vals2, cnts2,
                        budget: Budget | None = None) -> int:
    """sum_u (conv(c1,c2)(u))^2 for compressed integer distributions."""
    vals1 = np.asarray(vals1, dtype=np.int64)
    cnts1 = np.asarray(cnts1, dtype=np.int64)
    vals2 = np.asarray(vals2, dtype=np.int64)
    cnts2 = np.asarray(cnts2, dtype=np.int64)
    if len(vals1) == 0 or len(vals2) == 0:
        return 0
    budget = budget or Budget()
    symmetric = len(vals1) == len(vals2) and np.array_equal(vals1, vals2) \
        and np.array_equal(cnts1, cnts2)
    m1, m2 = len(vals1), len(vals2)
    if symmetric:
        budget.spend(m1 * (m1 + 1) // 2, "pair convolution")
    else:
        budget.spend(m1 * m2, "pair convolution")
    offset = int(vals1.min() + vals2.min())
    length = int(vals1.max() + vals2.max()) - offset + 1
    budget.table(length, "convolution accumulator")

    # Every accumulator slot is at most max1*max2*min(m1,m2) and the squared
    # sum at most that times the total pair mass; both must fit in int64.
    max_entry = int(cnts1.max()) * int(cnts2.max()) * min(m1, m2)
    mass = int(cnts1.sum()) * int(cnts2.sum())
    if max_entry >= 2 ** 62 or max_entry * mass >= 2 ** 62:
        raise PreconditionError(
            "convolution counts may overflow 64-bit accumulation")

    if HAVE_CORE:
        if symmetric:
            return _core.convolve_self_square_sum(vals1, cnts1, offset, length)
        return _core.convolve_square_sum(vals1, cnts1, vals2, cnts2,
                                         offset, length)
    dense = np.zeros(length, dtype=np.int64)
    if symmetric:
        for i, (v, c) in enumerate(zip(vals1, cnts1)):
            # vals entries are distinct, so fancy indexing += is collision-free
            dense[int(v) + vals1[i + 1:] - offset] += 2 * int(c) * cnts1[i + 1:]
        dense[2 * vals1 - offset] += cnts1 * cnts1
        return int(np.dot(dense, dense))
    if len(vals1) > len(vals2):
        vals1, cnts1, vals2, cnts2 = vals2, cnts2, vals1, cnts1
    for v, c in zip(vals1, cnts1):
        # vals2 entries are distinct (compressed distribution), so fancy
        # indexing with += hits each slot once.
        dense[vals2 + (int(v) - offset)] += int(c) * cnts2
    return int(np.dot(dense, dense))
