"""Exact lattice-zero counting and small-height point search.

Counting exploits variable-disjoint splittings: each block contributes a
compressed value-multiplicity table over its own sub-box, tables are merged
smallest-first, and the final pair is joined along complementary values.
The direct enumerator over the full product lattice serves as the
cross-check method.  Point search walks sup-norm shells outward so the
first hit has minimal height.
"""

from dataclasses import dataclass
from functools import reduce
import math
import time

import numpy as np

from .errors import Budget, PreconditionError
from .expsums import BoxRegion, _pair_distribution
from .forms import CubicForm, split_components
from .kernels import box_values, zero_count_box


@dataclass(frozen=True)
class CountReport:
    """Exact zero count of a form over a box lattice."""

    P: int
    box: BoxRegion
    count: int
    method: str
    elapsed: float

    def to_json(self) -> dict:
        return {"P": self.P, "box": self.box.to_json(), "count": self.count,
                "method": self.method, "elapsed_s": self.elapsed}


def _integral_rescale(form: CubicForm) -> CubicForm:
    """Clear coefficient denominators; the integer zero set is unchanged."""
    denom = 1
    for c in form.coeffs.values():
        denom = denom * c.denominator // math.gcd(denom, c.denominator)
    if denom == 1:
        return form
    scaled = {key: c * denom for key, c in form.coeffs.items()}
    return CubicForm(form.n, scaled)


def _block_table(sub: CubicForm, lows, highs, budget: Budget, threads: int):
    size = 1
    for lo, hi in zip(lows, highs):
        size *= hi - lo + 1
    if not sub.coeffs:
        # variables missing from the form contribute the value 0 everywhere
        budget.table(1, "block value table")
        return np.array([0], dtype=np.int64), np.array([size], dtype=np.int64)
    vals = box_values(sub, np.asarray(lows, dtype=np.int64),
                      np.asarray(highs, dtype=np.int64),
                      budget=budget, threads=threads)
    uniq, cnts = np.unique(vals, return_counts=True)
    return uniq, cnts


def _merge_guard(cnts1, cnts2):
    if int(cnts1.max()) * int(cnts2.max()) >= 2 ** 62:
        raise PreconditionError(
            "merged multiplicities may overflow 64-bit counters")


def _join_count(vals1, cnts1, vals2, cnts2) -> int:
    """Sum of T1[v] * T2[-v] over matching values (tables sorted unique)."""
    idx = np.searchsorted(vals2, -vals1)
    idx_ok = idx < len(vals2)
    mask = np.zeros(len(vals1), dtype=bool)
    mask[idx_ok] = vals2[idx[idx_ok]] == -vals1[idx_ok]
    left = cnts1[mask].tolist()
    right = cnts2[idx[mask]].tolist()
    return sum(int(a) * int(b) for a, b in zip(left, right))


def count_zeros_box(form: CubicForm, box: BoxRegion, method: str = "auto",
                    budget: Budget | None = None,
                    threads: int = 1) -> CountReport:
    """Exact count of lattice zeros of the form inside the box.

    method "direct" enumerates the full lattice; "meet-in-middle" builds
    per-block value tables and joins them; "auto" picks meet-in-middle
    whenever the form splits into at least two blocks.
    """
    if method not in ("auto", "direct", "meet-in-middle"):
        raise PreconditionError(
            "method must be auto, direct, or meet-in-middle")
    if box.n != form.n:
        raise PreconditionError(
            f"box has {box.n} coordinates but the form has {form.n} variables")
    budget = budget or Budget()
    form = _integral_rescale(form)
    lows, highs = box.lattice_ranges()
    start = time.perf_counter()

    if any(hi < lo for lo, hi in zip(lows, highs)):
        picked = "direct" if method != "meet-in-middle" else "meet-in-middle"
        return CountReport(box.P, box, 0, picked,
                           time.perf_counter() - start)

    structure = split_components(form)
    if method == "auto":
        method = "meet-in-middle" if len(structure.blocks) >= 2 else "direct"

    if method == "direct":
        count = zero_count_box(form, np.asarray(lows, dtype=np.int64),
                               np.asarray(highs, dtype=np.int64),
                               budget=budget, threads=threads)
        return CountReport(box.P, box, int(count), "direct",
                           time.perf_counter() - start)

    tables = []
    for block, sub in zip(structure.blocks, structure.subforms):
        blows = [lows[i - 1] for i in block]
        bhighs = [highs[i - 1] for i in block]
        tables.append(_block_table(sub, blows, bhighs, budget, threads))
    # merge the two smallest tables first to keep the peak table size low
    while len(tables) > 2:
        tables.sort(key=lambda t: len(t[0]))
        (v1, c1), (v2, c2) = tables[0], tables[1]
        _merge_guard(c1, c2)
        tables = tables[2:]
        tables.append(_pair_distribution(v1, c1, v2, c2, budget))
    if len(tables) == 1:
        vals, cnts = tables[0]
        at_zero = np.flatnonzero(vals == 0)
        count = int(cnts[at_zero[0]]) if len(at_zero) else 0
    else:
        (v1, c1), (v2, c2) = tables
        _merge_guard(c1, c2)
        count = _join_count(v1, c1, v2, c2)
    return CountReport(box.P, box, count, "meet-in-middle",
                       time.perf_counter() - start)


def _sign_normalized(coords):
    for c in coords:
        if c > 0:
            return tuple(coords)
        if c < 0:
            return tuple(-c for c in coords)
    return tuple(coords)


def find_point(form: CubicForm, height_max: int,
               budget: Budget | None = None, threads: int = 1):
    """Smallest nontrivial primitive integer zero with sup norm <= height_max.

    Shells of increasing sup norm guarantee minimal height; within a shell
    the lexicographically first zero wins, reported with its leading nonzero
    coordinate made positive (cubic forms are odd, so -x is a zero iff x is).
    Returns None when no such zero exists up to height_max; a budget error
    means the search stopped early instead.
    """
    height_max = int(height_max)
    if height_max < 1:
        raise PreconditionError("height bound must be a positive integer")
    budget = budget or Budget()
    work = _integral_rescale(form)
    n = work.n
    for h in range(1, height_max + 1):
        side = 2 * h + 1
        lows = np.full(n, -h, dtype=np.int64)
        highs = np.full(n, h, dtype=np.int64)
        vals = box_values(work, lows, highs, budget=budget, threads=threads)
        zero_idx = np.flatnonzero(vals == 0)
        if not len(zero_idx):
            continue
        coords = np.stack(np.unravel_index(zero_idx, (side,) * n), axis=1)
        coords = coords.astype(np.int64) - h
        on_shell = np.max(np.abs(coords), axis=1) == h
        for row in coords[on_shell]:
            entries = [int(c) for c in row]
            if reduce(math.gcd, (abs(c) for c in entries)) != 1:
                continue
            point = _sign_normalized(entries)
            if form.evaluate(point) != 0:
                raise PreconditionError(
                    "zero candidate failed exact re-evaluation")
            return point
    return None
