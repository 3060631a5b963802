"""Compiled and pure-Python kernels must agree on every operation."""

import numpy as np
import pytest

from cubearc import kernels
from cubearc.errors import Budget, BudgetExceededError, PreconditionError
from cubearc.forms import CubicForm, make_mordell_form

FORMS = [
    CubicForm(1, {(1, 1, 1): 1}),
    CubicForm.diagonal([1, 1]),
    CubicForm.diagonal([1, -2, 3]),
    CubicForm.from_monomials(3, [(1, 1, 1, 1), (2, 2, 2, 2), (3, 3, 3, 4),
                                 (1, 2, 3, 1)]),
    make_mordell_form(),
]

BOXES = {1: (-6, 6), 2: (-5, 5), 3: (-4, 4), 9: (-1, 1)}


def both_backends(fn, monkeypatch):
    if not kernels.HAVE_CORE:
        pytest.skip("compiled core unavailable; nothing to compare")
    compiled = fn()
    monkeypatch.setattr(kernels, "HAVE_CORE", False)
    fallback = fn()
    monkeypatch.undo()
    return compiled, fallback


@pytest.mark.parametrize("form", FORMS)
def test_box_values_backend_agreement(form, monkeypatch):
    lo, hi = BOXES[form.n]
    lows = np.full(form.n, lo, dtype=np.int64)
    highs = np.full(form.n, hi, dtype=np.int64)
    a, b = both_backends(lambda: kernels.box_values(form, lows, highs),
                         monkeypatch)
    assert np.array_equal(a, b)


@pytest.mark.parametrize("form", FORMS)
def test_zero_count_backend_agreement(form, monkeypatch):
    lo, hi = BOXES[form.n]
    lows = np.full(form.n, lo, dtype=np.int64)
    highs = np.full(form.n, hi, dtype=np.int64)
    a, b = both_backends(
        lambda: kernels.zero_count_box(form, lows, highs), monkeypatch)
    assert a == b
    vals = kernels.box_values(form, lows, highs)
    assert a == int((vals == 0).sum())


@pytest.mark.parametrize("q", [2, 3, 7, 12])
def test_residue_histogram_backend_agreement(q, monkeypatch):
    form = FORMS[3]
    a, b = both_backends(lambda: kernels.residue_histogram(form, q),
                         monkeypatch)
    assert np.array_equal(a, b)
    assert int(a.sum()) == q ** form.n


@pytest.mark.parametrize("alpha", [0.0, 0.37, 1.0 / 3.0, 0.9999])
def test_phase_sum_backend_agreement(alpha, monkeypatch):
    form = FORMS[2]
    lows = np.full(3, -4, dtype=np.int64)
    highs = np.full(3, 4, dtype=np.int64)
    a, b = both_backends(
        lambda: kernels.phase_sum_box(form, lows, highs, alpha), monkeypatch)
    assert abs(a - b) < 1e-9
    size = 9 ** 3
    assert abs(a) <= size + 1e-9


def test_phase_sum_alpha_zero_counts_points():
    form = FORMS[1]
    lows = np.full(2, -5, dtype=np.int64)
    highs = np.full(2, 5, dtype=np.int64)
    val = kernels.phase_sum_box(form, lows, highs, 0.0)
    assert abs(val - 121) < 1e-9


def brute_square_sum(vals1, cnts1, vals2, cnts2):
    dense = {}
    for v, c in zip(vals1, cnts1):
        for w, d in zip(vals2, cnts2):
            dense[v + w] = dense.get(v + w, 0) + c * d
    return sum(x * x for x in dense.values())


def test_convolution_backend_agreement(monkeypatch):
    rng = np.random.default_rng(7)
    for trial in range(10):
        m1 = int(rng.integers(1, 30))
        m2 = int(rng.integers(1, 30))
        v1 = np.unique(rng.integers(-50, 50, size=m1).astype(np.int64))
        v2 = np.unique(rng.integers(-50, 50, size=m2).astype(np.int64))
        c1 = rng.integers(1, 9, size=len(v1)).astype(np.int64)
        c2 = rng.integers(1, 9, size=len(v2)).astype(np.int64)
        a, b = both_backends(
            lambda: kernels.convolve_square_sum(v1, c1, v2, c2), monkeypatch)
        assert a == b == brute_square_sum(v1.tolist(), c1.tolist(),
                                          v2.tolist(), c2.tolist())


def test_symmetric_convolution_agreement(monkeypatch):
    rng = np.random.default_rng(3)
    v = np.unique(rng.integers(-40, 40, size=25).astype(np.int64))
    c = rng.integers(1, 9, size=len(v)).astype(np.int64)
    a, b = both_backends(
        lambda: kernels.convolve_square_sum(v, c, v, c), monkeypatch)
    assert a == b == brute_square_sum(v.tolist(), c.tolist(),
                                      v.tolist(), c.tolist())


def test_symmetric_convolution_charges_half_budget():
    v = np.arange(100, dtype=np.int64)
    c = np.ones(100, dtype=np.int64)
    budget = Budget(eval_limit=100 * 101 // 2)
    kernels.convolve_square_sum(v, c, v, c, budget=budget)
    budget = Budget(eval_limit=100 * 101 // 2 - 1)
    with pytest.raises(BudgetExceededError):
        kernels.convolve_square_sum(v, c, v, c, budget=budget)


def test_convolution_overflow_guard():
    v = np.array([0, 1], dtype=np.int64)
    c = np.array([2 ** 31, 2 ** 31], dtype=np.int64)
    with pytest.raises(PreconditionError):
        kernels.convolve_square_sum(v, c, v, c)


@pytest.mark.parametrize("threads", [1, 2, 4])
def test_thread_count_does_not_change_results(threads):
    form = FORMS[3]
    lows = np.full(3, -4, dtype=np.int64)
    highs = np.full(3, 4, dtype=np.int64)
    base_vals = kernels.box_values(form, lows, highs, threads=1)
    assert np.array_equal(
        base_vals, kernels.box_values(form, lows, highs, threads=threads))
    assert kernels.zero_count_box(form, lows, highs, threads=threads) \
        == kernels.zero_count_box(form, lows, highs, threads=1)
    hist1 = kernels.residue_histogram(form, 9, threads=1)
    histn = kernels.residue_histogram(form, 9, threads=threads)
    assert np.array_equal(hist1, histn)
    p1 = kernels.phase_sum_box(form, lows, highs, 0.123, threads=1)
    pn = kernels.phase_sum_box(form, lows, highs, 0.123, threads=threads)
    assert p1 == pn


def test_box_budget_enforced():
    form = FORMS[1]
    lows = np.full(2, -50, dtype=np.int64)
    highs = np.full(2, 50, dtype=np.int64)
    with pytest.raises(BudgetExceededError):
        kernels.box_values(form, lows, highs, budget=Budget(eval_limit=100))


def test_backend_name_matches_flag():
    name = kernels.backend_name()
    assert name == ("compiled" if kernels.HAVE_CORE else "fallback")
