"""Exact evaluators for the minor-arc exponent machinery."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cubearc.augmented import DELTA_CAP, AugmentedExponent, as_exponent
from cubearc.bounds import (check_conditions, holder_combine,
                            hua_factor_exponent, hua_moment_exponent,
                            lemma4_bound, lemma6_swap_error, lemma7_bound,
                            lemma7_terms, lemma8_params, remark14_bound,
                            remark14_terms, sstar_factor_exponent,
                            sstar_moment_exponent, wooley_factor_exponent,
                            wooley_moment_exponent)
from cubearc.errors import PreconditionError

F = Fraction


def exp(r, mD=0, md=0, me=0):
    return AugmentedExponent(F(r), F(mD), F(md), F(me))


class TestStageParams:

    def test_known_values(self):
        p = lemma8_params(8, F(7, 4), 8)
        assert (p.xi, p.rho2, p.pi2) == (F(11, 20), 0, F(5, 2))
        p = lemma8_params(9, 1, 8)
        assert (p.xi, p.rho2, p.pi2) == (F(25, 31), F(1, 5), F(11, 5))
        p = lemma8_params(9, F(539, 620), 8)
        assert (p.xi, p.pi2) == (F(1145, 1922), F(1867, 775))
        p = lemma8_params(8, F(3, 2), 8)
        assert (p.xi, p.rho2, p.pi2) == (0, 0, 3)

    def test_small_n_rejected(self):
        for n in (4, 5, 0, -3):
            with pytest.raises(PreconditionError):
                lemma8_params(n, 1, 8)
        lemma8_params(6, 1, 8)

    @given(n=st.integers(6, 60),
           t=st.fractions(min_value=-10, max_value=10, max_denominator=97),
           lam=st.fractions(min_value=-10, max_value=10, max_denominator=97))
    @settings(max_examples=1000, deadline=None)
    def test_defining_identities(self, n, t, lam):
        p = lemma8_params(n, t, lam)
        assert p.rho0 == F(2, n)
        assert p.rho2 == F(n - 8, n - 4)
        assert p.pi2 * (n - 4) == 8 * lam - 5 * n - 8 * t
        assert p.upsilon * (n - 1) == -6 * lam + 6 * t + 6 * n - 3
        assert p.rho1 * (n * n - 5 * n + 2) == n * (n - 5)
        assert p.xi * (p.rho1 - p.rho0) == p.pi0 - p.pi1

    def test_arc_constant(self):
        p = lemma8_params(9, 1, 8)
        gap = p.rho1 - p.rho0
        assert p.arc_constant == 1 / gap == F(171, 124)
        assert lemma8_params(8, F(7, 4), 8).arc_constant == F(52, 35)


class TestConditions:

    def test_case_values(self):
        p = lemma8_params(9, 1, 8)
        report = check_conditions(p, 2)
        values = {e.index: e.value for e in report.entries}
        assert values[1] == F(3, 8)
        assert p.upsilon == F(9, 8)
        assert values[5] == 1
        assert report.all_hold(part_ii=False)
        assert not report.all_hold(part_ii=True)
        assert [e.index for e in report.failing(part_ii=True)] == [7]

    def test_equality_boundary(self):
        p = lemma8_params(8, F(3, 2), 8)
        report = check_conditions(p, 2)
        seventh = report.entries[6]
        assert seventh.value == 0 and seventh.relation == ">=" and seventh.holds

    def test_strict_boundary_fails(self):
        report = check_conditions(lemma8_params(6, 0, 3), 2)
        third = report.entries[2]
        assert third.value == 0 and third.relation == ">" and not third.holds
        assert not report.all_hold()

    def test_verdicts_recomputable(self):
        report = check_conditions(lemma8_params(9, 1, 8), 2)
        for e in report.entries:
            assert e.holds == (e.value > 0 if e.relation == ">" else e.value >= 0)
        with pytest.raises(PreconditionError):
            check_conditions(lemma8_params(9, 1, 8), 0)


class TestArcFamilyBound:

    def test_case_128_closure(self):
        got = lemma7_bound(10, 1, F(21, 40), F(11, 20), 0, F(1, 2))
        assert got == exp(F(127, 16))
        assert got.is_little_o(8)

    def test_collapsed_family_large_nv(self):
        for n, v, t in ((16, 1, 0), (9, 2, F(1, 2)), (20, 4, 3)):
            got = lemma7_bound(n, v, t, 0, 0, 0)
            assert got == exp(F(n) + F(t) - F(3) / v)

    def test_first_branch_term_exact(self):
        A, B, C = F(1145, 1922), F(1, 5), F(458, 775)
        terms = lemma7_terms(9, 2, F(1, 2), A, B, C)
        expected = F(19, 2) - F(1867, 775) * F(13, 8) + A * F(9, 5)
        assert terms["always"] == exp(expected)
        assert terms["always"].is_little_o(8)

    @given(t=st.fractions(min_value=0, max_value=5, max_denominator=40),
           s=st.fractions(min_value=0, max_value=5, max_denominator=40),
           n=st.integers(1, 20), v=st.integers(1, 4))
    @settings(max_examples=200, deadline=None)
    def test_t_slope_is_one(self, t, s, n, v):
        A, B, C = F(1, 2), F(1, 5), F(1, 3)
        base = lemma7_bound(n, v, t, A, B, C)
        assert lemma7_bound(n, v, t + s, A, B, C) == base + as_exponent(s)

    def test_seam_takes_smaller_branch(self):
        # at nv = 8 and nv = 16 both adjacent second terms are computed
        terms8 = lemma7_terms(8, 1, 0, F(1, 2), 0, 1)
        assert set(terms8["seconds"]) == {"small", "middle"}
        terms16 = lemma7_terms(8, 2, 0, F(1, 2), 0, 1)
        assert set(terms16["seconds"]) == {"middle", "large"}
        for terms in (terms8, terms16):
            low = min(terms["seconds"].values())
            assert terms["second"] == low

    def test_seam_continuity(self):
        # walking v across each seam, the bound changes continuously
        for n, seam in ((8, 1), (4, 2), (8, 2), (4, 4)):
            samples = []
            for dv in (-F(1, 100), 0, F(1, 100)):
                samples.append(lemma7_bound(n, seam + dv, 1, F(1, 3), 0, F(1, 2)))
            mid = float(samples[1].r)
            assert abs(float(samples[0].r) - mid) < 0.1
            assert abs(float(samples[2].r) - mid) < 0.1

    def test_negative_family_rejected(self):
        with pytest.raises(PreconditionError):
            lemma7_bound(8, 1, 0, -1, 0, 0)
        with pytest.raises(PreconditionError):
            lemma7_bound(8, 0, 0, 0, 0, 0)


class TestSharpenedClosure:

    def test_case_119_closure(self):
        got = remark14_bound(9, 2, F(1, 2), F(1145, 1922), F(1, 5), F(458, 775))
        assert got == exp(8, mD=F(-1, 8))
        assert got.is_little_o(8)

    def test_collapsed_family(self):
        got = remark14_bound(9, 2, F(1, 2), 0, 0, 0)
        assert got == exp(8, mD=F(-1, 8))

    def test_large_n_point(self):
        got = remark14_bound(17, 1, 0, 0, 0, 0)
        assert got == exp(14, mD=F(-1, 8))
        terms = remark14_terms(17, 1, 0, 0, 0, 0)
        assert terms["always"] == exp(F(61, 8))
        assert terms["saving"] == as_exponent(14) - DELTA_CAP.scale(F(1, 8))

    def test_needs_large_nv(self):
        with pytest.raises(PreconditionError):
            remark14_bound(8, 2, 0, 0, 0, 0)
        remark14_bound(9, 2, 0, 0, 0, 0)


def lemma4_oracle(n, v, a, b, h):
    """Independent term-by-term transcription of the averaged-count bound."""
    n, v, a, b, h = map(F, (n, v, a, b, h))
    psi = max(-b, -2 - h)
    count_terms = (F(0),
                   n / 2 * (a + 3 * h + psi),
                   n * h - n / 2 * a - (n - 2) - (n - 2) / 2 * psi)
    second = (2 * a - b * (1 - v / 2)
              + v / 2 * (psi + 2 * n - 1 - (n - 1) * h + max(count_terms)))
    return max(F(3), second)


class TestAveragedCount:

    def test_matches_term_oracle_on_grid(self):
        for n in (8, 9):
            for v in (1, 2):
                for a in (0, F(1, 2), F(25, 31)):
                    for b in (2 * a, 3, F(366, 155), 6):
                        if b < 2 * a:
                            continue
                        for h in (0, F(1, 4), F(9, 31), 1):
                            got = lemma4_bound(n, v, a, b, h)
                            assert got == exp(lemma4_oracle(n, v, a, b, h))

    def test_cube_count_dominates_when_v_below_two(self):
        # the b-term suppresses the second branch only for v < 2
        assert lemma4_bound(8, 1, 0, 100, 0) == exp(3)
        assert lemma4_bound(9, F(3, 2), 0, 200, 0) == exp(3)
        assert lemma4_bound(8, 2, 0, 100, 0).r > 3

    def test_example_value(self):
        got = lemma4_bound(8, 2, 0, 3, 0)
        assert got == exp(13) == exp(lemma4_oracle(8, 2, 0, 3, 0))

    def test_h_profile_minimum(self):
        # decreasing until the third counting term activates at h = 9/31,
        # increasing beyond; the minimum sits at that activation point
        n, v, a, b = 9, 2, F(25, 31), F(366, 155)
        grid = [F(i, 31) for i in range(32)]
        vals = [lemma4_bound(n, v, a, b, h) for h in grid]
        for i in range(9):
            assert vals[i + 1] < vals[i]
        for i in range(9, 31):
            assert vals[i + 1] > vals[i]
        assert min(vals) == vals[9]

    def test_preconditions(self):
        with pytest.raises(PreconditionError):
            lemma4_bound(8, 2, 0, 3, 2)
        with pytest.raises(PreconditionError):
            lemma4_bound(8, 2, 1, 1, 0)
        with pytest.raises(PreconditionError):
            lemma4_bound(8, 2, -1, 3, 0)


class TestSwapError:

    def test_case_128_value(self):
        assert lemma6_swap_error(F(11, 20), 0, F(1, 2)) == exp(F(21, 40))

    def test_max_of_two_terms(self):
        assert lemma6_swap_error(1, 1, 0) == exp(F(1, 2))
        assert lemma6_swap_error(F(1, 2), 1, 2) == exp(1)
        assert lemma6_swap_error(F(1, 2), 0, 2) == exp(F(5, 4))

    def test_domain(self):
        with pytest.raises(PreconditionError):
            lemma6_swap_error(F(3, 2), 0, 0)
        with pytest.raises(PreconditionError):
            lemma6_swap_error(F(1, 2), 2, 0)


class TestMomentExponents:

    def test_full_interval_ladder(self):
        assert [hua_moment_exponent(j) for j in (1, 2, 3)] == [1, 2, 5]
        assert hua_factor_exponent() == F(1, 2)
        assert [wooley_moment_exponent(j) for j in (1, 2, 3)] == [1, 2, 5]
        assert wooley_factor_exponent() == F(5, 4)

    def test_model_moment(self):
        assert sstar_moment_exponent(4) == 1
        assert sstar_factor_exponent() == F(1, 4)
        assert sstar_moment_exponent(6) == 3
        with pytest.raises(PreconditionError):
            sstar_moment_exponent(F(7, 2))

    def test_level_domain(self):
        for bad in (0, 4):
            with pytest.raises(PreconditionError):
                hua_moment_exponent(bad)
            with pytest.raises(PreconditionError):
                wooley_moment_exponent(bad)


class TestHolderCombine:

    def test_case_128_t(self):
        t = holder_combine(0, [(F(1, 2), 4), (F(5, 4), 2), (None, 4)])
        assert t == exp(F(7, 4))

    def test_weights_must_resolve(self):
        with pytest.raises(PreconditionError):
            holder_combine(0, [(F(1, 2), 4), (None, 2)])
        with pytest.raises(PreconditionError):
            holder_combine(0, [(F(1, 2), -4), (None, F(4, 5))])
