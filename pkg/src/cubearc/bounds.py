"""Exact evaluators for the minor-arc exponent machinery.

Everything here is pure rational arithmetic over augmented exponents.  The
evaluators return the exact exponent of the dominating term of the bound they
implement, with no epsilon padding: dyadic-summation losses and arc-widening
losses are infinitesimal bookkeeping that certificate steps carry in a
separate slack field (see certify).  Inputs t, A, C may themselves be
augmented exponents (carrying delta-widening from earlier steps); every
formula is linear in them, so exactness is preserved.

Naming follows the external contract: the stage-parameter calculator is
`lemma8_params`, the arc-family integral bounds are `lemma7_bound` and
`remark14_bound`, the average-count bound is `lemma4_bound`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .augmented import (AugmentedExponent, DELTA_CAP, as_exponent,
                        max_exponent, min_exponent, parse_rational)
from .errors import PreconditionError


@dataclass(frozen=True)
class StageParams:
    """The eight derived stage constants for one (n, t, Lambda) choice."""

    n: Fraction
    t: Fraction
    lam: Fraction
    rho0: Fraction
    pi0: Fraction
    rho1: Fraction
    pi1: Fraction
    rho2: Fraction
    pi2: Fraction
    upsilon: Fraction
    xi: Fraction

    @property
    def arc_constant(self) -> Fraction:
        """The q-exponent widening constant: max(1/(rho1-rho0), 1)."""
        gap = self.rho1 - self.rho0
        return max(1 / gap, Fraction(1))

    def to_json(self) -> dict:
        from .augmented import encode_rational as enc
        return {name: enc(getattr(self, name))
                for name in ("n", "t", "lam", "rho0", "pi0", "rho1", "pi1",
                             "rho2", "pi2", "upsilon", "xi")}


def lemma8_params(n, t, lam) -> StageParams:
    """Exact stage constants from the (n, t, Lambda) triple.

    Requires n >= 6 so the denominators n^2-5n+2, n-4, n-1 are all nonzero
    and the dyadic machinery applies.
    """
    n = parse_rational(n)
    t = parse_rational(t)
    lam = parse_rational(lam)
    if n < 6:
        raise PreconditionError("stage parameters need n >= 6")
    d1 = n * n - 5 * n + 2
    if d1 == 0 or n == 4:
        raise PreconditionError("degenerate denominator in stage parameters")

    rho0 = 2 / n
    pi0 = (-2 * lam + 2 * t + 4 * n - 3) / n
    rho1 = n * (n - 5) / d1
    pi1 = -2 * (n * n - 2 * n * (lam - t - 1) - 2) / d1
    rho2 = (n - 8) / (n - 4)
    pi2 = (8 * lam - 5 * n - 8 * t) / (n - 4)
    upsilon = (-6 * lam + 6 * t + 6 * n - 3) / (n - 1)
    xi = (pi0 - pi1) / (rho1 - rho0)
    # Closed form of the same quotient; both must agree exactly.
    assert xi == (3 * n - 2) * (-2 * lam + 2 * t + 2 * n - 3) / (n * n - 6 * n + 4)
    return StageParams(n=n, t=t, lam=lam, rho0=rho0, pi0=pi0, rho1=rho1,
                       pi1=pi1, rho2=rho2, pi2=pi2, upsilon=upsilon, xi=xi)


@dataclass(frozen=True)
class ConditionEntry:
    index: int
    formula: str
    value: Fraction
    relation: str            # ">" or ">="
    scope: str               # "both" or "part-ii"

    @property
    def holds(self) -> bool:
        return self.value > 0 if self.relation == ">" else self.value >= 0

    def to_json(self) -> dict:
        from .augmented import encode_rational as enc
        return {"index": self.index, "formula": self.formula,
                "value": enc(self.value), "relation": self.relation,
                "scope": self.scope, "holds": self.holds}


@dataclass(frozen=True)
class ConditionReport:
    entries: tuple

    def all_hold(self, part_ii: bool = False) -> bool:
        return all(e.holds for e in self.entries
                   if e.scope == "both" or part_ii)

    def failing(self, part_ii: bool = False):
        return [e for e in self.entries
                if (e.scope == "both" or part_ii) and not e.holds]

    def to_json(self) -> list:
        return [e.to_json() for e in self.entries]


def check_conditions(params: StageParams, v) -> ConditionReport:
    """Evaluate the seven admissibility conditions exactly.

    The first six gate every application; the seventh (pi2 - 3 >= 0) is
    required only by the full-minor-arc variant, which additionally needs
    Xi <= 0.
    """
    v = parse_rational(v)
    if v <= 0:
        raise PreconditionError("moment power v must be positive")
    n, t, lam = params.n, params.t, params.lam
    s_plus = 1 / v + n / 8
    entries = (
        ConditionEntry(1, "3/2 - upsilon",
                       Fraction(3, 2) - params.upsilon, ">", "both"),
        ConditionEntry(2, "lam - t - 3/2",
                       lam - t - Fraction(3, 2), ">", "both"),
        ConditionEntry(3, "lam - t - n/2", lam - t - n / 2, ">", "both"),
        ConditionEntry(4, "2 lam - 2t - n - 2 upsilon + 3",
                       2 * lam - 2 * t - n - 2 * params.upsilon + 3, ">", "both"),
        ConditionEntry(5, "10 lam - 10t - 8n + 3",
                       10 * lam - 10 * t - 8 * n + 3, ">=", "both"),
        ConditionEntry(6, "lam - (2/v + n/8 - rho1 (1/v + n/8)) xi - n - t "
                          "+ pi1 (1/v + n/8)",
                       lam - (2 / v + n / 8 - params.rho1 * s_plus) * params.xi
                       - n - t + params.pi1 * s_plus, ">", "both"),
        ConditionEntry(7, "pi2 - 3", params.pi2 - 3, ">=", "part-ii"),
    )
    return ConditionReport(entries=entries)


def _arc_preconditions(A, B, C, v, n):
    A = as_exponent(A)
    C = as_exponent(C)
    B = parse_rational(B)
    v = parse_rational(v)
    n = parse_rational(n)
    if A < 0 or B < 0 or C < 0:
        raise PreconditionError("arc-family parameters A, B, C must be >= 0")
    if v <= 0:
        raise PreconditionError("moment power v must be positive")
    if n < 1:
        raise PreconditionError("variable count must be >= 1")
    return A, B, C, v, n


def lemma7_terms(n, v, t, A, B, C) -> dict:
    """All branch terms of the arc-family integral bound, exactly.

    The bound is the max of a term valid everywhere and a second term
    depending on the size of n*v; at the seam values n*v in {8, 16} both
    adjacent second terms are valid so the smaller is used.
    """
    A, B, C, v, n = _arc_preconditions(A, B, C, v, n)
    t = as_exponent(t)
    s_plus = 1 / v + n / 8          # exponent pairing R^2 phi with the peak bound
    s_minus = 1 / v - n / 8
    three_minus_c = 3 - C

    always = (as_exponent(n) + t - three_minus_c.scale(s_plus)
              + A.scale(2 / v + n / 8) - A.scale(B * s_plus))
    seconds = {}
    nv = n * v
    if nv <= 8:
        low = min_exponent(
            A.scale(n / 8),
            -three_minus_c.scale(s_minus) + A.scale(2 / v - n / 8 - B * s_minus))
        seconds["small"] = as_exponent(5 * n / 8) + t + low
    if 8 <= nv <= 16:
        seconds["middle"] = as_exponent(n) + t - as_exponent(3 / v) + A.scale(2 / v - n / 8)
    if nv >= 16:
        seconds["large"] = as_exponent(n) + t - as_exponent(3 / v)
    second = min_exponent(*seconds.values())
    value = max_exponent(always, second)
    return {"always": always, "seconds": seconds, "second": second,
            "value": value}


def lemma7_bound(n, v, t, A, B, C) -> AugmentedExponent:
    """Exact exponent of the arc-family L^v closure bound."""
    return lemma7_terms(n, v, t, A, B, C)["value"]


def remark14_terms(n, v, t, A, B, C) -> dict:
    """Sharpened closure for n*v > 16 using the dissection-width saving.

    On the minor arcs, q <= P^D and |alpha - a/q| <= P^(-3+D) cannot both
    hold, which converts the flat second term into an explicit saving of
    D*(n/8 - 2/v).
    """
    A, B, C, v, n = _arc_preconditions(A, B, C, v, n)
    t = as_exponent(t)
    if n * v <= 16:
        raise PreconditionError("the sharpened closure needs n*v > 16")
    s_plus = 1 / v + n / 8
    three_minus_c = 3 - C
    always = (as_exponent(n) + t - three_minus_c.scale(s_plus)
              + A.scale(2 / v + n / 8) - A.scale(B * s_plus))
    saving = as_exponent(n) + t - as_exponent(3 / v) - DELTA_CAP.scale(n / 8 - 2 / v)
    value = max_exponent(always, saving)
    return {"always": always, "saving": saving, "value": value}


def remark14_bound(n, v, t, A, B, C) -> AugmentedExponent:
    return remark14_terms(n, v, t, A, B, C)["value"]


def lemma4_bound(n, v, a, b, h) -> AugmentedExponent:
    """Exponent of the averaged-count bound P^3 + R^2 phi^(1-v/2) (...)^(v/2).

    Inputs live on the exponent scale: a = log_P R, b = -log_P phi,
    h = log_P H with H in [1, P], so 0 <= h <= 1 and b >= 2a.  psi is the
    exponent of phi + 1/(P^2 H); F collects the three competing terms of the
    counting function.  Callers stay in the a <= 3/2 regime the bound was
    stated for.
    """
    n = parse_rational(n)
    v = parse_rational(v)
    a = parse_rational(a)
    b = parse_rational(b)
    h = parse_rational(h)
    if not 0 <= h <= 1:
        raise PreconditionError("h must lie in [0, 1]")
    if a < 0:
        raise PreconditionError("a must be >= 0 (R >= 1)")
    if b < 2 * a:
        raise PreconditionError("b must be >= 2a (phi <= R^-2)")
    if v <= 0 or n < 1:
        raise PreconditionError("need v > 0 and n >= 1")

    psi = max(-b, -2 - h)
    f = max(Fraction(0),
            (n / 2) * (a + 3 * h + psi),
            n * h - (n / 2) * a - (n - 2) - ((n - 2) / 2) * psi)
    second = 2 * a - b * (1 - v / 2) + (v / 2) * (psi + 2 * n - 1 - (n - 1) * h + f)
    return max_exponent(Fraction(3), second)


def lemma6_swap_error(A, B, C) -> AugmentedExponent:
    """Exponent of the one-variable sum vs. its rational-point model.

    On the arc family (A, B, C) with A, B <= 1 the difference is
    O(P^(A/2) + P^((A+C-AB)/2)); returns the exact max of the two exponents.
    """
    A = as_exponent(A)
    C = as_exponent(C)
    B = parse_rational(B)
    if A < 0 or B < 0 or C < 0:
        raise PreconditionError("arc-family parameters must be >= 0")
    if A > 1 or B > 1:
        raise PreconditionError("the swap bound needs A <= 1 and B <= 1")
    first = A.scale(Fraction(1, 2))
    second = (A + C - A.scale(B)).scale(Fraction(1, 2))
    return max_exponent(first, second)


def hua_moment_exponent(j: int) -> Fraction:
    """Full-interval moment for 1-variable cubic sums: E[|S|^(2^j)] << P^(2^j - j)."""
    if not 1 <= j <= 3:
        raise PreconditionError("moment level j must be in {1, 2, 3}")
    return Fraction(2 ** j - j)

def hua_factor_exponent(j: int = 2) -> Fraction:
    """Exponent of (integral |S|^(2^j))^(1/2^j); j=2 gives the 4th-moment 1/2."""
    return hua_moment_exponent(j) / 2 ** j


def wooley_moment_exponent(j: int) -> Fraction:
    """Nondegenerate binary forms: E[|S|^(2^(j-1))] << P^(2^j - j)."""
    if not 1 <= j <= 3:
        raise PreconditionError("moment level j must be in {1, 2, 3}")
    return Fraction(2 ** j - j)

def wooley_factor_exponent(j: int = 3) -> Fraction:
    """Exponent of (integral |S|^(2^(j-1)))^(1/2^(j-1)); j=3 gives 5/4."""
    return wooley_moment_exponent(j) / 2 ** (j - 1)


def sstar_moment_exponent(k) -> Fraction:
    """Arc-family moment of the rational-point model: << P^(k-3) for k >= 4."""
    k = parse_rational(k)
    if k < 4:
        raise PreconditionError("model moment bound needs k >= 4")
    return k - 3

def sstar_factor_exponent(k=4) -> Fraction:
    k = parse_rational(k)
    return sstar_moment_exponent(k) / k


def holder_combine(base_t, factors) -> AugmentedExponent:
    """Combine per-factor moment exponents into the next t parameter.

    `factors` is a sequence of (factor_exponent, weight) pairs for the
    factors being peeled off, plus implicitly the surviving factor whose
    weight completes sum(1/u) = 1; pass the surviving weight as a bare
    (None, weight) pair.  The reciprocal weights must sum to exactly 1.
    """
    total = Fraction(0)
    t = as_exponent(base_t)
    for exponent, weight in factors:
        weight = parse_rational(weight)
        if weight <= 0:
            raise PreconditionError("weights must be positive")
        total += 1 / weight
        if exponent is not None:
            t = t + as_exponent(exponent)
    if total != 1:
        raise PreconditionError(
            f"reciprocal weights must sum to 1 exactly, got {total}")
    return t
