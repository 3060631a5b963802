"""Exact exponent arithmetic with formal infinitesimal bookkeeping.

Growth exponents in the estimate chain are not plain rationals: bounds carry
three formal symbols D > d > e, each positive and infinitesimal relative to
every positive rational, and each infinitesimal relative to the previous one
(0 < e << d << D << any rational).  D tracks the arc-dissection width
parameter, d tracks family-inclusion widening, e tracks the epsilon of
divisor-bound losses.  An AugmentedExponent is

    r + mD*D + md*d + me*e

with r, mD, md, me exact rationals, ordered lexicographically on
(r, mD, md, me).  That order is total and translation-invariant, and it
decides domination questions exactly: a quantity of size P^x is o(P^L) iff
x < L in this order.

>>> x = AugmentedExponent.of(8) - DELTA_CAP.scale(Fraction(1, 8))
>>> x.is_little_o(8)
True
>>> str(x)
'8 - 1/8*D'
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

RationalLike = Union[int, str, Fraction]


def parse_rational(value: RationalLike) -> Fraction:
    """Parse an exact rational from int, Fraction, "p/q", or a decimal string.

    Binary floats are refused: they silently misrepresent values like 1/5,
    and every consumer of this function feeds exact certificate arithmetic.
    """
    if isinstance(value, bool):
        raise TypeError("bool is not a rational parameter")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        raise TypeError(
            "refusing float %r: pass an exact rational string like '11/20'" % value
        )
    if isinstance(value, str):
        text = value.strip()
        if not text:
            raise ValueError("empty rational")
        if "e" in text.lower():
            raise ValueError(f"refusing exponent notation in rational: {text!r}")
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a rational: {text!r}") from exc
    raise TypeError(f"cannot interpret {type(value).__name__} as a rational")


def encode_rational(x: Fraction):
    """Ints stay ints on the wire; everything else is a "p/q" string."""
    if x.denominator == 1:
        return int(x)
    return f"{x.numerator}/{x.denominator}"


_encode_rational = encode_rational


@dataclass(frozen=True, order=False)
class AugmentedExponent:
    """Exact exponent r + mD*D + md*d + me*e with lexicographic order."""

    r: Fraction
    mD: Fraction = Fraction(0)
    md: Fraction = Fraction(0)
    me: Fraction = Fraction(0)

    def __post_init__(self):
        for name in ("r", "mD", "md", "me"):
            object.__setattr__(self, name, parse_rational(getattr(self, name)))

    @classmethod
    def of(cls, r: RationalLike, mD: RationalLike = 0, md: RationalLike = 0,
           me: RationalLike = 0) -> "AugmentedExponent":
        return cls(parse_rational(r), parse_rational(mD),
                   parse_rational(md), parse_rational(me))

    def _key(self):
        return (self.r, self.mD, self.md, self.me)

    def __lt__(self, other):
        return self._key() < as_exponent(other)._key()

    def __le__(self, other):
        return self._key() <= as_exponent(other)._key()

    def __gt__(self, other):
        return self._key() > as_exponent(other)._key()

    def __ge__(self, other):
        return self._key() >= as_exponent(other)._key()

    def __eq__(self, other):
        try:
            return self._key() == as_exponent(other)._key()
        except (TypeError, ValueError):
            return NotImplemented

    def __hash__(self):
        return hash(self._key())

    def __add__(self, other) -> "AugmentedExponent":
        o = as_exponent(other)
        return AugmentedExponent(self.r + o.r, self.mD + o.mD,
                                 self.md + o.md, self.me + o.me)

    __radd__ = __add__

    def __sub__(self, other) -> "AugmentedExponent":
        o = as_exponent(other)
        return AugmentedExponent(self.r - o.r, self.mD - o.mD,
                                 self.md - o.md, self.me - o.me)

    def __rsub__(self, other) -> "AugmentedExponent":
        return as_exponent(other) - self

    def __neg__(self) -> "AugmentedExponent":
        return AugmentedExponent(-self.r, -self.mD, -self.md, -self.me)

    def scale(self, factor: RationalLike) -> "AugmentedExponent":
        """Multiply by an exact rational scalar (exponents add under powers)."""
        c = parse_rational(factor)
        return AugmentedExponent(c * self.r, c * self.mD, c * self.md, c * self.me)

    def is_little_o(self, threshold) -> bool:
        """True iff a quantity of size P^self is o(P^threshold) as P -> inf."""
        return self < as_exponent(threshold)

    def is_rational(self) -> bool:
        return self.mD == 0 and self.md == 0 and self.me == 0

    def to_json(self) -> dict:
        return {
            "r": _encode_rational(self.r),
            "mD": _encode_rational(self.mD),
            "md": _encode_rational(self.md),
            "me": _encode_rational(self.me),
        }

    @classmethod
    def from_json(cls, obj) -> "AugmentedExponent":
        if isinstance(obj, dict):
            extra = set(obj) - {"r", "mD", "md", "me"}
            if extra:
                raise ValueError(f"unknown exponent fields: {sorted(extra)}")
            return cls.of(obj.get("r", 0), obj.get("mD", 0),
                          obj.get("md", 0), obj.get("me", 0))
        return cls.of(obj)

    def __str__(self):
        parts = [str(self.r)]
        for coeff, symbol in ((self.mD, "D"), (self.md, "d"), (self.me, "e")):
            if coeff == 0:
                continue
            sign = "+" if coeff > 0 else "-"
            mag = abs(coeff)
            term = symbol if mag == 1 else f"{mag}*{symbol}"
            parts.append(f"{sign} {term}")
        return " ".join(parts)

    def __repr__(self):
        return f"AugmentedExponent({self})"


def as_exponent(value) -> AugmentedExponent:
    """Coerce rationals and rational strings into exponents; pass through."""
    if isinstance(value, AugmentedExponent):
        return value
    return AugmentedExponent(parse_rational(value))


def max_exponent(first, *rest) -> AugmentedExponent:
    """Maximum in the lexicographic order, coercing plain rationals."""
    best = as_exponent(first)
    for item in rest:
        cand = as_exponent(item)
        if cand > best:
            best = cand
    return best


def min_exponent(first, *rest) -> AugmentedExponent:
    best = as_exponent(first)
    for item in rest:
        cand = as_exponent(item)
        if cand < best:
            best = cand
    return best


ZERO = AugmentedExponent(Fraction(0))
DELTA_CAP = AugmentedExponent(Fraction(0), Fraction(1), Fraction(0), Fraction(0))
DELTA_LOW = AugmentedExponent(Fraction(0), Fraction(0), Fraction(1), Fraction(0))
EPS = AugmentedExponent(Fraction(0), Fraction(0), Fraction(0), Fraction(1))
