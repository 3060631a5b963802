"""Exact optimization of piecewise-linear exponent bounds over 2-d regions.

Regions live in the (a, b) plane (a = log_P q, b = -log_P phi) and are given
by linear inequalities with rational coefficients on a, b and augmented
exponent right-hand sides (the infinitesimal widenings ride along linearly).
Optimization is exact: enumerate candidate vertices from pairwise boundary
intersections, keep the feasible ones, and prove boundedness of each linear
objective over the recession cone by a Farkas certificate (the objective
gradient must be a nonnegative combination of at most two constraint
normals).  No floating point anywhere.

The quartic-moment bound optimizer `lemma9_exponent` maximizes the two
branch objective families split at b = 3, over the closures of the branch
regions (both branches agree at the interface).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .augmented import (AugmentedExponent, as_exponent, encode_rational,
                        max_exponent, parse_rational)
from .errors import (InfeasibleRegionError, PreconditionError,
                     UnboundedObjectiveError)


@dataclass(frozen=True)
class LinearInequality:
    """ca*a + cb*b <= bound, with rational coefficients and augmented bound."""

    ca: Fraction
    cb: Fraction
    bound: AugmentedExponent

    def __post_init__(self):
        object.__setattr__(self, "ca", parse_rational(self.ca))
        object.__setattr__(self, "cb", parse_rational(self.cb))
        object.__setattr__(self, "bound", as_exponent(self.bound))
        if self.ca == 0 and self.cb == 0:
            raise PreconditionError("inequality must involve a or b")

    def satisfied(self, a: AugmentedExponent, b: AugmentedExponent) -> bool:
        return a.scale(self.ca) + b.scale(self.cb) <= self.bound

    def to_json(self) -> dict:
        return {"ca": encode_rational(self.ca), "cb": encode_rational(self.cb),
                "bound": self.bound.to_json()}

    @classmethod
    def from_json(cls, obj) -> "LinearInequality":
        return cls(parse_rational(obj["ca"]), parse_rational(obj["cb"]),
                   AugmentedExponent.from_json(obj["bound"]))


@dataclass(frozen=True)
class ExponentPolytope:
    """Conjunction of LinearInequality constraints, with a name tag."""

    inequalities: tuple
    name: str = ""

    def with_extra(self, *extra, name: str | None = None) -> "ExponentPolytope":
        return ExponentPolytope(self.inequalities + tuple(extra),
                                name if name is not None else self.name)

    def contains(self, a, b) -> bool:
        a, b = as_exponent(a), as_exponent(b)
        return all(ineq.satisfied(a, b) for ineq in self.inequalities)

    def to_json(self) -> dict:
        return {"name": self.name,
                "inequalities": [iq.to_json() for iq in self.inequalities]}

    @classmethod
    def from_json(cls, obj) -> "ExponentPolytope":
        return cls(tuple(LinearInequality.from_json(r)
                         for r in obj["inequalities"]),
                   obj.get("name", ""))


def arc_region(A, B, C, name: str = "") -> ExponentPolytope:
    """Region {a <= A, b >= B*a + (3 - C)} for the arc family (A, B, C)."""
    B = parse_rational(B)
    lower = as_exponent(3) - as_exponent(C)
    return ExponentPolytope((
        LinearInequality(Fraction(1), Fraction(0), as_exponent(A)),
        LinearInequality(B, Fraction(-1), -lower),
    ), name=name)


def _vertices(inequalities):
    """Feasible pairwise boundary intersections, exact."""
    out = []
    m = len(inequalities)
    for i in range(m):
        for j in range(i + 1, m):
            p, q = inequalities[i], inequalities[j]
            det = p.ca * q.cb - q.ca * p.cb
            if det == 0:
                continue
            a = (p.bound.scale(q.cb) - q.bound.scale(p.cb)).scale(1 / det)
            b = (q.bound.scale(p.ca) - p.bound.scale(q.ca)).scale(1 / det)
            if all(iq.satisfied(a, b) for iq in inequalities):
                out.append((a, b))
    return out


def _in_cone(g, normals) -> bool:
    """Farkas test: is g a nonnegative combination of the normals?

    In the plane this reduces to single rays and pairs.  g in cone(N) is
    exactly boundedness of the objective with gradient g over the recession
    cone {d : n.d <= 0 for all n in N}.
    """
    ga, gb = g
    if ga == 0 and gb == 0:
        return True
    for na, nb in normals:
        # g = lam * n with lam >= 0
        det = ga * nb - gb * na
        if det == 0 and (ga * na + gb * nb) > 0:
            return True
    m = len(normals)
    for i in range(m):
        for j in range(i + 1, m):
            na, nb = normals[i]
            ma, mb = normals[j]
            det = na * mb - ma * nb
            if det == 0:
                continue
            lam = (ga * mb - gb * ma) / det
            mu = (na * gb - nb * ga) / det
            if lam >= 0 and mu >= 0:
                return True
    return False


@dataclass(frozen=True)
class LinearObjective:
    """ga*a + gb*b + const, maximized over a region."""

    ga: Fraction
    gb: Fraction
    const: Fraction
    label: str

    def value(self, a: AugmentedExponent, b: AugmentedExponent) -> AugmentedExponent:
        return a.scale(self.ga) + b.scale(self.gb) + as_exponent(self.const)


# Exponents of the three quartic-moment bound terms on each side of b = 3:
# for b >= 3 (phi <= P^-3): P^4 phi, R^(7/2) phi, R^2 phi P^2;
# for b <= 3: phi^(-1/3), R^(7/2) phi^3 P^6, R^2 phi P^2.
BRANCH_DEEP = (
    LinearObjective(Fraction(0), Fraction(-1), Fraction(4), "4-b"),
    LinearObjective(Fraction(7, 2), Fraction(-1), Fraction(0), "7a/2-b"),
    LinearObjective(Fraction(2), Fraction(-1), Fraction(2), "2a-b+2"),
)
BRANCH_SHALLOW = (
    LinearObjective(Fraction(0), Fraction(1, 3), Fraction(0), "b/3"),
    LinearObjective(Fraction(7, 2), Fraction(-3), Fraction(6), "7a/2-3b+6"),
    LinearObjective(Fraction(2), Fraction(-1), Fraction(2), "2a-b+2"),
)


def _branch_supremum(inequalities, objectives, branch_name):
    verts = _vertices(inequalities)
    if not verts:
        return None
    normals = [(iq.ca, iq.cb) for iq in inequalities]
    best = None
    for obj in objectives:
        if not _in_cone((obj.ga, obj.gb), normals):
            raise UnboundedObjectiveError(
                f"unbounded bound: term {obj.label} increases along a "
                f"recession direction of branch {branch_name}")
        for a, b in verts:
            val = obj.value(a, b)
            if best is None or val > best[0]:
                best = (val, obj.label, a, b)
    return best


def lemma9_details(region: ExponentPolytope) -> dict:
    """Maximize the branch objectives over the region split at b = 3.

    Requires the region to bound a above and b below (so each branch is a
    pointed polyhedron and vertex enumeration is exhaustive).  The branch
    regions are closed; at the b = 3 seam both objective families are valid
    and agree on the reported supremum.
    """
    normals = [(iq.ca, iq.cb) for iq in region.inequalities]
    if not _in_cone((Fraction(1), Fraction(0)), normals):
        raise PreconditionError("region must bound a from above")
    if not any(iq.cb < 0 for iq in region.inequalities):
        raise PreconditionError("region must bound b from below")

    three = LinearInequality(Fraction(0), Fraction(1), as_exponent(3))     # b <= 3
    three_up = LinearInequality(Fraction(0), Fraction(-1), as_exponent(-3))  # b >= 3
    shallow = _branch_supremum(region.inequalities + (three,),
                               BRANCH_SHALLOW, "b<=3")
    deep = _branch_supremum(region.inequalities + (three_up,),
                            BRANCH_DEEP, "b>=3")
    if shallow is None and deep is None:
        raise InfeasibleRegionError(f"empty region {region.name or '(unnamed)'}")

    candidates = [c for c in (shallow, deep) if c is not None]
    value, label, a, b = max(candidates, key=lambda c: c[0])
    return {"value": value, "term": label,
            "vertex": {"a": a.to_json(), "b": b.to_json()},
            "branch": "b<=3" if (shallow is not None and value == shallow[0]) else "b>=3"}


def lemma9_exponent(region: ExponentPolytope) -> AugmentedExponent:
    """Supremum of the quartic-moment bound exponent over the region."""
    return lemma9_details(region)["value"]


def parse_region(text: str, name: str = "") -> ExponentPolytope:
    """Parse constraints like "a<=25/31,b>=a/5+11/5" into a region.

    Grammar per comma-separated clause: <var> <=|>= <linear expr>, where the
    expression is a sum of rational constants and rational multiples of a or
    b written as 5*a, a/5, or a.
    """
    inequalities = []
    for clause in text.split(","):
        clause = clause.strip().replace(" ", "")
        if not clause:
            continue
        if "<=" in clause:
            left, right = clause.split("<=", 1)
            sense = "<="
        elif ">=" in clause:
            left, right = clause.split(">=", 1)
            sense = ">="
        else:
            raise PreconditionError(f"constraint {clause!r} needs <= or >=")
        la, lb, lc = _parse_linear(left)
        ra, rb, rc = _parse_linear(right)
        # Move variables left, constants right.
        ca, cb, const = la - ra, lb - rb, rc - lc
        if sense == ">=":
            ca, cb, const = -ca, -cb, -const
        inequalities.append(LinearInequality(ca, cb, as_exponent(const)))
    if not inequalities:
        raise PreconditionError("empty region description")
    return ExponentPolytope(tuple(inequalities), name=name)


def _parse_linear(expr: str):
    """Coefficients (ca, cb, const) of a linear expression in a and b."""
    ca = cb = const = Fraction(0)
    token = ""
    tokens = []
    for ch in expr:
        if ch in "+-" and token:
            tokens.append(token)
            token = ch
        else:
            token += ch
    if token:
        tokens.append(token)
    for tok in tokens:
        sign = Fraction(1)
        body = tok
        while body and body[0] in "+-":
            if body[0] == "-":
                sign = -sign
            body = body[1:]
        if not body:
            raise PreconditionError(f"dangling sign in {expr!r}")
        var = None
        if "a" in body or "b" in body:
            var = "a" if "a" in body else "b"
            head, _, tail = body.partition(var)
            head = head.rstrip("*")
            coeff = parse_rational(head) if head else Fraction(1)
            if tail:
                if not tail.startswith("/"):
                    raise PreconditionError(f"cannot parse term {tok!r}")
                coeff /= parse_rational(tail[1:])
        else:
            coeff = parse_rational(body)
        value = sign * coeff
        if var == "a":
            ca += value
        elif var == "b":
            cb += value
        else:
            const += value
    return ca, cb, const
