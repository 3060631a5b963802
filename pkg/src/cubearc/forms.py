"""Integral cubic forms: representation, calculus, and named constructors.

A form is stored as a sparse map from sorted index triples (i,j,k),
1 <= i <= j <= k <= n, to nonzero integer coefficients, so
C(x) = sum coeffs[(i,j,k)] * x_i * x_j * x_k.  Everything downstream
(exponential sums, local solubility, point counting) consumes this one
representation; the JSON interchange format is
{"n": n, "monomials": [[i, j, k, coeff], ...]}.

Split structure is detected in the given coordinates only: blocks are the
connected components of the variable co-occurrence graph.  No attempt is made
to discover splittings hidden behind a change of basis.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .errors import Budget, PreconditionError


class CubicForm:
    """Immutable integral cubic form in n variables."""

    __slots__ = ("n", "coeffs", "_hash")

    def __init__(self, n: int, coeffs: dict):
        if not isinstance(n, int) or n < 1:
            raise PreconditionError("variable count must be a positive integer")
        clean = {}
        for key, c in coeffs.items():
            i, j, k = key
            if not (isinstance(i, int) and isinstance(j, int) and isinstance(k, int)):
                raise PreconditionError(f"non-integer index triple {key!r}")
            if not (1 <= i <= j <= k <= n):
                raise PreconditionError(f"index triple {key} not sorted within [1,{n}]")
            if not isinstance(c, int) or isinstance(c, bool):
                raise PreconditionError(f"coefficient for {key} must be an integer")
            if c == 0:
                raise PreconditionError(f"zero coefficient stored for {key}")
            clean[(i, j, k)] = c
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "coeffs", dict(sorted(clean.items())))
        object.__setattr__(self, "_hash", hash((n, tuple(sorted(clean.items())))))

    def __setattr__(self, name, value):
        raise AttributeError("CubicForm is immutable")

    @classmethod
    def from_monomials(cls, n: int, items) -> "CubicForm":
        """Build from (i,j,k,c) items, merging duplicates and dropping zeros."""
        acc: dict = {}
        for i, j, k, c in items:
            key = tuple(sorted((i, j, k)))
            acc[key] = acc.get(key, 0) + c
        return cls(n, {k: v for k, v in acc.items() if v != 0})

    @classmethod
    def diagonal(cls, coeffs) -> "CubicForm":
        """sum_i coeffs[i] * x_i^3 (zero coefficients allowed, just skipped)."""
        coeffs = list(coeffs)
        return cls(len(coeffs),
                   {(i, i, i): c for i, c in enumerate(coeffs, start=1) if c != 0})

    def monomials(self):
        for (i, j, k), c in self.coeffs.items():
            yield i, j, k, c

    def evaluate(self, x):
        if len(x) != self.n:
            raise PreconditionError(f"expected {self.n} coordinates, got {len(x)}")
        total = 0
        for (i, j, k), c in self.coeffs.items():
            total += c * x[i - 1] * x[j - 1] * x[k - 1]
        return total

    def gradient(self, x):
        """Exact gradient; satisfies the degree-3 Euler identity x.grad = 3C."""
        if len(x) != self.n:
            raise PreconditionError(f"expected {self.n} coordinates, got {len(x)}")
        g = [0] * self.n
        for (i, j, k), c in self.coeffs.items():
            # d/dx_m of x_i x_j x_k: multiplicity of m times the other two.
            triple = (i, j, k)
            for m in set(triple):
                rest = list(triple)
                rest.remove(m)
                a, b = rest
                g[m - 1] += triple.count(m) * c * x[a - 1] * x[b - 1]
        return tuple(g)

    def hessian_matrix(self, x):
        """Integer Hessian H(x), entries linear in x; always symmetric."""
        if len(x) != self.n:
            raise PreconditionError(f"expected {self.n} coordinates, got {len(x)}")
        H = [[0] * self.n for _ in range(self.n)]
        for (i, j, k), c in self.coeffs.items():
            idx = (i - 1, j - 1, k - 1)
            for s, t in itertools.permutations(range(3), 2):
                u = 3 - s - t
                H[idx[s]][idx[t]] += c * x[idx[u]]
        return H

    def max_abs_coeff(self) -> int:
        return max((abs(c) for c in self.coeffs.values()), default=0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other):
        return (isinstance(other, CubicForm) and self.n == other.n
                and self.coeffs == other.coeffs)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        terms = [f"{c}*x{i}x{j}x{k}" for (i, j, k), c in self.coeffs.items()]
        body = " + ".join(terms) if terms else "0"
        return f"CubicForm(n={self.n}: {body})"

    def to_json(self) -> dict:
        return {"n": self.n,
                "monomials": [[i, j, k, c] for (i, j, k), c in self.coeffs.items()]}

    @classmethod
    def from_json(cls, obj) -> "CubicForm":
        if not isinstance(obj, dict) or "n" not in obj or "monomials" not in obj:
            raise PreconditionError(
                'cubic form JSON must have the shape {"n": int, "monomials": [[i,j,k,c], ...]}')
        items = []
        for row in obj["monomials"]:
            if len(row) != 4:
                raise PreconditionError(f"monomial row must be [i,j,k,coeff], got {row!r}")
            items.append(tuple(row))
        return cls.from_monomials(obj["n"], items)


def evaluate(form: CubicForm, x):
    return form.evaluate(x)


def gradient(form: CubicForm, x):
    return form.gradient(x)


@dataclass(frozen=True)
class SplitStructure:
    """Ordered partition of the variables into non-interacting blocks."""

    n: int
    blocks: tuple            # tuple of tuples of 1-based parent indices
    subforms: tuple          # CubicForm per block, re-indexed to 1..len(block)

    def __post_init__(self):
        seen = sorted(i for block in self.blocks for i in block)
        if seen != list(range(1, self.n + 1)):
            raise PreconditionError("blocks must partition the variable set")
        if len(self.subforms) != len(self.blocks):
            raise PreconditionError("one subform per block required")

    def reassemble(self) -> CubicForm:
        items = []
        for block, sub in zip(self.blocks, self.subforms):
            for (i, j, k), c in sub.coeffs.items():
                items.append((block[i - 1], block[j - 1], block[k - 1], c))
        return CubicForm.from_monomials(self.n, items)


def split_components(form: CubicForm) -> SplitStructure:
    """Finest coordinate-aligned split: co-occurrence graph components.

    Variables absent from every monomial become singleton blocks carrying the
    zero form.
    """
    parent = list(range(form.n + 1))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    for (i, j, k) in form.coeffs:
        union(i, j)
        union(j, k)

    groups: dict = {}
    for v in range(1, form.n + 1):
        groups.setdefault(find(v), []).append(v)
    blocks = tuple(tuple(sorted(g)) for _, g in sorted(groups.items()))

    subforms = []
    for block in blocks:
        pos = {v: idx + 1 for idx, v in enumerate(block)}
        items = [(pos[i], pos[j], pos[k], c)
                 for (i, j, k), c in form.coeffs.items() if i in pos]
        subforms.append(CubicForm.from_monomials(len(block), items))
    return SplitStructure(form.n, blocks, tuple(subforms))


@dataclass(frozen=True)
class NumberFieldSpec:
    """Monic integer cubic t^3 + c2 t^2 + c1 t + c0, irreducible over Q."""

    c2: int
    c1: int
    c0: int

    def __post_init__(self):
        for root in _candidate_integer_roots(self.c0):
            if root ** 3 + self.c2 * root ** 2 + self.c1 * root + self.c0 == 0:
                raise PreconditionError(
                    f"polynomial has the integer root {root}; not irreducible")
        if self.discriminant() == 0:
            raise PreconditionError("polynomial has a repeated root")

    def discriminant(self) -> int:
        a, b, c = self.c2, self.c1, self.c0
        return 18 * a * b * c - 4 * a ** 3 * c + a ** 2 * b ** 2 - 4 * b ** 3 - 27 * c ** 2


def _candidate_integer_roots(c0: int):
    # A rational root of a monic integer cubic is an integer dividing c0.
    if c0 == 0:
        yield 0
        return
    m = abs(c0)
    for d in range(1, m + 1):
        if m % d == 0:
            yield d
            yield -d


def make_norm_form(spec: NumberFieldSpec) -> CubicForm:
    """Field norm of x1 + x2*t + x3*t^2 as a 3-variable integer cubic form.

    Computed as the determinant of the multiplication matrix on the power
    basis {1, t, t^2}, expanded exactly over polynomial dictionaries.
    """
    # t^3 = -c2 t^2 - c1 t - c0; reduce t^3 and t^4 to the basis.
    c2, c1, c0 = spec.c2, spec.c1, spec.c0
    t3 = (-c0, -c1, -c2)
    t4 = (t3[2] * -c0, t3[0] + t3[2] * -c1, t3[1] + t3[2] * -c2)

    x1, x2, x3 = {(1, 0, 0): 1}, {(0, 1, 0): 1}, {(0, 0, 1): 1}

    def scaled(poly, c):
        return {e: c * v for e, v in poly.items() if c * v != 0}

    def added(*polys):
        out: dict = {}
        for poly in polys:
            for e, v in poly.items():
                out[e] = out.get(e, 0) + v
        return {e: v for e, v in out.items() if v != 0}

    def multiplied(p, q):
        out: dict = {}
        for e1, v1 in p.items():
            for e2, v2 in q.items():
                e = (e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2])
                out[e] = out.get(e, 0) + v1 * v2
        return {e: v for e, v in out.items() if v != 0}

    # Column j holds the basis coordinates of (x1 + x2 t + x3 t^2) * t^j.
    col0 = [x1, x2, x3]
    col1 = [scaled(x3, t3[0]),
            added(x1, scaled(x3, t3[1])),
            added(x2, scaled(x3, t3[2]))]
    col2 = [added(scaled(x2, t3[0]), scaled(x3, t4[0])),
            added(scaled(x2, t3[1]), scaled(x3, t4[1])),
            added(x1, scaled(x2, t3[2]), scaled(x3, t4[2]))]
    M = [[col0[i], col1[i], col2[i]] for i in range(3)]

    det: dict = {}
    for perm, sign in ((((0, 1, 2)), 1), ((0, 2, 1), -1), ((1, 0, 2), -1),
                       ((1, 2, 0), 1), ((2, 0, 1), 1), ((2, 1, 0), -1)):
        term = multiplied(multiplied(M[0][perm[0]], M[1][perm[1]]), M[2][perm[2]])
        det = added(det, scaled(term, sign))

    items = []
    for (e1, e2, e3), c in det.items():
        assert e1 + e2 + e3 == 3
        idx = (1,) * e1 + (2,) * e2 + (3,) * e3
        items.append((idx[0], idx[1], idx[2], c))
    return CubicForm.from_monomials(3, items)


def make_mordell_block(scale: int = 1) -> CubicForm:
    """scale * (x1^3 + 2 x2^3 + 4 x3^3 + x1 x2 x3)."""
    return CubicForm(3, {(1, 1, 1): scale, (2, 2, 2): 2 * scale,
                         (3, 3, 3): 4 * scale, (1, 2, 3): scale})


def make_mordell_form() -> CubicForm:
    """The classical 9-variable everywhere-locally-insoluble-at-7 example.

    Three copies of the anisotropic norm-type block, scaled by 1, 7, 49.
    """
    items = []
    for b, scale in enumerate((1, 7, 49)):
        off = 3 * b
        block = make_mordell_block(scale)
        for (i, j, k), c in block.coeffs.items():
            items.append((i + off, j + off, k + off, c))
    return CubicForm.from_monomials(9, items)


def hessian_rank_profile(form: CubicForm, h_bound: int,
                         budget: Budget | None = None) -> dict:
    """Histogram of exact Hessian ranks over the lattice box |x| <= h_bound."""
    if h_bound < 1:
        raise PreconditionError("h_bound must be a positive integer")
    budget = budget or Budget()
    points = (2 * h_bound + 1) ** form.n
    budget.spend(form.n * points, "rank-profile enumeration")
    profile: dict = {}
    rng = range(-h_bound, h_bound + 1)
    for x in itertools.product(rng, repeat=form.n):
        r = integer_rank(form.hessian_matrix(x))
        profile[r] = profile.get(r, 0) + 1
    return profile


def integer_rank(mat) -> int:
    """Exact rank of an integer matrix by fraction-free (Bareiss) elimination."""
    m = [row[:] for row in mat]
    rows = len(m)
    cols = len(m[0]) if rows else 0
    rank = 0
    prev = 1
    row = 0
    for col in range(cols):
        pivot = None
        for r in range(row, rows):
            if m[r][col] != 0:
                pivot = r
                break
        if pivot is None:
            continue
        m[row], m[pivot] = m[pivot], m[row]
        for r in range(row + 1, rows):
            for c in range(col + 1, cols):
                m[r][c] = (m[row][col] * m[r][c] - m[r][col] * m[row][c]) // prev
            m[r][col] = 0
        prev = m[row][col]
        row += 1
        rank += 1
        if row == rows:
            break
    return rank


def is_degenerate(form: CubicForm):
    """Nonzero integer v with grad C(x).v == 0 identically, or None.

    Such a direction makes C invariant under translation along v, i.e. the
    form is expressible in fewer variables after a rational change of basis.
    """
    n = form.n
    # Row per monomial x_a x_b (a <= b) of the quadratic grad C(x).v;
    # column per component of v.
    rows: dict = {}
    for (i, j, k), c in form.coeffs.items():
        triple = (i, j, k)
        for m in set(triple):
            rest = list(triple)
            rest.remove(m)
            a, b = sorted(rest)
            coeff = triple.count(m) * c
            rows.setdefault((a, b), [0] * n)[m - 1] += coeff
    matrix = [[Fraction(v) for v in row] for row in rows.values()]
    basis = _kernel_basis(matrix, n)
    if not basis:
        return None
    return _primitive_integer_vector(basis[0])


def _kernel_basis(matrix, n):
    """Basis of the rational kernel of `matrix` acting on Q^n."""
    m = [row[:] for row in matrix]
    pivots = []
    row = 0
    for col in range(n):
        piv = None
        for r in range(row, len(m)):
            if m[r][col] != 0:
                piv = r
                break
        if piv is None:
            continue
        m[row], m[piv] = m[piv], m[row]
        inv = 1 / m[row][col]
        m[row] = [v * inv for v in m[row]]
        for r in range(len(m)):
            if r != row and m[r][col] != 0:
                factor = m[r][col]
                m[r] = [a - factor * b for a, b in zip(m[r], m[row])]
        pivots.append(col)
        row += 1
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        vec = [Fraction(0)] * n
        vec[f] = Fraction(1)
        for r, col in enumerate(pivots):
            vec[col] = -m[r][f]
        basis.append(vec)
    return basis


def _primitive_integer_vector(vec):
    from math import gcd, lcm
    denom = lcm(*(v.denominator for v in vec)) if vec else 1
    ints = [int(v * denom) for v in vec]
    g = 0
    for v in ints:
        g = gcd(g, abs(v))
    if g > 1:
        ints = [v // g for v in ints]
    for v in ints:
        if v < 0:
            ints = [-u for u in ints]
            break
        if v > 0:
            break
    return tuple(ints)
