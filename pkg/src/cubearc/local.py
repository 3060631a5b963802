"""Solubility of cubic forms over Z/p^k and Q_p at desk scale.

Three services: exhaustive zero counting modulo prime powers, Hensel lifting
of nonsingular zeros (which backs every "soluble over Q_p" claim), and
descent certificates of insolubility for forms presented in the scaled shape

    C = F1(u) + p F2(v) + p^2 F3(w) + p G(u,v,w).

If each Fi is anisotropic mod p and the flagged monomial classes of G (one
u with two w, one v with two w, one w with two v) carry coefficients divisible
by p, then any p-adic zero forces u, v, w all divisible by p and rescaling
descends forever, so only the trivial zero exists.  Insolubility is asserted
through such a certificate and never through mere absence of small witnesses.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from . import kernels
from .errors import Budget, CubearcError, PreconditionError
from .forms import CubicForm

ANISOTROPY_POINT_CAP = 10**8


class IsotropicBlockError(CubearcError):
    """A block form has a nontrivial zero mod p; no descent certificate exists."""

    code = "isotropic-block"

    def __init__(self, block_index: int, vector):
        super().__init__(
            f"block F{block_index + 1} is isotropic mod p: "
            f"counterexample {tuple(vector)}")
        self.block_index = block_index
        self.vector = tuple(vector)

    def payload(self) -> dict:
        out = super().payload()
        out["block"] = self.block_index + 1
        out["counterexample"] = list(self.vector)
        return out


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p < 4:
        return True
    if p % 2 == 0:
        return False
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


def _require_prime(p):
    if not isinstance(p, int) or not is_prime(p):
        raise PreconditionError(f"modulus base must be prime, got {p!r}")


def count_zeros_mod(form: CubicForm, p: int, k: int = 1,
                    budget: Budget | None = None, threads: int = 1) -> int:
    """Exact number of solutions of C(x) == 0 in (Z/p^k)^n, zero included."""
    _require_prime(p)
    if k < 1:
        raise PreconditionError("exponent k must be a positive integer")
    q = p ** k
    hist = kernels.residue_histogram(form, q, budget=budget, threads=threads)
    return int(hist[0])


@dataclass(frozen=True)
class LocalWitness:
    """A zero of the form in (Z/p^k)^n that is nonzero mod p."""

    p: int
    k: int
    x: tuple
    nonsingular: bool

    def to_json(self) -> dict:
        return {"p": self.p, "k": self.k, "x": list(self.x),
                "nonsingular": self.nonsingular}


def make_witness(form: CubicForm, p: int, k: int, x) -> LocalWitness:
    """Validate and package a claimed zero mod p^k."""
    _require_prime(p)
    if k < 1:
        raise PreconditionError("level k must be positive")
    if len(x) != form.n:
        raise PreconditionError(f"witness has {len(x)} coordinates, form needs {form.n}")
    q = p ** k
    x = tuple(int(v) % q for v in x)
    if all(v % p == 0 for v in x):
        raise PreconditionError("witness is trivial: all coordinates divisible by p")
    if form.evaluate(x) % q != 0:
        raise PreconditionError(f"claimed witness does not vanish mod {p}^{k}")
    grad = form.gradient(x)
    nonsingular = any(g % p != 0 for g in grad)
    return LocalWitness(p=p, k=k, x=x, nonsingular=nonsingular)


def hensel_lift(form: CubicForm, witness: LocalWitness,
                target_k: int) -> LocalWitness:
    """Lift a nonsingular witness to any level; rejects singular witnesses."""
    if not witness.nonsingular:
        raise PreconditionError(
            "witness is singular mod p (no unit partial derivative); cannot lift")
    if target_k < witness.k:
        raise PreconditionError("target level below witness level")
    p = witness.p
    x = list(witness.x)
    k = witness.k
    while k < target_k:
        value = form.evaluate(x)
        pk = p ** k
        assert value % pk == 0
        grad = form.gradient(x)
        m = next(i for i, g in enumerate(grad) if g % p != 0)
        inv = pow(grad[m] % p, -1, p)
        step = (-(value // pk) * inv) % p
        x[m] += step * pk
        k += 1
        x = [v % p ** k for v in x]
    result = tuple(v % p ** target_k for v in x)
    assert form.evaluate(result) % p ** target_k == 0
    return LocalWitness(p=p, k=target_k, x=result,
                        nonsingular=witness.nonsingular)


@dataclass(frozen=True)
class DescentCertificate:
    """Exhaustively checked insolubility certificate over Q_p."""

    p: int
    blocks: tuple          # (u-vars, v-vars, w-vars), 1-based parent indices
    forms: tuple           # (F1, F2, F3) re-indexed to their blocks
    anisotropy_counts: tuple     # zero counts mod p, each must equal 1
    flagged_classes: tuple       # ((class-name, (i,j,k), coeff), ...) all div by p
    g_form: CubicForm | None     # mixed part after division by p, None if absent

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "blocks": [list(b) for b in self.blocks],
            "forms": [f.to_json() for f in self.forms],
            "anisotropy_counts": list(self.anisotropy_counts),
            "flagged_classes": [
                {"class": name, "monomial": list(mono), "coeff": coeff}
                for name, mono, coeff in self.flagged_classes],
            "g": self.g_form.to_json() if self.g_form is not None else None,
            "conclusion": "no nontrivial zero over Q_p",
        }


def _block_role(index: int, blocks) -> int:
    for role, block in enumerate(blocks):
        if index in block:
            return role
    raise PreconditionError(f"variable {index} missing from the partition")


def build_descent_certificate(form: CubicForm, p: int, blocks,
                              budget: Budget | None = None) -> DescentCertificate:
    """Certify p-adic insolubility for a form in the scaled three-block shape.

    `blocks` is a triple of disjoint 1-based index tuples covering all
    variables (the w block may be empty only if no monomial needs it; empty
    u or v blocks are allowed the same way).
    """
    _require_prime(p)
    blocks = tuple(tuple(sorted(int(i) for i in b)) for b in blocks)
    flat = sorted(i for b in blocks for i in b)
    if len(blocks) != 3:
        raise PreconditionError("partition must have exactly three blocks")
    if flat != sorted(set(flat)) or flat != list(range(1, form.n + 1)):
        raise PreconditionError("blocks must partition {1..n} without repeats")
    budget = budget or Budget()

    # Sort monomials into pure-block parts and the mixed remainder.
    pure: list = [[], [], []]
    mixed = []
    for (i, j, k), c in form.coeffs.items():
        roles = {_block_role(i, blocks), _block_role(j, blocks), _block_role(k, blocks)}
        if len(roles) == 1:
            pure[roles.pop()].append(((i, j, k), c))
        else:
            mixed.append(((i, j, k), c))

    # Required p-power on each piece: F1 raw, F2 once, F3 twice, G once.
    scale = (1, p, p * p)
    subforms = []
    for role in range(3):
        block = blocks[role]
        pos = {v: t + 1 for t, v in enumerate(block)}
        items = []
        for (i, j, k), c in pure[role]:
            if c % scale[role] != 0:
                raise PreconditionError(
                    f"decomposition shape violated: coefficient {c} of "
                    f"monomial {(i, j, k)} must be divisible by {scale[role]}")
            items.append((pos[i], pos[j], pos[k], c // scale[role]))
        subforms.append(CubicForm.from_monomials(max(len(block), 1), items))

    g_items = []
    for (i, j, k), c in mixed:
        if c % p != 0:
            raise PreconditionError(
                f"decomposition shape violated: mixed monomial {(i, j, k)} "
                f"has coefficient {c} not divisible by {p}")
        g_items.append(((i, j, k), c // p))
    g_form = (CubicForm.from_monomials(form.n, [(i, j, k, c) for (i, j, k), c in g_items])
              if g_items else None)

    # Anisotropy of each block form mod p, exhaustively.
    counts = []
    for role, sub in enumerate(subforms):
        m = len(blocks[role])
        if m == 0:
            counts.append(1)
            continue
        if p ** m > ANISOTROPY_POINT_CAP:
            raise PreconditionError(
                f"anisotropy check needs {p}^{m} points, above the cap")
        cnt = count_zeros_mod(sub, p, 1, budget=budget)
        counts.append(cnt)
        if cnt != 1:
            vec = _isotropy_counterexample(sub, p)
            raise IsotropicBlockError(role, vec)

    # Flagged mixed classes that survive one or two descent rescalings.
    flagged = []
    class_names = {(0, 2, 2): "u.w.w", (1, 2, 2): "v.w.w", (1, 1, 2): "w.v.v"}
    for (i, j, k), c in g_items:
        pattern = tuple(sorted(_block_role(t, blocks) for t in (i, j, k)))
        if pattern in class_names:
            if c % p != 0:
                raise PreconditionError(
                    f"descent blocked: monomial {(i, j, k)} of class "
                    f"{class_names[pattern]} has coefficient {c} not divisible by {p}")
            flagged.append((class_names[pattern], (i, j, k), c))

    return DescentCertificate(p=p, blocks=blocks, forms=tuple(subforms),
                              anisotropy_counts=tuple(counts),
                              flagged_classes=tuple(flagged), g_form=g_form)


def _isotropy_counterexample(sub: CubicForm, p: int):
    for x in itertools.product(range(p), repeat=sub.n):
        if any(x) and sub.evaluate(x) % p == 0:
            return x
    raise AssertionError("count said isotropic but no witness found")
