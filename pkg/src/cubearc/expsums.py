"""Numerical evaluation of the analytic objects: cubic exponential sums over
boxes, smooth weighted sums, complete sums to a modulus, the singular series
and singular integral, exact moment counts, the major/minor arc dissection,
and the rational-approximation model S*.

Exactness policy: anything feeding a sign or certificate decision is exact
(residue phases, Ramanujan sums, moment counts, arc membership); oscillatory
integrals and weight sums are floating point with compensated summation.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .augmented import encode_rational, parse_rational
from .errors import Budget, PreconditionError
from .forms import CubicForm, split_components
from .kernels import (box_values, convolve_square_sum, form_rows,
                      phase_sum_box, residue_histogram)

TWO_PI = 2.0 * math.pi


def _compressed_box_values(form, lows, highs, budget, threads):
    raw = box_values(form, lows, highs, budget=budget, threads=threads)
    return np.unique(raw, return_counts=True)


# ---------------------------------------------------------------------------
# box regions


@dataclass(frozen=True)
class BoxRegion:
    """Lattice domain {x integer : |x/P - z| < rho} in the sup norm.

    Endpoints are excluded (strict inequality); the box is nonempty once
    P >= 1/rho.  Centers and radius are exact rationals so the lattice
    bounds are reproducible.
    """

    z: tuple
    rho: Fraction
    P: int

    def __post_init__(self):
        z = tuple(parse_rational(c) for c in self.z)
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "rho", parse_rational(self.rho))
        object.__setattr__(self, "P", int(self.P))
        if self.rho <= 0:
            raise PreconditionError("box radius must be positive")
        if self.P < 1:
            raise PreconditionError("box scale P must be a positive integer")

    @property
    def n(self) -> int:
        return len(self.z)

    def lattice_ranges(self):
        """Inclusive integer bounds per axis."""
        lows, highs = [], []
        for zi in self.z:
            lo = self.P * (zi - self.rho)
            hi = self.P * (zi + self.rho)
            lows.append(math.floor(lo) + 1)
            highs.append(math.ceil(hi) - 1)
        return lows, highs

    def lattice_count(self) -> int:
        lows, highs = self.lattice_ranges()
        total = 1
        for lo, hi in zip(lows, highs):
            total *= max(0, hi - lo + 1)
        return total

    def to_json(self) -> dict:
        return {"z": [encode_rational(c) for c in self.z],
                "rho": encode_rational(self.rho), "P": self.P}

    @classmethod
    def from_json(cls, obj) -> "BoxRegion":
        return cls(tuple(obj["z"]), obj["rho"], obj["P"])


def _ranges_for(form: CubicForm, box: BoxRegion):
    if box.n != form.n:
        raise PreconditionError(
            f"box has {box.n} coordinates but the form has {form.n} variables")
    lows, highs = box.lattice_ranges()
    if any(hi < lo for lo, hi in zip(lows, highs)):
        raise PreconditionError("box contains no lattice points (P < 1/rho)")
    return lows, highs


# ---------------------------------------------------------------------------
# exponential sums


def weyl_sum(form: CubicForm, box: BoxRegion, alpha, budget: Budget | None = None,
             threads: int = 1) -> complex:
    """S(alpha) = sum over the box lattice of e(alpha * C(x)).

    Rational alpha takes the exact path: values of C are reduced modulo the
    denominator and the sum collapses onto at most den residue phases, each
    an exact multiple of 1/den.  Float alpha falls back to direct phase
    accumulation.
    """
    lows, highs = _ranges_for(form, box)
    if isinstance(alpha, float):
        return phase_sum_box(form, lows, highs, alpha % 1.0,
                             budget=budget, threads=threads)
    alpha = parse_rational(alpha) % 1
    num, den = alpha.numerator, alpha.denominator
    vals, cnts = _compressed_box_values(form, lows, highs, budget, threads)
    weights: dict[int, int] = {}
    for v, c in zip(vals.tolist(), cnts.tolist()):
        r = (num * v) % den
        weights[r] = weights.get(r, 0) + c
    re = math.fsum(c * math.cos(TWO_PI * r / den) for r, c in weights.items())
    im = math.fsum(c * math.sin(TWO_PI * r / den) for r, c in weights.items())
    return complex(re, im)


def weighted_sum(coeff: int, P: int, rho, alpha) -> complex:
    """T(alpha) = sum over x of w(x/(rho P)) e(alpha * coeff * x^3).

    The weight is the standard bump w(u) = exp(-1/(1-u^2)) supported on
    |u| < 1, so the sum runs over |x| < rho P.
    """
    coeff = int(coeff)
    if coeff == 0:
        raise PreconditionError("weighted sums need a nonzero cubic coefficient")
    P = int(P)
    rho = parse_rational(rho)
    if P < 1 or rho <= 0:
        raise PreconditionError("scale and radius must be positive")
    R = rho * P
    lo = math.floor(-R) + 1
    hi = math.ceil(R) - 1
    exact = not isinstance(alpha, float)
    a = parse_rational(alpha) if exact else float(alpha)
    res, ims = [], []
    for x in range(lo, hi + 1):
        u = float(Fraction(x) / R)
        w = math.exp(-1.0 / (1.0 - u * u))
        if exact:
            theta = TWO_PI * float((a * coeff * x ** 3) % 1)
        else:
            theta = TWO_PI * math.fmod(a * coeff * float(x) ** 3, 1.0)
        res.append(w * math.cos(theta))
        ims.append(w * math.sin(theta))
    return complex(math.fsum(res), math.fsum(ims))


def complete_sum(form: CubicForm, a: int, q: int, budget: Budget | None = None,
                 threads: int = 1) -> complex:
    """S_{a,q} = sum over y mod q of e(a C(y) / q), phases exact mod q."""
    q = int(q)
    a = int(a)
    if q < 1:
        raise PreconditionError("modulus q must be a positive integer")
    if math.gcd(a, q) != 1:
        raise PreconditionError(f"a={a} and q={q} must be coprime")
    hist = residue_histogram(form, q, budget=budget, threads=threads)
    res, ims = [], []
    for v, cnt in enumerate(hist.tolist()):
        if cnt == 0:
            continue
        theta = TWO_PI * ((a * v) % q) / q
        res.append(cnt * math.cos(theta))
        ims.append(cnt * math.sin(theta))
    return complex(math.fsum(res), math.fsum(ims))


# ---------------------------------------------------------------------------
# singular series (exact rational blocks via Ramanujan sums)


def _mobius(m: int) -> int:
    if m == 1:
        return 1
    mu = 1
    d = 2
    while d * d <= m:
        if m % d == 0:
            m //= d
            if m % d == 0:
                return 0
            mu = -mu
        d += 1
    if m > 1:
        mu = -mu
    return mu


def _divisors(q: int):
    small, large = [], []
    d = 1
    while d * d <= q:
        if q % d == 0:
            small.append(d)
            if d != q // d:
                large.append(q // d)
        d += 1
    return small + large[::-1]


def _ramanujan_row(q: int):
    """c_q(v) for v = 0..q-1: sum of d*mu(q/d) over d | gcd(v, q)."""
    row = [0] * q
    for d in _divisors(q):
        mu = _mobius(q // d)
        if mu == 0:
            continue
        term = d * mu
        for v in range(0, q, d):
            row[v] += term
    return row


def _cyclic_convolve(h1, h2, q: int):
    out = [0] * q
    for i, a in enumerate(h1):
        if a == 0:
            continue
        for j, b in enumerate(h2):
            if b:
                out[(i + j) % q] += a * b
    return out


def _split_histogram(form: CubicForm, q: int, budget, threads):
    """Residue histogram of C mod q, factored over independent blocks."""
    structure = split_components(form)
    hist = [0] * q
    hist[0] = 1
    for sub in structure.subforms:
        block = residue_histogram(sub, q, budget=budget, threads=threads)
        hist = _cyclic_convolve(hist, [int(c) for c in block.tolist()], q)
    return hist


def series_block(form: CubicForm, q: int, budget: Budget | None = None,
                 threads: int = 1) -> Fraction:
    """Exact q-th block: q^-n * sum over coprime a of S_{a,q}.

    Writing the inner sum over residues through Ramanujan sums keeps every
    block rational: sum_{(a,q)=1} e(a v / q) = c_q(v).
    """
    q = int(q)
    if q < 1:
        raise PreconditionError("modulus q must be a positive integer")
    budget = budget or Budget()
    hist = _split_histogram(form, q, budget, threads)
    row = _ramanujan_row(q)
    total = sum(h * c for h, c in zip(hist, row))
    return Fraction(total, q ** form.n)


def singular_series(form: CubicForm, q_max: int, budget: Budget | None = None,
                    threads: int = 1) -> dict:
    """Partial sum of the local-density series with a tail-decay report.

    Blocks are exact rationals; the tail report compares the fitted decay of
    log|block| against the reference slope 5n/6 + 1 - n.
    """
    q_max = int(q_max)
    if q_max < 1:
        raise PreconditionError("q_max must be a positive integer")
    budget = budget or Budget()
    blocks = []
    partial = Fraction(0)
    for q in range(1, q_max + 1):
        value = series_block(form, q, budget=budget, threads=threads)
        partial += value
        blocks.append({"q": q, "value": float(value),
                       "exact": encode_rational(value)})
    n = form.n
    reference = 5 * n / 6 + 1 - n
    pts = [(math.log(b["q"]), math.log(abs(b["value"])))
           for b in blocks if b["q"] >= 2 and b["value"] != 0]
    slope = None
    if len(pts) >= 2:
        xs = [p[0] for p in pts]
        ys = [p[1] for p in pts]
        xbar = sum(xs) / len(xs)
        ybar = sum(ys) / len(ys)
        den = sum((x - xbar) ** 2 for x in xs)
        slope = sum((x - xbar) * (y - ybar) for x, y in zip(xs, ys)) / den
    return {
        "q_max": q_max,
        "n": n,
        "partial_sum": float(partial),
        "partial_sum_exact": encode_rational(partial),
        "blocks": blocks,
        "tail": {"empirical_slope": slope,
                 "reference_slope": reference,
                 "nonzero_blocks": len(pts)},
    }


# ---------------------------------------------------------------------------
# singular integral (oscillatory profile + Monte Carlo density cross-check)


@lru_cache(maxsize=32)
def _gl_nodes(m: int):
    x, w = np.polynomial.legendre.leggauss(m)
    return x, w


def _form_range_bound(form: CubicForm, z, rho: float) -> float:
    """Upper bound for |C| over the box around z of radius rho."""
    bound = 0.0
    for (i, j, k), c in form.coeffs.items():
        term = abs(c)
        for pos in (i, j, k):
            term *= abs(z[pos - 1]) + rho
        bound += term
    return bound


def _eval_rows_float(rows, grids):
    total = np.zeros(grids[0].shape, dtype=np.float64)
    for i, j, k, c in rows:
        total += float(c) * grids[i] * grids[j] * grids[k]
    return total


def _form_range_interval(form: CubicForm, z, rho: float):
    """Interval bound (lo, hi) for C over the box around z of radius rho."""
    lo = hi = 0.0
    for (i, j, k), c in form.coeffs.items():
        prods = [float(c)]
        for pos in (i, j, k):
            a = z[pos - 1] - rho
            b = z[pos - 1] + rho
            prods = [p * e for p in prods for e in (a, b)]
        lo += min(prods)
        hi += max(prods)
    return lo, hi


def _axis_nodes(center: float, rho: float, panels: int, m: int):
    base_x, base_w = _gl_nodes(m)
    xs, ws = [], []
    width = 2.0 * rho / panels
    for p in range(panels):
        left = center - rho + p * width
        xs.append(left + (base_x + 1.0) * 0.5 * width)
        ws.append(base_w * 0.5 * width)
    return np.concatenate(xs), np.concatenate(ws)


def oscillatory_profile(form: CubicForm, z, rho, gamma: float,
                        resolution: int = 12,
                        budget: Budget | None = None) -> complex:
    """I(gamma) = integral over the box {|x - z| < rho} of e(gamma C(x)) dx.

    Tensor Gauss-Legendre per split block (the integrand factors over
    independent variable blocks), with per-axis panel counts that grow with
    the expected number of oscillations.
    """
    z = tuple(float(c) for c in z)
    rho = float(rho)
    if len(z) != form.n:
        raise PreconditionError("center dimension must match the form")
    if rho <= 0:
        raise PreconditionError("box radius must be positive")
    if resolution < 2:
        raise PreconditionError("quadrature resolution must be at least 2")
    budget = budget or Budget()

    structure = split_components(form)
    result = complex(1.0, 0.0)
    for block, sub in zip(structure.blocks, structure.subforms):
        dim = len(block)
        zb = [z[i - 1] for i in block]
        clo, chi = _form_range_interval(sub, zb, rho)
        # e(gamma C) completes one period each time gamma*C advances by 1
        oscillations = abs(gamma) * (chi - clo)
        panels = 1
        if oscillations > 1:
            # spread the oscillations across the tensor grid so each panel
            # sees few enough periods for the chosen rule order
            per_axis = (oscillations / max(1.0, resolution / 4.0)) ** (1.0 / dim)
            panels = max(1, min(256, math.ceil(per_axis)))
        nodes = (panels * resolution) ** dim
        budget.spend(nodes, "quadrature nodes")
        axes = [_axis_nodes(zb[d], rho, panels, resolution) for d in range(dim)]
        grids = np.meshgrid(*[a[0] for a in axes], indexing="ij")
        weight = np.ones(grids[0].shape, dtype=np.float64)
        for d in range(dim):
            shape = [1] * dim
            shape[d] = -1
            weight = weight * axes[d][1].reshape(shape)
        rows = form_rows(sub)
        values = _eval_rows_float(rows, [g for g in grids])
        theta = TWO_PI * gamma * values
        block_int = complex(float(np.sum(weight * np.cos(theta))),
                            float(np.sum(weight * np.sin(theta))))
        result *= block_int
    return result


def beta_integral(form: CubicForm, z, rho, b_max: float, resolution: int = 12,
                  budget: Budget | None = None):
    """Truncated integral of I(beta) over |beta| <= b_max, with samples.

    By conjugate symmetry the integral equals 2 * integral over [0, b_max]
    of Re I(beta).  Panels are linear on [0, 1] and geometric beyond.
    """
    b_max = float(b_max)
    if b_max <= 0:
        raise PreconditionError("b_max must be positive")
    budget = budget or Budget()
    zf = tuple(float(c) for c in z)
    clo, chi = _form_range_interval(form, zf, float(rho))
    # I(beta) oscillates in beta with frequencies bounded by max |C|
    freq = max(abs(clo), abs(chi), 1e-12)
    octaves = [0.0]
    head = min(1.0, b_max)
    for i in range(1, 5):
        octaves.append(head * i / 4.0)
    while octaves[-1] < b_max:
        octaves.append(min(b_max, octaves[-1] * 2.0))
    edges = [0.0]
    for left, right in zip(octaves, octaves[1:]):
        width = right - left
        parts = max(1, math.ceil(width * freq / max(1.0, resolution / 4.0)))
        for i in range(1, parts + 1):
            edges.append(left + width * i / parts)
    base_x, base_w = _gl_nodes(resolution)
    total = []
    samples = []
    for left, right in zip(edges, edges[1:]):
        width = right - left
        for xx, ww in zip(base_x, base_w):
            beta = left + (xx + 1.0) * 0.5 * width
            prof = oscillatory_profile(form, z, rho, beta,
                                       resolution=resolution, budget=budget)
            samples.append((beta, abs(prof)))
            total.append(ww * 0.5 * width * 2.0 * prof.real)
    return math.fsum(total), samples


def density_mc(form: CubicForm, z, rho, eta: float, n_samples: int, seed,
               budget: Budget | None = None) -> float:
    """vol{x in box : |C(x)| < eta/2} / eta by Monte Carlo (mandatory seed)."""
    if seed is None:
        raise PreconditionError("Monte Carlo estimators require a seed")
    eta = float(eta)
    if eta <= 0:
        raise PreconditionError("density window eta must be positive")
    n_samples = int(n_samples)
    if n_samples < 1:
        raise PreconditionError("need at least one sample")
    budget = budget or Budget()
    budget.spend(n_samples, "density samples")
    z = np.asarray([float(c) for c in z], dtype=np.float64)
    rho = float(rho)
    rows = form_rows(form)
    rng = np.random.default_rng(int(seed))
    hits = 0
    done = 0
    while done < n_samples:
        chunk = min(1 << 16, n_samples - done)
        pts = z[:, None] + rho * (2.0 * rng.random((len(z), chunk)) - 1.0)
        vals = np.zeros(chunk, dtype=np.float64)
        for i, j, k, c in rows:
            vals += float(c) * pts[i] * pts[j] * pts[k]
        hits += int(np.count_nonzero(np.abs(vals) < eta / 2.0))
        done += chunk
    volume = (2.0 * rho) ** len(z)
    return hits / n_samples * volume / eta


def _float_gradient(form: CubicForm, z):
    grad = [0.0] * form.n
    for (i, j, k), c in form.coeffs.items():
        grad[i - 1] += float(c) * z[j - 1] * z[k - 1]
        grad[j - 1] += float(c) * z[i - 1] * z[k - 1]
        grad[k - 1] += float(c) * z[i - 1] * z[j - 1]
    return grad


def _check_center(form: CubicForm, z, rho: float):
    value = 0.0
    for (i, j, k), c in form.coeffs.items():
        value += float(c) * z[i - 1] * z[j - 1] * z[k - 1]
    grad = _float_gradient(form, z)
    scale = max(1.0, _form_range_bound(form, z, 0.0))
    if abs(value) > 1e-8 * scale:
        raise PreconditionError(
            f"center is not a zero of the form (C(z) = {value:.3g})")
    if max(abs(g) for g in grad) < 1e-6:
        raise PreconditionError(
            "center is a singular zero (gradient vanishes); "
            "pick a nonsingular real solution")
    return grad


def singular_integral(form: CubicForm, z, rho, b_max: float = 32.0,
                      resolution: int = 12, seed=None,
                      n_samples: int = 200_000, eta: float | None = None,
                      budget: Budget | None = None) -> dict:
    """Archimedean density: truncated beta-integral of the oscillatory
    profile, cross-validated by the Monte Carlo density vol{|C| < eta/2}/eta.

    The box center must be a nonsingular real zero of the form.  The tail
    beyond b_max is estimated from the fitted decay of |I(beta)| on the last
    sampled octaves; a fit flatter than 1/beta flags non-convergence.
    """
    z = tuple(float(c) for c in z)
    rho = float(rho)
    if len(z) != form.n:
        raise PreconditionError("center dimension must match the form")
    if rho <= 0:
        raise PreconditionError("box radius must be positive")
    grad = _check_center(form, z, rho)
    budget = budget or Budget()

    value, samples = beta_integral(form, z, rho, b_max,
                                   resolution=resolution, budget=budget)

    # |I(beta)| oscillates through near-zeros, so fit the decay on octave
    # envelope maxima rather than raw samples
    envelope = {}
    for b, v in samples:
        if b <= 0 or v <= 0:
            continue
        bucket = math.floor(math.log2(b))
        if bucket not in envelope or v > envelope[bucket][1]:
            envelope[bucket] = (b, v)
    env_pts = [envelope[k] for k in sorted(envelope)][-4:]
    slope = None
    tail_estimate = None
    converged = False
    if len(env_pts) >= 3:
        xs = [math.log(b) for b, _ in env_pts]
        ys = [math.log(v) for _, v in env_pts]
        xbar = sum(xs) / len(xs)
        ybar = sum(ys) / len(ys)
        den = sum((x - xbar) ** 2 for x in xs)
        if den > 0:
            slope = sum((x - xbar) * (y - ybar)
                        for x, y in zip(xs, ys)) / den
            if slope < -1.02:
                s = -slope
                tail_estimate = 2.0 * env_pts[-1][1] * b_max / (s - 1.0)
                converged = True

    if eta is None:
        gnorm = math.sqrt(sum(g * g for g in grad))
        eta = 0.1 * rho * max(gnorm, 1e-3)
    mc = density_mc(form, z, rho, eta, n_samples, seed, budget=budget)

    agreement = abs(value - mc) / max(abs(mc), abs(value), 1e-300)
    return {
        "value": value,
        "mc_value": mc,
        "agreement": agreement,
        "converged": converged,
        "tail_slope": slope,
        "tail_estimate": tail_estimate,
        "b_max": b_max,
        "resolution": resolution,
        "eta": eta,
        "n_samples": n_samples,
        "seed": seed,
    }


def find_real_center(form: CubicForm, seed, attempts: int = 128):
    """A nonsingular real zero with sup-norm 1/2, by sign-change bisection.

    Cubic forms are odd, so any point with C > 0 pairs with its negation;
    a sign change along the segment gives a zero, and homogeneity lets us
    rescale it to sup-norm 1/2.  Definite-like failures (no sign change
    found among the sampled segments) are reported, as is the all-singular
    case (e.g. a 1-variable form, whose only real zero is the origin).
    """
    if seed is None:
        raise PreconditionError("center search requires a seed")
    rng = random.Random(int(seed))
    rows = form_rows(form)

    def val(x):
        return sum(float(c) * x[i] * x[j] * x[k] for i, j, k, c in rows)

    def grad_ok(x):
        return max(abs(g) for g in _float_gradient(form, x)) > 1e-6

    def sample_pair():
        pos = neg = None
        for _ in range(attempts):
            x = [rng.uniform(-1.0, 1.0) for _ in range(form.n)]
            v = val(x)
            if v > 1e-12 and pos is None:
                pos = x
            elif v < -1e-12 and neg is None:
                neg = x
            if pos and neg:
                return pos, neg
        return None

    if sample_pair() is None:
        raise PreconditionError(
            "no sign change found; the form appears definite on the sampled "
            "region and has no usable nonsingular real zero")

    for _ in range(attempts):
        pair = sample_pair()
        if pair is None:
            break
        lo, hi = pair
        for _ in range(200):
            mid = [(a + b) / 2.0 for a, b in zip(lo, hi)]
            if val(mid) > 0:
                lo = mid
            else:
                hi = mid
        x = [(a + b) / 2.0 for a, b in zip(lo, hi)]
        norm = max(abs(c) for c in x)
        if norm > 1e-9:
            x = [c / (2.0 * norm) for c in x]
            if grad_ok(x):
                return tuple(x)
    raise PreconditionError(
        "sign changes found but every bisected zero was singular")


# ---------------------------------------------------------------------------
# moments by exact counting


@dataclass(frozen=True)
class MomentResult:
    """Exact k-th moment of |S| as a solution count (orthogonality)."""

    k: int
    P: int
    count_value: int
    note: str

    def to_json(self) -> dict:
        return {"k": self.k, "P": self.P, "count_value": self.count_value,
                "note": self.note}


def _pair_distribution(vals1, cnts1, vals2, cnts2, budget: Budget):
    """Compressed distribution of v1 + v2 for two compressed distributions."""
    m = len(vals1) * len(vals2)
    budget.spend(m, "pair enumeration")
    budget.table(m, "pair table")
    big = int(max(abs(int(vals1[0])), abs(int(vals1[-1])))) + \
        int(max(abs(int(vals2[0])), abs(int(vals2[-1]))))
    if big >= 2 ** 62:
        raise PreconditionError("pair sums may overflow 64-bit values")
    sums = (vals1[:, None] + vals2[None, :]).ravel()
    weights = (cnts1[:, None] * cnts2[None, :]).ravel()
    order = np.argsort(sums, kind="stable")
    sums = sums[order]
    weights = weights[order]
    uniq, starts = np.unique(sums, return_index=True)
    totals = np.add.reduceat(weights, starts)
    return uniq, totals


def moment_by_counting(form: CubicForm, k: int, P: int,
                       budget: Budget | None = None,
                       threads: int = 1) -> MomentResult:
    """Exact integral of |S|^k over [0,1] as an equation count.

    Orthogonality turns the moment into the number of solutions of
    C(X_1)+...+C(X_h) = C(Y_1)+...+C(Y_h), h = k/2, with every block in the
    box [1,P]^dim.  Distributions of partial sums are kept compressed; the
    final square-sum joins two halves meet-in-the-middle style.
    """
    if form.n not in (1, 2):
        raise PreconditionError("moment counting supports 1- and 2-variable forms")
    k = int(k)
    P = int(P)
    if k < 2 or k % 2 != 0:
        raise PreconditionError("moment order k must be a positive even integer")
    if P < 1:
        raise PreconditionError("scale P must be a positive integer")
    budget = budget or Budget()
    h = k // 2
    dim = form.n
    vals, cnts = _compressed_box_values(form, [1] * dim, [P] * dim,
                                        budget, threads)
    note = (f"ordered solutions of C(X_1)+...+C(X_{h}) = "
            f"C(Y_1)+...+C(Y_{h}), X, Y in [1,{P}]^{dim}")

    dists = {1: (vals, cnts)}

    def dist(j: int):
        if j not in dists:
            v1, c1 = dist(j - 1)
            dists[j] = _pair_distribution(v1, c1, vals, cnts, budget)
        return dists[j]

    h1 = h // 2
    h2 = h - h1
    if h1 == 0:
        _, c = dists[1]
        count = int(sum(int(x) * int(x) for x in c.tolist()))
    else:
        v1, c1 = dist(h1)
        v2, c2 = dist(h2)
        dense_length = int(v1.max() + v2.max() - v1.min() - v2.min()) + 1
        if len(v1) * len(v2) <= dense_length:
            # sparse join: materializing the pairs costs less than the
            # dense accumulator over the full value range
            uniq, totals = _pair_distribution(v1, c1, v2, c2, budget)
            count = int(sum(int(x) * int(x) for x in totals.tolist()))
        else:
            count = convolve_square_sum(v1, c1, v2, c2, budget=budget)
    return MomentResult(k=k, P=P, count_value=count, note=note)


# ---------------------------------------------------------------------------
# arc dissection


@dataclass(frozen=True)
class RationalArcPoint:
    """Reduced rational center a/q with offset beta; alpha = a/q + beta mod 1."""

    a: int
    q: int
    beta: Fraction

    def __post_init__(self):
        object.__setattr__(self, "a", int(self.a))
        object.__setattr__(self, "q", int(self.q))
        object.__setattr__(self, "beta", parse_rational(self.beta))
        if self.q < 1 or not 0 <= self.a < self.q:
            raise PreconditionError("need 0 <= a < q")
        if math.gcd(self.a, self.q) != 1:
            raise PreconditionError("a and q must be coprime")

    def to_json(self) -> dict:
        return {"a": self.a, "q": self.q, "beta": encode_rational(self.beta)}


def _integer_root(x: int, r: int) -> int:
    """floor(x ** (1/r)) for nonnegative integer x."""
    if x < 0:
        raise PreconditionError("negative radicand")
    if x == 0:
        return 0
    guess = int(round(x ** (1.0 / r)))
    while guess ** r > x:
        guess -= 1
    while (guess + 1) ** r <= x:
        guess += 1
    return guess


def _convergents(alpha: Fraction):
    """Continued-fraction convergents p/q of alpha in [0,1)."""
    out = []
    num, den = alpha.numerator, alpha.denominator
    h0, h1 = 0, 1            # p_{-2}, p_{-1}
    k0, k1 = 1, 0            # q_{-2}, q_{-1}
    while den:
        a = num // den
        num, den = den, num - a * den
        h0, h1 = h1, a * h1 + h0
        k0, k1 = k1, a * k1 + k0
        out.append((h1, k1))
    return out


def arc_classify(alpha, P: int, delta, budget: Budget | None = None) -> dict:
    """Major/minor dissection test, exact in rational arithmetic.

    Major means some q <= P^delta has |alpha - a/q| <= P^(delta - 3); the
    minimal such q is reported.  Power comparisons are done on integers
    (q <= P^(p/r) iff q^r <= P^p), so no floating point enters the decision.
    A point within the window of a/q = 1 is reported as a = 0, q = 1 with
    negative beta (everything is 1-periodic).
    """
    alpha = parse_rational(alpha)
    if not 0 <= alpha < 1:
        raise PreconditionError("alpha must lie in [0, 1)")
    P = int(P)
    if P < 1:
        raise PreconditionError("scale P must be a positive integer")
    delta = parse_rational(delta)
    if not 0 < delta < 3:
        raise PreconditionError("dissection exponent must lie in (0, 3)")
    budget = budget or Budget()

    p, r = delta.numerator, delta.denominator
    q_cap = _integer_root(P ** p, r)

    def within(diff: Fraction) -> bool:
        # |diff| <= P^((p-3r)/r)  iff  |diff|^r <= P^(p-3r), all integers
        return abs(diff) ** r <= Fraction(P) ** (p - 3 * r)

    def wrap(a: int, q: int):
        beta = alpha - Fraction(a, q)
        if a == q:
            a, beta = 0, alpha - 1
        g = math.gcd(a, q)
        return RationalArcPoint(a // g, q // g, beta)

    candidates = []
    # Any admissible fraction must be a convergent once the window is below
    # 1/(2 q_cap^2): |alpha - a/q| < 1/(2 q^2) forces a convergent.  The
    # test (2 q_cap^2)^r * P^(p-3r) <= 1 is exact in integers.
    complete = q_cap >= 1 and \
        (2 * q_cap ** 2) ** r * Fraction(P) ** (p - 3 * r) <= 1
    if complete:
        seen = [(0, 1), (1, 1)] + _convergents(alpha)
        for a, q in seen:
            if 1 <= q <= q_cap and within(alpha - Fraction(a, q)):
                candidates.append((q, a))
    else:
        budget.spend(max(1, q_cap), "arc candidate scan")
        for q in range(1, q_cap + 1):
            a = int(round(alpha * q))
            if math.gcd(a, q) == 1 and within(alpha - Fraction(a, q)):
                candidates.append((q, a))

    if not candidates:
        return {"type": "minor", "q_cap": q_cap,
                "alpha": encode_rational(alpha)}
    q, a = min(candidates)
    point = wrap(a, q)
    return {"type": "major", "point": point.to_json(), "q_cap": q_cap,
            "alpha": encode_rational(alpha)}


# ---------------------------------------------------------------------------
# the S* approximation


def sstar(a: int, q: int, beta, form: CubicForm, box: BoxRegion,
          resolution: int = 16, budget: Budget | None = None) -> complex:
    """S*(alpha) = q^-1 P S_{a,q} I(beta P^3) for a 1-variable form.

    I is the scaled-variable oscillatory integral over the box interval.
    """
    if form.n != 1:
        raise PreconditionError("the rational model applies to 1-variable sums")
    if box.n != 1:
        raise PreconditionError("box must be 1-dimensional")
    saq = complete_sum(form, a, q, budget=budget)
    gamma = float(beta) * float(box.P) ** 3
    profile = oscillatory_profile(form, [float(box.z[0])], float(box.rho),
                                  gamma, resolution=resolution, budget=budget)
    return (box.P / q) * saq * profile
