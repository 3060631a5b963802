"""Command-line driver: every operation as a subcommand with JSON output.

Exit codes: 0 success, 2 precondition violation (including bad flags),
3 budget exhausted.  Errors go to standard error as JSON objects.  Every
output document embeds a reproducibility manifest: tool version, subcommand,
the full parameter set, digests of file inputs, wall time, and budget
consumption.
"""

import argparse
import hashlib
import json
import math
import re
import sys
import time
from fractions import Fraction

from . import __version__
from .augmented import AugmentedExponent, encode_rational, parse_rational
from .bounds import (check_conditions, lemma6_swap_error, lemma7_bound,
                     lemma7_terms, lemma8_params, remark14_bound,
                     remark14_terms)
from .certify import certify_case, verify_certificate
from .errors import (Budget, BudgetExceededError, CubearcError,
                     PreconditionError)
from .expsums import (BoxRegion, arc_classify, complete_sum,
                      moment_by_counting, singular_integral, singular_series,
                      weyl_sum)
from .forms import CubicForm, make_mordell_form, split_components
from .local import build_descent_certificate, count_zeros_mod
from .polytope import lemma9_details, lemma9_exponent, parse_region
from .search import count_zeros_box, find_point

_RATIONAL_RE = re.compile(r"^[+-]?\d+(/[1-9]\d*)?$")


def _rational(text: str) -> Fraction:
    """Exact rational from "p/q" or integer text; floating input refused."""
    text = text.strip()
    if not _RATIONAL_RE.match(text):
        raise argparse.ArgumentTypeError(
            f"expected an integer or p/q rational, got {text!r} "
            "(floating point is refused for exact parameters)")
    return Fraction(text)


def _real(text: str) -> Fraction:
    """Exact rational from "p/q" or decimal text ("0.4142135" stays exact)."""
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"cannot parse number {text!r}")


def _rational_list(text: str):
    return tuple(_rational(part) for part in text.split(","))


def _int_list(text: str):
    try:
        return tuple(int(part) for part in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _blocks(text: str):
    try:
        return tuple(tuple(int(v) for v in grp.split(","))
                     for grp in text.split("/"))
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected blocks like 1,2,3/4,5,6 got {text!r}")


def _sig15(x: float) -> float:
    if not math.isfinite(x):
        return x
    return float(f"{x:.15g}")


def _encode(obj):
    """Recursive JSON encoding: exact rationals, exponents, complex pairs."""
    if isinstance(obj, Fraction):
        return encode_rational(obj)
    if isinstance(obj, AugmentedExponent):
        return _encode(obj.to_json())
    if isinstance(obj, complex):
        return {"re": _sig15(obj.real), "im": _sig15(obj.imag)}
    if isinstance(obj, float):
        return _sig15(obj)
    if isinstance(obj, bool) or isinstance(obj, int) or obj is None:
        return obj
    if isinstance(obj, str):
        return obj
    if isinstance(obj, dict):
        return {str(k): _encode(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_encode(v) for v in obj]
    if hasattr(obj, "to_json"):
        return _encode(obj.to_json())
    if hasattr(obj, "item"):
        return _encode(obj.item())
    return str(obj)


class _Parser(argparse.ArgumentParser):
    """argparse that raises instead of exiting, so errors become JSON."""

    def error(self, message):
        raise PreconditionError(message)


def _digest_file(path: str, digests: dict) -> str:
    with open(path, "rb") as fh:
        data = fh.read()
    digests[path] = hashlib.sha256(data).hexdigest()
    return data.decode("utf-8")


def _load_form(path: str, digests: dict) -> CubicForm:
    try:
        text = _digest_file(path, digests)
    except OSError as exc:
        raise PreconditionError(f"cannot read form file {path}: {exc}")
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise PreconditionError(f"form file {path} is not valid JSON: {exc}")
    return CubicForm.from_json(obj)


def _load_center(text: str, digests: dict):
    """Box center: either a comma list of rationals or a JSON file."""
    if text.endswith(".json"):
        try:
            raw = _digest_file(text, digests)
        except OSError as exc:
            raise PreconditionError(f"cannot read center file {text}: {exc}")
        try:
            obj = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise PreconditionError(f"center file {text} is not valid JSON: {exc}")
        if isinstance(obj, dict):
            return tuple(parse_rational(c) for c in obj["z"]), obj.get("rho")
        return tuple(parse_rational(c) for c in obj), None
    return tuple(parse_rational(p) for p in text.split(",")), None


def _box_from_args(args, digests) -> BoxRegion:
    center, _ = _load_center(args.center, digests)
    return BoxRegion(center, args.rho, args.P)


# ---------------------------------------------------------------------------
# subcommand handlers: each returns the result payload (manifest added later)


def _cmd_params(args, budget, digests):
    params = lemma8_params(args.n, args.t, args.lam)
    out = params.to_json()
    out["arc_constant"] = encode_rational(params.arc_constant)
    return {"stage_params": out}


def _cmd_check(args, budget, digests):
    params = lemma8_params(args.n, args.t, args.lam)
    report = check_conditions(params, args.v)
    out = params.to_json()
    out["arc_constant"] = encode_rational(params.arc_constant)
    return {
        "stage_params": out,
        "conditions": _encode(report.to_json()),
        "all_hold_part_i": report.all_hold(part_ii=False),
        "all_hold_part_ii": report.all_hold(part_ii=True)
        and params.xi <= 0,
    }


def _cmd_bound_lemma7(args, budget, digests):
    A, B, C = args.arc
    if args.variant == "remark14":
        terms = remark14_terms(args.n, args.v, args.t, A, B, C)
        bound = remark14_bound(args.n, args.v, args.t, A, B, C)
    else:
        terms = lemma7_terms(args.n, args.v, args.t, A, B, C)
        bound = lemma7_bound(args.n, args.v, args.t, A, B, C)
    return {"variant": args.variant, "arc": _encode(list(args.arc)),
            "terms": _encode(terms), "bound": _encode(bound)}


def _cmd_optimize_lemma9(args, budget, digests):
    region = parse_region(args.region, name=args.name)
    details = lemma9_details(region)
    return {"region": _encode(region), "details": _encode(details),
            "exponent": _encode(lemma9_exponent(region))}


def _cmd_certify(args, budget, digests):
    if args.verify:
        raw = _digest_file(args.verify, digests)
        doc = json.loads(raw)
        cert = doc.get("certificate", doc)
        report = verify_certificate(cert)
        return {"certificate": cert, "verification": _encode(report)}
    cert = certify_case(args.case)
    report = verify_certificate(cert)
    return {"certificate": cert, "verification": _encode(report)}


def _cmd_sum(args, budget, digests):
    form = _load_form(args.form, digests)
    box = _box_from_args(args, digests)
    value = weyl_sum(form, box, args.alpha, budget=budget,
                     threads=args.threads)
    return {"sum": _encode(value), "alpha": _encode(args.alpha),
            "box": _encode(box), "lattice_points": box.lattice_count()}


def _cmd_complete_sum(args, budget, digests):
    form = _load_form(args.form, digests)
    value = complete_sum(form, args.a, args.q, budget=budget,
                         threads=args.threads)
    return {"value": _encode(value), "a": args.a, "q": args.q}


def _cmd_sing_series(args, budget, digests):
    form = _load_form(args.form, digests)
    report = singular_series(form, args.qmax, budget=budget,
                             threads=args.threads)
    return {"singular_series": _encode(report)}


def _cmd_sing_integral(args, budget, digests):
    form = _load_form(args.form, digests)
    center, file_rho = _load_center(args.center, digests)
    rho = args.rho if args.rho is not None else file_rho
    if rho is None:
        raise PreconditionError(
            "box radius required: pass --rho or include it in the center file")
    report = singular_integral(form, center, parse_rational(rho),
                               b_max=args.bmax, resolution=args.resolution,
                               seed=args.seed, n_samples=args.samples,
                               eta=args.eta, budget=budget)
    return {"singular_integral": _encode(report)}


def _cmd_moment(args, budget, digests):
    if (args.form is None) == (args.coeff is None):
        raise PreconditionError("pass exactly one of --form or --coeff")
    if args.form:
        form = _load_form(args.form, digests)
    else:
        form = CubicForm.diagonal(list(args.coeff))
    result = moment_by_counting(form, args.k, args.P, budget=budget,
                                threads=args.threads)
    return {"moment": _encode(result)}


def _cmd_classify(args, budget, digests):
    report = arc_classify(args.alpha, args.P, args.delta, budget=budget)
    return {"classification": _encode(report)}


def _cmd_local(args, budget, digests):
    form = _load_form(args.form, digests)
    if args.certify_insoluble:
        if args.blocks is None:
            raise PreconditionError("--certify-insoluble requires --blocks")
        cert = build_descent_certificate(form, args.p, args.blocks)
        return {"descent_certificate": _encode(cert)}
    count = count_zeros_mod(form, args.p, args.k, budget=budget)
    return {"p": args.p, "k": args.k, "count": count}


def _cmd_count(args, budget, digests):
    form = _load_form(args.form, digests)
    box = _box_from_args(args, digests)
    report = count_zeros_box(form, box, method=args.method, budget=budget,
                             threads=args.threads)
    return {"count_report": _encode(report)}


def _cmd_search(args, budget, digests):
    form = _load_form(args.form, digests)
    point = find_point(form, args.height, budget=budget,
                       threads=args.threads)
    found = point is not None
    return {"height_max": args.height, "found": found,
            "point": list(point) if found else None,
            "sup_norm": max(abs(c) for c in point) if found else None}


# ---------------------------------------------------------------------------
# embedded golden-value suite


def _golden_suite():
    F = Fraction
    mordell = make_mordell_form()

    def stage_values(n, t, lam):
        p = lemma8_params(F(n), F(t), F(lam))
        return p.xi, p.rho2, p.pi2

    def cert_outputs(case):
        cert = certify_case(case)
        verify_certificate(cert)
        by_id = {s["id"]: s for s in cert["steps"]}
        return cert, by_id

    def check_128():
        cert, by_id = cert_outputs("128")
        swap = next(s for s in cert["steps"] if s["rule"] == "lemma6-swap")
        closure = next(s for s in cert["steps"] if s["rule"] == "lemma7")
        return (cert["verdict"] is True
                and AugmentedExponent.from_json(swap["output"]).r == F(21, 40)
                and AugmentedExponent.from_json(closure["output"]).r == F(127, 16))

    def check_119():
        cert, by_id = cert_outputs("119")
        nine = [s for s in cert["steps"] if s["rule"] == "lemma9"]
        closure = next(s for s in cert["steps"] if s["rule"] == "remark14")
        ladder = [AugmentedExponent.from_json(s["inputs"]["t"]).r
                  for s in cert["steps"] if s["rule"].startswith("lemma8")]
        out = AugmentedExponent.from_json(closure["output"])
        return (cert["verdict"] is True
                and [AugmentedExponent.from_json(s["output"]).r for s in nine]
                == [F(539, 310), F(1)]
                and ladder == [F(1), F(539, 620)]
                and (out.r, out.mD) == (F(8), F(-1, 8)))

    n1 = CubicForm(3, {(1, 1, 1): 1, (2, 2, 2): 2, (3, 3, 3): 4, (1, 2, 3): 1})

    return [
        ("mordell-evaluate-e4",
         lambda: mordell.evaluate((0, 0, 0, 1, 0, 0, 0, 0, 0)) == 7),
        ("mordell-split-blocks",
         lambda: split_components(mordell).blocks
         == ((1, 2, 3), (4, 5, 6), (7, 8, 9))),
        ("mordell-monomial-count", lambda: len(mordell.coeffs) == 12),
        ("mordell-x5-cube-coefficient",
         lambda: mordell.coeffs.get((5, 5, 5)) == 14),
        ("local-counterexample-block",
         lambda: count_zeros_mod(n1, 7, 1) == 1),
        ("mordell-descent-certificate",
         lambda: build_descent_certificate(
             mordell, 7, ((1, 2, 3), (4, 5, 6), (7, 8, 9))).p == 7),
        ("stage-params-n8-t7/4",
         lambda: stage_values(8, F(7, 4), 8) == (F(11, 20), F(0), F(5, 2))),
        ("stage-params-n9-t1",
         lambda: stage_values(9, 1, 8) == (F(25, 31), F(1, 5), F(11, 5))),
        ("stage-params-n9-t539/620",
         lambda: (lambda xi, r2, p2: xi == F(1145, 1922)
                  and p2 == F(1867, 775))(*stage_values(9, F(539, 620), 8))),
        ("stage-params-n8-t3/2",
         lambda: stage_values(8, F(3, 2), 8) == (F(0), F(0), F(3))),
        ("closure-bound-127/16",
         lambda: lemma7_bound(10, 1, F(21, 40), F(11, 20), 0, F(1, 2))
         == AugmentedExponent(F(127, 16), F(0), F(0), F(0))),
        ("closure-bound-8-minus-delta/8",
         lambda: remark14_bound(9, 2, F(1, 2), F(1145, 1922), F(1, 5),
                                F(458, 775))
         == AugmentedExponent(F(8), F(-1, 8), F(0), F(0))),
        ("polytope-outer-539/310",
         lambda: lemma9_exponent(
             parse_region("a<=25/31,b>=a/5+11/5")).r == F(539, 310)),
        ("polytope-inner-1",
         lambda: lemma9_exponent(
             parse_region("a<=1145/1922,b>=a/5+1867/775")).r == F(1)),
        ("swap-error-21/40",
         lambda: lemma6_swap_error(F(11, 20), 0, F(1, 2)).r == F(21, 40)),
        ("certificate-case-128", check_128),
        ("certificate-case-119", check_119),
    ]


def _cmd_selftest(args, budget, digests):
    results = []
    failures = 0
    for name, fn in _golden_suite():
        try:
            ok = bool(fn())
            detail = None
        except CubearcError as exc:
            ok = False
            detail = exc.payload()
        if not ok:
            failures += 1
        entry = {"name": name, "ok": ok}
        if detail is not None:
            entry["detail"] = detail
        results.append(entry)
    if failures:
        raise PreconditionError(
            f"selftest failed {failures} of {len(results)} golden checks: "
            + json.dumps(results))
    return {"selftest": {"checks": results, "passed": len(results),
                         "failed": 0}}


# ---------------------------------------------------------------------------
# parser assembly


_HANDLERS = {
    "params": _cmd_params,
    "check": _cmd_check,
    "bound-lemma7": _cmd_bound_lemma7,
    "optimize-lemma9": _cmd_optimize_lemma9,
    "certify": _cmd_certify,
    "sum": _cmd_sum,
    "complete-sum": _cmd_complete_sum,
    "sing-series": _cmd_sing_series,
    "sing-integral": _cmd_sing_integral,
    "moment": _cmd_moment,
    "classify": _cmd_classify,
    "local": _cmd_local,
    "count": _cmd_count,
    "search": _cmd_search,
    "selftest": _cmd_selftest,
}


def _build_parser() -> _Parser:
    parser = _Parser(prog="cubearc", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    subs = parser.add_subparsers(dest="subcommand", required=True)

    def sub(name, **kw):
        p = subs.add_parser(name, **kw)
        p.add_argument("--out", help="write the JSON document to this file")
        p.add_argument("--budget", type=int,
                       help="evaluation budget (default from CUBEARC_BUDGET)")
        p.add_argument("--threads", type=int, default=1)
        return p

    p = sub("params", help="stage constants for one (n, t, lambda)")
    p.add_argument("--n", type=_rational, required=True)
    p.add_argument("--t", type=_rational, required=True)
    p.add_argument("--lambda", dest="lam", type=_rational, required=True)

    p = sub("check", help="the seven admissibility conditions")
    p.add_argument("--n", type=_rational, required=True)
    p.add_argument("--v", type=_rational, required=True)
    p.add_argument("--t", type=_rational, required=True)
    p.add_argument("--lambda", dest="lam", type=_rational, required=True)

    p = sub("bound-lemma7", help="minor-arc closure bound for an arc family")
    p.add_argument("--n", type=_rational, required=True)
    p.add_argument("--v", type=_rational, required=True)
    p.add_argument("--t", type=_rational, required=True)
    p.add_argument("--arc", type=_rational_list, required=True,
                   metavar="A,B,C")
    p.add_argument("--variant", choices=("lemma7", "remark14"),
                   default="lemma7")

    p = sub("optimize-lemma9", help="supremum of the two-term exponent "
                                    "polytope objective")
    p.add_argument("--region", required=True,
                   metavar="a<=p/q,b>=a/5+p/q")
    p.add_argument("--name", default="")

    p = sub("certify", help="build or re-verify a case certificate")
    p.add_argument("--case", choices=("128", "119"))
    p.add_argument("--verify", metavar="FILE",
                   help="re-verify a serialized certificate instead")

    p = sub("sum", help="cubic exponential sum over a box")
    p.add_argument("--form", required=True)
    p.add_argument("--alpha", type=_real, required=True)
    p.add_argument("--P", type=int, required=True)
    p.add_argument("--rho", type=_rational, required=True)
    p.add_argument("--center", required=True)

    p = sub("complete-sum", help="complete sum to modulus q")
    p.add_argument("--form", required=True)
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--q", type=int, required=True)

    p = sub("sing-series", help="singular series partial sums")
    p.add_argument("--form", required=True)
    p.add_argument("--qmax", type=int, required=True)

    p = sub("sing-integral", help="archimedean density estimators")
    p.add_argument("--form", required=True)
    p.add_argument("--center", required=True,
                   help="comma list of rationals or a JSON file")
    p.add_argument("--rho", type=_rational)
    p.add_argument("--bmax", type=float, default=32.0)
    p.add_argument("--resolution", type=int, default=12)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--samples", type=int, default=200_000)
    p.add_argument("--eta", type=float)

    p = sub("moment", help="exact even moment of |S| by counting")
    p.add_argument("--form")
    p.add_argument("--coeff", type=_int_list,
                   help="diagonal coefficients, e.g. 1 or 1,2")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--P", type=int, required=True)

    p = sub("classify", help="major/minor arc membership of a real number")
    p.add_argument("--alpha", type=_real, required=True)
    p.add_argument("--P", type=int, required=True)
    p.add_argument("--Delta", dest="delta", type=_rational, required=True)

    p = sub("local", help="solubility counts and descent certificates")
    p.add_argument("--form", required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--certify-insoluble", action="store_true")
    p.add_argument("--blocks", type=_blocks, metavar="1,2,3/4,5,6/7,8,9")

    p = sub("count", help="exact zero count over a box lattice")
    p.add_argument("--form", required=True)
    p.add_argument("--P", type=int, required=True)
    p.add_argument("--rho", type=_rational, required=True)
    p.add_argument("--center", required=True)
    p.add_argument("--method", choices=("auto", "direct", "meet-in-middle"),
                   default="auto")

    p = sub("search", help="smallest primitive zero up to a height bound")
    p.add_argument("--form", required=True)
    p.add_argument("--height", type=int, required=True)

    sub("selftest", help="run the embedded golden-value suite")
    return parser


def _manifest(args, digests, budget, started) -> dict:
    params = {}
    for key, value in sorted(vars(args).items()):
        if key in ("subcommand", "out"):
            continue
        params[key] = _encode(value)
    return {
        "tool_version": __version__,
        "subcommand": args.subcommand,
        "parameters": params,
        "input_digests": dict(sorted(digests.items())),
        "wall_time_s": _sig15(time.perf_counter() - started),
        "budget": budget.snapshot(),
    }


def main(argv=None) -> int:
    started = time.perf_counter()
    digests: dict = {}
    try:
        parser = _build_parser()
        args = parser.parse_args(argv)
        if args.subcommand == "certify" and bool(args.case) == bool(args.verify):
            raise PreconditionError("pass exactly one of --case or --verify")
        budget_arg = getattr(args, "budget", None)
        budget = Budget(eval_limit=budget_arg) if budget_arg else Budget()
        handler = _HANDLERS[args.subcommand]
        payload = handler(args, budget, digests)
        payload["manifest"] = _manifest(args, digests, budget, started)
        text = json.dumps(payload, indent=2, sort_keys=True)
        out = getattr(args, "out", None)
        if out:
            with open(out, "w", encoding="utf-8") as fh:
                fh.write(text + "\n")
        else:
            sys.stdout.write(text + "\n")
        return 0
    except BudgetExceededError as exc:
        sys.stderr.write(json.dumps(exc.payload()) + "\n")
        return 3
    except CubearcError as exc:
        sys.stderr.write(json.dumps(exc.payload()) + "\n")
        return 2
    except (TypeError, ValueError) as exc:
        sys.stderr.write(json.dumps(
            {"code": "precondition", "message": str(exc)}) + "\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
