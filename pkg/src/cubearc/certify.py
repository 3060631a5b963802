"""End-to-end exponent certificates for the two split-form case analyses.

A certificate is an ordered list of steps.  Each step applies one rule from a
fixed vocabulary (moment bounds, the Holder combination, the stage-parameter
little-o results, the arc-family closures, the quartic-moment optimizer, the
model-swap) to explicit inputs and records:

- output: the exact exponent produced by the rule at slack-free inputs; this
  is the number the headline constants pin down, bit for bit;
- slack:  the formal-infinitesimal widening (delta from arc inclusion, eps
  from dyadic summation and divisor bounds), kept separate so `output` stays
  clean while the verdict uses output + slack;
- rule-specific evidence (stage parameters, condition reports, the winning
  polytope vertex, ...).

The verdict is true iff every minor-arc piece is certified o(P^target):
little-o steps must pass their condition suites and closure steps must have
output + slack < target in the augmented order.  `verify_certificate`
recomputes every stored field from the inputs and demands bit-for-bit
equality, so a certificate round-trips through JSON idempotently.

Incoming slack on a t-parameter is absorbable by a little-o step only in the
standard analytic convention: strict conditions must hold with positive
rational margin (then any infinitesimal perturbation is harmless), and a
non-strict condition that is exactly tight tolerates eps-slack (a freely
shrinkable parameter) but not delta- or Delta-slack.  The verifier enforces
exactly that.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .augmented import (AugmentedExponent, DELTA_LOW, EPS, as_exponent,
                        encode_rational, parse_rational)
from .bounds import (check_conditions, hua_factor_exponent, lemma6_swap_error,
                     lemma7_bound, lemma8_params, remark14_bound,
                     sstar_factor_exponent, wooley_factor_exponent)
from .errors import PreconditionError, VerificationError
from .polytope import ExponentPolytope, arc_region, lemma9_details, lemma9_exponent

SCHEMA = "cubearc-certificate/1"

RULES = ("hua", "wooley", "sstar-moment", "holder", "lemma6-swap",
         "lemma8-i", "lemma8-ii", "lemma9", "lemma7", "remark14")


def _exp(obj) -> AugmentedExponent:
    return AugmentedExponent.from_json(obj)


def _pure(e: AugmentedExponent) -> AugmentedExponent:
    return AugmentedExponent(e.r)


def _rational_only(e: AugmentedExponent, what: str) -> Fraction:
    if not e.is_rational():
        raise VerificationError(f"{what} must be a plain rational exponent")
    return e.r


def _recompute(rule: str, inputs: dict) -> dict:
    """Derive every stored field of a step from its inputs."""
    if rule == "hua":
        j = int(inputs["j"])
        if int(inputs["k"]) != 2 ** j:
            raise VerificationError("moment power k must be 2^j for this rule")
        return {"output": AugmentedExponent(hua_factor_exponent(j)).to_json(),
                "slack": EPS.to_json()}

    if rule == "wooley":
        j = int(inputs["j"])
        if int(inputs["k"]) != 2 ** (j - 1):
            raise VerificationError("moment power k must be 2^(j-1) for this rule")
        return {"output": AugmentedExponent(wooley_factor_exponent(j)).to_json(),
                "slack": EPS.to_json()}

    if rule == "sstar-moment":
        k = parse_rational(inputs["k"])
        return {"output": AugmentedExponent(sstar_factor_exponent(k)).to_json(),
                "slack": EPS.to_json()}

    if rule == "holder":
        base = _exp(inputs["base_t"])
        total_weight = Fraction(0)
        out = base
        slack = EPS  # the P^(t+eps) prefactor of the combined moment
        for term in inputs["terms"]:
            w = parse_rational(term["weight"])
            if w <= 0:
                raise VerificationError("weights must be positive")
            total_weight += 1 / w
            if term.get("exponent") is not None:
                out = out + _exp(term["exponent"])
                slack = slack + _exp(term.get("slack", AugmentedExponent(0).to_json()))
        if total_weight != 1:
            raise VerificationError(
                f"reciprocal weights must sum to 1 exactly, got {total_weight}")
        return {"output": out.to_json(), "slack": slack.to_json()}

    if rule == "lemma6-swap":
        A = _exp(inputs["A"])
        B = parse_rational(inputs["B"])
        C = _exp(inputs["C"])
        full = lemma6_swap_error(A, B, C)
        pure = lemma6_swap_error(_pure(A), B, _pure(C))
        return {"output": pure.to_json(),
                "slack": (full - pure + EPS).to_json()}

    if rule in ("lemma8-i", "lemma8-ii"):
        n = parse_rational(inputs["n"])
        v = parse_rational(inputs["v"])
        lam = parse_rational(inputs["lam"])
        t = parse_rational(inputs["t"])
        t_slack = _exp(inputs.get("t_slack", AugmentedExponent(0).to_json()))
        if t_slack.r != 0:
            raise VerificationError("t_slack must be purely infinitesimal")
        params = lemma8_params(n, t, lam)
        report = check_conditions(params, v)
        part_ii = rule == "lemma8-ii"
        failing = report.failing(part_ii=part_ii)
        if failing:
            raise VerificationError(
                "condition suite failed: " +
                "; ".join(f"#{e.index} {e.formula} = {e.value}" for e in failing))
        if part_ii and params.xi > 0:
            raise VerificationError(
                f"full-minor-arc variant needs xi <= 0, got {params.xi}")
        # Slack absorption: tight non-strict conditions tolerate eps only.
        if t_slack.mD != 0:
            raise VerificationError("t_slack may not carry the dissection width")
        for entry in report.entries:
            if (entry.scope == "both" or part_ii) and entry.relation == ">=" \
                    and entry.value == 0 and t_slack.md != 0:
                raise VerificationError(
                    f"condition #{entry.index} is tight; delta-slack on t "
                    "cannot be absorbed")
        arc = {
            "A": (AugmentedExponent(params.xi)
                  + DELTA_LOW.scale(params.arc_constant)).to_json(),
            "B": encode_rational(params.rho2),
            "C": (AugmentedExponent(3 - params.pi2) + DELTA_LOW).to_json(),
        }
        return {"output": AugmentedExponent(lam).to_json(),
                "slack": AugmentedExponent(0).to_json(),
                "params": params.to_json(),
                "conditions": report.to_json(),
                "arc": arc}

    if rule == "lemma9":
        region = ExponentPolytope.from_json(inputs["region"])
        k = parse_rational(inputs["moment_k"])
        details = lemma9_details(region)
        full = details["value"]
        pure_region = ExponentPolytope(
            tuple(type(iq)(iq.ca, iq.cb, _pure(iq.bound))
                  for iq in region.inequalities),
            region.name)
        pure = lemma9_exponent(pure_region)
        slack = full - pure + EPS
        return {"output": pure.to_json(),
                "slack": slack.to_json(),
                "supremum_term": details["term"],
                "vertex": details["vertex"],
                "factor_exponent": pure.scale(1 / k).to_json(),
                "factor_slack": slack.scale(1 / k).to_json()}

    if rule in ("lemma7", "remark14"):
        n = parse_rational(inputs["n"])
        v = parse_rational(inputs["v"])
        t_val = _exp(inputs["t"]["value"])
        t_slack = _exp(inputs["t"].get("slack", AugmentedExponent(0).to_json()))
        A = _exp(inputs["arc"]["A"])
        B = parse_rational(inputs["arc"]["B"])
        C = _exp(inputs["arc"]["C"])
        evaluator = lemma7_bound if rule == "lemma7" else remark14_bound
        full = evaluator(n, v, t_val + t_slack, A, B, C)
        pure = evaluator(n, v, _pure(t_val), _pure(A), B, _pure(C))
        return {"output": pure.to_json(),
                "slack": (full - pure + EPS).to_json()}

    raise VerificationError(f"unknown rule {rule!r}")


def _canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _check_equal(step_id, field, stored, computed):
    if _canonical(stored) != _canonical(computed):
        raise VerificationError(
            f"step {step_id}: stored {field} {_canonical(stored)} does not "
            f"match recomputed {_canonical(computed)}")


def verify_certificate(cert: dict) -> dict:
    """Recompute every step and the verdict; bit-for-bit or it fails.

    Returns a report {"verdict": bool, "steps": n, "closures": [...]}.
    """
    if cert.get("schema") != SCHEMA:
        raise VerificationError(f"unsupported schema {cert.get('schema')!r}")
    target = _exp(cert["target"])
    by_id = {}
    closures = []
    for step in cert["steps"]:
        sid = step.get("id")
        if not sid or sid in by_id:
            raise VerificationError(f"missing or duplicate step id {sid!r}")
        rule = step.get("rule")
        if rule not in RULES:
            raise VerificationError(f"step {sid}: unknown rule {rule!r}")
        computed = _recompute(rule, step["inputs"])
        for field, value in computed.items():
            _check_equal(sid, field, step.get(field), value)
        extra = set(step) - set(computed) - {"id", "rule", "inputs",
                                             "conclusion", "covers"}
        if extra:
            raise VerificationError(f"step {sid}: unexpected fields {sorted(extra)}")
        _verify_references(step, by_id)
        by_id[sid] = step

        if step.get("conclusion") == "closure":
            effective = _exp(step["output"]) + _exp(step["slack"])
            if not effective < target:
                raise VerificationError(
                    f"step {sid}: closure exponent {effective} is not below "
                    f"the target {target}")
            closures.append({"step": sid, "effective": effective.to_json()})
        elif step.get("conclusion") == "little-o":
            closures.append({"step": sid, "effective": "little-o"})

    if cert.get("verdict") is not True:
        raise VerificationError("certificate verdict must be true")
    if not closures:
        raise VerificationError("certificate concludes nothing")
    return {"verdict": True, "steps": len(by_id), "closures": closures}


def _verify_references(step, by_id):
    """Embedded values quoted from earlier steps must match them exactly."""

    def ref(step_id):
        if step_id not in by_id:
            raise VerificationError(
                f"step {step['id']}: reference to unknown step {step_id!r}")
        return by_id[step_id]

    rule = step["rule"]
    if rule == "holder":
        for term in step["inputs"]["terms"]:
            src = term.get("from")
            if src is None:
                continue
            source = ref(src)
            if source["rule"] == "lemma9":
                expect = (source["factor_exponent"], source["factor_slack"])
            else:
                expect = (source["output"], source["slack"])
            _check_equal(step["id"], f"term from {src} exponent",
                         term.get("exponent"), expect[0])
            _check_equal(step["id"], f"term from {src} slack",
                         term.get("slack"), expect[1])
    elif rule == "lemma6-swap":
        arc_src = step["inputs"].get("arc_from")
        if arc_src is not None:
            source = ref(arc_src)
            quoted = {"A": step["inputs"]["A"], "B": step["inputs"]["B"],
                      "C": step["inputs"]["C"]}
            _check_equal(step["id"], "arc quoted from " + arc_src,
                         quoted, source["arc"])
    elif rule in ("lemma8-i", "lemma8-ii"):
        src = step["inputs"].get("t_from")
        if src is not None:
            source = ref(src)
            out = _exp(source["output"])
            _check_equal(step["id"], "t quoted from " + src,
                         step["inputs"]["t"], encode_rational(
                             _rational_only(out, "t parameter")))
            _check_equal(step["id"], "t_slack quoted from " + src,
                         step["inputs"]["t_slack"], source["slack"])
    elif rule in ("lemma7", "remark14"):
        src = step["inputs"]["t"].get("from")
        if src is not None:
            source = ref(src)
            _check_equal(step["id"], "t value quoted from " + src,
                         step["inputs"]["t"]["value"], source["output"])
            _check_equal(step["id"], "t slack quoted from " + src,
                         step["inputs"]["t"]["slack"], source["slack"])
        arc_src = step["inputs"].get("arc_from")
        if arc_src is not None:
            source = ref(arc_src)
            _check_equal(step["id"], "arc quoted from " + arc_src,
                         step["inputs"]["arc"], source["arc"])
    elif rule == "lemma9":
        arc_src = step["inputs"].get("arc_from")
        if arc_src is not None:
            source = ref(arc_src)
            arc = source["arc"]
            expected = arc_region(_exp(arc["A"]), parse_rational(arc["B"]),
                                  _exp(arc["C"]),
                                  name=step["inputs"]["region"].get("name", ""))
            _check_equal(step["id"], "region derived from " + arc_src,
                         step["inputs"]["region"], expected.to_json())


def _step(sid, rule, inputs, conclusion=None, covers=None) -> dict:
    body = {"id": sid, "rule": rule, "inputs": inputs}
    body.update(_recompute(rule, inputs))
    if conclusion:
        body["conclusion"] = conclusion
    if covers:
        body["covers"] = covers
    return body


def _zero():
    return AugmentedExponent(0).to_json()


def build_case_128() -> dict:
    """(1,2,8) split: one linear form factor swapped for its rational model."""
    s1 = _step("s1", "hua", {"factor": "S1", "j": 2, "k": 4, "weighted": False})
    s2 = _step("s2", "wooley", {"factor": "S2", "j": 3, "k": 4})
    s3 = _step("s3", "holder", {
        "base_t": _zero(),
        "terms": [
            {"from": "s1", "exponent": s1["output"], "slack": s1["slack"], "weight": 4},
            {"from": "s2", "exponent": s2["output"], "slack": s2["slack"], "weight": 4},
            {"carried": "S3", "weight": 2},
        ]})
    s4 = _step("s4", "lemma8-i", {
        "n": 8, "v": 2, "lam": 8,
        "t": encode_rational(_exp(s3["output"]).r), "t_slack": s3["slack"],
        "t_from": "s3"},
        conclusion="little-o", covers="complement of the retained arc family")
    s5 = _step("s5", "lemma6-swap", {
        "A": s4["arc"]["A"], "B": s4["arc"]["B"], "C": s4["arc"]["C"],
        "arc_from": "s4", "factor": "S1"})
    s6 = _step("s6", "sstar-moment", {"factor": "S1*", "k": 4})
    s7 = _step("s7", "holder", {
        "base_t": _zero(),
        "terms": [
            {"from": "s6", "exponent": s6["output"], "slack": s6["slack"], "weight": 4},
            {"from": "s2", "exponent": s2["output"], "slack": s2["slack"], "weight": 4},
            {"carried": "S3", "weight": 2},
        ]})
    s8 = _step("s8", "lemma8-ii", {
        "n": 8, "v": 2, "lam": 8,
        "t": encode_rational(_exp(s7["output"]).r), "t_slack": s7["slack"],
        "t_from": "s7"},
        conclusion="little-o", covers="model-swapped integrand on all minor arcs")
    s9 = _step("s9", "lemma7", {
        "n": 10, "v": 1,
        "t": {"value": s5["output"], "slack": s5["slack"], "from": "s5"},
        "arc": {"A": s4["arc"]["A"], "B": s4["arc"]["B"], "C": s4["arc"]["C"]},
        "arc_from": "s4", "factor": "S2*S3 as a 10-variable sum"},
        conclusion="closure", covers="swap-error term on the retained arc family")
    cert = {
        "schema": SCHEMA,
        "case": "128",
        "split": [1, 2, 8],
        "target": AugmentedExponent(8).to_json(),
        "steps": [s1, s2, s3, s4, s5, s6, s7, s8, s9],
        "verdict": True,
    }
    verify_certificate(cert)
    return cert


def build_case_119() -> dict:
    """(1,1,9) split: weighted linear-form sums and two nested arc families."""
    s1 = _step("s1", "hua", {"factor": "T1", "j": 2, "k": 4, "weighted": True})
    s2 = _step("s2", "hua", {"factor": "T2", "j": 2, "k": 4, "weighted": True})
    s3 = _step("s3", "holder", {
        "base_t": _zero(),
        "terms": [
            {"from": "s1", "exponent": s1["output"], "slack": s1["slack"], "weight": 4},
            {"from": "s2", "exponent": s2["output"], "slack": s2["slack"], "weight": 4},
            {"carried": "S3", "weight": 2},
        ]})
    s4 = _step("s4", "lemma8-i", {
        "n": 9, "v": 2, "lam": 8,
        "t": encode_rational(_exp(s3["output"]).r), "t_slack": s3["slack"],
        "t_from": "s3"},
        conclusion="little-o", covers="complement of the outer arc family")
    region_a = arc_region(_exp(s4["arc"]["A"]), parse_rational(s4["arc"]["B"]),
                          _exp(s4["arc"]["C"]), name="outer")
    s5 = _step("s5", "lemma9", {
        "region": region_a.to_json(), "moment_k": 4, "arc_from": "s4",
        "factor": "T1 and T2"})
    s6 = _step("s6", "holder", {
        "base_t": _zero(),
        "terms": [
            {"from": "s5", "exponent": s5["factor_exponent"],
             "slack": s5["factor_slack"], "weight": 4},
            {"from": "s5", "exponent": s5["factor_exponent"],
             "slack": s5["factor_slack"], "weight": 4},
            {"carried": "S3", "weight": 2},
        ]})
    s7 = _step("s7", "lemma8-i", {
        "n": 9, "v": 2, "lam": 8,
        "t": encode_rational(_exp(s6["output"]).r), "t_slack": s6["slack"],
        "t_from": "s6"},
        conclusion="little-o", covers="outer family minus the inner family")
    region_b = arc_region(_exp(s7["arc"]["A"]), parse_rational(s7["arc"]["B"]),
                          _exp(s7["arc"]["C"]), name="inner")
    s8 = _step("s8", "lemma9", {
        "region": region_b.to_json(), "moment_k": 4, "arc_from": "s7",
        "factor": "T1 and T2"})
    s9 = _step("s9", "holder", {
        "base_t": _zero(),
        "terms": [
            {"from": "s8", "exponent": s8["factor_exponent"],
             "slack": s8["factor_slack"], "weight": 4},
            {"from": "s8", "exponent": s8["factor_exponent"],
             "slack": s8["factor_slack"], "weight": 4},
            {"carried": "S3", "weight": 2},
        ]})
    s10 = _step("s10", "remark14", {
        "n": 9, "v": 2,
        "t": {"value": s9["output"], "slack": s9["slack"], "from": "s9"},
        "arc": {"A": s7["arc"]["A"], "B": s7["arc"]["B"], "C": s7["arc"]["C"]},
        "arc_from": "s7", "factor": "S3 on the inner family"},
        conclusion="closure", covers="inner arc family")
    cert = {
        "schema": SCHEMA,
        "case": "119",
        "split": [1, 1, 9],
        "target": AugmentedExponent(8).to_json(),
        "steps": [s1, s2, s3, s4, s5, s6, s7, s8, s9, s10],
        "verdict": True,
    }
    verify_certificate(cert)
    return cert


def certify_case(case_id: str) -> dict:
    """Build the verified certificate for a named split case."""
    case_id = str(case_id)
    if case_id == "128":
        return build_case_128()
    if case_id == "119":
        return build_case_119()
    raise PreconditionError(f"unknown case {case_id!r}; expected 128 or 119")


def certificate_text(cert: dict) -> str:
    """Canonical serialized form; verification round-trips through this."""
    return json.dumps(cert, sort_keys=True, indent=1)
