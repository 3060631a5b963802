"""Command-line driver: subcommand dispatch, JSON output, exit codes.

Every subcommand is smoke-tested through main(argv) with its output parsed
back from captured stdout or the --out file; error paths are pinned to the
documented exit codes (2 for precondition violations including flag errors,
3 for exhausted budgets) with machine-readable JSON on stderr; the embedded
manifest is checked for digests and reproducibility.
"""

import hashlib
import json

import pytest

import cubearc
from cubearc.cli import main
from cubearc.forms import CubicForm, make_mordell_form

N1_COEFFS = {(1, 1, 1): 1, (2, 2, 2): 2, (3, 3, 3): 4, (1, 2, 3): 1}


def run(capsys, *argv):
    """Invoke the driver and parse its streams."""
    code = main(list(argv))
    captured = capsys.readouterr()
    out = json.loads(captured.out) if captured.out.strip() else None
    err = json.loads(captured.err) if captured.err.strip() else None
    return code, out, err


def write_form(tmp_path, name: str, form: CubicForm) -> str:
    path = tmp_path / name
    path.write_text(json.dumps(form.to_json()))
    return str(path)


@pytest.fixture
def forms(tmp_path):
    return {
        "x3": write_form(tmp_path, "x3.json", CubicForm.diagonal([1])),
        "two": write_form(tmp_path, "two.json", CubicForm.diagonal([1, 1])),
        "three": write_form(tmp_path, "three.json",
                            CubicForm.diagonal([1, 1, 1])),
        "four": write_form(tmp_path, "four.json",
                           CubicForm.diagonal([1, 1, 1, 1])),
        "n1": write_form(tmp_path, "n1.json", CubicForm(3, N1_COEFFS)),
        "mordell": write_form(tmp_path, "mordell.json", make_mordell_form()),
    }


class TestSubcommandSmoke:
    def test_params(self, capsys):
        code, out, _ = run(capsys, "params", "--n", "8", "--t", "7/4",
                           "--lambda", "8")
        assert code == 0
        assert out["stage_params"]["xi"] == "11/20"
        assert out["stage_params"]["pi2"] == "5/2"
        assert out["stage_params"]["arc_constant"] == "52/35"

    def test_check(self, capsys):
        code, out, _ = run(capsys, "check", "--n", "9", "--v", "2",
                           "--t", "1", "--lambda", "8")
        assert code == 0
        assert out["all_hold_part_i"] is True
        assert len(out["conditions"]) == 7
        # the tighter second-stage reading of condition 7 fails at t = 1,
        # which is what sends the second stage to the smaller t = 539/620
        assert [e["index"] for e in out["conditions"] if not e["holds"]] == [7]

    def test_bound_lemma7(self, capsys):
        code, out, _ = run(capsys, "bound-lemma7", "--n", "10", "--v", "1",
                           "--t", "21/40", "--arc", "11/20,0,1/2")
        assert code == 0
        assert out["bound"]["r"] == "127/16"

    def test_bound_remark14(self, capsys):
        code, out, _ = run(capsys, "bound-lemma7", "--n", "9", "--v", "2",
                           "--t", "1/2", "--arc", "1145/1922,1/5,458/775",
                           "--variant", "remark14")
        assert code == 0
        assert out["bound"]["r"] == 8  # integer-valued rationals encode bare
        assert out["bound"]["mD"] == "-1/8"

    def test_optimize_lemma9(self, capsys):
        code, out, _ = run(capsys, "optimize-lemma9",
                           "--region", "a<=25/31,b>=a/5+11/5")
        assert code == 0
        assert out["exponent"]["r"] == "539/310"
        assert out["details"]["term"] == "7a/2-3b+6"

    def test_certify_both_cases(self, capsys):
        for case in ("128", "119"):
            code, out, _ = run(capsys, "certify", "--case", case)
            assert code == 0
            assert out["certificate"]["verdict"] is True
            assert out["verification"]["verdict"] is True

    def test_sum(self, capsys, forms):
        code, out, _ = run(capsys, "sum", "--form", forms["x3"],
                           "--alpha", "1/2", "--P", "10", "--rho", "1",
                           "--center", "0")
        assert code == 0
        assert abs(out["sum"]["re"] - (-1)) < 1e-9
        assert abs(out["sum"]["im"]) < 1e-9
        assert out["lattice_points"] == 19

    def test_complete_sum(self, capsys, forms):
        code, out, _ = run(capsys, "complete-sum", "--form", forms["x3"],
                           "--a", "1", "--q", "9")
        assert code == 0
        assert abs(out["value"]["re"] - 7.596266658713867) < 1e-9

    def test_sing_series(self, capsys, forms):
        code, out, _ = run(capsys, "sing-series", "--form", forms["four"],
                           "--qmax", "8")
        assert code == 0
        assert out["singular_series"]["partial_sum_exact"] == "827/392"

    def test_sing_integral(self, capsys, forms):
        code, out, _ = run(capsys, "sing-integral", "--form", forms["two"],
                           "--center", "1/2,-1/2", "--rho", "1/8",
                           "--bmax", "40", "--seed", "7")
        assert code == 0
        report = out["singular_integral"]
        assert report["converged"] is True
        assert abs(report["value"] - 0.34762840371409787) < 1e-6

    def test_moment(self, capsys):
        code, out, _ = run(capsys, "moment", "--coeff", "1", "--k", "4",
                           "--P", "10")
        assert code == 0
        assert out["moment"]["count_value"] == 190

    def test_classify(self, capsys):
        code, out, _ = run(capsys, "classify", "--alpha", "0.4142135",
                           "--P", "100", "--Delta", "1/10")
        assert code == 0
        cls = out["classification"]
        assert cls["type"] == "minor"
        # the decimal survives as an exact rational, not a float
        assert cls["alpha"] == "828427/2000000"

    def test_local_count(self, capsys, forms):
        code, out, _ = run(capsys, "local", "--form", forms["n1"],
                           "--p", "7", "--k", "1")
        assert code == 0
        assert out["count"] == 1

    def test_local_descent_certificate(self, capsys, forms):
        code, out, _ = run(capsys, "local", "--form", forms["mordell"],
                           "--p", "7", "--certify-insoluble",
                           "--blocks", "1,2,3/4,5,6/7,8,9")
        assert code == 0
        cert = out["descent_certificate"]
        assert cert["p"] == 7
        assert cert["anisotropy_counts"] == [1, 1, 1]

    def test_count(self, capsys, forms):
        code, out, _ = run(capsys, "count", "--form", forms["three"],
                           "--P", "3", "--rho", "1", "--center", "0,0,0")
        assert code == 0
        assert out["count_report"]["count"] == 13

    def test_search(self, capsys, forms):
        code, out, _ = run(capsys, "search", "--form", forms["two"],
                           "--height", "5")
        assert code == 0
        assert out["found"] is True
        assert out["point"] == [1, -1]
        assert out["sup_norm"] == 1

    def test_selftest(self, capsys):
        code, out, _ = run(capsys, "selftest")
        assert code == 0
        assert out["selftest"]["failed"] == 0
        assert out["selftest"]["passed"] == 17
        assert all(c["ok"] for c in out["selftest"]["checks"])


class TestExitCodes:
    def test_small_n_is_a_precondition_violation(self, capsys):
        code, out, err = run(capsys, "params", "--n", "4", "--t", "1",
                             "--lambda", "8")
        assert code == 2
        assert out is None
        assert err["code"] == "precondition"

    def test_unknown_flag(self, capsys):
        code, _, err = run(capsys, "params", "--n", "8", "--t", "7/4",
                           "--lambda", "8", "--bogus", "1")
        assert code == 2
        assert err is not None

    def test_unknown_subcommand(self, capsys):
        code, _, err = run(capsys, "frobnicate")
        assert code == 2
        assert err is not None

    def test_float_refused_for_exact_parameters(self, capsys):
        code, _, err = run(capsys, "params", "--n", "8", "--t", "1.75",
                           "--lambda", "8")
        assert code == 2
        assert "refused" in err["message"] or "rational" in err["message"]

    def test_budget_exhaustion_is_exit_three(self, capsys, forms):
        code, _, err = run(capsys, "count", "--form", forms["mordell"],
                           "--P", "4", "--rho", "1", "--center",
                           "0,0,0,0,0,0,0,0,0", "--budget", "100")
        assert code == 3
        assert err["code"] == "budget-exceeded"

    def test_env_var_sets_default_budget(self, capsys, forms, monkeypatch):
        monkeypatch.setenv("CUBEARC_BUDGET", "100")
        code, _, err = run(capsys, "count", "--form", forms["mordell"],
                           "--P", "4", "--rho", "1", "--center",
                           "0,0,0,0,0,0,0,0,0")
        assert code == 3
        assert err["code"] == "budget-exceeded"

    def test_certify_needs_exactly_one_mode(self, capsys, tmp_path):
        code, _, err = run(capsys, "certify")
        assert code == 2
        path = tmp_path / "cert.json"
        path.write_text("{}")
        code2, _, err2 = run(capsys, "certify", "--case", "128",
                             "--verify", str(path))
        assert code2 == 2
        assert "exactly one" in err["message"]
        assert "exactly one" in err2["message"]

    def test_moment_needs_exactly_one_form_source(self, capsys, forms):
        code, _, err = run(capsys, "moment", "--k", "4", "--P", "10")
        assert code == 2
        code2, _, _ = run(capsys, "moment", "--coeff", "1", "--form",
                          forms["x3"], "--k", "4", "--P", "10")
        assert code2 == 2
        assert "exactly one" in err["message"]

    def test_missing_form_file(self, capsys, tmp_path):
        code, _, err = run(capsys, "sum", "--form",
                           str(tmp_path / "nope.json"), "--alpha", "0",
                           "--P", "5", "--rho", "1", "--center", "0")
        assert code == 2
        assert "cannot read" in err["message"]

    def test_malformed_form_file(self, capsys, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        code, _, err = run(capsys, "sum", "--form", str(path), "--alpha",
                           "0", "--P", "5", "--rho", "1", "--center", "0")
        assert code == 2
        assert "not valid JSON" in err["message"]


class TestOutputFile:
    def test_out_flag_writes_instead_of_printing(self, capsys, tmp_path):
        target = tmp_path / "params.json"
        code, out, _ = run(capsys, "params", "--n", "9", "--t", "1",
                           "--lambda", "8", "--out", str(target))
        assert code == 0
        assert out is None  # nothing on stdout
        doc = json.loads(target.read_text())
        assert doc["stage_params"]["xi"] == "25/31"
        assert doc["manifest"]["subcommand"] == "params"

    def test_certify_verify_round_trip(self, capsys, tmp_path):
        target = tmp_path / "case119.json"
        assert run(capsys, "certify", "--case", "119",
                   "--out", str(target))[0] == 0
        code, out, _ = run(capsys, "certify", "--verify", str(target))
        assert code == 0
        assert out["verification"]["verdict"] is True
        # the verified input is recorded by digest
        assert str(target) in out["manifest"]["input_digests"]

    def test_certify_verify_rejects_tampering(self, capsys, tmp_path):
        target = tmp_path / "case128.json"
        assert run(capsys, "certify", "--case", "128",
                   "--out", str(target))[0] == 0
        doc = json.loads(target.read_text())
        doc["certificate"]["steps"][-1]["output"]["r"] = "126/16"
        target.write_text(json.dumps(doc))
        code, _, err = run(capsys, "certify", "--verify", str(target))
        assert code == 2
        assert "recomputed" in err["message"]


class TestManifest:
    def test_manifest_records_run_metadata(self, capsys, forms):
        code, out, _ = run(capsys, "moment", "--coeff", "1", "--k", "4",
                           "--P", "10")
        assert code == 0
        manifest = out["manifest"]
        assert manifest["tool_version"] == cubearc.__version__
        assert manifest["subcommand"] == "moment"
        assert manifest["parameters"]["k"] == 4
        assert manifest["parameters"]["P"] == 10
        assert manifest["wall_time_s"] >= 0
        assert manifest["budget"]["evals_used"] > 0

    def test_manifest_digests_input_files(self, capsys, forms):
        code, out, _ = run(capsys, "complete-sum", "--form", forms["x3"],
                           "--a", "1", "--q", "9")
        assert code == 0
        digests = out["manifest"]["input_digests"]
        with open(forms["x3"], "rb") as fh:
            expected = hashlib.sha256(fh.read()).hexdigest()
        assert digests[forms["x3"]] == expected

    def test_reruns_reproduce_numeric_output(self, capsys, forms):
        argv = ("sum", "--form", forms["two"], "--alpha", "355/113",
                "--P", "20", "--rho", "1", "--center", "0,0")
        code1, out1, _ = run(capsys, *argv)
        code2, out2, _ = run(capsys, *argv)
        assert code1 == code2 == 0
        del out1["manifest"], out2["manifest"]  # wall time varies
        assert out1 == out2

    def test_seeded_estimators_reproduce_bit_for_bit(self, capsys, forms):
        argv = ("sing-integral", "--form", forms["two"], "--center",
                "1/2,-1/2", "--rho", "1/8", "--bmax", "20", "--seed", "11",
                "--samples", "20000")
        _, out1, _ = run(capsys, *argv)
        _, out2, _ = run(capsys, *argv)
        assert out1["singular_integral"] == out2["singular_integral"]
        assert out1["manifest"]["parameters"]["seed"] == 11
