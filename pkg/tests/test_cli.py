import csv
import io
import json

import pytest
from click.testing import CliRunner

from stickprob.cli import cli


@pytest.fixture()
def runner():
    return CliRunner()


def invoke(runner, *args, env=None):
    return runner.invoke(cli, list(args), env=env, catch_exceptions=False)


class TestCompute:
    def test_pn_pickup(self, runner):
        res = invoke(runner, "compute", "pn", "--model", "pickup", "--p", "2", "--n", "4")
        assert res.exit_code == 0
        payload = json.loads(res.output)
        assert payload["result"]["exact"] == {"num": 1, "den": 6}
        assert payload["result"]["vacuous"] is False
        assert payload["schema_version"] == 1

    def test_pn_default_model(self, runner):
        res = invoke(runner, "compute", "pn", "--p", "2", "--n", "4")
        assert json.loads(res.output)["inputs"]["model"] == "pickup"

    def test_pr(self, runner):
        res = invoke(runner, "compute", "pr", "--p", "2")
        payload = json.loads(res.output)
        assert payload["result"]["exact"] == {"num": 1, "den": 2}

    def test_truncated(self, runner):
        res = invoke(
            runner, "compute", "pn", "--model", "truncated",
            "--p", "2", "--n", "3", "--a", "1/4",
        )
        payload = json.loads(res.output)
        assert payload["result"]["exact"] == {"num": 4, "den": 27}
        assert payload["inputs"]["a"] == "1/4"

    def test_vacuous_annotation(self, runner):
        res = invoke(runner, "compute", "pn", "--p", "3", "--n", "3")
        payload = json.loads(res.output)
        assert payload["result"]["exact"] == {"num": 1, "den": 1}
        assert payload["result"]["vacuous"] is True

    def test_round_trip(self, runner):
        res = invoke(runner, "compute", "pn", "--model", "broken", "--p", "2", "--n", "4")
        payload = json.loads(res.output)
        again = invoke(
            runner, "compute", payload["inputs"]["problem"],
            "--model", payload["inputs"]["model"],
            "--p", str(payload["inputs"]["p"]),
            "--n", str(payload["inputs"]["n"]),
        )
        assert json.loads(again.output) == payload

    def test_unsupported_pa_exits_3(self, runner):
        res = runner.invoke(cli, ["compute", "pa", "--p", "4", "--n", "6"])
        assert res.exit_code == 3
        assert "Monte Carlo" in res.output

    def test_usage_errors_exit_2(self, runner):
        cases = [
            ["compute", "pn", "--p", "2"],                      # missing --n
            ["compute", "pn", "--p", "1", "--n", "4"],          # bad p
            ["compute", "pr", "--p", "2", "--n", "5"],          # pr takes no n
            ["compute", "pn", "--p", "2", "--n", "4", "--a", "1/4"],  # a without truncated
            ["compute", "pn", "--model", "truncated", "--p", "2", "--n", "3"],  # missing a
            ["compute", "pn", "--model", "truncated", "--p", "2", "--n", "3", "--a", "x"],
            ["compute", "pn", "--p", "2", "--n", "4", "--frob"],  # unknown flag
        ]
        for args in cases:
            res = runner.invoke(cli, args)
            assert res.exit_code == 2, args


class TestSimulate:
    def test_embeds_exact_and_z(self, runner):
        res = invoke(
            runner, "simulate", "--event", "pn", "--model", "pickup",
            "--p", "2", "--n", "4", "--trials", "20000", "--seed", "42",
        )
        payload = json.loads(res.output)
        assert payload["result"]["exact"] == {"num": 1, "den": 6}
        mc = payload["mc"]
        assert mc["trials"] == 20000
        assert mc["seed"] == 42
        assert mc["p_hat"] == mc["successes"] / mc["trials"]
        assert abs(mc["z_vs_exact"]) < 6

    def test_no_closed_form_gives_null_result(self, runner):
        res = invoke(
            runner, "simulate", "--event", "pa", "--model", "pickup",
            "--p", "4", "--n", "6", "--trials", "1000", "--seed", "1",
        )
        payload = json.loads(res.output)
        assert payload["result"] is None
        assert payload["mc"]["z_vs_exact"] is None

    def test_deterministic_for_fixed_seed(self, runner):
        args = [
            "simulate", "--event", "pr", "--model", "broken",
            "--p", "2", "--n", "5", "--trials", "30000", "--seed", "9",
        ]
        out1 = invoke(runner, *args).output
        out2 = invoke(runner, *args, "--workers", "4").output
        assert json.loads(out1)["mc"]["successes"] == json.loads(out2)["mc"]["successes"]

    def test_workers_env_override(self, runner):
        res = invoke(
            runner, "simulate", "--event", "pn", "--p", "2", "--n", "3",
            "--trials", "1000", "--seed", "3",
            env={"STICKPROB_WORKERS": "3"},
        )
        assert json.loads(res.output)["inputs"]["workers"] == 3

    def test_rate_only_for_exponential(self, runner):
        res = runner.invoke(
            cli, ["simulate", "--event", "pn", "--p", "2", "--n", "3",
                  "--trials", "10", "--seed", "1", "--rate", "2.0"],
        )
        assert res.exit_code == 2


class TestTable:
    def test_csv_grid(self, runner):
        res = invoke(
            runner, "table", "pn", "--model", "pickup",
            "--p", "2:4", "--n", "3:10", "--output", "csv",
        )
        rows = list(csv.reader(io.StringIO(res.output)))
        assert rows[0] == ["p", "n", "exact", "decimal"]
        assert len(rows) == 1 + 3 * 8
        lookup = {(r[0], r[1]): r[2] for r in rows[1:]}
        assert lookup[("2", "4")] == "1/6"
        assert lookup[("3", "5")] == "1/40"
        assert lookup[("4", "4")] == "1/1"  # vacuous cell

    def test_json_cells(self, runner):
        res = invoke(runner, "table", "pn", "--model", "broken", "--p", "2", "--n", "3:4")
        payload = json.loads(res.output)
        assert payload["cells"] == [
            {"p": 2, "n": 3, "exact": {"num": 3, "den": 4},
             "decimal": payload["cells"][0]["decimal"]},
            {"p": 2, "n": 4, "exact": {"num": 3, "den": 7},
             "decimal": payload["cells"][1]["decimal"]},
        ]

    def test_pr_table_over_p(self, runner):
        res = invoke(runner, "table", "pr", "--p", "2:4", "--output", "csv")
        rows = list(csv.reader(io.StringIO(res.output)))
        assert [r[2] for r in rows[1:]] == ["1/2", "5/6", "23/24"]

    def test_bad_range_exits_2(self, runner):
        res = runner.invoke(cli, ["table", "pn", "--p", "4:2", "--n", "3:5"])
        assert res.exit_code == 2

    def test_pa_above_quadrilateral_exits_3(self, runner):
        res = runner.invoke(cli, ["table", "pa", "--p", "2:5", "--n", "4:6"])
        assert res.exit_code == 3


class TestConstants:
    def test_fib(self, runner):
        res = invoke(runner, "constants", "fib", "--p", "3", "--i", "1:6")
        assert json.loads(res.output)["result"]["values"] == [1, 1, 2, 4, 7, 13]

    def test_m(self, runner):
        res = invoke(runner, "constants", "m", "--p", "3", "--n", "5")
        assert json.loads(res.output)["result"]["values"] == [5, 4, 2, 1, 1]

    def test_s(self, runner):
        res = invoke(runner, "constants", "s", "--p", "2", "--n", "4")
        payload = json.loads(res.output)
        assert payload["result"]["values"] == [7, 4, 2]
        assert payload["result"]["terminal"] == 1

    def test_emax(self, runner):
        res = invoke(runner, "constants", "emax", "--p", "2", "--n", "5", "--i", "3")
        result = json.loads(res.output)["result"]
        assert result["denominator"] == 2
        assert result["numerator_form"]["coeffs"] == [0, 1]

    def test_emax_rejects_last_stick(self, runner):
        res = runner.invoke(cli, ["constants", "emax", "--p", "2", "--n", "5", "--i", "5"])
        assert res.exit_code == 2


class TestVerify:
    def test_exact_suite_passes(self, runner):
        res = invoke(runner, "verify", "--suite", "exact")
        assert res.exit_code == 0
        payload = json.loads(res.output)
        assert payload["passed"] is True
        names = {check["name"] for check in payload["checks"]}
        assert "triple_derivation_of_m" in names
        assert "symbolic_integration_matches_closed_form" in names
        assert all(check["passed"] for check in payload["checks"])

    def test_mc_suite_small(self, runner):
        res = invoke(
            runner, "verify", "--suite", "mc", "--trials", "50000", "--workers", "2",
        )
        assert res.exit_code == 0
        payload = json.loads(res.output)
        assert any(c["name"].startswith("mc_concordance") for c in payload["checks"])
