"""CLI surface: verbs, formats, exit codes, environment seed."""

import json

import pytest
from click.testing import CliRunner

from steinmle.cli import main


@pytest.fixture
def runner():
    return CliRunner()


def _json_out(result):
    return json.loads(result.output)


class TestBoundCommand:
    def test_table1_last_row(self, runner):
        result = runner.invoke(
            main,
            [
                "bound",
                "--model",
                "exp-canonical",
                "--theta0",
                "1",
                "--n",
                "100000",
                "--h-sup",
                "0.5",
                "--h-lip",
                "0.2296401",
                "--format",
                "json",
            ],
        )
        assert result.exit_code == 0
        payload = _json_out(result)
        assert payload["schema"] == "steinmle/bound/v1"
        assert payload["breakdown"]["total"] == pytest.approx(0.009, abs=1e-3)
        assert payload["kolmogorov_bound"] == pytest.approx(
            2.0 * payload["breakdown"]["total"] ** 0.5, rel=1e-12
        )

    def test_poisson_zero_total(self, runner):
        result = runner.invoke(
            main,
            ["bound", "--model", "poisson", "--theta0", "0", "--n", "50", "--format", "json"],
        )
        assert result.exit_code == 0
        assert _json_out(result)["breakdown"]["total"] == 0.0

    def test_beta_below_minimal_exits_2(self, runner):
        result = runner.invoke(
            main,
            ["bound", "--model", "beta", "--theta0", "1.5", "--beta", "1", "--n", "7000"],
        )
        assert result.exit_code == 2
        assert "minimal n = 7460" in result.output

    def test_json_error_on_stderr(self, runner):
        result = runner.invoke(
            main,
            ["bound", "--model", "beta", "--theta0", "1.5", "--n", "7000", "--format", "json"],
        )
        assert result.exit_code == 2
        err = json.loads(result.stderr.strip())
        assert err["schema"] == "steinmle/error/v1"
        assert err["error"] == "DomainError"
        assert "minimal n" in err["message"]

    def test_csv_format(self, runner):
        result = runner.invoke(
            main,
            [
                "bound",
                "--model",
                "exp-noncanonical",
                "--theta0",
                "2",
                "--n",
                "10",
                "--format",
                "csv",
            ],
        )
        assert result.exit_code == 0
        lines = result.output.strip().splitlines()
        assert lines[0] == "label,value"
        labels = [ln.split(",")[0] for ln in lines[1:]]
        assert labels == ["score", "markov_tail", "r2", "taylor_remainder", "total", "kolmogorov_bound"]


class TestTableCommand:
    def test_table1_bound_column(self, runner):
        result = runner.invoke(
            main, ["table", "1", "--trials", "40", "--seed", "1", "--format", "json"]
        )
        assert result.exit_code == 0
        rows = _json_out(result)["rows"]
        bounds = [row["bound_total"] for row in rows]
        targets = [1.955, 0.336, 0.094, 0.029, 0.009]
        for got, want in zip(bounds, targets):
            assert got == pytest.approx(want, abs=1e-3)

    def test_table2_direct_column(self, runner):
        result = runner.invoke(
            main, ["table", "2", "--trials", "40", "--seed", "1", "--format", "json"]
        )
        assert result.exit_code == 0
        rows = _json_out(result)["rows"]
        direct = [row["direct_bound"] for row in rows]
        for got, want in zip(direct, [0.321, 0.101, 0.032, 0.010, 0.003]):
            assert got == pytest.approx(want, abs=1e-3)
        general = [row["bound_total"] for row in rows]
        for got, want in zip(general, [11.888, 3.401, 1.058, 0.333, 0.105]):
            assert got == pytest.approx(want, abs=5e-3)

    def test_table3_bound_column(self, runner):
        result = runner.invoke(
            main, ["table", "3", "--trials", "25", "--seed", "1", "--format", "json"]
        )
        assert result.exit_code == 0
        rows = _json_out(result)["rows"]
        for row, want in zip(rows, [0.2517, 0.0416, 0.0223, 0.0151, 0.0112]):
            assert row["bound_total"] == pytest.approx(want, abs=5e-4)
            assert row["target"] == "mse"

    def test_table_text_rendering(self, runner):
        result = runner.invoke(main, ["table", "1", "--trials", "25", "--seed", "1"])
        assert result.exit_code == 0
        lines = result.output.strip().splitlines()
        assert lines[0].split() == ["n", "empirical", "bound", "error"]
        assert "1.955" in lines[1]

    def test_table_csv_schema(self, runner):
        result = runner.invoke(
            main, ["table", "1", "--trials", "25", "--seed", "1", "--format", "csv"]
        )
        header = result.output.splitlines()[0]
        assert header == "model,theta0,n,trials,seed,empirical_distance,empirical_mse,bound_total,error"

    def test_table_csv_reproducible(self, runner):
        args = ["table", "2", "--trials", "30", "--seed", "11", "--format", "csv"]
        out1 = runner.invoke(main, args).output
        out2 = runner.invoke(main, args).output
        assert out1 == out2


class TestSimulateCommand:
    def test_dominance_row(self, runner):
        result = runner.invoke(
            main,
            [
                "simulate",
                "--model",
                "exp-canonical",
                "--theta0",
                "1",
                "--n",
                "10",
                "--trials",
                "2000",
                "--seed",
                "42",
                "--format",
                "json",
            ],
        )
        assert result.exit_code == 0
        payload = _json_out(result)
        assert payload["empirical_distance"] <= payload["bound_total"]
        assert payload["bound_total"] == pytest.approx(1.955, abs=1e-3)

    def test_env_seed_used(self, runner):
        args = [
            "simulate",
            "--model",
            "exp-canonical",
            "--theta0",
            "1",
            "--n",
            "20",
            "--trials",
            "50",
            "--format",
            "json",
        ]
        with_env = runner.invoke(main, args, env={"STEINMLE_SEED": "31"})
        explicit = runner.invoke(main, args + ["--seed", "31"])
        assert with_env.exit_code == explicit.exit_code == 0
        assert _json_out(with_env)["empirical_distance"] == _json_out(explicit)["empirical_distance"]
        assert _json_out(with_env)["seed"] == 31


class TestCiCommand:
    def test_conservative_coverage(self, runner):
        result = runner.invoke(
            main,
            [
                "ci",
                "--model",
                "exp-noncanonical",
                "--theta0",
                "2",
                "--n",
                "1000",
                "--alpha",
                "0.05",
                "--trials",
                "100",
                "--seed",
                "7",
                "--format",
                "json",
            ],
        )
        assert result.exit_code == 0
        payload = _json_out(result)
        assert payload["coverage"] >= 0.95

    def test_poisson_rejected(self, runner):
        result = runner.invoke(
            main,
            ["ci", "--model", "poisson", "--theta0", "1", "--n", "100", "--trials", "10"],
        )
        assert result.exit_code == 2


class TestMseSweepCommand:
    def test_rows(self, runner):
        result = runner.invoke(
            main,
            [
                "mse-sweep",
                "--theta0",
                "1.5",
                "--beta",
                "1",
                "--n-from",
                "7500",
                "--n-to",
                "7700",
                "--n-step",
                "200",
                "--trials",
                "40",
                "--seed",
                "2",
                "--format",
                "json",
            ],
        )
        assert result.exit_code == 0
        rows = _json_out(result)["rows"]
        assert [row["n"] for row in rows] == [7500, 7700]
        assert rows[0]["bound_total"] == pytest.approx(0.252048, abs=1e-4)

    def test_below_minimal_exits_2(self, runner):
        result = runner.invoke(
            main,
            ["mse-sweep", "--n-from", "7000", "--n-to", "7000", "--trials", "5"],
        )
        assert result.exit_code == 2


class TestConstantsCommand:
    def test_beta_constants(self, runner):
        result = runner.invoke(
            main,
            ["constants", "--model", "beta", "--theta0", "1.5", "--beta", "1", "--format", "json"],
        )
        assert result.exit_code == 0
        payload = _json_out(result)
        assert payload["schema"] == "steinmle/constants/v1"
        assert payload["minimal_n"] == 7460
        assert payload["B2"] == pytest.approx(25.56296296, abs=1e-6)

    def test_exp_ingredient_audit(self, runner):
        result = runner.invoke(
            main,
            [
                "constants",
                "--model",
                "exp-canonical",
                "--theta0",
                "1",
                "--n",
                "10",
                "--format",
                "json",
            ],
        )
        assert result.exit_code == 0
        ing = _json_out(result)["ingredients"]
        assert ing["mse"] == pytest.approx(12.0 / 72.0, rel=1e-12)
        assert ing["sup_third_is_deterministic"] is True

    def test_missing_n_is_validation_error(self, runner):
        result = runner.invoke(main, ["constants", "--model", "exp-canonical", "--theta0", "1"])
        assert result.exit_code == 2


class TestValidation:
    def test_unknown_model_rejected_by_click(self, runner):
        result = runner.invoke(main, ["bound", "--model", "weibull", "--theta0", "1", "--n", "10"])
        assert result.exit_code == 2

    def test_bad_theta0_domain_error(self, runner):
        result = runner.invoke(
            main, ["bound", "--model", "exp-canonical", "--theta0", "-1", "--n", "10"]
        )
        assert result.exit_code == 2

    def test_numerical_failure_maps_to_exit_3(self):
        from steinmle.cli import _guard
        from steinmle.errors import ConvergenceError

        def boom():
            raise ConvergenceError("iteration stalled", bracket=(0.0, 1.0))

        with pytest.raises(SystemExit) as excinfo:
            _guard("text", boom)
        assert excinfo.value.code == 3

    def test_poisson_constants_audit(self, runner):
        result = runner.invoke(
            main,
            [
                "constants",
                "--model",
                "poisson",
                "--theta0",
                "1",
                "--n",
                "100",
                "--format",
                "json",
            ],
        )
        assert result.exit_code == 0
        payload = _json_out(result)
        assert payload["bound"]["total"] > 0.0

    def test_table_workers_flag_reproducible(self, runner):
        base = ["table", "3", "--trials", "20", "--seed", "4", "--format", "csv"]
        out1 = runner.invoke(main, base + ["--workers", "1"]).output
        out2 = runner.invoke(main, base + ["--workers", "2"]).output
        assert out1 == out2

    def test_mse_sweep_csv_header(self, runner):
        result = runner.invoke(
            main,
            [
                "mse-sweep",
                "--n-from",
                "7500",
                "--n-to",
                "7500",
                "--trials",
                "10",
                "--format",
                "csv",
            ],
        )
        assert result.exit_code == 0
        assert result.output.splitlines()[0] == (
            "model,theta0,n,trials,seed,empirical_distance,empirical_mse,bound_total,error"
        )
