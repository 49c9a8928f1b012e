import json
import math

import numpy as np
import pytest
from click.testing import CliRunner

from resodyn.cli import (
    main,
    read_complex_matrix,
    read_real_matrix,
    write_complex_matrix,
    write_real_matrix,
)

FIG_ARGS = [
    "--delta", "1", "--d", "1", "--v", "0.75",
    "--gamma1", "0.5", "--gamma2", "0.5", "--theta", "0.3141592653589793",
]


@pytest.fixture
def runner():
    return CliRunner()


def read_csv(path):
    comments, header, rows = [], None, []
    with open(path) as handle:
        for line in handle:
            line = line.rstrip("\n")
            if line.startswith("#"):
                comments.append(line)
            elif header is None:
                header = line.split(",")
            else:
                rows.append([float(x) for x in line.split(",")])
    return comments, header, np.array(rows)


class TestMatrixIO:
    def test_real_round_trip(self, tmp_path, rng):
        m = rng.standard_normal((4, 3))
        path = tmp_path / "m.csv"
        write_real_matrix(path, m)
        np.testing.assert_array_equal(read_real_matrix(path), m)

    def test_complex_round_trip(self, tmp_path, rng):
        m = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        path = tmp_path / "m.csv"
        write_complex_matrix(path, m)
        np.testing.assert_array_equal(read_complex_matrix(path), m)

    def test_complex_rejects_odd_columns(self, tmp_path):
        path = tmp_path / "bad.csv"
        write_real_matrix(path, np.zeros((2, 3)))
        with pytest.raises(ValueError, match="paired"):
            read_complex_matrix(path)


class TestSweepCommand:
    def test_reference_sweep(self, runner, tmp_path):
        out = tmp_path / "sweep.csv"
        result = runner.invoke(
            main,
            ["two-level", "sweep", *FIG_ARGS,
             "--alpha-min", "-2", "--alpha-max", "2", "--steps", "801",
             "-o", str(out)],
        )
        assert result.exit_code == 0
        comments, header, rows = read_csv(out)
        assert header == [
            "alpha", "E1", "E2", "Gamma1", "Gamma2", "Re_f", "Im_f",
            "dGamma1", "dE1", "U11_re", "U12_im", "ep_distance",
        ]
        assert rows.shape == (801, 12)
        assert comments[0].startswith("# resodyn ")
        # openness and total energy are conserved row by row
        np.testing.assert_allclose(rows[:, 1] + rows[:, 2], 0.0, atol=1e-13)
        np.testing.assert_allclose(rows[:, 3] + rows[:, 4], 1.0, atol=1e-13)

    def test_single_point(self, runner, tmp_path):
        out = tmp_path / "point.csv"
        result = runner.invoke(
            main,
            ["two-level", "sweep", "--delta", "1", "--d", "1", "--v", "0.75",
             "--gamma1", "0.5", "--gamma2", "0.5",
             "--theta", "1.5707963267948966",
             "--alpha-min", "0", "--alpha-max", "0", "--steps", "1",
             "-o", str(out)],
        )
        assert result.exit_code == 0
        _, _, rows = read_csv(out)
        assert rows.shape == (1, 12)
        assert rows[0, 0] == 0.0

    def test_json_format(self, runner):
        result = runner.invoke(
            main,
            ["two-level", "sweep", *FIG_ARGS,
             "--alpha-min", "0", "--alpha-max", "1", "--steps", "3",
             "--format", "json"],
        )
        assert result.exit_code == 0
        payload = json.loads(result.output)
        assert len(payload["rows"]) == 3
        assert payload["rows"][0]["alpha"] == 0.0

    def test_invalid_params_exit_one(self, runner):
        result = runner.invoke(
            main,
            ["two-level", "sweep", "--delta", "1", "--d", "1", "--v", "0.75",
             "--gamma1", "-0.5", "--gamma2", "0.5", "--theta", "0.3",
             "--alpha-min", "0", "--alpha-max", "1", "--steps", "3"],
        )
        assert result.exit_code == 1

    def test_missing_flag_exit_one(self, runner):
        result = runner.invoke(main, ["two-level", "sweep", "--delta", "1"])
        assert result.exit_code == 1

    def test_config_file_merging(self, runner, tmp_path):
        config = tmp_path / "run.json"
        config.write_text(json.dumps({
            "delta": 1.0, "d": 1.0, "v": 0.75, "gamma1": 0.5, "gamma2": 0.5,
            "theta": 0.3141592653589793, "alpha_min": -1.0, "alpha_max": 1.0,
            "steps": 5,
        }))
        out = tmp_path / "sweep.csv"
        result = runner.invoke(
            main,
            ["two-level", "sweep", "--config", str(config), "--steps", "7",
             "-o", str(out)],
        )
        assert result.exit_code == 0
        _, _, rows = read_csv(out)
        assert rows.shape[0] == 7  # explicit flag beats the config value

    def test_unknown_config_key_rejected(self, runner, tmp_path):
        config = tmp_path / "bad.json"
        config.write_text(json.dumps({"delta": 1.0, "bogus_key": 3}))
        result = runner.invoke(main, ["two-level", "sweep", "--config", str(config)])
        assert result.exit_code == 1
        assert "bogus_key" in result.output


class TestCriticalPointsCommand:
    def test_reference_point(self, runner):
        result = runner.invoke(
            main,
            ["two-level", "critical-points", *FIG_ARGS,
             "--bracket-min", "-2", "--bracket-max", "2"],
        )
        assert result.exit_code == 0
        payload = json.loads(result.output)
        assert abs(payload["alpha_circ"] - (-0.5)) <= 1e-10
        assert abs(payload["alpha_star"] - (-0.17473960898)) <= 1e-8
        assert abs(payload["U_at_star"]["U11"]["im"]) <= 1e-12
        assert payload["f_at_star"]["re"] > 0.3

    def test_empty_bracket_exit_two(self, runner):
        result = runner.invoke(
            main,
            ["two-level", "critical-points", *FIG_ARGS,
             "--bracket-min", "0.5", "--bracket-max", "2"],
        )
        assert result.exit_code == 2
        assert "sign change" in result.output


class TestEnsembleCommand:
    def test_histogram_output(self, runner, tmp_path):
        out = tmp_path / "hist.csv"
        result = runner.invoke(
            main,
            ["ensemble", "--model", "picket-fence", "--n", "250", "--m", "1",
             "--realizations", "40", "--window", "25", "--seed", "7",
             "-o", str(out)],
        )
        assert result.exit_code == 0
        comments, header, rows = read_csv(out)
        assert header == ["bin_left", "bin_right", "bin_center", "count", "density", "pdf"]
        assert rows.shape == (61, 6)
        assert any(c.startswith("# second_moment:") for c in comments)
        assert rows[:, 3].sum() <= 40 * 25

    def test_seed_reproducibility_bytes(self, runner, tmp_path):
        args = ["ensemble", "--model", "picket-fence", "--n", "250", "--m", "1",
                "--realizations", "20", "--window", "25", "--seed", "11"]
        paths = []
        for tag, threads in (("a", "1"), ("b", "3")):
            samples = tmp_path / f"samples_{tag}.csv"
            out = tmp_path / f"hist_{tag}.csv"
            result = runner.invoke(
                main, [*args, "--threads", threads, "-o", str(out),
                       "--samples-out", str(samples)],
            )
            assert result.exit_code == 0
            paths.append(samples)
        assert paths[0].read_bytes() == paths[1].read_bytes()

    def test_fresh_seed_is_echoed(self, runner, tmp_path):
        out = tmp_path / "hist.csv"
        result = runner.invoke(
            main,
            ["ensemble", "--model", "picket-fence", "--n", "50", "--m", "1",
             "--realizations", "5", "--window", "11", "-o", str(out)],
        )
        assert result.exit_code == 0
        comments, _, _ = read_csv(out)
        seed_line = next(c for c in comments if c.startswith("# seed: "))
        assert seed_line != "# seed: null"

    def test_memory_guard(self, runner):
        result = runner.invoke(
            main,
            ["ensemble", "--model", "picket-fence", "--n", "250", "--m", "1",
             "--realizations", "10", "--window", "25", "--seed", "1",
             "--max-memory-mb", "1"],
        )
        assert result.exit_code == 1
        assert "memory" in result.output.lower()

    def test_representation_route(self, runner, tmp_path):
        out = tmp_path / "hist.csv"
        result = runner.invoke(
            main,
            ["ensemble", "--model", "picket-fence", "--n", "250", "--m", "2",
             "--realizations", "500", "--window", "25", "--seed", "3",
             "--route", "representation", "-o", str(out)],
        )
        assert result.exit_code == 0


class TestDistCommand:
    def test_rigid_kernel_at_zero(self, runner):
        result = runner.invoke(main, ["dist", "--model", "pf", "--m", "1", "--y", "0"])
        assert result.exit_code == 0
        line = result.output.strip().splitlines()[-1]
        values = line.split(",")
        assert float(values[2]) == math.pi / 4.0
        assert values[3] == "nan" and values[5] == "1"

    def test_goe_curve_normalization(self, runner, tmp_path):
        out = tmp_path / "dist.csv"
        result = runner.invoke(
            main,
            ["dist", "--model", "goe", "--m", "2", "--y-min", "-10",
             "--y-max", "10", "--steps", "2001", "-o", str(out)],
        )
        assert result.exit_code == 0
        _, header, rows = read_csv(out)
        grid, pdf = rows[:, 0], rows[:, 3]
        from resodyn import velocity_cdf

        covered = np.trapezoid(pdf, grid)
        tail = 2.0 * velocity_cdf(-10.0, 2, "goe")
        assert abs(covered + tail - 1.0) <= 1e-4

    def test_rigid_curve_normalization(self, runner, tmp_path):
        out = tmp_path / "dist.csv"
        result = runner.invoke(
            main,
            ["dist", "--model", "pf", "--m", "2", "--y-min", "-12",
             "--y-max", "12", "--steps", "2001", "-o", str(out)],
        )
        assert result.exit_code == 0
        _, _, rows = read_csv(out)
        assert abs(np.trapezoid(rows[:, 3], rows[:, 0]) - 1.0) <= 1e-4


class TestVerifyCommand:
    def test_fast_report(self, runner, tmp_path):
        out = tmp_path / "report.json"
        result = runner.invoke(main, ["verify", "fast", "-o", str(out)])
        assert result.exit_code == 0, result.output
        payload = json.loads(out.read_text())
        assert payload["passed"] is True
        assert payload["level"] == "fast"
        assert len(payload["checks"]) >= 10
        assert all(c["passed"] for c in payload["checks"])
        assert "checks passed" in result.output
