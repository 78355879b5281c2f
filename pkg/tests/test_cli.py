import json
from importlib import resources

import numpy as np
import pytest
from conftest import recount_by_membership

from entropart.cli import main, read_samples_csv

try:
    import jsonschema
except ImportError:  # pragma: no cover
    jsonschema = None


def write_csv(path, rows, header=None):
    lines = ([header] if header else []) + [",".join(f"{v!r}" for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return str(path)


@pytest.fixture
def corners_csv(tmp_path):
    return write_csv(tmp_path / "corners.csv", [[0, 0], [0, 1], [1, 0], [1, 1]])


@pytest.fixture
def fig2_csv(tmp_path):
    rng = np.random.default_rng(0)
    x = rng.normal(0.0, 1.0, 64)
    y = x + rng.normal(0.0, 0.5, 64)
    return write_csv(tmp_path / "fig2.csv", np.column_stack([x, y]).tolist())


@pytest.fixture
def parabola_csv(tmp_path):
    rng = np.random.default_rng(20)
    x = rng.normal(0.0, 1.0, 256)
    y = x**2 + rng.normal(0.0, 0.5, 256)
    return write_csv(tmp_path / "parabola.csv", np.column_stack([x, y]).tolist())


def run_json(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    assert code == 0, captured.err
    return json.loads(captured.out)


def load_schema(name):
    return json.loads(resources.files("entropart").joinpath(f"schemas/{name}").read_text())


class TestReadCsv:
    def test_reads_plain_floats(self, corners_csv):
        s = read_samples_csv(corners_csv)
        assert (s.n, s.d) == (4, 2)

    def test_header_skipped(self, tmp_path):
        path = write_csv(tmp_path / "h.csv", [[1, 2], [3, 4]], header="x,y")
        s = read_samples_csv(path, has_header=True)
        assert s.n == 2

    def test_reports_bad_line_number(self, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("1.0,2.0\noops,3.0\n", encoding="utf-8")
        from entropart.cli import CsvParseError

        with pytest.raises(CsvParseError, match="line 2"):
            read_samples_csv(str(p))

    def test_ragged_rows_rejected(self, tmp_path):
        p = tmp_path / "ragged.csv"
        p.write_text("1.0,2.0\n3.0\n", encoding="utf-8")
        from entropart.cli import CsvParseError

        with pytest.raises(CsvParseError, match="line 2"):
            read_samples_csv(str(p))


class TestEstimateCommand:
    def test_equiprobable_on_corners(self, capsys, corners_csv):
        doc = run_json(
            capsys, ["estimate", "--input", corners_csv, "--method", "equiprobable", "--depth", "1"]
        )
        assert doc["entropy_bits"] == pytest.approx(0.0, abs=1e-12)
        assert doc["method"] == "equiprobable"
        assert doc["bin_count"] == 4
        assert (doc["n"], doc["d"]) == (4, 2)

    def test_naive_single_bin_on_corners(self, capsys, corners_csv):
        doc = run_json(
            capsys, ["estimate", "--input", corners_csv, "--method", "naive", "--bins-per-dim", "1"]
        )
        assert doc["entropy_bits"] == pytest.approx(0.0, abs=1e-12)

    def test_rotated_reports_rotation(self, capsys, fig2_csv):
        from conftest import circular_distance

        doc = run_json(
            capsys, ["estimate", "--input", fig2_csv, "--method", "rotated", "--depth", "1"]
        )
        assert doc["method"] == "rotated_equiprobable"
        assert 0.0 <= doc["rotation_angle_rad"] < 2.0 * np.pi
        assert len(doc["rotation_mrp"]) == 3
        # diagonal data aligns with a partition axis: pi/4 up to the
        # quarter-turn symmetry family
        dist = min(
            circular_distance(doc["rotation_angle_rad"], np.pi / 4.0 + j * np.pi / 2.0)
            for j in range(4)
        )
        assert dist <= 0.15

    def test_ensemble_and_marginal(self, capsys, fig2_csv):
        doc = run_json(
            capsys, ["estimate", "--input", fig2_csv, "--method", "ensemble", "--depth", "1"]
        )
        assert doc["method"] == "ensemble"
        doc = run_json(
            capsys,
            ["estimate", "--input", fig2_csv, "--method", "marginal", "--bins-per-dim", "2"],
        )
        assert doc["method"] == "marginal_equiquantised"

    def test_winsorise_changes_outlier_result(self, capsys, tmp_path):
        rows = np.random.default_rng(1).normal(size=(63, 2)).tolist() + [[40.0, -40.0]]
        path = write_csv(tmp_path / "outlier.csv", rows)
        plain = run_json(capsys, ["estimate", "--input", path, "--method", "naive", "--bins-per-dim", "2"])
        clipped = run_json(
            capsys,
            ["estimate", "--input", path, "--method", "naive", "--bins-per-dim", "2", "--winsorise", "3"],
        )
        assert clipped["entropy_bits"] < plain["entropy_bits"]

    def test_output_validates_against_schema(self, capsys, fig2_csv):
        if jsonschema is None:
            pytest.skip("jsonschema unavailable")
        schema = load_schema("estimate.schema.json")
        for argv in (
            ["estimate", "--input", fig2_csv, "--method", "rotated", "--depth", "1"],
            ["estimate", "--input", fig2_csv, "--method", "naive", "--bins-per-dim", "2"],
        ):
            jsonschema.validate(run_json(capsys, argv), schema)

    def test_parse_error_exit_code(self, capsys, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("a,b\n", encoding="utf-8")
        code = main(["estimate", "--input", str(p), "--method", "naive", "--bins-per-dim", "2"])
        err = capsys.readouterr().err
        assert code == 2
        assert err.startswith("error: parse:")
        assert "line 1" in err

    def test_missing_file_is_parse_error(self, capsys, tmp_path):
        code = main(
            ["estimate", "--input", str(tmp_path / "nope.csv"), "--method", "naive", "--bins-per-dim", "2"]
        )
        assert code == 2

    def test_precondition_exit_code_names_bound(self, capsys, corners_csv):
        code = main(["estimate", "--input", corners_csv, "--method", "equiprobable", "--depth", "2"])
        err = capsys.readouterr().err
        assert code == 3
        assert err.startswith("error: precondition:")
        assert "2^(s*d)" in err

    def test_usage_error_exit_code(self, capsys, corners_csv):
        code = main(["estimate", "--input", corners_csv, "--method", "equiprobable"])
        err = capsys.readouterr().err
        assert code == 2
        assert err.startswith("error: usage:")


class TestBenchmarkCommand:
    def test_csv_schema_and_determinism(self, capsys, tmp_path):
        out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
        argv = ["benchmark", "--n", "32", "--bins", "4", "--trials", "5", "--seed", "7"]
        assert main(argv + ["--output", str(out1)]) == 0
        assert main(argv + ["--output", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()
        lines = out1.read_text().strip().split("\n")
        assert len(lines) == 2
        assert len(lines[1].split(",")) == 7

    def test_stdout_json_format(self, capsys):
        doc = run_json(
            capsys,
            ["benchmark", "--n", "32", "--bins", "4", "--trials", "2", "--seed", "3", "--format", "json"],
        )
        assert doc["trials"] == 2
        if jsonschema is not None:
            jsonschema.validate(doc, load_schema("study.schema.json"))

    def test_invalid_bin_count_mentions_constraint(self, capsys):
        code = main(["benchmark", "--n", "32", "--bins", "8", "--trials", "2", "--seed", "1"])
        err = capsys.readouterr().err
        assert code == 3
        assert "2^(s*d)" in err

    def test_too_few_trials(self, capsys):
        code = main(["benchmark", "--n", "32", "--bins", "4", "--trials", "1", "--seed", "1"])
        assert code == 3


class TestDumpPartitionCommand:
    def test_parabola_dump_conserves_volume(self, capsys, parabola_csv):
        doc = run_json(capsys, ["dump-partition", "--input", parabola_csv, "--depth", "2"])
        assert len(doc["bins"]) == 16
        support_volume = np.prod(
            np.array(doc["support"]["upper"]) - np.array(doc["support"]["lower"])
        )
        assert sum(b["volume"] for b in doc["bins"]) == pytest.approx(
            support_volume, rel=1e-9
        )
        if jsonschema is not None:
            jsonschema.validate(doc, load_schema("partition.schema.json"))

    def test_round_trip_counts_recomputable(self, capsys, parabola_csv):
        doc = run_json(capsys, ["dump-partition", "--input", parabola_csv, "--depth", "2"])
        data = np.array([row.split(",") for row in open(parabola_csv).read().split()], float)
        recounted = recount_by_membership(
            data,
            [b["lower"] for b in doc["bins"]],
            [b["upper"] for b in doc["bins"]],
            doc["support"]["upper"],
        )
        assert recounted == [b["count"] for b in doc["bins"]]

    def test_rotated_dump_matches_estimate(self, capsys, fig2_csv):
        dump = run_json(
            capsys, ["dump-partition", "--input", fig2_csv, "--depth", "1", "--rotate"]
        )
        est = run_json(
            capsys, ["estimate", "--input", fig2_csv, "--method", "rotated", "--depth", "1"]
        )
        assert dump["rotation_angle_rad"] == est["rotation_angle_rad"]
        assert dump["rotation_mrp"] == est["rotation_mrp"]
