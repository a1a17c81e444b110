import csv
import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from forestprox.cli import main


def read_csv(path):
    with Path(path).open(newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    """A simulated dataset plus a trained forest, shared across CLI tests."""
    root = tmp_path_factory.mktemp("cli")
    data = root / "data.csv"
    model = root / "model.json"
    assert main([
        "simulate", "--model", "logistic1_2d", "--n", "150", "--seed", "4",
        "--out", str(data),
    ]) == 0
    assert main([
        "train", "--data", str(data), "--label-column", "label", "--trees", "25",
        "--mtry", "sqrt", "--mode", "class", "--seed", "1", "--out", str(model),
    ]) == 0
    return root, data, model


class TestSimulate:
    def test_writes_csv_with_truth_column(self, tmp_path):
        out = tmp_path / "sim.csv"
        assert main([
            "simulate", "--model", "xor", "--n", "40", "--seed", "2", "--out", str(out),
        ]) == 0
        header, rows = read_csv(out)
        assert header == ["x1", "x2", "label", "true_prob"]
        assert len(rows) == 40
        assert set(r[2] for r in rows) <= {"0", "1"}

    def test_deterministic(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for out in (a, b):
            main(["simulate", "--model", "circle", "--n", "25", "--seed", "7", "--out", str(out)])
        assert a.read_text() == b.read_text()

    def test_junk_flag_widens_features(self, tmp_path):
        out = tmp_path / "sim.csv"
        main(["simulate", "--model", "xor", "--n", "30", "--seed", "2", "--junk", "3", "--out", str(out)])
        header, _ = read_csv(out)
        assert len(header) == 2 + 3 + 2


class TestTrainPredict:
    def test_model_file_format(self, workspace):
        _, _, model = workspace
        payload = json.loads(model.read_text())
        assert payload["format"] == "forestprox-forest-v1"
        assert payload["params"]["n_trees"] == 25

    def test_true_prob_column_not_leaked_into_features(self, workspace):
        _, _, model = workspace
        payload = json.loads(model.read_text())
        assert payload["train"]["feature_names"] == ["x1", "x2"]

    def test_predict_emits_three_estimates(self, workspace, tmp_path):
        _, data, model = workspace
        out = tmp_path / "preds.csv"
        assert main([
            "predict", "--model", str(model), "--data", str(data),
            "--label-column", "label", "--out", str(out),
        ]) == 0
        header, rows = read_csv(out)
        assert header == ["row", "p_class", "p_reg", "p_prox"]
        assert len(rows) == 150
        for row in rows[:10]:
            for cell in row[1:]:
                assert 0.0 <= float(cell) <= 1.0

    def test_predict_deterministic_through_save_load(self, workspace, tmp_path):
        _, data, model = workspace
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for out in (a, b):
            main(["predict", "--model", str(model), "--data", str(data),
                  "--label-column", "label", "--out", str(out)])
        assert a.read_text() == b.read_text()


class TestProximityCommand:
    def test_matrix_symmetric_unit_diagonal(self, workspace, tmp_path):
        root, _, model = workspace
        points = root / "points.csv"
        main(["simulate", "--model", "logistic1_2d", "--n", "12", "--seed", "9", "--out", str(points)])
        out = tmp_path / "prox.csv"
        assert main([
            "proximity", "--model", str(model), "--data", str(points),
            "--label-column", "label", "--out", str(out),
        ]) == 0
        _, rows = read_csv(out)
        P = np.array([[float(v) for v in row] for row in rows])
        assert P.shape == (12, 12)
        np.testing.assert_allclose(P, P.T)
        np.testing.assert_allclose(np.diag(P), 1.0)


class TestKernelCommand:
    def test_weights_table_and_comparison(self, tmp_path):
        w, c = tmp_path / "w.csv", tmp_path / "c.csv"
        assert main([
            "kernel", "--strong", "2", "--weak", "4", "--leaves", "16",
            "--trees", "2000", "--seed", "3",
            "--out-weights", str(w), "--out-compare", str(c),
        ]) == 0
        header, rows = read_csv(w)
        assert header == ["mtry", "p_strong", "p_weak"]
        assert len(rows) == 6
        ps = [float(r[1]) for r in rows]
        assert ps == sorted(ps)  # nondecreasing in mtry
        assert ps[-1] == pytest.approx(0.5)  # 1/S at mtry = p
        header, rows = read_csv(c)
        assert header == ["axis", "scale", "analytic", "monte_carlo"]
        for row in rows:
            assert 0.0 <= float(row[2]) <= 1.0
            assert 0.0 <= float(row[3]) <= 1.0


class TestDerivCommand:
    def test_report_columns(self, workspace, tmp_path):
        _, _, model = workspace
        out = tmp_path / "deriv.csv"
        assert main([
            "deriv", "--model", str(model), "--center", "means", "--out", str(out),
        ]) == 0
        header, rows = read_csv(out)
        assert header == ["coordinate", "name", "left", "right", "step"]
        assert len(rows) == 2
        assert all(float(r[4]) > 0 for r in rows)

    def test_fixed_step(self, workspace, tmp_path):
        _, _, model = workspace
        out = tmp_path / "deriv.csv"
        main(["deriv", "--model", str(model), "--center", "0,0", "--h", "0.25", "--out", str(out)])
        _, rows = read_csv(out)
        assert all(float(r[4]) == 0.25 for r in rows)


class TestGridCommand:
    def test_long_form_csv(self, workspace, tmp_path):
        _, _, model = workspace
        out = tmp_path / "grid.csv"
        assert main([
            "grid", "--model", str(model), "--center", "0,0", "--dims", "0,1",
            "--resolution", "7", "--bounds=-1,1,-1,1", "--out", str(out),
        ]) == 0
        header, rows = read_csv(out)
        assert header == ["x1", "x2", "kernel"]
        assert len(rows) == 49
        values = [float(r[2]) for r in rows]
        assert max(values) <= 1.0 and min(values) >= 0.0


class TestBenchCommand:
    def test_synthetic_run_emits_report_and_table(self, tmp_path):
        out, table = tmp_path / "report.json", tmp_path / "table.csv"
        assert main([
            "bench", "--synthetic", "xor", "--trees", "10", "--reps", "2",
            "--train-n", "60", "--test-n", "40", "--seed", "2",
            "--estimators", "class_sqrt,reg_third",
            "--out", str(out), "--out-csv", str(table),
        ]) == 0
        payload = json.loads(out.read_text())
        assert [r["name"] for r in payload["results"]] == ["class_sqrt", "reg_third"]
        assert payload["results"][0]["metrics"]["rmse_true"]["values"]
        header, rows = read_csv(table)
        assert "estimator" in header and len(rows) == 2

    def test_unknown_estimator_fails_cleanly(self, tmp_path, capsys):
        rc = main([
            "bench", "--synthetic", "xor", "--estimators", "wizard",
            "--out", str(tmp_path / "r.json"),
        ])
        assert rc == 1
        err = json.loads(capsys.readouterr().err)
        assert err["error"]["type"] == "ValueError"


class TestErrorContract:
    def test_missing_file_machine_readable(self, capsys, tmp_path):
        rc = main([
            "predict", "--model", str(tmp_path / "none.json"),
            "--data", str(tmp_path / "none.csv"), "--out", str(tmp_path / "o.csv"),
        ])
        assert rc == 1
        err = json.loads(capsys.readouterr().err)
        assert "message" in err["error"]

    def test_entry_point_subprocess(self, tmp_path):
        proc = subprocess.run(
            [sys.executable, "-m", "forestprox.cli", "simulate", "--model", "xor",
             "--n", "5", "--seed", "1", "--out", str(tmp_path / "x.csv")],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0
        proc = subprocess.run(
            [sys.executable, "-m", "forestprox.cli", "train", "--data",
             str(tmp_path / "missing.csv"), "--out", str(tmp_path / "m.json")],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 1
        assert json.loads(proc.stderr)["error"]["type"] == "FileNotFoundError"
