import csv
import json
import math

import pytest

from corrtrans import cli
from corrtrans import models as mo
from corrtrans.specfun import normal_quantile


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestTransformCommand:
    def test_alpha_form(self, capsys):
        code, out, _ = run(capsys, "transform", "--model", "bvn",
                           "--alpha", "0.05", "--rho", "0.5")
        assert code == 0
        value = float(out.splitlines()[0].split("=")[1])
        assert value == pytest.approx(
            mo.psi_closed(mo.BVN, normal_quantile(0.95), 0.5), abs=1e-5)

    def test_z_form_identity_case(self, capsys):
        code, out, _ = run(capsys, "transform", "--model", "bvn",
                           "--z", str(1 / math.sqrt(2)), "--rho", "0.3")
        assert code == 0
        assert float(out.splitlines()[0].split("=")[1]) == pytest.approx(
            0.3, abs=1e-6)


class TestDeltaCommand:
    def test_two_paths_agree(self, capsys):
        code, out, _ = run(capsys, "--digits", "10", "delta",
                           "--model", "squarev", "--transform", "fisher",
                           "--rho", "0.5", "--z", "1.0")
        assert code == 0
        lines = out.splitlines()
        closed = float(lines[0].split(":")[1])
        generic = float(lines[1].split(":")[1])
        assert closed == pytest.approx(-0.139702, abs=1e-6)
        assert generic == pytest.approx(closed, abs=1e-6)

    def test_optimal_requires_z_ref(self, capsys):
        code, _, err = run(capsys, "delta", "--model", "bvn",
                           "--transform", "optimal", "--rho", "0.5",
                           "--z", "1.0")
        assert code == 1
        assert "z-ref" in err


class TestRangesCommand:
    def test_bvn_identity(self, capsys):
        code, out, _ = run(capsys, "ranges", "--model", "bvn",
                           "--alpha", "0.05", "--vs", "identity")
        assert code == 0
        assert out.strip() == "(0.00000, 0.17912)"

    def test_bad_alpha_is_numeric_failure(self, capsys):
        code, _, err = run(capsys, "ranges", "--model", "bvn",
                           "--alpha", "0.9", "--vs", "identity")
        assert code == 2
        assert "numeric failure" in err


class TestExactCommand:
    def test_table_cell(self, capsys):
        code, out, _ = run(capsys, "exact", "--rho", "0.5", "--n", "10",
                           "--alpha", "0.05", "--transform", "identity")
        assert code == 0
        eps = float(out.splitlines()[1].split("=")[1])
        assert abs(eps - 0.125) < 5 * 0.00110


class TestExitCodes:
    def test_missing_subcommand(self, capsys):
        assert run(capsys, )[0] == 1

    def test_unknown_flag(self, capsys):
        assert run(capsys, "ranges", "--model", "bvn", "--alpha", "0.05",
                   "--vs", "identity", "--bogus")[0] == 1

    def test_unknown_model(self, capsys):
        assert run(capsys, "transform", "--model", "trivariate",
                   "--alpha", "0.05", "--rho", "0.5")[0] == 2

    def test_missing_config(self, capsys, tmp_path):
        assert run(capsys, "simulate", "--config",
                   str(tmp_path / "nope.json"))[0] == 1


class TestSimulateAndTable:
    @pytest.fixture()
    def run_csv(self, capsys, tmp_path, monkeypatch):
        monkeypatch.setenv("CORRTRANS_THREADS", "1")
        out_path = tmp_path / "run.csv"
        config = {
            "model": "squarev",
            "alphas": [0.05],
            "rhos": [0.0, 0.5],
            "ns": [10],
            "N": 2000,
            "K": 2,
            "master_seed": 42,
            "output_path": str(out_path),
        }
        cfg_path = tmp_path / "config.json"
        cfg_path.write_text(json.dumps(config))
        code, out, _ = run(capsys, "simulate", "--config", str(cfg_path))
        assert code == 0
        assert "6 rows" in out
        return out_path

    def test_csv_round_trip(self, run_csv):
        with open(run_csv, newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 6
        assert set(rows[0]) == set(cli.CSV_FIELDS)
        # repr round-trip: eps_mean reconstructs the per-worker mean
        for row in rows:
            hat = float(row["alpha_hat_mean"])
            eps = float(row["eps_mean"])
            assert eps == pytest.approx(hat / float(row["alpha"]) - 1.0,
                                        abs=1e-12)

    def test_table_rendering(self, run_csv, capsys):
        code, out, _ = run(capsys, "table", "--input", str(run_csv))
        assert code == 0
        lines = out.splitlines()
        assert "identity" in lines[0] and "fisher" in lines[0]
        assert len(lines) == 3  # header + two cells

    def test_plot_data(self, run_csv, capsys):
        code, out, _ = run(capsys, "table", "--input", str(run_csv),
                           "--plot-data")
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "transform,alpha,rho,n,eps_sqrt_n"
        assert len(lines) == 7

    def test_json_format(self, capsys, tmp_path, monkeypatch):
        monkeypatch.setenv("CORRTRANS_THREADS", "1")
        out_path = tmp_path / "run.json"
        config = {
            "model": "bvn", "alphas": [0.05], "rhos": [0.5], "ns": [10],
            "N": 500, "K": 2, "master_seed": 1,
            "output_path": str(out_path), "format": "json",
        }
        cfg_path = tmp_path / "config.json"
        cfg_path.write_text(json.dumps(config))
        code, _, _ = run(capsys, "simulate", "--config", str(cfg_path))
        assert code == 0
        rows = json.loads(out_path.read_text())
        assert len(rows) == 3
        code, out, _ = run(capsys, "table", "--input", str(out_path))
        assert code == 0
        assert len(out.splitlines()) == 2

    def test_bad_config_json(self, capsys, tmp_path):
        cfg_path = tmp_path / "config.json"
        cfg_path.write_text("{not json")
        assert run(capsys, "simulate", "--config", str(cfg_path))[0] == 1
