import json

import numpy as np
import pytest

from allencahn import Grid1D
from allencahn.cli import main
from allencahn.io import (
    read_csv_with_meta,
    read_field_csv,
    read_summary,
    write_field_csv,
    write_paths_csv,
    write_summary,
)
from allencahn.numerics import Field


class TestArtifacts:
    def test_field_round_trip(self, tmp_path):
        g = Grid1D(3.0, 60)
        f = Field(g, np.sin(g.x))
        p = tmp_path / "f.csv"
        write_field_csv(p, f, meta={"tag": "demo"})
        back = read_field_csv(p)
        assert back.grid == g
        assert np.array_equal(back.values, f.values)
        meta, header, rows = read_csv_with_meta(p)
        assert meta["tag"] == "demo" and header == ["x", "value"]

    def test_paths_csv_shape(self, tmp_path):
        p = tmp_path / "paths.csv"
        write_paths_csv(p, np.array([0.1, 0.2]), np.arange(6.0).reshape(3, 2))
        _, header, rows = read_csv_with_meta(p)
        assert header == ["t", "xi", "path_id"]
        assert rows.shape == (6, 3)

    def test_summary_schema_version(self, tmp_path):
        p = tmp_path / "summary.json"
        write_summary(p, {"hello": np.float64(1.5), "flag": np.bool_(True)})
        back = read_summary(p)
        assert back["schema_version"] == 1
        assert back["hello"] == 1.5 and back["flag"] is True


class TestCli:
    def test_standing_wave_command(self, tmp_path):
        rc = main(["standing-wave", "--out", str(tmp_path), "--n-cells", "2000",
                   "--half-width", "8.0"])
        assert rc == 0
        summary = read_summary(tmp_path / "summary.json")
        assert summary["grad_norm_sq"] == pytest.approx(2 * np.sqrt(2) / 3, abs=1e-5)
        assert (tmp_path / "profile.csv").exists()

    def test_simulate_sde_command(self, tmp_path):
        rc = main(["simulate-sde", "--out", str(tmp_path), "--n-paths", "5",
                   "--t-end", "0.05", "--dt", "1e-3", "--seed", "4"])
        assert rc == 0
        meta, header, rows = read_csv_with_meta(tmp_path / "sde_paths.csv")
        assert header == ["t", "xi", "path_id"]
        assert meta["alpha1"] == pytest.approx(1.0299, abs=1e-3)

    def test_bad_config_reports_error(self, tmp_path, capsys):
        cfg = tmp_path / "bad.json"
        cfg.write_text(json.dumps({"kind": "noise-audit", "eps_list": []}))
        rc = main(["noise-audit", "--config", str(cfg)])
        assert rc == 2
        assert "eps_list" in capsys.readouterr().err
