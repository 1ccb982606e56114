import csv
import json
from pathlib import Path

import numpy as np
import pytest

from scde.cli import main


def artifacts(d):
    csvs = sorted(Path(d).glob("*.csv"))
    jsons = sorted(Path(d).glob("*.json"))
    return csvs, jsons


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


class TestThreshold:
    def test_uncoupled_dec(self, tmp_path, capsys):
        rc = main(["threshold", "--dl", "5", "--dr", "15", "--channel", "dec",
                   "--tol-eps", "1e-5", "--out-dir", str(tmp_path)])
        assert rc == 0
        out = capsys.readouterr().out
        assert "threshold 0.363" in out
        csvs, jsons = artifacts(tmp_path)
        assert len(csvs) == 1 and len(jsons) == 1
        assert csvs[0].name.startswith("threshold-")
        rows = read_rows(csvs[0])
        assert rows[0] == ["dl", "dr", "L", "w", "channel", "tol_eps",
                           "threshold"]
        assert float(rows[1][-1]) == pytest.approx(0.363471, abs=3e-5)

    def test_uncoupled_bec(self, tmp_path):
        rc = main(["threshold", "--dl", "3", "--dr", "9", "--channel", "bec",
                   "--tol-eps", "1e-5", "--out-dir", str(tmp_path)])
        assert rc == 0
        (c,), _ = artifacts(tmp_path)
        assert float(read_rows(c)[1][-1]) == pytest.approx(0.2828368, abs=3e-5)

    def test_rerun_is_bit_identical(self, tmp_path):
        d1, d2 = tmp_path / "a", tmp_path / "b"
        args = ["threshold", "--dl", "3", "--dr", "6", "--channel", "bec",
                "--tol-eps", "1e-4"]
        assert main(args + ["--out-dir", str(d1)]) == 0
        assert main(args + ["--out-dir", str(d2)]) == 0
        (c1,), (j1,) = artifacts(d1)
        (c2,), (j2,) = artifacts(d2)
        assert c1.name == c2.name       # content-hashed manifest name
        assert c1.read_bytes() == c2.read_bytes()
        m1, m2 = json.loads(j1.read_text()), json.loads(j2.read_text())
        assert m1["params"] == m2["params"]

    def test_manifest_fields(self, tmp_path):
        main(["threshold", "--dl", "3", "--dr", "6", "--channel", "bec",
              "--tol-eps", "1e-4", "--out-dir", str(tmp_path)])
        _, (j,) = artifacts(tmp_path)
        m = json.loads(j.read_text())
        assert m["command"] == "threshold"
        assert m["params"]["dl"] == 3
        assert m["tolerances"]["tol_eps"] == 1e-4
        assert "version" in m and "timestamp" in m and "argv" in m
        assert "--dl" in m["argv"]


class TestExit:
    def test_uncoupled_curve(self, tmp_path):
        rc = main(["exit", "--dl", "5", "--dr", "15", "--n-points", "51",
                   "--out-dir", str(tmp_path)])
        assert rc == 0
        (c,), _ = artifacts(tmp_path)
        rows = read_rows(c)
        assert rows[0] == ["x", "exit_value", "epsilon"]
        assert len(rows) == 52
        eps = [row[2] for row in rows[1:]]
        assert "nan" in eps             # no channel solution near x = 0
        finite = [float(e) for e in eps if e != "nan"]
        assert min(finite) > 0.36

    def test_coupled_curve(self, tmp_path):
        rc = main(["exit", "--dl", "5", "--dr", "15", "--L", "8", "--w", "5",
                   "--chi-min", "0.2", "--chi-max", "0.4", "--chi-steps", "3",
                   "--out-dir", str(tmp_path)])
        assert rc == 0
        (c,), _ = artifacts(tmp_path)
        rows = read_rows(c)
        assert rows[0] == ["chi", "exit_value", "epsilon"]
        assert len(rows) == 4
        assert [float(r[0]) for r in rows[1:]] == [0.2, 0.3, 0.4]

    def test_coupled_curve_worker_pool(self, tmp_path):
        rc = main(["exit", "--dl", "5", "--dr", "15", "--L", "4", "--w", "3",
                   "--chi-min", "0.2", "--chi-max", "0.3", "--chi-steps", "2",
                   "--jobs", "2", "--out-dir", str(tmp_path)])
        assert rc == 0
        (c,), _ = artifacts(tmp_path)
        assert len(read_rows(c)) == 3


class TestForwardDe:
    def test_uncoupled_history(self, tmp_path, capsys):
        rc = main(["forward-de", "--dl", "5", "--dr", "15",
                   "--epsilon", "0.45", "--out-dir", str(tmp_path)])
        assert rc == 0
        assert "converged_to_zero False" in capsys.readouterr().out
        (c,), _ = artifacts(tmp_path)
        rows = read_rows(c)
        assert rows[0] == ["iter", "x"]
        xs = np.array([float(r[1]) for r in rows[1:]])
        assert np.all(np.diff(xs) <= 1e-15)

    def test_coupled_constellation(self, tmp_path, capsys):
        rc = main(["forward-de", "--dl", "5", "--dr", "15", "--L", "4",
                   "--w", "2", "--epsilon", "0.3", "--out-dir", str(tmp_path)])
        assert rc == 0
        assert "status zero" in capsys.readouterr().out
        (c,), _ = artifacts(tmp_path)
        rows = read_rows(c)
        assert rows[0] == ["section", "x"]
        assert len(rows) == 10
        assert [int(r[0]) for r in rows[1:]] == list(range(-4, 5))

    def test_custom_table_channel(self, tmp_path):
        table = tmp_path / "table.csv"
        table.write_text("x,f\n0.0,0.05\n1.0,0.15\n")
        rc = main(["forward-de", "--dl", "3", "--dr", "6", "--channel",
                   "custom", "--table", str(table), "--epsilon", "0.5",
                   "--out-dir", str(tmp_path / "out")])
        assert rc == 0

    def test_custom_without_table_is_usage_error(self, tmp_path):
        with pytest.raises(SystemExit) as exc:
            main(["forward-de", "--dl", "3", "--dr", "6", "--channel",
                  "custom", "--epsilon", "0.5", "--out-dir", str(tmp_path)])
        assert exc.value.code == 2


class TestReverseDe:
    def test_writes_profile(self, tmp_path, capsys):
        rc = main(["reverse-de", "--dl", "5", "--dr", "15", "--L", "8",
                   "--w", "5", "--chi", "0.3", "--out-dir", str(tmp_path)])
        assert rc == 0
        assert "epsilon 0." in capsys.readouterr().out
        (c,), _ = artifacts(tmp_path)
        rows = read_rows(c)
        assert rows[0] == ["section", "x"]
        assert len(rows) == 18

    def test_numerical_failure_exits_1(self, tmp_path, capsys):
        rc = main(["reverse-de", "--dl", "5", "--dr", "15", "--L", "8",
                   "--w", "5", "--chi", "0.0001", "--out-dir", str(tmp_path)])
        assert rc == 1
        assert capsys.readouterr().err.startswith("error:")


class TestConstellation:
    def test_by_chi(self, tmp_path, capsys):
        rc = main(["constellation", "--dl", "5", "--dr", "15", "--L", "8",
                   "--w", "5", "--chi", "0.3", "--out-dir", str(tmp_path)])
        assert rc == 0
        out = capsys.readouterr().out
        assert "shape:" in out and "unimodal=True" in out

    def test_by_epsilon_zero_profile(self, tmp_path, capsys):
        rc = main(["constellation", "--dl", "5", "--dr", "15", "--L", "4",
                   "--w", "2", "--epsilon", "0.2", "--out-dir", str(tmp_path)])
        assert rc == 0
        assert "all zero" in capsys.readouterr().out

    def test_chi_and_epsilon_mutually_exclusive(self, tmp_path):
        with pytest.raises(SystemExit) as exc:
            main(["constellation", "--dl", "5", "--dr", "15", "--L", "4",
                  "--w", "2", "--chi", "0.3", "--epsilon", "0.5"])
        assert exc.value.code == 2


class TestSimulate:
    def test_trial_grid(self, tmp_path, capsys):
        rc = main(["simulate", "--dl", "3", "--dr", "9", "--L", "1", "--w", "1",
                   "--M", "9", "--epsilons", "0.05,0.6", "--trials", "2",
                   "--master-seed", "1", "--out-dir", str(tmp_path)])
        assert rc == 0
        assert "trials decoded fully" in capsys.readouterr().out
        (c,), (j,) = artifacts(tmp_path)
        rows = read_rows(c)
        assert rows[0] == ["epsilon", "seed", "residual_erasure_fraction",
                           "iterations"]
        assert len(rows) == 5
        assert json.loads(j.read_text())["seeds"]["master_seed"] == 1

    def test_deterministic_per_master_seed(self, tmp_path):
        d1, d2 = tmp_path / "a", tmp_path / "b"
        args = ["simulate", "--dl", "3", "--dr", "9", "--M", "33",
                "--epsilons", "0.3", "--trials", "3", "--master-seed", "7"]
        assert main(args + ["--out-dir", str(d1)]) == 0
        assert main(args + ["--out-dir", str(d2)]) == 0
        (c1,), _ = artifacts(d1)
        (c2,), _ = artifacts(d2)
        assert c1.read_bytes() == c2.read_bytes()

    def test_dump_graph(self, tmp_path):
        dump = tmp_path / "edges.txt"
        rc = main(["simulate", "--dl", "3", "--dr", "9", "--M", "9",
                   "--epsilons", "0.3", "--trials", "1",
                   "--dump-graph", str(dump), "--out-dir", str(tmp_path)])
        assert rc == 0
        lines = dump.read_text().strip().splitlines()
        assert len(lines) == 1 + 9 * 3

    def test_worker_pool(self, tmp_path):
        rc = main(["simulate", "--dl", "3", "--dr", "9", "--M", "33",
                   "--epsilons", "0.3,0.5", "--trials", "2", "--jobs", "2",
                   "--out-dir", str(tmp_path)])
        assert rc == 0
        (c,), _ = artifacts(tmp_path)
        assert len(read_rows(c)) == 5


class TestBounds:
    def test_uncoupled(self, tmp_path):
        rc = main(["bounds", "--dl", "5", "--dr", "15",
                   "--out-dir", str(tmp_path)])
        assert rc == 0
        (c,), _ = artifacts(tmp_path)
        row = dict(zip(*read_rows(c)))
        assert float(row["rate"]) == pytest.approx(2 / 3, abs=1e-8)
        assert float(row["shannon_threshold"]) == pytest.approx(0.5, abs=1e-8)
        assert float(row["uncoupled_upper_bound"]) == pytest.approx(
            0.5433878, abs=1e-6)
        assert float(row["coupled_lower_bound"]) == pytest.approx(
            1 / 3, abs=1e-8)

    def test_coupled_uses_design_rate(self, tmp_path):
        rc = main(["bounds", "--dl", "3", "--dr", "9", "--L", "4", "--w", "3",
                   "--out-dir", str(tmp_path)])
        assert rc == 0
        (c,), _ = artifacts(tmp_path)
        row = dict(zip(*read_rows(c)))
        assert float(row["rate"]) == pytest.approx(0.59452319, abs=1e-7)


class TestUsageAndEnv:
    def test_unknown_flag_exits_2(self):
        with pytest.raises(SystemExit) as exc:
            main(["threshold", "--dl", "5", "--dr", "15", "--bogus", "1"])
        assert exc.value.code == 2

    def test_missing_required_exits_2(self):
        with pytest.raises(SystemExit) as exc:
            main(["threshold", "--dl", "5"])
        assert exc.value.code == 2

    def test_lonely_L_exits_2(self):
        with pytest.raises(SystemExit) as exc:
            main(["threshold", "--dl", "5", "--dr", "15", "--L", "4"])
        assert exc.value.code == 2

    def test_bad_channel_exits_2(self):
        with pytest.raises(SystemExit) as exc:
            main(["threshold", "--dl", "5", "--dr", "15",
                  "--channel", "awgn"])
        assert exc.value.code == 2

    def test_no_subcommand_exits_2(self):
        with pytest.raises(SystemExit) as exc:
            main([])
        assert exc.value.code == 2

    def test_help_documents_flags(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["threshold", "--help"])
        assert exc.value.code == 0
        text = capsys.readouterr().out
        for flag in ("--dl", "--dr", "--L", "--w", "--channel", "--tol-eps",
                     "--lo", "--hi", "--out-dir"):
            assert flag in text

    def test_out_dir_env_var(self, tmp_path, monkeypatch):
        monkeypatch.setenv("SCDE_OUT_DIR", str(tmp_path))
        rc = main(["bounds", "--dl", "3", "--dr", "6"])
        assert rc == 0
        csvs, jsons = artifacts(tmp_path)
        assert len(csvs) == 1 and len(jsons) == 1
