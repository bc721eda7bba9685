import csv
import io
import json

import mpmath
import numpy as np
import pytest

from walkbench import NoiseMatrix, apply, make_chain
from walkbench import io as wio
from walkbench.cli import main
from walkbench.errors import ValidationError
from walkbench.report import SWEEP_COLUMNS


@pytest.fixture
def files(tmp_path):
    c3 = tmp_path / "c3.json"
    r8 = tmp_path / "r8.json"
    assert main(["gen", "--family", "complete", "--n", "3", "--out", str(c3)]) == 0
    assert main(["gen", "--family", "random-symmetric", "--n", "8", "--seed", "1",
                 "--out", str(r8)]) == 0
    return tmp_path, c3, r8


class TestChainFiles:
    def test_round_trip_bit_exact(self, tmp_path):
        P = make_chain("random-symmetric", 7, seed=12)
        path = tmp_path / "p.json"
        wio.save_chain(P, path)
        assert np.array_equal(wio.load_chain(path).entries, P.entries)

    def test_gen_complete_file(self, files):
        _, c3, _ = files
        doc = json.loads(c3.read_text())
        assert doc["format"] == "walkbench-chain-v1"
        assert doc["convention"] == "column-stochastic"
        assert doc["n"] == 3 and doc["symmetric"] is True
        assert doc["data"] == [1 / 3] * 9

    def test_loader_names_bad_column(self, tmp_path):
        doc = wio.chain_to_dict(make_chain("complete", 3))
        doc["data"][5] = 0.5
        with pytest.raises(ValidationError, match="column 2"):
            wio.chain_from_dict(doc)

    @pytest.mark.parametrize("patch", [
        {"format": "other"}, {"convention": "row-stochastic"}, {"n": 4}, {"data": "x"},
    ])
    def test_loader_rejects_malformed(self, patch):
        doc = wio.chain_to_dict(make_chain("complete", 3))
        doc.update(patch)
        with pytest.raises(ValidationError):
            wio.chain_from_dict(doc)

    def test_dumps_writes_null_for_nan(self):
        assert json.loads(wio.dumps({"a": float("nan"), "b": np.float64(1.5)})) == {
            "a": None, "b": 1.5,
        }


class TestGen:
    def test_unknown_family_is_usage_error(self, tmp_path):
        with pytest.raises(SystemExit) as exc:
            main(["gen", "--family", "cycle", "--n", "1"])
        assert exc.value.code == 1

    def test_small_n_is_usage_error(self):
        assert main(["gen", "--family", "complete", "--n", "1"]) == 1

    def test_random_needs_seed(self):
        assert main(["gen", "--family", "random-symmetric", "--n", "4"]) == 1

    def test_stdout(self, capsys):
        assert main(["gen", "--family", "lazy-cycle", "--n", "4"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["data"][:4] == [0.5, 0.25, 0.0, 0.25]


class TestHtQht:
    def test_ht_resolvent(self, files, capsys):
        _, c3, _ = files
        assert main(["ht", "--chain", str(c3), "--target", "0"]) == 0
        assert capsys.readouterr().out.strip() == "2.000000000000"

    def test_ht_spectral_json(self, files, capsys, tmp_path):
        _, c3, _ = files
        out = tmp_path / "ht.json"
        assert main(["ht", "--chain", str(c3), "--target", "0", "--method", "spectral",
                     "--json", str(out)]) == 0
        doc = json.loads(out.read_text())
        assert doc["method"] == "spectral" and doc["stderr"] is None
        assert doc["value"] == pytest.approx(2.0, abs=1e-12)

    def test_ht_mc(self, files, capsys):
        _, c3, _ = files
        assert main(["ht", "--chain", str(c3), "--target", "0", "--method", "mc",
                     "--trials", "100000", "--seed", "7"]) == 0
        value, stderr = capsys.readouterr().out.splitlines()
        se = float(stderr.split()[1])
        assert abs(float(value) - 2.0) <= 3 * se

    def test_qht(self, files, capsys):
        _, c3, _ = files
        assert main(["qht", "--chain", str(c3), "--target", "0"]) == 0
        printed = capsys.readouterr().out.strip()
        exact = mpmath.mpf(2) / 3 / mpmath.acos(mpmath.mpf(2) / 3)
        assert printed == f"{float(exact):.12f}" == "0.792642372729"

    def test_qht_oracle(self, files, capsys):
        _, _, r8 = files
        assert main(["qht", "--chain", str(r8), "--target", "3", "--oracle"]) == 0
        assert "oracle" in capsys.readouterr().out

    def test_bad_target_is_invalid_input(self, files):
        _, c3, _ = files
        assert main(["ht", "--chain", str(c3), "--target", "7"]) == 2

    def test_missing_file_is_invalid_input(self, tmp_path):
        assert main(["ht", "--chain", str(tmp_path / "nope.json"), "--target", "0"]) == 2

    def test_reducible_is_assumption_error(self, tmp_path):
        path = tmp_path / "id.json"
        doc = wio.chain_to_dict(make_chain("complete", 2))
        doc["data"] = [1.0, 0.0, 0.0, 1.0]
        path.write_text(json.dumps(doc))
        assert main(["ht", "--chain", str(path), "--target", "0"]) == 3


class TestPerturb:
    def test_zero_norm_identity(self, files):
        tmp, c3, _ = files
        out = tmp / "q.json"
        assert main(["perturb", "--chain", str(c3), "--norm", "0", "--seed", "1",
                     "--out", str(out)]) == 0
        assert np.array_equal(wio.load_chain(out).entries, wio.load_chain(c3).entries)
        assert json.loads((tmp / "q.noise.json").read_text()) == {"norm2": 0.0, "seed": 1}

    def test_r8_sidecar(self, files):
        tmp, _, r8 = files
        out = tmp / "q8.json"
        side = tmp / "side.json"
        assert main(["perturb", "--chain", str(r8), "--norm", "0.01", "--seed", "2",
                     "--out", str(out), "--sidecar", str(side)]) == 0
        assert 0.009 < json.loads(side.read_text())["norm2"] <= 0.01
        wio.load_chain(out)

    def test_deterministic(self, files):
        tmp, _, r8 = files
        for name in ("a.json", "b.json"):
            main(["perturb", "--chain", str(r8), "--norm", "0.02", "--seed", "5",
                  "--out", str(tmp / name)])
        assert (tmp / "a.json").read_bytes() == (tmp / "b.json").read_bytes()

    def test_infeasible(self, files):
        tmp, c3, _ = files
        assert main(["perturb", "--chain", str(c3), "--norm", "5.0",
                     "--out", str(tmp / "x.json")]) == 2


class TestVerify:
    def test_identical_chains(self, files):
        tmp, _, r8 = files
        out = tmp / "rep.json"
        assert main(["verify", "--p", str(r8), "--q", str(r8), "--target", "0",
                     "--out", str(out)]) == 0
        rep = json.loads(out.read_text())
        assert rep["dpht"] == 0.0 and rep["dpqht"] == 0.0
        assert all(v for k, v in rep.items() if k.endswith("_ok"))

    def test_r8_perturbed(self, files):
        tmp, _, r8 = files
        q = tmp / "q8.json"
        main(["perturb", "--chain", str(r8), "--norm", "0.01", "--seed", "2", "--out", str(q)])
        out = tmp / "rep.json"
        assert main(["verify", "--p", str(r8), "--q", str(q), "--target", "0",
                     "--mc-trials", "20000", "--seed", "3", "--out", str(out)]) == 0
        rep = json.loads(out.read_text())
        assert all(v for k, v in rep.items() if k.endswith("_ok"))
        assert rep["mc_stderr"] > 0

    def test_equality_case(self, files, c3_equality_noise, capsys):
        tmp, c3, _ = files
        q = tmp / "q3.json"
        Q = apply(wio.load_chain(c3), NoiseMatrix.from_array(c3_equality_noise))
        wio.save_chain(Q, q)
        out = tmp / "rep.json"
        code = main(["verify", "--p", str(c3), "--q", str(q), "--target", "0",
                     "--out", str(out)])
        rep = json.loads(out.read_text())
        assert rep["weyl_ok"] is True
        assert rep["positive_spectrum_ok"] is False
        assert rep["warnings"]
        assert code == 3
        assert "warning" in capsys.readouterr().err

    def test_dimension_mismatch(self, files):
        _, c3, r8 = files
        assert main(["verify", "--p", str(c3), "--q", str(r8), "--target", "0"]) == 2


class TestSweep:
    def _config(self, tmp_path, **kw):
        doc = {
            "format": "walkbench-sweep-v1", "families": ["complete"], "sizes": [4],
            "noise_norms": [0.01], "targets": ["first"], "seeds": [0],
        }
        doc.update(kw)
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(doc))
        return path

    def test_single_row(self, tmp_path):
        out = tmp_path / "s.csv"
        assert main(["sweep", "--config", str(self._config(tmp_path)), "--out", str(out)]) == 0
        rows = list(csv.reader(io.StringIO(out.read_text())))
        assert tuple(rows[0]) == SWEEP_COLUMNS
        assert len(rows) == 2

    def test_grid_order(self, tmp_path):
        cfg = self._config(tmp_path, families=["complete", "lazy-cycle"],
                           noise_norms=[0.001, 0.01, 0.02], seeds={"start": 0, "stop": 5})
        out = tmp_path / "s.csv"
        assert main(["sweep", "--config", str(cfg), "--out", str(out), "--jobs", "2"]) == 0
        rows = list(csv.DictReader(io.StringIO(out.read_text())))
        assert len(rows) == 30
        assert [r["family"] for r in rows] == ["complete"] * 15 + ["lazy-cycle"] * 15
        assert [r["seed"] for r in rows[:5]] == ["0", "1", "2", "3", "4"]
        assert "np." not in out.read_text()

    def test_failed_instance_recorded_in_row(self, tmp_path):
        cfg = self._config(tmp_path, noise_norms=[3.0])
        out = tmp_path / "s.csv"
        assert main(["sweep", "--config", str(cfg), "--out", str(out)]) == 0
        row = next(csv.DictReader(io.StringIO(out.read_text())))
        assert row["ht_p"] == "NaN" and row["weyl_ok"] == "false"

    @pytest.mark.parametrize("patch", [
        {"families": ["nope"]}, {"sizes": "x"}, {"format": "v0"}, {"targets": [-1]},
    ])
    def test_malformed_config(self, tmp_path, patch):
        assert main(["sweep", "--config", str(self._config(tmp_path, **patch))]) == 1

    def test_unreadable_config(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{")
        assert main(["sweep", "--config", str(bad)]) == 1


def test_module_entry_point():
    import subprocess
    import sys

    res = subprocess.run([sys.executable, "-m", "walkbench", "--help"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0 and "sweep" in res.stdout
