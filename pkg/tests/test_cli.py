import csv
import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from qdephasing.cli import SWEEP_HEADER, VALIDATE_HEADER, main
from qdephasing.config import ConfigError, ExperimentConfig, parse_state


def run(args, capsys):
    code = main(args)
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    return header, [list(map(float, r)) for r in reader]


class TestEvolve:
    def test_header_bit_exact(self, capsys):
        code, out, _ = run(["evolve", "--points", "3"], capsys)
        assert code == 0
        assert out.splitlines()[0] == "t,gamma_A,gamma_B,gamma,C,F,abs_sA12,abs_sB12,rho14_re,rho14_im,rho23_re,rho23_im"
        assert out.splitlines()[0].split(",") == SWEEP_HEADER

    def test_bell_c_is_exp(self, capsys):
        code, out, err = run(["evolve", "--channel", "AB", "--gamma-a", "1", "--gamma-b", "1", "--points", "21"], capsys)
        _, data = rows(out)
        for r in data:
            assert r[4] == pytest.approx(math.exp(-r[0]), rel=1e-13, abs=1e-300)
        summary = json.loads(err)
        assert summary["tau_e"] == pytest.approx(1.0)
        assert summary["disentanglement_time"] == pytest.approx(math.log(1e6), rel=1e-6)

    def test_robust_constant(self, capsys):
        _, out, err = run(["evolve", "--channel", "D", "--gamma", "3", "--state", "robust-23"], capsys)
        _, data = rows(out)
        assert all(r[4] == pytest.approx(1, abs=1e-14) for r in data)
        assert json.loads(err)["disentanglement_time"] == "no crossing"

    def test_one_qubit_example(self, capsys):
        _, out, _ = run(["evolve", "--channel", "A", "--gamma-a", "0.5", "--state", "one-qubit-134", "--t-max", "40"], capsys)
        _, data = rows(out)
        sb0 = data[0][7]
        for r in data:
            assert r[4] == pytest.approx(2 / 3 * r[1], abs=1e-12)
            assert r[7] == sb0
        assert data[-1][4] < 1e-3

    def test_round_trip_precision(self, capsys):
        _, out, _ = run(["evolve", "--t-max", "3.3", "--points", "7"], capsys)
        for line in out.splitlines()[1:]:
            for cell in line.split(","):
                assert format(float(cell), ".17g") == cell

    def test_grid_spacing_independence(self, capsys):
        _, lin, _ = run(["evolve", "--t-min", "0.1", "--t-max", "10", "--points", "100"], capsys)
        _, log, _ = run(["evolve", "--t-min", "0.1", "--t-max", "10", "--points", "3", "--log"], capsys)
        _, a = rows(lin)
        _, b = rows(log)
        lin_by_t = {r[0]: r for r in a}
        shared = [r for r in b if r[0] in lin_by_t]
        assert len(shared) >= 2
        for r in shared:
            assert r == lin_by_t[r[0]]

    def test_out_and_summary_files(self, tmp_path, capsys):
        out = tmp_path / "sweep.csv"
        summ = tmp_path / "summary.json"
        code, stdout, stderr = run(["evolve", "--out", str(out), "--summary", str(summ)], capsys)
        assert code == 0 and stdout == "" and stderr == ""
        assert out.read_text().startswith("t,gamma_A")
        assert "tau_e" in json.loads(summ.read_text())

    def test_config_file_and_override(self, tmp_path, capsys):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({
            "channel": "AB",
            "rates": {"Gamma_A": 2.0, "Gamma_B": 2.0},
            "grid": {"t_max": 1.0, "points": 5},
        }))
        _, out, _ = run(["evolve", "--config", str(cfg)], capsys)
        _, data = rows(out)
        assert len(data) == 5 and data[-1][1] == pytest.approx(math.exp(-1))
        _, out, _ = run(["evolve", "--config", str(cfg), "--gamma-a", "4", "--points", "3"], capsys)
        _, data = rows(out)
        assert len(data) == 3 and data[-1][1] == pytest.approx(math.exp(-2))

    def test_explicit_amplitudes(self, capsys):
        _, out, _ = run(["evolve", "--state", "1,0,0,0,0,0,1,0", "--points", "2"], capsys)
        _, data = rows(out)
        assert data[0][4] == pytest.approx(1)


class TestErrors:
    @pytest.mark.parametrize(
        "args",
        [
            ["evolve", "--channel", "Q"],
            ["evolve", "--gamma", "-1"],
            ["evolve", "--state", "nonsense"],
            ["evolve", "--points", "1"],
            ["evolve", "--t-min", "5", "--t-max", "1"],
            ["evolve", "--log"],
            ["evolve", "--epsilon", "0.5"],
            ["evolve", "--config", "/nonexistent/file.json"],
            ["timescales", "--support", "15"],
            ["validate", "--n", "500"],
        ],
    )
    def test_exit_1(self, args, capsys):
        code, _, err = run(args, capsys)
        assert code == 1
        assert len(err.strip().splitlines()) == 1 and err.startswith("error:")

    def test_bad_flag_exits_1(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["evolve", "--bogus"])
        assert exc.value.code == 1

    def test_unknown_config_key(self, tmp_path, capsys):
        cfg = tmp_path / "c.json"
        cfg.write_text('{"chanel": "AB"}')
        assert run(["evolve", "--config", str(cfg)], capsys)[0] == 1


class TestValidate:
    def test_phi1_passes(self, capsys):
        code, out, err = run(
            ["validate", "--channel", "full", "--gamma", "0.5", "--gamma-a", "1", "--gamma-b", "2",
             "--state", "phi1", "--t-max", "3", "--points", "4", "--n", "100000"],
            capsys,
        )
        assert code == 0
        header, *body = out.splitlines()
        assert header.split(",") == VALIDATE_HEADER
        assert len(body) == 4 and all(line.endswith(",1") for line in body)
        assert json.loads(err)["passed"] is True

    def test_zero_rates_exact(self, capsys):
        code, out, _ = run(["validate", "--channel", "full", "--gamma", "0", "--gamma-a", "0", "--gamma-b", "0",
                            "--n", "10000", "--points", "3"], capsys)
        assert code == 0
        for line in out.splitlines()[1:]:
            assert line.split(",")[1] == "0"

    def test_small_n_warning(self, capsys):
        code, _, err = run(["validate", "--n", "1000", "--points", "3"], capsys)
        assert code == 0
        assert "warning" in err

    def test_failure_exit_2(self, monkeypatch, capsys):
        # feed the oracle a closed form that ignores the collective field
        import qdephasing.oracle as oracle

        real = oracle.apply_closed_form
        monkeypatch.setattr(oracle, "apply_closed_form", lambda kind, p, rho: real("AB", p, rho))
        code, _, err = run(["validate", "--channel", "full", "--gamma", "2", "--state", "bell-phi-plus",
                            "--n", "20000", "--points", "3"], capsys)
        assert code == 2
        assert "validation failed: rho14_re" in err


class TestTimescales:
    def test_equal_rates(self, capsys):
        code, out, _ = run(["timescales", "--gamma-a", "1", "--gamma-b", "1"], capsys)
        table = dict(line.split(",") for line in out.splitlines()[1:])
        assert code == 0
        assert float(table["tau_e"]) == 1.0
        assert float(table["tau_A"]) == float(table["tau_B"]) == 2.0
        assert float(table["tau"]) == 2.0

    def test_unequal(self, capsys):
        _, out, _ = run(["timescales", "--gamma-a", "2", "--gamma-b", "4"], capsys)
        table = dict(line.split(",") for line in out.splitlines()[1:])
        assert float(table["tau"]) == 1.0
        assert float(table["Gamma_13"]) == 1.0

    def test_inf_and_undefined(self, capsys):
        _, out, _ = run(["timescales", "--gamma-a", "0", "--gamma-b", "1"], capsys)
        table = dict(line.split(",") for line in out.splitlines()[1:])
        assert table["tau_A"] == "inf"
        assert table["tau_e"] == table["tau_B"]
        _, out, _ = run(["timescales", "--gamma-a", "0", "--gamma-b", "0"], capsys)
        table = dict(line.split(",") for line in out.splitlines()[1:])
        assert table["tau_e"] == "undefined"

    def test_support_state(self, capsys):
        _, out, _ = run(["timescales", "--gamma-a", "2", "--gamma-b", "4", "--state", "robust-23", "--support", "state"], capsys)
        table = dict(line.split(",") for line in out.splitlines()[1:])
        assert float(table["tau"]) == pytest.approx(1 / 3)


class TestConfig:
    def test_presets_normalized(self):
        for name in ("bell-phi-plus", "phi1", "psi1", "one-qubit-134", "fidelity-floor", "robust-23"):
            assert np.linalg.norm(parse_state(name)) == pytest.approx(1, abs=1e-15)

    def test_preset_with_amplitudes(self):
        np.testing.assert_allclose(parse_state("phi1:3,0,4"), [0.6, 0, 0, 0.8])

    def test_dict_state(self):
        np.testing.assert_allclose(parse_state({"preset": "psi1", "amplitudes": [0, 1, 1]}), [0, 2**-0.5, 2**-0.5, 0])

    def test_zero_state(self):
        with pytest.raises(ConfigError):
            parse_state([0, 0, 0, 0])

    def test_defaults(self):
        cfg = ExperimentConfig()
        assert cfg.grid.times()[0] == 0 and len(cfg.grid.times()) == 51


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "qdephasing", "timescales", "--gamma-a", "1", "--gamma-b", "1"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.startswith("quantity,value")
