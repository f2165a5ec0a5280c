import json

import numpy as np
import pytest

from pointtomo.cli import main
from pointtomo.io import (atomic_write_text, metadata_record, read_sweep_table,
                          sweep_table_text)
from pointtomo.simulate import SweepConfig, run_sweep


def run_cli(*argv):
    return main(list(argv))


class TestSimulateCommand:
    def test_byte_identical_reruns(self, tmp_path):
        args = ["simulate", "--theta", "0.01", "--n-grid", "50,100", "--reps", "2",
                "--seed", "5", "--mle-starts", "3"]
        out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
        assert run_cli(*args, "--out", str(out1)) == 0
        assert run_cli(*args, "--out", str(out2)) == 0
        assert out1.read_bytes() == out2.read_bytes()

    def test_metadata_sidecar(self, tmp_path):
        out = tmp_path / "sweep.csv"
        assert run_cli("simulate", "--theta", "0.01", "--n-grid", "60", "--reps", "1",
                       "--seed", "9", "--mle-starts", "3", "--out", str(out)) == 0
        meta = json.loads((tmp_path / "sweep.meta.json").read_text())
        assert meta["seed"] == 9
        assert len(meta["config_hash"]) == 64
        assert "timestamp" in meta and "versions" in meta

    def test_seed_required(self, capsys):
        with pytest.raises(SystemExit) as excinfo:
            run_cli("simulate", "--theta", "0.01", "--n-grid", "50")
        assert excinfo.value.code == 2

    def test_bad_device_path_is_config_error(self, tmp_path):
        code = run_cli("simulate", "--theta", "0.01", "--n-grid", "50", "--seed", "1",
                       "--device", str(tmp_path / "missing.txt"))
        assert code == 2

    def test_plot_output(self, tmp_path):
        out, svg = tmp_path / "s.csv", tmp_path / "s.svg"
        assert run_cli("simulate", "--theta", "0.01", "--n-grid", "50,200", "--reps", "2",
                       "--seed", "3", "--mle-starts", "3",
                       "--out", str(out), "--plot", str(svg)) == 0
        text = svg.read_text()
        assert text.startswith("<svg") and "</svg>" in text
        assert "polyline" in text and "circle" in text


class TestOtherCommands:
    def test_design_identity_device(self, tmp_path, capsys):
        device = tmp_path / "identity.txt"
        ident = np.eye(4)
        device.write_text("\n".join(" ".join(f"{v:+.1f}+0j" for v in row) for row in ident) + "\n")
        assert run_cli("design", "--device", str(device), "--dim", "4") == 0
        out = capsys.readouterr().out
        lines = [l for l in out.splitlines() if l and not l.startswith("#")]
        assert lines[0].startswith("subset,")
        assert len(lines) == 2  # header + the single family
        assert "1.000000" in lines[1]

    def test_design_alternative_norm_flag(self, tmp_path, capsys):
        device = tmp_path / "identity.txt"
        device.write_text("\n".join(" ".join("+1+0j" if i == j else "+0+0j"
                                             for j in range(4)) for i in range(4)) + "\n")
        assert run_cli("design", "--device", str(device), "--norm", "frobenius",
                       "--starts", "2") == 0
        out = capsys.readouterr().out
        assert "1.732051" in out  # frobenius norm of the 3x3 identity C

    def test_fisher_command(self, capsys):
        assert run_cli("fisher", "--haar-baseline", "150", "--seed", "2") == 0
        out = capsys.readouterr().out
        assert "spectral norm of C: 0.6275" in out
        assert "tr(I J^-1): 3.0000000" in out
        assert "Haar baseline" in out

    def test_bootstrap_command(self, tmp_path, capsys):
        out = tmp_path / "boot.csv"
        assert run_cli("bootstrap", "--theta", "0.01", "--n", "400", "--boot", "12",
                       "--seed", "4", "--mle-starts", "3", "--out", str(out)) == 0
        lines = out.read_text().splitlines()
        assert lines[0].startswith("boot_low,")
        values = [float(tok) for tok in lines[1].split(",")[:5]]
        assert values == sorted(values)

    def test_bootstrap_with_literal_counts(self, capsys):
        assert run_cli("bootstrap", "--theta", "0.01", "--counts", "40,30,20,5,3,1,1",
                       "--boot", "10", "--seed", "4", "--mle-starts", "3") == 0

    def test_fit_and_report_roundtrip(self, tmp_path, capsys):
        table = tmp_path / "sweep.csv"
        assert run_cli("simulate", "--theta", "0.01", "--n-grid", "100,1000,10000",
                       "--reps", "4", "--seed", "8", "--mle-starts", "4",
                       "--out", str(table)) == 0
        assert run_cli("fit", str(table)) == 0
        fit = json.loads(capsys.readouterr().out)
        assert -1.6 < fit["exponent"] < -0.5
        assert run_cli("report", str(table), "--plot", str(tmp_path / "r.svg")) == 0
        out = capsys.readouterr().out
        assert "power-law fit" in out
        assert (tmp_path / "r.svg").exists()

    def test_fit_missing_file_is_config_error(self, tmp_path):
        assert run_cli("fit", str(tmp_path / "nope.csv")) == 2

    def test_version_flag(self, capsys):
        with pytest.raises(SystemExit) as excinfo:
            run_cli("--version")
        assert excinfo.value.code == 0


class TestIoHelpers:
    def test_sweep_table_roundtrip(self, tmp_path, family_povm):
        cfg = SweepConfig(theta_scalar=0.01, n_grid=(80,), repetitions=2, seed=2)
        res = run_sweep(cfg, povm=family_povm)
        path = tmp_path / "t.csv"
        atomic_write_text(str(path), sweep_table_text(res))
        arr = read_sweep_table(str(path))
        assert arr.shape == (2, 8)
        assert np.allclose(arr[:, 2], res.as_array()[:, 2], rtol=0, atol=0)

    def test_atomic_write_leaves_no_partial(self, tmp_path):
        target = tmp_path / "x.txt"

        with pytest.raises(TypeError):
            atomic_write_text(str(target), object())  # type: ignore[arg-type]
        assert not target.exists()
        assert list(tmp_path.iterdir()) == []

    def test_metadata_record_fields(self):
        rec = metadata_record("deadbeef", 7, extra={"rows": 2}, timestamp=False)
        assert rec["config_hash"] == "deadbeef"
        assert rec["rows"] == 2
        assert "timestamp" not in rec

    def test_read_rejects_foreign_header(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("a,b\n1,2\n")
        from pointtomo.errors import InvalidInput

        with pytest.raises(InvalidInput):
            read_sweep_table(str(bad))
