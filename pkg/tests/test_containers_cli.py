import json
import subprocess
import sys

import numpy as np
import pytest

from conftest import small_spec
from gutzmerlab import containers
from gutzmerlab.cli import main
from gutzmerlab.spectral import synth_bandlimited


@pytest.fixture(scope="module")
def fixture_files(tmp_path_factory):
    d = tmp_path_factory.mktemp("fix")
    spec = small_spec()
    f, sd = synth_bandlimited(1.0, 7.0, seed=11, spec=spec)
    containers.write_gfn(str(d / "fx.gfn"), f)
    containers.write_spd(str(d / "fx.spd"), sd)
    return d, spec, f, sd


class TestContainers:
    def test_gfn_round_trip(self, fixture_files):
        d, spec, f, sd = fixture_files
        f2 = containers.read_gfn(str(d / "fx.gfn"))
        assert np.array_equal(f2.samples, f.samples)
        assert np.allclose(f2.xgrid, f.xgrid)
        assert np.allclose(f2.tgrid, f.tgrid)
        assert f2.schwartz == f.schwartz

    def test_spd_round_trip(self, fixture_files):
        d, spec, f, sd = fixture_files
        sd2 = containers.read_spd(str(d / "fx.spd"))
        assert np.array_equal(sd2.norms2, sd.norms2)
        assert np.array_equal(sd2.lam, sd.lam)
        assert np.array_equal(sd2.wmu, sd.wmu)
        for j in range(sd.lam.size):
            assert np.array_equal(sd2.projections[j], sd.projections[j])
            assert np.array_equal(sd2.modal[j].coef[:, : sd.modal[j].coef.shape[1]],
                                  sd.modal[j].coef)
        assert sd2.requested_band.A == sd.requested_band.A
        assert sd2.band.B == pytest.approx(sd.band.B)

    def test_spd_supports_downstream_ops(self, fixture_files):
        from gutzmerlab.complexification import gutzmer_spectral, orbital_direct
        from gutzmerlab.heisenberg_core import ComplexPoint

        d, spec, f, sd = fixture_files
        sd2 = containers.read_spd(str(d / "fx.spd"))
        p = ComplexPoint.purely_imaginary([0.3], [0.2], 0.4)
        assert gutzmer_spectral(sd2, p) == pytest.approx(gutzmer_spectral(sd, p), rel=1e-12)
        assert orbital_direct(sd2, p, spec) == pytest.approx(
            orbital_direct(sd, p, spec), rel=1e-12)

    def test_bad_magic(self, tmp_path):
        bad = tmp_path / "bad.gfn"
        bad.write_bytes(b"NOPE" + b"\x00" * 64)
        with pytest.raises(containers.ContainerError, match="magic"):
            containers.read_gfn(str(bad))
        with pytest.raises(containers.ContainerError, match="magic"):
            containers.read_spd(str(bad))

    def test_byte_identical_determinism(self, tmp_path):
        spec = small_spec()
        for tag in ("a", "b"):
            f, sd = synth_bandlimited(0.75, 4.0, seed=99, spec=spec)
            containers.write_spd(str(tmp_path / f"{tag}.spd"), sd)
            containers.write_gfn(str(tmp_path / f"{tag}.gfn"), f)
        assert (tmp_path / "a.spd").read_bytes() == (tmp_path / "b.spd").read_bytes()
        assert (tmp_path / "a.gfn").read_bytes() == (tmp_path / "b.gfn").read_bytes()

    def test_different_seed_different_bytes(self, tmp_path):
        spec = small_spec()
        for seed in (1, 2):
            _, sd = synth_bandlimited(0.75, 4.0, seed=seed, spec=spec)
            containers.write_spd(str(tmp_path / f"s{seed}.spd"), sd)
        assert (tmp_path / "s1.spd").read_bytes() != (tmp_path / "s2.spd").read_bytes()


class TestCLI:
    def run_cli(self, *args):
        return main(list(args))

    def test_synth_writes_files(self, tmp_path):
        out = str(tmp_path / "t")
        code = self.run_cli("synth", "--A", "0.75", "--B", "4", "--seed", "5",
                            "--grid", "40", "--kmax", "8", "-o", out)
        assert code == 0
        assert (tmp_path / "t.gfn").exists() and (tmp_path / "t.spd").exists()

    def test_synth_requires_output(self):
        assert self.run_cli("synth", "--A", "1") == 2

    def test_synth_invalid_band(self, tmp_path):
        code = self.run_cli("synth", "--A", "50", "-o", str(tmp_path / "x"))
        assert code == 2

    def test_detect_missing_input(self):
        assert self.run_cli("detect", "-i", "/nonexistent/f.spd") == 2

    def test_detect_report(self, fixture_files, tmp_path):
        d, spec, f, sd = fixture_files
        out = str(tmp_path / "rep.json")
        code = self.run_cli("detect", "-i", str(d / "fx.spd"), "-o", out)
        assert code == 0
        doc = json.loads(open(out).read())
        assert doc["verdict"] == "ok"
        assert abs(doc["A_hat"] - sd.band.A) <= 0.05 * sd.band.A
        assert abs(doc["B_hat"] - sd.band.B) <= 0.05 * sd.band.B
        assert doc["tail_test"]["bounded"]

    def test_verify_unknown_suite(self):
        assert self.run_cli("verify", "nosuch") == 2

    def test_verify_gauss_bessel_passes(self, tmp_path, capsys):
        code = self.run_cli("verify", "gauss-bessel", "-o", str(tmp_path / "r.csv"))
        assert code == 0
        rows = open(tmp_path / "r.csv").read().strip().splitlines()
        assert rows[0] == "name,params,lhs,rhs,relerr,pass"
        assert all(r.endswith("pass") for r in rows[1:])

    def test_verify_unachievable_tolerance_fails(self, tmp_path):
        code = self.run_cli("verify", "euclid", "--tol", "1e-14",
                            "-o", str(tmp_path / "r.csv"))
        assert code == 1

    def test_verify_euclid_passes(self, tmp_path):
        assert self.run_cli("verify", "euclid", "-o", str(tmp_path / "r.csv")) == 0

    def test_euclid_csv_shape(self, tmp_path):
        out = str(tmp_path / "rows.csv")
        code = self.run_cli("euclid", "-o", out)
        assert code == 0
        rows = open(out).read().strip().splitlines()
        assert rows[0] == "y,lhs,rhs,relerr"
        assert len(rows) == 4
        fit = json.loads(open(out + ".fit.json").read())
        assert fit["verdict"] == "ok"

    def test_console_entry_point(self):
        out = subprocess.run([sys.executable, "-m", "gutzmerlab.cli", "--help"],
                             capture_output=True, text=True)
        assert out.returncode in (0, 2)
        assert "synth" in out.stdout


def test_thread_count_env(monkeypatch):
    from gutzmerlab.grids import thread_count

    monkeypatch.delenv("GUTZMERLAB_THREADS", raising=False)
    assert thread_count() == 1
    monkeypatch.setenv("GUTZMERLAB_THREADS", "4")
    assert thread_count() == 4
    monkeypatch.setenv("GUTZMERLAB_THREADS", "junk")
    assert thread_count() == 1
