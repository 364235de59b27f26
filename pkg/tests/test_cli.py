"""End-to-end command coverage through main(argv)."""
import csv
import math

import numpy as np
import pytest

from rkstieltjes.cli import main


def _read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


class TestFunv:
    def test_ell_mode_trace(self, tmp_path):
        out = tmp_path / "trace.csv"
        rc = main(["funv", "--matrix", "tridiag:80", "--function", "inverse",
                   "--poles", "zolotarev", "--ell", "8", "--oracle", "on",
                   "--out", str(out)])
        assert rc == 0
        header, rows = _read_csv(str(out))
        assert header == ["ell", "est_error", "true_error", "bound"]
        assert int(rows[-1][0]) == 8
        last = rows[-1]
        assert float(last[2]) <= float(last[3])

    def test_tol_mode_converges(self, tmp_path):
        out = tmp_path / "t.csv"
        rc = main(["funv", "--matrix", "tridiag:60", "--function", "phi:1",
                   "--poles", "eds-laplace", "--tol", "1e-6",
                   "--out", str(out)])
        assert rc == 0

    def test_tol_mode_failure_exit_code(self):
        # polynomial poles cannot reach 1e-12 in 3 steps
        rc = main(["funv", "--matrix", "tridiag:60", "--function",
                   "power:-0.5", "--poles", "polynomial", "--tol", "1e-12",
                   "--max-ell", "3"])
        assert rc != 0

    def test_shift_enables_bound(self, tmp_path, capsys):
        out = tmp_path / "s.csv"
        rc = main(["funv", "--matrix", "diffusion:64", "--function",
                   "lambertw", "--poles", "zolotarev", "--ell", "6",
                   "--shift", "0.004", "--out", str(out)])
        assert rc == 0
        _, rows = _read_csv(str(out))
        assert all(math.isfinite(float(r[3])) for r in rows)

    def test_vector_file(self, tmp_path):
        vec = tmp_path / "v.txt"
        np.savetxt(vec, np.ones(30))
        rc = main(["funv", "--matrix", "tridiag:30", "--function", "inverse",
                   "--poles", "extended", "--ell", "6", "--vector", str(vec)])
        assert rc == 0

    def test_rejects_tol_and_ell(self, capsys):
        with pytest.raises(SystemExit):
            main(["funv", "--matrix", "tridiag:30", "--function", "inverse",
                  "--poles", "zolotarev", "--tol", "1e-6", "--ell", "4"])

    def test_custom_pole_file(self, tmp_path):
        pf = tmp_path / "p.txt"
        pf.write_text("-1.0\n-2.0\n-3.0\n-4.0\n")
        rc = main(["funv", "--matrix", "tridiag:30", "--function", "inverse",
                   "--poles", f"custom:{pf}", "--ell", "4"])
        assert rc == 0

    def test_bad_matrix_spec(self, capsys):
        # unknown scheme falls through to "file path" and must fail cleanly
        rc = main(["funv", "--matrix", "hilbert:30", "--function", "inverse",
                   "--poles", "zolotarev", "--ell", "4"])
        assert rc == 2
        assert "hilbert" in capsys.readouterr().err


class TestPoles:
    def test_writes_file(self, tmp_path):
        out = tmp_path / "z.txt"
        rc = main(["poles", "--strategy", "zolotarev", "--interval", "1,10",
                   "--ell", "4", "--out", str(out)])
        assert rc == 0
        vals = [float(t) for t in out.read_text().split()
                if not t.startswith("#")]
        assert len(vals) == 4
        assert all(-10 < p < -1 for p in vals)

    def test_kron_pair_needs_out_xi(self, tmp_path):
        with pytest.raises(SystemExit, match="out-xi"):
            main(["poles", "--strategy", "cauchy-kron", "--interval", "1,4",
                  "--ell", "3", "--out", str(tmp_path / "psi.txt")])
        rc = main(["poles", "--strategy", "cauchy-kron", "--interval", "1,4",
                   "--ell", "3", "--out", str(tmp_path / "psi.txt"),
                   "--out-xi", str(tmp_path / "xi.txt")])
        assert rc == 0
        psi = [float(t) for t in (tmp_path / "psi.txt").read_text().split()]
        xi = [float(t) for t in (tmp_path / "xi.txt").read_text().split()]
        np.testing.assert_allclose(xi, [-p for p in psi])

    def test_extended_needs_no_interval(self, tmp_path):
        out = tmp_path / "e.txt"
        rc = main(["poles", "--strategy", "extended", "--ell", "5",
                   "--out", str(out)])
        assert rc == 0
        assert out.read_text().split()[0] == "inf"

    def test_interval_required_for_zolotarev(self):
        with pytest.raises(SystemExit, match="interval"):
            main(["poles", "--strategy", "zolotarev", "--ell", "3",
                  "--out", "/dev/null"])


class TestKronfun:
    def test_summary_row(self, tmp_path):
        out = tmp_path / "k.csv"
        rc = main(["kronfun", "--a", "tridiag:40:3", "--bneg", "tridiag:40:3",
                   "--function", "inverse", "--rank", "2",
                   "--poles", "laplace-kron", "--ell", "8",
                   "--oracle", "on", "--out", str(out)])
        assert rc == 0
        header, rows = _read_csv(str(out))
        assert header[:2] == ["ell", "storage_rank"]
        assert "true_error" in header
        row = dict(zip(header, rows[0]))
        assert int(row["ell"]) == 8
        assert float(row["true_error"]) <= float(row["bound"])

    def test_svd_report(self, tmp_path):
        rep = tmp_path / "sv.csv"
        rc = main(["kronfun", "--a", "tridiag:30:2", "--bneg", "tridiag:30:2",
                   "--function", "inverse", "--rank", "1",
                   "--poles", "cauchy-kron", "--ell", "5",
                   "--svd-report", str(rep)])
        assert rc == 0
        header, rows = _read_csv(str(rep))
        assert header == ["index", "sigma"]
        sig = [float(r[1]) for r in rows]
        assert sig == sorted(sig, reverse=True)

    def test_factor_files(self, tmp_path):
        u = tmp_path / "u.npy"
        v = tmp_path / "v.npy"
        rng = np.random.default_rng(0)
        np.save(u, rng.standard_normal((20, 2)))
        np.save(v, rng.standard_normal((20, 2)))
        rc = main(["kronfun", "--a", "tridiag:20:2", "--bneg", "tridiag:20:2",
                   "--function", "inverse", "--ufile", str(u),
                   "--vfile", str(v), "--poles", "extended", "--ell", "6"])
        assert rc == 0


class TestExperimentAndAccept:
    def test_experiment_writes_artifacts(self, tmp_path):
        rc = main(["experiment", "fig-lapl-1d", "--n", "80", "--ell-max", "4",
                   "--outdir", str(tmp_path)])
        assert rc == 0
        import os
        assert any(f.endswith(".csv") for f in os.listdir(tmp_path))

    def test_accept_only_subset(self, capsys):
        rc = main(["accept", "--only", "2"])
        out = capsys.readouterr().out
        assert rc == 0
        assert "criterion  2" in out
        assert out.startswith("[PASS]")

    def test_accept_rejects_bad_numbers(self, capsys):
        rc = main(["accept", "--only", "0,99"])
        assert rc == 2
        assert "criterion" in capsys.readouterr().err


def test_no_subcommand_shows_usage(capsys):
    with pytest.raises(SystemExit):
        main([])
