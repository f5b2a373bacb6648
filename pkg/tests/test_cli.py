"""End-to-end command-line tests: exit codes, output schemas,
determinism, and the fit pipeline on generated files."""

import json
import subprocess
import sys

import numpy as np
import pytest

from qcpchain.cli import (EXIT_CONFIG, EXIT_FIT, EXIT_OK, EXIT_SOLVER,
                          main)
from qcpchain.csvio import read_csv

L2_EP = np.sqrt(32.0)


def run_cli(argv, capsys):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# ---------------------------------------------------------------- exit codes


def test_missing_required_option_exits_config(capsys):
    code, _, err = run_cli(["spectrum", "--gamma-im", "4.0"], capsys)
    assert code == EXIT_CONFIG
    assert "L" in err


def test_bad_model_parameter_exits_config(capsys):
    code, _, err = run_cli(
        ["sweep", "--L", "1", "--gamma-min", "1", "--gamma-max", "2",
         "--steps", "3"], capsys)
    assert code == EXIT_CONFIG
    assert "L" in err


def test_unknown_observable_exits_config(capsys):
    code, _, err = run_cli(
        ["sweep", "--L", "2", "--gamma-min", "1", "--gamma-max", "2",
         "--steps", "3", "--observables", "mx,bogus"], capsys)
    assert code == EXIT_CONFIG
    assert "bogus" in err


def test_inverted_grid_exits_config(capsys):
    code, _, err = run_cli(
        ["sweep", "--L", "2", "--gamma-min", "5", "--gamma-max", "2",
         "--steps", "3"], capsys)
    assert code == EXIT_CONFIG
    assert "gamma_min" in err


def test_dense_ceiling_exits_solver(capsys):
    code, _, err = run_cli(
        ["spectrum", "--L", "13", "--gamma-im", "4.0"], capsys)
    assert code == EXIT_SOLVER
    assert "solver failure" in err


def test_missing_fit_input_exits_fit(capsys):
    code, _, err = run_cli(
        ["fit", "beta", "--input", "/nonexistent/file.csv",
         "--gamma-c", "13.4"], capsys)
    assert code == EXIT_FIT


def test_malformed_csv_exits_fit(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("gamma_im,mx\n1.0\n", encoding="utf-8")
    code, _, err = run_cli(
        ["fit", "beta", "--input", str(bad), "--gamma-c", "13.4"], capsys)
    assert code == EXIT_FIT
    assert "fit failure" in err


def test_fit_without_gamma_c_exits_config(tmp_path, capsys):
    f = tmp_path / "s.csv"
    f.write_text("gamma_im,mx\n1.0,0.5\n", encoding="utf-8")
    code, _, err = run_cli(["fit", "beta", "--input", str(f)], capsys)
    assert code == EXIT_CONFIG
    assert "gamma_c" in err


# ------------------------------------------------------------- config files


def test_config_file_supplies_and_flags_override(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("L = 2\ngamma_im = 4.0   # comment\nomega = 1.0\n",
                   encoding="utf-8")
    out = tmp_path / "a.csv"
    code, _, _ = run_cli(["spectrum", "--config", str(cfg),
                          "--out", str(out)], capsys)
    assert code == EXIT_OK
    _, _, rows = read_csv(str(out))
    assert len(rows) == 4 and rows[0]["L"] == "2"

    out2 = tmp_path / "b.csv"
    code, _, _ = run_cli(["spectrum", "--config", str(cfg), "--L", "3",
                          "--out", str(out2)], capsys)
    assert code == EXIT_OK
    _, _, rows2 = read_csv(str(out2))
    assert len(rows2) == 8 and rows2[0]["L"] == "3"


def test_config_file_bad_line_exits_config(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("L 2\n", encoding="utf-8")
    code, _, err = run_cli(["spectrum", "--config", str(cfg)], capsys)
    assert code == EXIT_CONFIG
    assert "key=value" in err


# -------------------------------------------------------------- subcommands


def test_spectrum_schema_and_values(tmp_path, capsys):
    out = tmp_path / "spec.csv"
    code, _, _ = run_cli(["spectrum", "--L", "2", "--gamma-im", "4.0",
                          "--out", str(out)], capsys)
    assert code == EXIT_OK
    _, columns, rows = read_csv(str(out))
    assert columns == ["L", "omega", "gamma_re", "gamma_im", "e_re", "e_im"]
    energies = np.array([complex(float(r["e_re"]), float(r["e_im"]))
                         for r in rows])
    assert len(energies) == 4
    from qcpchain.oracle import l2_spectrum

    expected = l2_spectrum(1.0, 4.0j).energies
    for e in expected:
        assert np.min(np.abs(energies - e)) < 1e-12


def test_spectrum_stdout_when_no_out(capsys):
    code, out, _ = run_cli(["spectrum", "--L", "2", "--gamma-im", "4.0"],
                           capsys)
    assert code == EXIT_OK
    assert out.startswith("#") and "e_re" in out


def test_spectrum_workers_deterministic(tmp_path, capsys):
    a, b = tmp_path / "w1.csv", tmp_path / "w2.csv"
    args = ["spectrum", "--L", "3", "--gamma-min", "1.0", "--gamma-max",
            "5.0", "--steps", "5"]
    assert run_cli(args + ["--workers", "1", "--out", str(a)],
                   capsys)[0] == EXIT_OK
    assert run_cli(args + ["--workers", "2", "--out", str(b)],
                   capsys)[0] == EXIT_OK
    assert a.read_bytes() == b.read_bytes()


def test_sweep_schema_masking_and_determinism(tmp_path, capsys):
    out1, out2 = tmp_path / "s1.csv", tmp_path / "s2.csv"
    args = ["sweep", "--L", "2", "--gamma-min", "1.0", "--gamma-max",
            "4.0", "--steps", "4", "--observables", "mx,gap"]
    assert run_cli(args + ["--out", str(out1)], capsys)[0] == EXIT_OK
    assert run_cli(args + ["--out", str(out2)], capsys)[0] == EXIT_OK
    assert out1.read_bytes() == out2.read_bytes()
    _, columns, rows = read_csv(str(out1))
    assert columns == ["L", "omega", "gamma_re", "gamma_im", "e0_re",
                       "e0_im", "rule", "overlap_prev", "mx", "my", "mz",
                       "nup", "chi", "gap", "svn_half"]
    assert len(rows) == 4
    for row in rows:
        assert row["mx"] != "" and row["gap"] != ""
        assert row["chi"] == "" and row["svn_half"] == ""
        assert row["my"] == "" and row["mz"] == "" and row["nup"] == ""


def test_sweep_matches_closed_form(tmp_path, capsys):
    from qcpchain.oracle import l2_mx

    out = tmp_path / "s.csv"
    code, _, _ = run_cli(["sweep", "--L", "2", "--gamma-min", "2.0",
                          "--gamma-max", "4.0", "--steps", "3",
                          "--observables", "mx", "--out", str(out)], capsys)
    assert code == EXIT_OK
    _, _, rows = read_csv(str(out))
    for row in rows:
        expected = l2_mx(1.0, float(row["gamma_im"]))
        assert abs(float(row["mx"]) - expected) < 1e-9


def test_hermitian_sweep_real_axis(tmp_path, capsys):
    out = tmp_path / "h.csv"
    code, _, _ = run_cli(["hermitian", "--L", "2", "--gamma-min", "-4.0",
                          "--gamma-max", "0.0", "--steps", "5",
                          "--out", str(out)], capsys)
    assert code == EXIT_OK
    _, _, rows = read_csv(str(out))
    assert [float(r["gamma_re"]) for r in rows] == [-4, -3, -2, -1, 0]
    for row in rows:
        assert float(row["gamma_im"]) == 0.0
        assert abs(float(row["e0_im"])) < 1e-12
        assert row["rule"] == "min-real-part"


def test_corr_schema_tracking_and_xi(tmp_path, capsys):
    out = tmp_path / "c.csv"
    code, _, _ = run_cli(
        ["corr", "--L", "6", "--gammas", "14.5,15.0", "--boundary", "open",
         "--track-from", "12.5", "--with-xi", "--window-lo", "2",
         "--window-hi", "6", "--out", str(out)], capsys)
    assert code == EXIT_OK
    _, columns, rows = read_csv(str(out))
    assert columns == ["L", "gamma", "n", "value", "xi"]
    gammas = sorted({float(r["gamma"]) for r in rows})
    assert gammas == [14.5, 15.0]
    for g in gammas:
        sub = [r for r in rows if float(r["gamma"]) == g]
        assert [int(r["n"]) for r in sub] == [2, 3, 4, 5, 6]
        xi = {r["xi"] for r in sub}
        assert len(xi) == 1 and float(xi.pop()) > 0
    by_g = {g: [abs(float(r["value"])) for r in rows
                if float(r["gamma"]) == g] for g in gammas}
    assert by_g[14.5][0] > by_g[15.0][0]


def test_corr_bad_gammas_exits_config(capsys):
    code, _, err = run_cli(["corr", "--L", "4", "--gammas", "a,b"], capsys)
    assert code == EXIT_CONFIG
    assert "gammas" in err


def test_entropy_cut_all(tmp_path, capsys):
    out = tmp_path / "e.csv"
    code, _, _ = run_cli(["entropy", "--L", "4", "--gamma-min", "12.0",
                          "--gamma-max", "15.0", "--steps", "4",
                          "--cut", "all", "--out", str(out)], capsys)
    assert code == EXIT_OK
    _, columns, rows = read_csv(str(out))
    assert columns == ["L", "omega", "gamma_re", "gamma_im", "cut", "svn"]
    assert len(rows) == 12
    cuts = {int(r["cut"]) for r in rows}
    assert cuts == {1, 2, 3}
    for r in rows:
        # biorthogonal entropy is real but not sign- or ln(dim)-bounded
        assert np.isfinite(float(r["svn"]))


def test_entropy_kind_right_is_bounded(tmp_path, capsys):
    out = tmp_path / "er.csv"
    code, _, _ = run_cli(["entropy", "--L", "4", "--gamma-min", "12.0",
                          "--gamma-max", "15.0", "--steps", "4",
                          "--cut", "all", "--kind", "right",
                          "--out", str(out)], capsys)
    assert code == EXIT_OK
    _, _, rows = read_csv(str(out))
    for r in rows:
        svn = float(r["svn"])
        cut = int(r["cut"])
        bound = np.log(2.0 ** min(cut, 4 - cut)) + 1e-12
        assert -1e-12 <= svn <= bound


def test_entropy_bad_kind_exits_config(tmp_path, capsys):
    cfgfile = tmp_path / "e.cfg"
    cfgfile.write_text("kind = left\n")
    code, _, err = run_cli(["entropy", "--L", "4", "--gamma-min", "1",
                            "--gamma-max", "2", "--steps", "2",
                            "--config", str(cfgfile)], capsys)
    assert code == EXIT_CONFIG
    assert "kind" in err


def test_entropy_bad_cut_exits_config(capsys):
    code, _, err = run_cli(["entropy", "--L", "4", "--gamma-min", "1",
                            "--gamma-max", "2", "--steps", "2",
                            "--cut", "mid"], capsys)
    assert code == EXIT_CONFIG
    assert "cut" in err


# ------------------------------------------------------------- fit pipeline


@pytest.fixture(scope="module")
def sweep_csv(tmp_path_factory):
    """Near-transition magnetization and susceptibility data at L=4."""
    from qcpchain.groundstate import find_gamma_c

    path = tmp_path_factory.mktemp("fitdata") / "sweep4.csv"
    gc = find_gamma_c(4, tol=1e-6, lo=13.0).gamma_c
    lo, hi = gc - 0.4, gc + 0.4
    code = main(["sweep", "--L", "4", "--gamma-min", f"{lo}",
                 "--gamma-max", f"{hi}", "--steps", "81",
                 "--observables", "mx,chi", "--out", str(path)])
    assert code == EXIT_OK
    return path, gc


def test_fit_beta_end_to_end(sweep_csv, tmp_path, capsys):
    path, gc = sweep_csv
    out = tmp_path / "beta.json"
    code, text, _ = run_cli(
        ["fit", "beta", "--input", str(path), "--gamma-c", f"{gc}",
         "--window-lo", "1e-3", "--window-hi", "0.4",
         "--out", str(out)], capsys)
    assert code == EXIT_OK
    fields = text.strip().split(",")
    assert fields[0] == "beta"
    assert abs(float(fields[1]) - 0.51) < 0.08
    payload = json.loads(out.read_text(encoding="utf-8"))
    assert payload["kind"] == "beta"
    assert payload["value"] == float(fields[1])
    assert payload["points_used"] == int(fields[6])


def test_fit_gamma_end_to_end(sweep_csv, capsys):
    path, gc = sweep_csv
    code, text, _ = run_cli(
        ["fit", "gamma", "--input", str(path), "--gamma-c", f"{gc}",
         "--window-lo", "1e-2", "--window-hi", "0.1"], capsys)
    assert code == EXIT_OK
    fields = text.strip().split(",")
    assert fields[0] == "gamma"
    assert abs(float(fields[1]) - 1.52) < 0.25


def test_fit_xi_requires_gamma_choice(tmp_path, capsys):
    rows = ["L,gamma,n,value"]
    for g, xi in ((14.5, 0.6), (15.0, 0.5)):
        for n in range(2, 8):
            rows.append(f"6,{g},{n},{np.exp(-n / xi):.17e}")
    path = tmp_path / "corr.csv"
    path.write_text("\n".join(rows) + "\n", encoding="utf-8")

    code, _, err = run_cli(["fit", "xi", "--input", str(path)], capsys)
    assert code == EXIT_CONFIG
    assert "--gamma" in err

    code, text, _ = run_cli(["fit", "xi", "--input", str(path),
                             "--gamma", "14.5", "--window-lo", "2",
                             "--window-hi", "7"], capsys)
    assert code == EXIT_OK
    fields = text.strip().split(",")
    assert fields[0] == "xi"
    assert abs(float(fields[1]) - 0.6) < 1e-10


def test_fit_nu_needs_xi_column(tmp_path, capsys):
    path = tmp_path / "noxi.csv"
    path.write_text("L,gamma,n,value\n4,14.5,2,0.1\n", encoding="utf-8")
    code, _, err = run_cli(["fit", "nu", "--input", str(path),
                            "--gamma-c", "13.8"], capsys)
    assert code == EXIT_CONFIG
    assert "xi" in err


def test_fit_extrapolate_end_to_end(tmp_path, capsys):
    path = tmp_path / "gcs.csv"
    rows = ["L,gamma_c"]
    for L in range(4, 17, 2):
        rows.append(f"{L},{13.845 - 7.0 * L ** -2.4:.17e}")
    path.write_text("\n".join(rows) + "\n", encoding="utf-8")
    code, text, _ = run_cli(["fit", "extrapolate", "--input", str(path)],
                            capsys)
    assert code == EXIT_OK
    fields = text.strip().split(",")
    assert fields[0] == "gc-extrapolation"
    assert abs(float(fields[1]) - 13.845) < 1e-6


# ------------------------------------------------------------------- oracle


def test_oracle_passes(capsys):
    code, out, _ = run_cli(["oracle"], capsys)
    assert code == EXIT_OK
    assert "all checks passed" in out
    assert out.count("ok  ") >= 5


def test_version_and_console_entry():
    proc = subprocess.run([sys.executable, "-m", "qcpchain", "--version"],
                          capture_output=True, text=True, check=True)
    assert proc.stdout.startswith("qcpchain ")
