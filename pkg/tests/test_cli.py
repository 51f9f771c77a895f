"""Command-line interface: reports, exit codes, config handling and determinism."""
import json

import numpy as np
import pytest

from schouten.cli import CONFIG_SCHEMA, csv_text, dumps, load_config, main
from schouten.errors import UsageError


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


# --- serialization ----------------------------------------------------------------

def test_dumps_float_format():
    text = dumps({"a": 0.1, "b": float("nan"), "c": None, "d": [1, 2.0], "e": np.float64(1e-20)})
    d = json.loads(text)
    assert d["a"] == 0.1 and d["b"] is None and d["c"] is None and d["d"] == [1, 2.0]
    assert '"a": 0.10000000000000001' in text
    assert text.endswith("\n")


def test_csv_format():
    text = csv_text({"r": [0.0, 0.5], "u": [1.0, float("nan")]})
    assert text == "r,u\n0,1\n0.5,nan\n"
    assert "\r" not in text


# --- config ---------------------------------------------------------------------

def test_config_unknown_key(tmp_path):
    path = write(tmp_path, "c.ini", "[cone]\nn = 5\nfoo = 1\n")
    with pytest.raises(UsageError, match="unknown config key"):
        load_config(path, ("cone",))


def test_config_unknown_section(tmp_path):
    path = write(tmp_path, "c.ini", "[solve]\nmode = oracle\n")
    with pytest.raises(UsageError, match="unknown config section"):
        load_config(path, ("cone",))


def test_config_defaults_and_types(tmp_path):
    path = write(tmp_path, "c.ini", "[solve]\nm_schedule = 2, 4,6\nlift = no\n")
    cfg = load_config(path, ("problem", "geometry", "grid", "solve"))
    assert cfg["solve"]["m_schedule"] == (2.0, 4.0, 6.0)
    assert cfg["solve"]["lift"] is False
    assert cfg["grid"]["N"] == CONFIG_SCHEMA["grid"]["N"][1]


def test_config_bad_value(tmp_path):
    path = write(tmp_path, "c.ini", "[grid]\nN = many\n")
    with pytest.raises(UsageError):
        load_config(path, ("grid",))


# --- cone --------------------------------------------------------------------------

def test_cone_report(capsys):
    code, out, _ = run(capsys, "cone", "--n", "5", "--k", "2", "--tau", "1")
    d = json.loads(out)
    assert code == 0
    assert d["schema_version"] == 1
    assert d["mu_plus"] == pytest.approx(1.5, abs=1e-10)
    assert d["structure_check"]["violations"] == 0
    assert d["config"]["cone"]["n"] == 5


def test_cone_positive_cone(capsys):
    code, out, _ = run(capsys, "cone", "--n", "5", "--k", "5", "--tau", "1")
    d = json.loads(out)
    assert code == 0 and d["mu_plus"] == 0 and d["beta"] is None


def test_cone_deformed(capsys):
    from schouten.cone import mu_plus_exact

    code, out, _ = run(capsys, "cone", "--n", "7", "--k", "3", "--tau", "0.75")
    d = json.loads(out)
    assert d["mu_plus"] == pytest.approx(mu_plus_exact(7, 3, 0.75), abs=1e-10)
    assert d["mu_plus_deviation_exact"] <= 1e-10
    assert d["mu_plus_linear"] == pytest.approx(4 / 3 + 1.5)


def test_cone_invalid(capsys):
    code, _, err = run(capsys, "cone", "--n", "5", "--k", "7")
    assert code == 2 and "k must satisfy" in err


def test_cone_byte_identical(capsys, tmp_path):
    a = run(capsys, "cone", "--n", "6", "--k", "2", "--seed", "3", "--out", str(tmp_path / "a"))
    b = run(capsys, "cone", "--n", "6", "--k", "2", "--seed", "3", "--out", str(tmp_path / "b"))
    assert a[1] == b[1]
    assert (tmp_path / "a" / "cone.json").read_bytes() == (tmp_path / "b" / "cone.json").read_bytes()


def test_argparse_error_exit_code(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["cone", "--n", "five"])
    assert exc.value.code == 2


# --- barrier-check -----------------------------------------------------------------

def test_barrier_annulus_default(capsys):
    code, out, _ = run(capsys, "barrier-check", "--family", "AnnulusLog")
    d = json.loads(out)
    assert code == 0 and d["pass"] and d["reports"][0]["family"] == "AnnulusLog"


def test_barrier_window_violation(capsys, tmp_path):
    path = write(tmp_path, "w.ini", "[annulus]\neps = 0.1\nr_minus = 0.01\nr_plus = 0.02\n")
    code, _, err = run(capsys, "barrier-check", "--family", "AnnulusLog", "--config", path)
    assert code == 2
    assert "1 < r_+/r_- < 1 + eps/(2(beta+2))" in err


def test_barrier_module_example_non_strict(capsys, tmp_path):
    path = write(tmp_path, "e.ini", "[annulus]\nr_plus = 0.0105\nstrict = false\n")
    code, out, _ = run(capsys, "barrier-check", "--family", "AnnulusLog", "--config", path)
    assert code == 0 and json.loads(out)["reports"][0]["params"]["window_ok"] is False


def test_barrier_guan_reports_delta(capsys):
    code, out, _ = run(capsys, "barrier-check", "--family", "GuanUpper", "--n", "4")
    d = json.loads(out)["reports"][0]
    assert code == 0 and d["measured"]["delta_star"] > 0


def test_barrier_all_parallel_matches_serial(capsys):
    a = run(capsys, "barrier-check", "--family", "all", "--grid", "200")
    b = run(capsys, "barrier-check", "--family", "all", "--grid", "200", "--jobs", "2")
    assert a[0] == b[0] == 0
    assert a[1] == b[1]
    fams = [r["family"] for r in json.loads(a[1])["reports"]]
    assert fams == ["AnnulusLog", "LNSuper", "GuanUpper", "CollarLog"]


def test_barrier_collar_domain_error(capsys, tmp_path):
    path = write(tmp_path, "c.ini", "[collar]\neps = 0.6\n")
    code, _, err = run(capsys, "barrier-check", "--family", "CollarLog", "--config", path)
    assert code == 2


# --- solve ---------------------------------------------------------------------------

ORACLE = "[problem]\nn = 3\nk = 1\ntau = 0\n[geometry]\nr_hi = 0.9\n[solve]\nmode = oracle\n"


def test_solve_oracle(capsys, tmp_path):
    path = write(tmp_path, "o.ini", ORACLE)
    out_dir = tmp_path / "out"
    code, out, _ = run(capsys, "solve", "--config", path, "--out", str(out_dir))
    d = json.loads(out)
    assert code == 0
    assert d["checks"]["sup_error"]["value"] <= 5e-4
    assert d["report"]["converged"]
    csv = (out_dir / "solution.csv").read_bytes()
    assert csv.startswith(b"r,u,u_r,u_rr,eig_radial,eig_tangential,f_value,cone_margin\n")
    assert b"\r" not in csv


def test_solve_byte_identical(capsys, tmp_path):
    path = write(tmp_path, "o.ini", ORACLE)
    run(capsys, "solve", "--config", path, "--out", str(tmp_path / "a"))
    run(capsys, "solve", "--config", path, "--out", str(tmp_path / "b"))
    for name in ("solve.json", "solution.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_solve_missing_config(capsys, tmp_path):
    assert run(capsys, "solve")[0] == 2
    assert run(capsys, "solve", "--config", str(tmp_path / "none.ini"))[0] == 2


def test_solve_numerical_failure(capsys, tmp_path):
    path = write(tmp_path, "f.ini", ORACLE + "max_iter = 1\n")
    code, out, _ = run(capsys, "solve", "--config", path)
    d = json.loads(out)
    assert code == 3 and d["error"]["error"] == "MaxIter"


def test_solve_tau_mode(capsys, tmp_path):
    path = write(tmp_path, "t.ini",
                 "[geometry]\nr_lo = 0.5\n[grid]\nN = 100\n[solve]\nmode = tau\nboundary = 2\n")
    code, out, _ = run(capsys, "solve", "--config", path)
    assert code == 0 and json.loads(out)["report"]["diagnostics"]["tau"] == 0.9


def test_solve_singular(capsys, tmp_path):
    path = write(tmp_path, "s.ini", "[grid]\nN = 800\n[solve]\nmode = singular\nband = 0.05,0.2\n")
    code, out, _ = run(capsys, "solve", "--config", path)
    d = json.loads(out)
    assert code == 0
    assert d["checks"]["defect"]["value"] <= 0.05


def test_solve_singular_defaults(capsys, tmp_path):
    path = write(tmp_path, "s.ini", "[solve]\nmode = singular\n")
    code, out, _ = run(capsys, "solve", "--config", path)
    d = json.loads(out)
    assert code == 0
    assert d["config"]["grid"]["N"] == 1600 and d["config"]["solve"]["band"] == [0.02, 0.2]
    assert d["report"]["diagnostics"]["m"] <= 12
    assert d["checks"]["defect"]["value"] <= 0.05


# --- asymptotics -----------------------------------------------------------------------

def test_asymptotics_from_oracle_csv(capsys, tmp_path):
    path = write(tmp_path, "o.ini", ORACLE + "[grid]\nN = 400\n")
    run(capsys, "solve", "--config", path, "--out", str(tmp_path / "s"))
    cfg = write(tmp_path, "a.ini", f"[asymptotics]\nsolution = {tmp_path / 's' / 'solution.csv'}\n")
    code, out, _ = run(capsys, "asymptotics", "--config", cfg, "--n", "3", "--out",
                       str(tmp_path / "a"))
    d = json.loads(out)
    assert code == 0 and d["upper_envelope"]["holds"]
    lines = (tmp_path / "a" / "asymptotics.csv").read_text().splitlines()
    assert lines[0] == "d,u_plus_ln_d"
    dd, val = np.array([[float(x) for x in ln.split(",")] for ln in lines[1:]]).T
    R = 0.9
    r = R - dd
    exact = np.log(2 / (1 - r * r)) + np.log(dd)
    np.testing.assert_allclose(val, exact, atol=5e-4)


def test_asymptotics_empty_band(capsys, tmp_path):
    path = write(tmp_path, "o.ini", ORACLE + "[grid]\nN = 16\n")
    run(capsys, "solve", "--config", path, "--out", str(tmp_path / "s"))
    cfg = write(tmp_path, "a.ini", f"[asymptotics]\nsolution = {tmp_path / 's' / 'solution.csv'}\n")
    code, _, err = run(capsys, "asymptotics", "--config", cfg, "--band", "0.5001,0.5002")
    assert code == 2 and "band" in err


def test_asymptotics_needs_input(capsys):
    assert run(capsys, "asymptotics")[0] == 2


def test_log_env(capsys, monkeypatch):
    monkeypatch.setenv("SCHOUTEN_LOG", "debug")
    code, _, _ = run(capsys, "cone", "--n", "4", "--k", "1")
    assert code == 0
