"""Command line behavior: outputs, spec files, exit codes, determinism."""

import dataclasses
import json
import math
import shutil
import subprocess
import sys

import numpy as np
import pytest

from convbody import bodies as bd
from convbody import cli
from convbody import convolution as cv
from convbody import inequalities as iq
from convbody import oracles
from convbody import thetabody as tb


def run(argv, capsys):
    code = cli.main(argv)
    cap = capsys.readouterr()
    return code, cap.out, cap.err


def csv_rows(text):
    lines = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    header = lines[0].split(",")
    return header, [ln.split(",") for ln in lines[1:]]


# -- volume and body parsing ---------------------------------------------


def test_volume_named_bodies(capsys):
    code, out, _ = run(["volume", "simplex", "--n", "3"], capsys)
    assert code == 0
    assert out == "0.16666666666666669 exact +-0\n"
    code, out, _ = run(["volume", "cube2"], capsys)
    assert code == 0
    assert float(out.split()[0]) == 1.0
    code, out, _ = run(["volume", "ball", "--n", "2", "--r", "2.0"], capsys)
    assert code == 0
    assert abs(float(out.split()[0]) - 4.0 * math.pi) < 1e-9
    code, out, _ = run(["volume", "cross3"], capsys)
    assert code == 0
    assert abs(float(out.split()[0]) - 4.0 / 3.0) < 1e-12


def test_volume_neg_prefix_matches(capsys):
    _, out_pos, _ = run(["volume", "simplex2"], capsys)
    _, out_neg, _ = run(["volume", "neg-simplex2"], capsys)
    assert float(out_pos.split()[0]) == pytest.approx(
        float(out_neg.split()[0]), rel=1e-12)


def test_volume_spec_file(tmp_path, capsys):
    spec = {"kind": "vpoly",
            "points": [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]],
            "transform": {"matrix": [[2.0, 0.0], [0.0, 1.0]]},
            "label": "stretched triangle"}
    path = tmp_path / "tri.json"
    path.write_text(json.dumps(spec))
    code, out, _ = run(["volume", str(path)], capsys)
    assert code == 0
    assert float(out.split()[0]) == pytest.approx(1.0, rel=1e-12)


def test_spec_file_errors(tmp_path, capsys):
    bad = tmp_path / "bad.json"

    bad.write_text("{ not json")
    code, _, err = run(["volume", str(bad)], capsys)
    assert code == 2
    assert "spec error" in err and "line 1" in err

    bad.write_text(json.dumps([1, 2]))
    code, _, err = run(["volume", str(bad)], capsys)
    assert code == 2
    assert "must be an object with a 'kind' field" in err

    bad.write_text(json.dumps({"kind": "vpoly"}))
    code, _, err = run(["volume", str(bad)], capsys)
    assert code == 2
    assert "needs field 'points'" in err

    code, _, err = run(["volume", str(tmp_path / "missing.json")], capsys)
    assert code == 2
    assert "cannot read spec file" in err


def test_unknown_body_and_missing_dimension(capsys):
    code, _, err = run(["volume", "dodecahedron"], capsys)
    assert code == 2
    assert "unknown body" in err
    code, _, err = run(["volume", "cube"], capsys)
    assert code == 2
    assert "needs a dimension suffix or --n" in err


def test_unknown_verb_exits_2(capsys):
    code, _, err = run(["frobnicate"], capsys)
    assert code == 2
    assert "error" in err


# -- theta-body, limit-body, proj-body, mfold ----------------------------


def test_theta_body_volume_and_out(tmp_path, capsys):
    out_file = tmp_path / "body.json"
    argv = ["theta-body", "--K", "cube2", "--L", "cube2", "--theta", "0.5",
            "--dirs", "512", "--out", str(out_file)]
    code, out, _ = run(argv, capsys)
    assert code == 0
    assert "(theta=0.5, 512 directions)" in out
    got = float(out.split()[1])
    want = (2.0 * oracles.cube_quotient(2, 0.5)) ** 2
    assert got == pytest.approx(want, rel=2e-3)

    text = out_file.read_text()
    meta = json.loads(text)["meta"]
    assert meta["volume"] == pytest.approx(got, rel=1e-9)
    assert meta["dirs"] == 512 and meta["theta"] == 0.5
    rb = tb.radial_body_from_json(text)
    v, _ = tb.radial_volume_with_error(rb)
    assert v == pytest.approx(got, rel=1e-12)


def test_theta_body_requires_pair(capsys):
    code, _, err = run(["theta-body", "--K", "cube2"], capsys)
    assert code == 2
    assert "needs --K and --L" in err


def test_theta_body_rejects_bad_theta(capsys):
    code, _, err = run(["theta-body", "--K", "cube2", "--L", "cube2",
                        "--theta", "1.5"], capsys)
    assert code == 2
    assert "theta must lie in" in err
    code, _, err = run(["theta-body", "--K", "cube2", "--L", "cube2",
                        "--theta", "1"], capsys)
    assert code == 2
    assert "theta in [0, 1)" in err


def test_theta_body_rerun_identical(capsys):
    argv = ["theta-body", "--K", "simplex2", "--L", "neg-simplex2",
            "--theta", "0.3", "--dirs", "128"]
    _, first, _ = run(argv, capsys)
    _, second, _ = run(argv, capsys)
    assert first == second


def test_limit_body_bounded_square_pair(capsys):
    code, out, _ = run(["limit-body", "--K", "cube2", "--L", "neg-cube2",
                        "--dirs", "256"], capsys)
    assert code == 0
    # limit of the square with its reflection is the diamond of area 2
    assert float(out.split()[1]) == pytest.approx(2.0, rel=2e-2)


def test_limit_body_unbounded_square_in_disk(capsys):
    code, out, _ = run(["limit-body", "--K", "cube2", "--L", "ball2",
                        "--dirs", "64"], capsys)
    assert code == 0
    assert out == "unbounded in 64 of 64 directions\n"


def test_proj_body_triangle_functional(capsys):
    code, out, _ = run(["proj-body", "--K", "simplex2", "--dirs", "512"],
                       capsys)
    assert code == 0
    functional = float(out.split()[-1])
    assert functional == pytest.approx(1.5, rel=2e-3)


def test_mfold_three_segments(capsys):
    code, out, _ = run(["mfold", "--bodies", "cube1,cube1,cube1",
                        "--theta", "0.5", "--dirs", "2"], capsys)
    assert code == 0
    assert "(m=3, theta=0.5, max overlap 0.75)" in out
    got = float(out.split()[1])
    assert got == pytest.approx(3.0 - 2.0 * math.sqrt(0.75), rel=1e-6)


def test_mfold_lifted_dimension_limit_exits_3(capsys):
    code, _, err = run(["mfold", "--bodies", "cube2,cube2,cube2,cube2,cube2",
                        "--theta", "0.5", "--dirs", "16"], capsys)
    assert code == 3
    assert "numeric error" in err


def test_mfold_needs_two_bodies(capsys):
    code, _, err = run(["mfold", "--bodies", "cube2", "--dirs", "16"], capsys)
    assert code == 2
    assert "at least two entries" in err


# -- check verb -----------------------------------------------------------


def test_check_rs_headers_and_row(capsys):
    code, out, _ = run(["check", "rs", "--K", "cube2", "--L", "cube2",
                        "--dirs", "128"], capsys)
    assert code == 0
    for line in ["# convbody ", "# seed 0", "# dirs 128", "# rtol 1e-08",
                 "# checks rs", "# thetas 0.5"]:
        assert any(ln.startswith(line) for ln in out.splitlines())
    header, rows = csv_rows(out)
    assert header[0] == "name" and "tightness" in header
    assert len(rows) == 1
    row = rows[0]
    assert row[header.index("name")] == "rogers-shephard-upper"
    assert float(row[header.index("tightness")]) == pytest.approx(1.5)
    assert row[header.index("passed")] == "True"


def test_check_zhang_simplex_pair_equality(capsys):
    code, out, _ = run(["check", "zhang", "--K", "simplex2",
                        "--L", "neg-simplex2", "--theta", "0.5",
                        "--theta-grid", "32", "--dirs", "512"], capsys)
    assert code == 0
    header, rows = csv_rows(out)
    names = [r[header.index("name")] for r in rows]
    assert "zhang-limit-lower" in names and "fubini-identity" in names
    for row in rows:
        assert row[header.index("passed")] == "True"
    zh = rows[names.index("zhang-limit-lower")]
    assert float(zh[header.index("tightness")]) == pytest.approx(1.0, abs=5e-3)
    assert "simplex-pair" in zh[header.index("notes")]


def test_check_unknown_name(capsys):
    code, _, err = run(["check", "bogus", "--K", "cube2", "--L", "cube2"],
                       capsys)
    assert code == 2
    assert "unknown check 'bogus'" in err


def test_check_failure_exits_1(monkeypatch, capsys):
    pair = cv.normalize(bd.cube(2), bd.cube(2))
    grid = tb.SphereGrid.make(2, 64, 0)
    real = iq.check_rogers_shephard(pair, grid, 1e-8, seed=0)
    broken = dataclasses.replace(real, passed=False)
    monkeypatch.setattr(cli.iq, "check_rogers_shephard",
                        lambda pair, grid, rtol, seed=None: broken)
    code, out, _ = run(["check", "rs", "--K", "cube2", "--L", "cube2",
                        "--dirs", "64"], capsys)
    assert code == 1
    header, rows = csv_rows(out)
    assert rows[0][header.index("passed")] == "False"


def test_check_fuzz_flag(capsys):
    code, out, _ = run(["check", "rs", "--fuzz", "2", "--n", "2",
                        "--dirs", "64", "--seed", "5"], capsys)
    assert code == 0
    header, rows = csv_rows(out)
    assert len(rows) == 2
    assert all(r[header.index("name")] == "rogers-shephard-upper"
               for r in rows)

    code, _, err = run(["check", "forms", "--fuzz", "2", "--n", "2"], capsys)
    assert code == 2
    assert "support --fuzz" in err


def test_check_rerun_identical_and_out_file(tmp_path, capsys):
    argv = ["check", "bm", "mono", "--K", "simplex2", "--L", "neg-simplex2",
            "--theta", "0.4", "--dirs", "128"]
    _, first, _ = run(argv, capsys)
    _, second, _ = run(argv, capsys)
    assert first == second

    out_file = tmp_path / "reports.csv"
    code, out, _ = run(argv + ["--out", str(out_file)], capsys)
    assert code == 0
    assert out == ""
    assert out_file.read_text() == first


# -- sweep and fuzz --------------------------------------------------------


def test_sweep_matches_oracles(capsys):
    code, out, _ = run(["sweep", "--n", "2", "--theta", "0.25",
                        "--theta", "0.75", "--dirs", "256",
                        "--K", "cube2", "--L", "cube2"], capsys)
    assert code == 0
    header, rows = csv_rows(out)
    assert header == ["theta", "cube", "cube_oracle", "ball", "ball_oracle",
                      "simplex", "simplex_oracle", "user"]
    assert len(rows) == 2
    for row in rows:
        vals = dict(zip(header, map(float, row)))
        assert vals["cube"] == pytest.approx(vals["cube_oracle"], rel=1e-3)
        assert vals["ball"] == pytest.approx(vals["ball_oracle"], rel=1e-3)
        assert vals["simplex"] == pytest.approx(vals["simplex_oracle"],
                                                rel=1e-3)
        # the user pair here is the cube pair again, same grid and all
        assert vals["user"] == vals["cube"]


def test_fuzz_verb_runs_battery(capsys):
    argv = ["fuzz", "--count", "2", "--n", "2", "--dirs", "64", "--seed", "5"]
    code, out, err = run(argv, capsys)
    assert code == 0
    header, rows = csv_rows(out)
    assert len(rows) > 0
    assert all(r[header.index("passed")] == "True" for r in rows)
    assert err.strip() == "%d reports, 0 failures" % len(rows)

    _, second, _ = run(argv, capsys)
    assert second == out


def test_fuzz_count_must_be_positive(capsys):
    code, _, err = run(["fuzz", "--count", "0", "--n", "2", "--dirs", "64"],
                       capsys)
    assert code == 2
    assert "error" in err


# -- seed resolution --------------------------------------------------------


def test_seed_env_fallback(monkeypatch, capsys):
    monkeypatch.setenv("CONVBODY_SEED", "7")
    _, out, _ = run(["check", "rs", "--K", "cube2", "--L", "cube2",
                     "--dirs", "64"], capsys)
    assert "# seed 7" in out
    # an explicit flag wins over the environment
    _, out, _ = run(["check", "rs", "--K", "cube2", "--L", "cube2",
                     "--dirs", "64", "--seed", "3"], capsys)
    assert "# seed 3" in out

    monkeypatch.setenv("CONVBODY_SEED", "pony")
    code, _, err = run(["check", "rs", "--K", "cube2", "--L", "cube2",
                        "--dirs", "64"], capsys)
    assert code == 2
    assert "CONVBODY_SEED must be an integer" in err


# -- installed entry points --------------------------------------------------


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "convbody", "volume",
                           "simplex", "--n", "3"],
                          capture_output=True, text=True, timeout=60)
    assert proc.returncode == 0
    assert proc.stdout == "0.16666666666666669 exact +-0\n"


def test_console_script_installed():
    exe = shutil.which("convbody")
    assert exe is not None
    proc = subprocess.run([exe, "volume", "cube3"], capture_output=True,
                          text=True, timeout=60)
    assert proc.returncode == 0
    assert float(proc.stdout.split()[0]) == 1.0
