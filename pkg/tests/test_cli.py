import os
import shutil
import subprocess
import sys

import pytest

from oddforms.cli import main
from oddforms.config import ConfigError, DEFAULTS, parse_config

ALT = "vars: x1 x2 x3\nform deg=1: x1 - 4*x2 + 16*x3\n"


@pytest.fixture
def alt(tmp_path):
    path = tmp_path / "alt.sys"
    path.write_text(ALT)
    return path


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_rank_csv(capsys, alt):
    code, out, err = run(capsys, "rank", alt)
    assert code == 0
    assert out.splitlines()[0] == "degree,r,h_lower,h_upper,exhaustive,B_value,confidence"
    assert out.splitlines()[1].startswith("1,1,3,3,true,3,exact-symbolic")
    assert "strength_birch holds=true" in err


def test_regularize_writes_certificate(capsys, tmp_path):
    src = tmp_path / "red.sys"
    src.write_text("form deg=3: x1^3 + x1*x2^2 + x1*x3^2\n")
    cfg = tmp_path / "c.cfg"
    cfg.write_text("H = 2\n")
    code, out, _ = run(capsys, "regularize", src, "--config", cfg, "--certificate", tmp_path / "cert.txt")
    assert code == 0
    assert "J_F = x1" in (tmp_path / "cert.txt").read_text()


def test_even_degree_exit_1(capsys, tmp_path):
    src = tmp_path / "even.sys"
    src.write_text("form deg=2: x1^2 + x2^2\n")
    code, _, err = run(capsys, "regularize", src)
    assert code == 1 and "even degree" in err


def test_syntax_error_exit_2(capsys, tmp_path):
    src = tmp_path / "bad.sys"
    src.write_text("form deg=3: x1^^3\n")
    assert run(capsys, "rank", src)[0] == 2


def test_missing_file_exit_2(capsys, tmp_path):
    assert run(capsys, "rank", tmp_path / "nope.sys")[0] == 2


def test_unknown_subcommand_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2


def test_count_fp_strict(capsys, tmp_path):
    src = tmp_path / "c.sys"
    src.write_text("form deg=3: x1^3 + x2^3 + x3^3 + x4^3 + x5^3\nform deg=1: x1 + x2 + x3 + x4 + x5\n")
    code, out, _ = run(capsys, "count-fp", src, "--primes", "5")
    assert code == 0 and "5,225,125,25,false" in out
    assert run(capsys, "count-fp", src, "--primes", "5", "--strict")[0] == 1


def test_count_fp_cap_exit_1(capsys, alt):
    assert run(capsys, "count-fp", alt, "--primes", "101", "--cap", "1000")[0] == 1


def test_lift_seed_and_search(capsys, tmp_path, alt):
    src = tmp_path / "cube.sys"
    src.write_text("vars: x y\nform deg=3: x^3 - 2*y^3\n")
    code, out, _ = run(capsys, "lift", src, "--p", "5", "--k", "3", "--seed", "3,1", "--frozen", "y")
    assert code == 0 and "point = 53,1" in out
    code, out, _ = run(capsys, "lift", alt, "--p", "2")
    assert code == 0 and "signed = -12,1,1" in out and "valuations = 2,0,0" in out


def test_lift_bad_seed_length(capsys, alt):
    assert run(capsys, "lift", alt, "--p", "5", "--seed", "1,2")[0] == 2


def test_scale(capsys, tmp_path, alt):
    code, out, _ = run(capsys, "scale", alt, "--scaled-system", tmp_path / "scaled.sys")
    assert code == 0
    assert "bad_primes = 2" in out and "verdict = PASS" in out
    assert "form deg=1:" in (tmp_path / "scaled.sys").read_text()


def test_count(capsys, tmp_path):
    src = tmp_path / "ap.sys"
    src.write_text("form deg=1: x1 + x2 - 2*x3\n")
    code, out, _ = run(capsys, "count", src, "--N", "10", "--N", "100")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "N,Y,count,predicted,ratio"
    assert lines[1].startswith("10,1,16,")
    code, out, _ = run(capsys, "count", src, "--N", "10", "--timing")
    assert out.splitlines()[0].endswith(",elapsed")
    code, out, _ = run(capsys, "count", src, "--N", "5", "--weighted")
    assert out.splitlines()[0] == "N,weighted"
    assert run(capsys, "count", src, "--J", "x9")[0] == 2


def test_pipeline_outputs_and_determinism(capsys, tmp_path, alt):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(f"system = {alt.name}\noutput_dir = out\nN = 100,1000\n")
    code, out, _ = run(capsys, "pipeline", "--config", cfg)
    assert code == 0 and "verdict = PASS" in out
    first = {p.name: p.read_text() for p in (tmp_path / "out").iterdir()}
    assert set(first) == {"report.txt", "reduced.sys", "certificate.txt", "plan.txt", "scaled.sys",
                          "counts.csv"}
    assert not [n for n in os.listdir(tmp_path / "out") if n.startswith(".")]
    run(capsys, "pipeline", "--config", cfg)
    second = {p.name: p.read_text() for p in (tmp_path / "out").iterdir()}
    assert first == second
    assert "N,Y,count,predicted,ratio\n100,4,27," in first["counts.csv"]


def test_pipeline_needs_system(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("N = 100\n")
    assert run(capsys, "pipeline", "--config", cfg)[0] == 2


def test_config_rejects_unknown_and_bad_values():
    with pytest.raises(ConfigError, match="unknown"):
        parse_config("colour = blue\n")
    with pytest.raises(ConfigError):
        parse_config("N = 100,10\n")
    with pytest.raises(ConfigError):
        parse_config("rank_budget = 0\n")
    with pytest.raises(ConfigError):
        parse_config("H = -1,1,0\n")


def test_config_defaults_and_overrides(tmp_path):
    cfg = parse_config("H5 = 9\nN = 10,20\n", tmp_path)
    assert cfg.growth.H(5, 1, 5) == 9 and cfg.growth.H(3, 1, 3) == 2 * 16
    assert cfg.N == (10, 20) and cfg.output_dir == tmp_path / DEFAULTS["output_dir"]


@pytest.mark.skipif(shutil.which("oddforms") is None, reason="console script not installed")
def test_console_script(alt):
    res = subprocess.run(["oddforms", "rank", str(alt)], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.startswith("degree,")
    res = subprocess.run([sys.executable, "-m", "oddforms.cli", "bogus"], capture_output=True, text=True)
    assert res.returncode == 2
