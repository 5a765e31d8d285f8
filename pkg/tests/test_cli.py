import csv
import io
import math
import subprocess
import sys
from pathlib import Path

import pytest

from ergorate.cli import main, parse_grid, parse_points, ConfigError

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def table(text):
    rows = [line for line in text.splitlines() if not line.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(rows))))


def comments(text):
    return [line for line in text.splitlines() if line.startswith("#")]


def write(tmp_path, text, name="exp.yaml"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


class TestParsing:
    def test_points(self):
        assert parse_points("1, 2+1j,-3") == [1, 2 + 1j, -3]

    def test_bad_points(self):
        with pytest.raises(ConfigError):
            parse_points("1,x")

    @pytest.mark.parametrize("spec,n", [("geom:1:100:3", 3), ("1,2,3", 3), ([1, 2], 2), ({"geom": [1, 10, 5]}, 5)])
    def test_grid(self, spec, n):
        assert parse_grid(spec).size == n

    @pytest.mark.parametrize("spec", ["geom:1:2", "0,1", "", {"lin": [1, 2]}, 5])
    def test_bad_grid(self, spec):
        with pytest.raises(ConfigError):
            parse_grid(spec)


class TestEval:
    def test_square_roots(self, capsys):
        code, out, _ = run(capsys, "eval", "--fn", "frac_power:0.5", "--points", "1,4,9")
        assert code == 0
        vals = [float(r["value_re"]) for r in table(out)]
        assert vals == pytest.approx([1, 2, 3], rel=1e-13)

    def test_log_ratio(self, capsys):
        code, out, _ = run(capsys, "eval", "--fn", "log_ratio", "--points", "1")
        assert code == 0 and float(table(out)[0]["value_re"]) == 1

    def test_atom_at_origin(self, capsys):
        code, out, _ = run(capsys, "eval", "--fn", "atom:1", "--points", "0")
        assert code == 0 and float(table(out)[0]["value_re"]) == 0

    def test_header(self, capsys):
        _, out, _ = run(capsys, "eval", "--fn", "drift", "--points", "1")
        assert out.splitlines()[0] == "z_re,z_im,value_re,value_im"

    def test_seventeen_digits(self, capsys):
        _, out, _ = run(capsys, "eval", "--fn", "atom:1", "--points", "1")
        v = table(out)[0]["value_re"]
        assert float(v) == 1 - math.exp(-1)

    def test_unknown_function(self, capsys):
        code, _, err = run(capsys, "eval", "--fn", "nosuch", "--points", "1")
        assert code == 2 and "nosuch" in err

    def test_cut(self, capsys):
        code, _, _ = run(capsys, "eval", "--fn", "log_ratio", "--points", "-1")
        assert code == 2

    def test_no_points(self, capsys):
        assert run(capsys, "eval", "--fn", "drift")[0] == 2


class TestRate:
    def test_frac_power(self, capsys):
        code, out, _ = run(capsys, "rate", "--fn", "frac_power:0.5", "--t-grid", "1")
        assert code == 0 and float(table(out)[0]["rate"]) == pytest.approx(1.1283792, abs=5e-8)

    def test_drift(self, capsys):
        _, out, _ = run(capsys, "rate", "--fn", "drift", "--t-grid", "10")
        assert float(table(out)[0]["rate"]) == pytest.approx(0.1, rel=1e-15)

    def test_log_rate_bracket(self, capsys):
        code, out, _ = run(capsys, "rate", "--fn", "log_rate", "--t-grid", "10,100")
        assert code == 0
        r = float(table(out)[1]["rate"])
        target = (1 - 1 / 100) / math.log(100)
        c0, c1 = 1 / (3 * math.e**2), 2.0
        assert c0 * target <= r <= target / c0 * c1
        notes = comments(out)
        assert any("inside=True" in n and "t=100" in n for n in notes)

    def test_shape_comment(self, capsys):
        _, out, _ = run(capsys, "rate", "--fn", "log1p")
        assert "# t_rate positive, nondecreasing and concave: pass" in out

    def test_zero_function(self, capsys):
        code, _, err = run(capsys, "rate", "--fn", "drift:0", "--t-grid", "1")
        assert code == 2 and "no rate" in err

    def test_out_file(self, capsys, tmp_path):
        path = tmp_path / "r.csv"
        assert run(capsys, "rate", "--fn", "drift", "--out", str(path))[0] == 0
        assert path.read_text().startswith("t,rate,t_rate")


class TestLaplace:
    def test_table(self, capsys):
        code, out, _ = run(capsys, "laplace", "--fn", "atom:1", "--points", "1,2")
        assert code == 0
        rows = table(out)
        assert float(rows[0]["transform_re"]) == pytest.approx(1 - math.exp(-1), rel=1e-9)
        assert all(float(r["residual"]) < 1e-7 for r in rows)

    def test_left_half_plane(self, capsys):
        assert run(capsys, "laplace", "--fn", "drift", "--points", "0")[0] == 2


class TestVerify:
    @pytest.mark.parametrize("suite", ["wiener", "special", "comparability", "stieltjes", "roundtrip"])
    def test_passing_suites(self, capsys, suite):
        code, out, _ = run(capsys, "verify", suite)
        assert code == 0
        rows = table(out)
        assert rows and all(r["pass"] == "pass" for r in rows)

    def test_unknown_suite(self, capsys):
        assert run(capsys, "verify", "nosuch")[0] == 2

    def test_tolerance_env(self, capsys, monkeypatch):
        monkeypatch.setenv("ERGO_RATE_TOL", "1e-30")
        code, out, _ = run(capsys, "verify", "wiener")
        assert code == 1 and "FAIL" in out

    def test_bad_tolerance_env(self, capsys, monkeypatch):
        monkeypatch.setenv("ERGO_RATE_TOL", "tiny")
        assert run(capsys, "verify", "wiener")[0] == 2


class TestSimulate:
    def test_frac_power_config(self, capsys):
        code, out, _ = run(capsys, "simulate", "--config", str(CONFIGS / "frac_power.yaml"))
        assert code == 0
        rows = table(out)
        assert len(rows) == 20 and all(float(r["ratio"]) <= 1 for r in rows)
        assert list(rows[0]) == ["t", "norm", "rate", "ratio", "bound"]

    def test_optimality_config(self, capsys):
        code, out, _ = run(capsys, "simulate", "--config", str(CONFIGS / "optimality.yaml"))
        assert code == 0
        ratios = [float(r["ratio"]) for r in table(out)]
        assert len(ratios) == 10 and all(b > a for a, b in zip(ratios, ratios[1:]))
        assert "# lower bound: pass" in out

    def test_log_rate_config(self, capsys):
        assert run(capsys, "simulate", "--config", str(CONFIGS / "log_rate.yaml"))[0] == 0

    def test_deterministic(self, capsys):
        cfg = str(CONFIGS / "frac_power.yaml")
        first = run(capsys, "simulate", "--config", cfg)[1]
        second = run(capsys, "simulate", "--config", cfg)[1]
        assert first == second

    def test_seed_override(self, capsys):
        cfg = str(CONFIGS / "frac_power.yaml")
        a = run(capsys, "simulate", "--config", cfg, "--seed", "1")[1]
        b = run(capsys, "simulate", "--config", cfg, "--seed", "2")[1]
        assert a != b

    def test_empty_eigenvalues(self, capsys, tmp_path):
        cfg = write(tmp_path, "generator:\n  kind: explicit\n  eigenvalues: []\nfunction: drift\n")
        code, _, err = run(capsys, "simulate", "--config", cfg)
        assert code == 2 and "generator.eigenvalues" in err

    def test_yaml_syntax_line(self, capsys, tmp_path):
        cfg = write(tmp_path, "experiment: rate_bound\ngenerator: [1, 2\nfunction: drift\n")
        code, _, err = run(capsys, "simulate", "--config", cfg)
        assert code == 2 and ":3:" in err

    @pytest.mark.parametrize("text,field", [
        ("generator: {kind: log_spaced, n: 5, lo: 0.1}\nfunction: drift\n", "generator.hi"),
        ("generator: {kind: cubic}\nfunction: drift\n", "generator.kind"),
        ("generator: {eigenvalues: [1]}\nfunction: drift\nbogus: 1\n", "bogus"),
        ("generator: {eigenvalues: [1]}\n", "function"),
        ("generator: {eigenvalues: [-1]}\nfunction: drift\n", "generator"),
        ("generator: {eigenvalues: [1]}\nfunction: drift\nexperiment: other\n", "experiment"),
        ("generator: {eigenvalues: [1]}\nfunction: drift\nt_grid: [0, 1]\n", "t_grid"),
        ("generator: {eigenvalues: [0.5]}\nfunction: atom:1\nexperiment: optimality\n", "special"),
        ("generator: {eigenvalues: [0.5]}\nfunction: drift\nexperiment: optimality\nepsilon: cubic\n",
         "epsilon"),
    ])
    def test_field_diagnostics(self, capsys, tmp_path, text, field):
        code, _, err = run(capsys, "simulate", "--config", write(tmp_path, text))
        assert code == 2 and field in err

    def test_missing_file(self, capsys, tmp_path):
        assert run(capsys, "simulate", "--config", str(tmp_path / "none.yaml"))[0] == 2

    def test_requires_config(self, capsys):
        assert run(capsys, "simulate")[0] == 2


def test_usage_error(capsys):
    assert run(capsys, "frobnicate")[0] == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "ergorate", "eval", "--fn", "drift", "--points", "2"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and "2,0,2,0" in proc.stdout
