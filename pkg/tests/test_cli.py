import csv
import io
import json

import pytest

from dunkl_hermite import cli
from dunkl_hermite.core import PrecisionExhausted


def run(capsys, *argv):
    code = cli.run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


class TestEval:
    def test_constant_reproduced(self, capsys):
        code, out, _ = run(capsys, "eval", "--fn", "one", "--n", "10", "--mu", "0.5", "--alpha", "1",
                           "--a", "0", "--b", "2", "--points", "5")
        assert code == 0
        table = rows(out)
        assert len(table) == 5
        assert all(abs(float(r["error"])) <= 1e-12 for r in table)

    def test_identity_reproduced(self, capsys):
        code, out, _ = run(capsys, "eval", "--fn", "id", "--n", "10", "--points", "11")
        assert code == 0
        assert all(float(r["error"]) <= 1e-12 for r in rows(out))

    def test_square_error_is_x_over_n(self, capsys):
        code, out, _ = run(capsys, "eval", "--fn", "square", "--n", "100", "--a", "0", "--b", "1", "--points", "11")
        assert code == 0
        for r in rows(out):
            assert float(r["error"]) == pytest.approx(float(r["x"]) / 100, abs=1e-14)

    def test_header_and_line_endings(self, capsys):
        _, out, _ = run(capsys, "eval", "--x", "0.5,1", "--n", "3,4")
        assert out.startswith("n,x,value,g,error,terms_used,tail_bound,cancel_error\n")
        assert "\r" not in out
        assert [(r["n"], r["x"]) for r in rows(out)] == [("3", "0.5"), ("3", "1"), ("4", "0.5"), ("4", "1")]

    def test_round_trip_digits(self, capsys):
        _, out, _ = run(capsys, "eval", "--fn", "sin", "--x", "0.7", "--n", "7", "--mu", "0.5")
        value = rows(out)[0]["value"]
        assert repr(float(value)) == repr(float(format(float(value), ".17g")))
        assert len(value.replace("0.", "").lstrip("0")) >= 15

    def test_deterministic(self, capsys):
        args = ("eval", "--fn", "runge", "--n", "5,50", "--mu", "2", "--alpha", "1", "--points", "9", "--seed", "3")
        assert run(capsys, *args)[1] == run(capsys, *args)[1]

    def test_out_file(self, capsys, tmp_path):
        path = tmp_path / "r.csv"
        code, out, _ = run(capsys, "eval", "--x", "1", "--out", str(path))
        assert code == 0 and out == ""
        assert path.read_bytes().startswith(b"n,x,")


class TestOtherCommands:
    def test_moments(self, capsys):
        code, out, _ = run(capsys, "moments", "--n", "20", "--mu", "1", "--alpha", "0.5", "--x", "1")
        r = rows(out)[0]
        assert code == 0
        assert float(r["m1"]) == pytest.approx(1.05, rel=1e-15)
        assert float(r["max_rel_gap"]) <= 1e-9

    def test_hermite(self, capsys):
        code, out, _ = run(capsys, "hermite", "--n", "3", "--xi", "1", "--mu", "1")
        assert code == 0
        assert float(rows(out)[0]["H"]) == pytest.approx(0.2, rel=1e-14)

    def test_gfcheck(self, capsys):
        code, out, _ = run(capsys, "gfcheck", "--order", "2", "--mu", "1", "--xi", "1", "--alpha", "0.5", "--t", "0.25")
        assert code == 0
        assert float(rows(out)[0]["abs_gap"]) <= 1e-9

    def test_gfcheck_large_t(self, capsys):
        code, _, err = run(capsys, "gfcheck", "--t", "0.9")
        assert code == 2 and err.count("\n") == 1

    def test_bounds(self, capsys):
        code, out, _ = run(capsys, "bounds", "--fn", "abs1", "--n", "10,40", "--x", "0.5,1", "--mu", "0.5")
        table = rows(out)
        assert code == 0
        assert {r["theorem"] for r in table} == {"T6", "T7", "T9", "T10"}
        assert all(r["holds"] == "true" for r in table if r["asserted"] == "true")

    def test_bounds_without_lipschitz_data(self, capsys):
        _, out, _ = run(capsys, "bounds", "--fn", "square", "--x", "1")
        assert {r["theorem"] for r in rows(out)} == {"T7", "T9", "T10"}

    def test_sweep(self, capsys):
        code, out, _ = run(capsys, "sweep", "--fn", "runge", "--mu", "0.5", "--alpha", "1",
                           "--n", "10,20,40,80,160", "--a", "0", "--b", "2", "--points", "41")
        assert code == 0
        errs = [float(r["sup_error"]) for r in rows(out) if r["kind"] == "error"]
        assert len(errs) == 5
        assert all(b < a for a, b in zip(errs, errs[1:]))
        assert any(r["kind"] == "korovkin_e2" for r in rows(out))

    def test_json(self, capsys):
        code, out, _ = run(capsys, "moments", "--x", "0.5,1", "--format", "json", "--mu", "0.5")
        doc = json.loads(out)
        assert code == 0
        assert set(doc) == {"meta", "rows"}
        assert doc["meta"]["version"] and doc["meta"]["grid"] == {"a": 0.0, "b": 2.0, "points": 201}
        assert doc["meta"]["flags"]["mu"] == 0.5
        assert len(doc["rows"]) == 2 and doc["rows"][1]["x"] == 1.0


class TestErrors:
    @pytest.mark.parametrize(
        "argv, message",
        [
            (["eval", "--mu", "-1"], "mu must be ≥ 0"),
            (["selftest", "--mu", "-1"], "mu must be ≥ 0"),
            (["eval", "--alpha", "-2"], "alpha must be ≥ 0"),
            (["eval", "--n", "0"], "n must be a positive integer"),
            (["eval", "--n", "2.5"], "expects integers"),
            (["eval", "--x", "-1"], "x must be ≥ 0"),
            (["eval", "--eps-term", "2"], "eps_term"),
            (["eval", "--points", "1"], "at least 2 points"),
            (["eval", "--fn", "nope"], "unknown function"),
            (["eval", "--bogus"], "No such option"),
            (["eval", "--format", "xml"], "xml"),
            (["sweep", "--n", "20,10"], "strictly increasing"),
        ],
    )
    def test_invalid_flags(self, capsys, argv, message):
        code, out, err = run(capsys, *argv)
        assert code == 2
        assert out == ""
        assert err.count("\n") == 1 and message in err

    def test_precision_exhausted(self, capsys, monkeypatch):
        def boom(*a, **k):
            raise PrecisionExhausted("cancellation exceeds tolerance")

        monkeypatch.setattr(cli, "apply", boom)
        code, _, err = run(capsys, "eval", "--x", "1")
        assert code == 3 and "precision exhausted" in err

    def test_selftest_failure_exit_code(self, capsys, monkeypatch):
        from dunkl_hermite import acceptance

        fake = [acceptance.Verdict(1, "x", False, "forced", 0.0)]
        monkeypatch.setattr(acceptance, "run_all", lambda settings, emit: fake)
        assert run(capsys, "selftest")[0] == 4


class TestConfigFile:
    def test_defaults_from_file(self, capsys, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("# experiment\nmu = 2\nalpha=1\nfn = sin\n")
        _, a, _ = run(capsys, "--config", str(cfg), "eval", "--x", "1")
        _, b, _ = run(capsys, "eval", "--x", "1", "--mu", "2", "--alpha", "1", "--fn", "sin")
        assert a == b

    def test_flags_override_file(self, capsys, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("mu = 2\n")
        _, a, _ = run(capsys, "--config", str(cfg), "eval", "--x", "1", "--mu", "0")
        _, b, _ = run(capsys, "eval", "--x", "1")
        assert a == b

    def test_malformed(self, capsys, tmp_path):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("mu 2\n")
        code, _, err = run(capsys, "--config", str(cfg), "eval")
        assert code == 2 and "key=value" in err
