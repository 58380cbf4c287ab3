import csv
import io
import json

import pytest

from overlapq.cli import main

MM = {"arrival": {"family": "exponential", "rate": 1.0},
      "batch": {"family": "deterministic", "b": 1},
      "service": {"family": "exponential", "rate": 1.0}}
LOGN = {**MM, "service": {"family": "lognormal", "log_mean": 0.0, "log_sd": 0.5}}
K1 = {"type": "pair_individual", "lag": 1}


def _rows(text):
    body = [line for line in text.splitlines() if not line.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(body))))


@pytest.fixture
def files(write_json):
    return {"mm": write_json("mm.json", MM), "logn": write_json("logn.json", LOGN),
            "k1": write_json("k1.json", K1),
            "k2": write_json("k2.json", {"type": "pair_individual", "lag": 2}),
            "same": write_json("same.json", {"type": "pair_individual", "lag": 0,
                                             "same_customer": True}),
            "t12": write_json("t12.json", {"type": "tuple", "indices": [1, 2]}),
            "tuple": write_json("tuple.json", {"type": "tuple", "indices": [1, 2, 3]})}


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestTail:
    def test_closed_csv(self, files, capsys):
        code, out, _ = run(capsys, "tail", "--model", files["mm"], "--query", files["k1"],
                           "--method", "closed", "--no-timestamp")
        rows = _rows(out)
        assert code == 0
        assert list(rows[0]) == ["t", "tail", "method", "stderr_or_tol"]
        assert float(rows[0]["t"]) == 0.0 and float(rows[0]["tail"]) == 0.5
        assert len(rows) == 101

    def test_metadata_embeds_config(self, files, capsys):
        _, out, _ = run(capsys, "tail", "--model", files["mm"], "--query", files["k1"])
        cfg = json.loads(out.splitlines()[1].removeprefix("# config: "))
        assert cfg["model"]["service"] == {"family": "exponential", "rate": 1.0}
        assert cfg["query"] == {**K1, "same_customer": False}
        assert {"method", "samples", "seed", "delta", "steps", "t_max"} <= set(cfg)
        assert any(line.startswith("# generated:") for line in out.splitlines())

    def test_no_closed_form(self, files, capsys):
        code, _, err = run(capsys, "tail", "--model", files["logn"], "--query", files["k1"],
                           "--method", "closed")
        assert code == 3 and "closed" in err

    def test_two_steps(self, files, capsys):
        _, out, _ = run(capsys, "tail", "--model", files["mm"], "--query", files["k1"],
                        "--steps", "2", "--t-max", "1")
        assert [float(r["t"]) for r in _rows(out)] == [0.0, 1.0]

    def test_json_output(self, files, tmp_path, capsys):
        out = tmp_path / "c.json"
        assert run(capsys, "tail", "--model", files["mm"], "--query", files["k1"], "--format",
                   "json", "--out", str(out))[0] == 0
        doc = json.loads(out.read_text())
        assert doc["curve"]["values"][0] == 0.5 and "generated" in doc

    @pytest.mark.parametrize("flag,value", [("--steps", "1"), ("--samples", "0"),
                                            ("--t-max", "-1"), ("--delta", "2")])
    def test_bad_flags(self, files, capsys, flag, value):
        code, _, err = run(capsys, "tail", "--model", files["mm"], "--query", files["k1"],
                           flag, value)
        assert code == 2 and flag in err

    def test_schema_error_names_field(self, files, write_json, capsys):
        bad = write_json("bad.json", {**MM, "service": {"family": "exponential", "rate": -1}})
        code, _, err = run(capsys, "tail", "--model", bad, "--query", files["k1"])
        assert code == 2 and "service.rate" in err
        badq = write_json("badq.json", {"type": "pair_batch", "mode": "first", "lag": 0})
        code, _, err = run(capsys, "tail", "--model", files["mm"], "--query", badq)
        assert code == 2 and "lag" in err

    def test_unreadable_json(self, files, tmp_path, capsys):
        p = tmp_path / "broken.json"
        p.write_text("{")
        code, _, err = run(capsys, "tail", "--model", str(p), "--query", files["k1"])
        assert code == 2 and "--model" in err


class TestValidate:
    def test_pass(self, files, capsys):
        code, out, _ = run(capsys, "validate", "--model", files["mm"], "--query", files["k1"],
                           "--format", "json", "--no-timestamp")
        assert code == 0
        report = json.loads(out)["report"]
        assert report["verdict"] == "pass" and report["n"] == 10**6

    def test_negative_control(self, files, tmp_path, capsys):
        out = tmp_path / "r.json"
        code, _, _ = run(capsys, "validate", "--model", files["mm"], "--query", files["k1"],
                         "--sim-query", files["k2"], "--samples", "100000", "--out", str(out))
        assert code == 1
        assert out.exists()

    def test_missing_model(self, files, capsys):
        code, _, err = run(capsys, "validate", "--model", "/nonexistent.json", "--query",
                           files["k1"])
        assert code == 2 and "--model" in err

    def test_csv_report(self, files, capsys):
        code, out, _ = run(capsys, "validate", "--model", files["mm"], "--query", files["k1"],
                           "--samples", "10000", "--steps", "5")
        rows = _rows(out)
        assert code in (0, 1) and len(rows) == 5
        assert set(rows[0]) == {"t", "analytic", "empirical", "epsilon", "pass"}


class TestMean:
    def test_pair(self, files, capsys):
        code, out, _ = run(capsys, "mean", "--model", files["mm"], "--query", files["k1"])
        assert code == 0
        assert float(_rows(out)[0]["mean"]) == pytest.approx(0.25, abs=1e-6)

    def test_service_mean(self, write_json, files, capsys):
        m = write_json("mu2.json", {**MM, "service": {"family": "exponential", "rate": 2.0}})
        _, out, _ = run(capsys, "mean", "--model", m, "--query", files["same"])
        assert float(_rows(out)[0]["mean"]) == pytest.approx(0.5, abs=1e-6)

    def test_tuple_reduction(self, files, capsys):
        _, a, _ = run(capsys, "mean", "--model", files["mm"], "--query", files["t12"])
        _, b, _ = run(capsys, "mean", "--model", files["mm"], "--query", files["k1"])
        assert float(_rows(a)[0]["mean"]) == pytest.approx(float(_rows(b)[0]["mean"]), abs=1e-6)


class TestSweep:
    def test_lag_decay(self, files, capsys):
        code, out, _ = run(capsys, "sweep", "--model", files["mm"], "--query", files["k1"],
                           "--lags", "1..3")
        rows = [r for r in _rows(out) if float(r["t"]) == 0.0]
        assert code == 0
        assert [float(r["tail"]) for r in rows] == [0.5, 0.25, 0.125]

    def test_row_count(self, files, capsys):
        _, out, _ = run(capsys, "sweep", "--model", files["mm"], "--query", files["k1"],
                        "--lags", "1..10", "--steps", "7")
        rows = _rows(out)
        assert len(rows) == 70
        by_lag = {}
        for r in rows:
            by_lag.setdefault(r["t"], []).append(float(r["tail"]))
        assert all(v == sorted(v, reverse=True) for v in by_lag.values())

    def test_single_lag_matches_tail(self, files, capsys):
        _, sweep, _ = run(capsys, "sweep", "--model", files["mm"], "--query", files["k2"],
                          "--lags", "2", "--no-timestamp")
        _, tail, _ = run(capsys, "tail", "--model", files["mm"], "--query", files["k2"],
                         "--no-timestamp")
        s = [{k: v for k, v in r.items() if k != "lag"} for r in _rows(sweep)]
        assert s == _rows(tail)

    def test_errors(self, files, capsys):
        assert run(capsys, "sweep", "--model", files["mm"], "--query", files["k1"])[0] == 2
        assert run(capsys, "sweep", "--model", files["mm"], "--query", files["k1"],
                   "--lags", "3..1")[0] == 2
        assert run(capsys, "sweep", "--model", files["mm"], "--query", files["tuple"],
                   "--lags", "1..2")[0] == 2


class TestSimulate:
    def test_dump(self, files, tmp_path, capsys):
        out = tmp_path / "traj.csv"
        assert run(capsys, "simulate", "--model", files["mm"], "--batches", "5", "--out",
                   str(out), "--no-timestamp")[0] == 0
        rows = _rows(out.read_text())
        assert len(rows) == 5 and rows[0]["batch_index"] == "1"

    def test_reproducible(self, files, capsys):
        a = run(capsys, "simulate", "--model", files["mm"], "--batches", "20", "--seed", "4",
                "--no-timestamp")[1]
        b = run(capsys, "simulate", "--model", files["mm"], "--batches", "20", "--seed", "4",
                "--no-timestamp")[1]
        assert a == b


def test_argparse_errors_exit_two(files):
    with pytest.raises(SystemExit) as info:
        main(["tail", "--model", files["mm"], "--query", files["k1"], "--method", "exact"])
    assert info.value.code == 2
