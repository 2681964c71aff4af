import json

import pytest

from hitstreak.cli import run
from hitstreak.gamelog import HEADER

HDR = ",".join(HEADER) + "\n"


@pytest.fixture
def data_csv(tmp_path):
    path = tmp_path / "synth.csv"
    assert run(["synth", "iid", "--seed", "3", "--players", "40", "--pinch-rate", "0.1", "--out", str(path)]) == 0
    return path


def test_theory_prob(capsys):
    assert run(["theory", "prob", "--avg", "0.300", "--abg", "4.0"]) == 0
    assert capsys.readouterr().out == "0.7599\n"


def test_theory_other_calcs(capsys):
    assert run(["theory", "expected", "--avg", "0.3", "--abg", "4", "--games", "100"]) == 0
    assert capsys.readouterr().out.strip() == "75.9900"
    assert run(["theory", "run", "--avg", "0.5", "--abg", "1", "--games", "3", "--length", "2"]) == 0
    assert float(capsys.readouterr().out) == pytest.approx(0.375)
    assert run(["theory", "scenario", "--avg", "0.35", "--games", "150", "--abg-base", "4.0",
                "--abg-boosted", "4.28", "--lengths", "20", "30", "56", "--json"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["config"]["abg_boosted"] == 4.28
    assert [r["length"] for r in out["rows"]] == [20, 30, 56]


def test_count_cumulative(data_csv, capsys):
    assert run(["count", str(data_csv), "--min-length", "5", "--cumulative"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "length,count,cumulative"
    first = out[1].split(",")
    assert first[0] == "5" and int(first[2]) >= int(first[1])


def test_permute_requires_seed(data_csv, capsys):
    with pytest.raises(SystemExit) as exc:
        run(["permute", str(data_csv), "--trials", "100"])
    assert exc.value.code == 2
    assert "--seed" in capsys.readouterr().err


def test_permute_and_report(data_csv, tmp_path, capsys):
    study = tmp_path / "study.json"
    assert run(["permute", str(data_csv), "--trials", "60", "--seed", "17", "--min-length", "5",
                "--per-trial", "--out", str(study)]) == 0
    data = json.loads(study.read_text())
    assert data["config"] == {"input": str(data_csv), "trials": 60, "seed": 17, "starts_only": False,
                              "min_length": 5}
    assert {"lengths", "cumulative", "convergence", "per_trial"} <= data.keys()
    assert data["lengths"][0]["L"] == 5
    census = tmp_path / "census.csv"
    assert run(["count", str(data_csv), "--min-length", "5", "--out", str(census)]) == 0
    capsys.readouterr()
    assert run(["report", "--census", str(census), "--study", str(study), "--tails", "5", "10"]) == 0
    rows = capsys.readouterr().out.splitlines()
    assert rows[0].startswith("length,observed,null_mean,null_sd,z,p_upper")
    assert rows[-1].startswith("10+,")
    assert rows[-1].split(",")[7] != ""  # empirical p available with --per-trial


def test_permute_threads_byte_identical(data_csv, tmp_path):
    outs = []
    for threads in ("1", "8"):
        path = tmp_path / f"t{threads}.json"
        assert run(["permute", str(data_csv), "--trials", "50", "--seed", "5", "--threads", threads,
                    "--min-length", "3", "--out", str(path)]) == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


def test_attrition_from_census(tmp_path, capsys):
    census = tmp_path / "c.csv"
    census.write_text("length,count\n30,19\n31,10\n32,24\n")
    assert run(["attrition", str(census), "--census", "--n-min", "30", "--n-max", "31"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[1] == "30,53,34,0.6415"


def test_windows_opponent_validate_khits(data_csv, capsys):
    assert run(["windows", str(data_csv), "--min-length", "8", "--json"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["summary"]["windows"] == len(out["windows"])
    assert run(["opponent", str(data_csv), "--team", "TOR"]) == 0
    assert capsys.readouterr().out.startswith("length,count,cumulative")
    assert run(["validate", str(data_csv)]) == 0
    v = json.loads(capsys.readouterr().out)
    assert v["lines"] == 40 * 150 and v["coverage"]["started"] == v["lines"]
    assert run(["theory", "khits", str(data_csv), "--k", "0", "3", "4"]) == 0
    assert capsys.readouterr().out.splitlines()[0] == "k,expected,observed,excess_ratio"


def test_operational_errors_exit_1(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text(HDR + "p1,1999,1,4,5,0,true,,\n")
    assert run(["count", str(bad)]) == 1
    err = capsys.readouterr().err
    assert "line 2" in err and "hits exceed at-bats" in err and len(err.strip().splitlines()) == 1
    assert run(["count", str(tmp_path / "missing.csv")]) == 1
    nostart = tmp_path / "nostart.csv"
    nostart.write_text(HDR + "p1,1999,1,4,1,0,,,\n")
    assert run(["permute", str(nostart), "--trials", "2", "--seed", "1", "--starts-only"]) == 1
    assert "starts flag required" in capsys.readouterr().err


def test_usage_error_exit_2():
    with pytest.raises(SystemExit) as exc:
        run(["frobnicate"])
    assert exc.value.code == 2
