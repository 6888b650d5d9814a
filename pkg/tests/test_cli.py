import json
import math

import pytest

from nhxy.cli import main

LL = ["--lambda-mod", "1.5", "--lambda-arg", repr(math.pi / 3)]


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def rows(text):
    lines = [line for line in text.splitlines() if not line.startswith("#")]
    header = lines[0].split(",")
    return [dict(zip(header, line.split(","))) for line in lines[1:]]


def test_point_csv(capsys):
    code, out, _ = run(capsys, "point", "--gamma", "1", *LL, "--r", "10", "--observables", "all",
                       "--no-timestamp")
    assert code == 0
    (row,) = rows(out)
    assert row["phase"] == "LL" and row["w"] == "-1.0"
    assert float(row["min_abs_re"]) <= 1e-10
    assert "re_cx_10" in row and "im_cx_10" in row


def test_point_cartesian_lambda_and_nan(capsys):
    code, out, _ = run(capsys, "point", "--lambda-re", "0.5", "--lambda-im", "0",
                       "--observables", "winding", "--no-timestamp")
    assert code == 0 and rows(out)[0]["w"] == "nan"


def test_point_empty_record(capsys):
    code, out, _ = run(capsys, "point", "--lambda-re", "0.5", "--observables", "", "--no-timestamp")
    assert code == 0
    assert rows(out)[0]["phase"] == ""


@pytest.mark.parametrize("argv", [
    ["point", "--lambda-re", "0.5", "--lambda-mod", "1"],
    ["point"],
    ["point", "--lambda-re", "0.5", "--observables", "magic"],
    ["point", "--bogus"],
    ["sweep", "--ray-phi", "1", "--lambda0-min", "0.1", "--lambda0-max", "2", "--steps", "1"],
    ["sweep", "--ray-phi", "1"],
    ["phase-diagram", "--step", "0"],
    ["oracle", "--n", "14", "--lambda-re", "0.5"],
    ["point", "--lambda-re", "0.5", "--n-eff", "1"],
])
def test_config_errors_exit_one(capsys, argv):
    assert main(argv) == 1


def test_sweep_partial_failure_exit_two(capsys):
    code, out, err = run(capsys, "sweep", "--ray-phi", repr(math.pi / 2), "--lambda0-min", "0.5",
                         "--lambda0-max", "1.5", "--steps", "3", "--r", "1", "--n-eff", "2",
                         "--no-timestamp")
    assert code == 2
    got = rows(out)
    assert len(got) == 3 and got[1]["error"] and not got[0]["error"]
    assert got[1]["re_cx_1"] == "nan"


def test_sweep_deterministic_and_parallel(tmp_path, capsys):
    outs = []
    for workers in ("1", "3", "1"):
        path = tmp_path / f"s{len(outs)}.csv"
        assert main(["sweep", "--ray-phi", repr(math.pi / 3), "--lambda0-min", "0.2",
                     "--lambda0-max", "2.8", "--steps", "8", "--r", "2", "--L", "2",
                     "--observables", "phase,winding", "--workers", workers, "--no-timestamp",
                     "--out", str(path)]) == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1] == outs[2]


def test_sweep_segment_json_and_gnuplot(tmp_path):
    csv_path, gp = tmp_path / "seg.csv", tmp_path / "seg.gp"
    assert main(["sweep", "--segment-start", "0,1", "--segment-end", "1,0", "--steps", "5",
                 "--r", "2", "--derivatives", "--out", str(csv_path), "--gnuplot", str(gp)]) == 0
    text = csv_path.read_text(encoding="utf-8")
    assert text.startswith("# nhxy schema=")
    assert "d_re_cx_2" in text.splitlines()[1]
    assert str(csv_path) in gp.read_text()
    js = tmp_path / "seg.json"
    assert main(["sweep", "--segment-start", "0,1", "--segment-end", "1,0", "--steps", "5",
                 "--r", "2", "--format", "json", "--out", str(js)]) == 0
    doc = json.loads(js.read_text())
    assert len(doc["points"]) == 5 and doc["meta"]["segment_start"] == [0.0, 1.0]


def test_phase_diagram_columns(capsys):
    code, out, _ = run(capsys, "phase-diagram", "--re-min", "-1", "--re-max", "1", "--im-min", "0",
                       "--im-max", "0.5", "--step", "0.5", "--winding", "--no-timestamp")
    assert code == 0
    got = rows(out)
    assert list(got[0]) == ["re_lambda", "im_lambda", "phase", "w", "error"]
    assert len(got) == 5 * 2


def test_spectrum_and_winding(capsys):
    code, out, _ = run(capsys, "spectrum", *LL, "--resolution", "8", "--no-timestamp")
    assert code == 0 and len(rows(out)) == 8
    code, out, _ = run(capsys, "spectrum", *LL, "--format", "json")
    doc = json.loads(out)
    assert doc["extrema"]["min_abs_re"] <= 1e-10 and len(doc["im_sign_changes"]) == 1
    code, out, _ = run(capsys, "winding", "--lambda-mod", "1", "--lambda-arg", repr(math.pi / 3),
                       "--no-timestamp")
    row = rows(out)[0]
    assert code == 0 and row["w"] == "-0.5" and row["on_boundary"] == "true"


def test_oracle_subcommand(capsys):
    code, out, _ = run(capsys, "oracle", "--n", "6", *LL, "--no-timestamp")
    assert code == 0
    got = rows(out)
    assert {r["quantity"] for r in got} == {"energy", "cx", "entropy"}
    assert max(float(r["abs_diff"]) for r in got) <= 1e-8


def test_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"gamma": 1, "lambda-mod": 2.5, "lambda_arg": math.pi / 3,
                               "observables": "winding,phase", "no-timestamp": True}))
    code, out, _ = run(capsys, "point", "--config", str(cfg))
    assert code == 0 and rows(out)[0]["phase"] == "PM"
    code, out, _ = run(capsys, "point", "--config", str(cfg), "--lambda-mod", "1.5")
    assert code == 0 and rows(out)[0]["phase"] == "LL" and rows(out)[0]["w"] == "-1.0"


def test_config_file_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["point", "--config", str(bad)]) == 1
    unknown = tmp_path / "unknown.json"
    unknown.write_text(json.dumps({"frobnicate": 1}))
    assert main(["point", "--config", str(unknown)]) == 1
