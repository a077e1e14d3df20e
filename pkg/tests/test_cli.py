import json
import subprocess
import sys

import numpy as np
import pytest

from lfrefocus.cli import main
from lfrefocus.io import decode_netpbm, encode_netpbm, read_image


@pytest.fixture
def lightfield(tmp_path):
    px = np.random.default_rng(0).integers(0, 256, (15, 15, 3)).astype(np.uint8)
    (tmp_path / "in.ppm").write_bytes(encode_netpbm(px))
    (tmp_path / "meta.json").write_text(json.dumps({"M": 3, "grid": [5, 5]}))
    return tmp_path


def pixels(path):
    return decode_netpbm(path.read_bytes())


def test_refocus_and_simulate_agree(lightfield, capsys):
    d = lightfield
    for shift in ("0/3", "2/3", "5/3"):
        for interp in ("nn", "linear"):
            for prec in ("exact", "hw"):
                common = ["--shift", shift, "--interp", interp, "--precision", prec, "--mask"]
                assert main(["refocus", *common, str(d / "in.ppm"), str(d / "meta.json"), str(d / "a.ppm")]) == 0
                assert main(["simulate", *common, "--iota", "3", str(d / "in.ppm"),
                             str(d / "meta.json"), str(d / "b.ppm")]) == 0
                assert (d / "a.ppm").read_bytes() == (d / "b.ppm").read_bytes()
                assert (d / "a.mask.pgm").read_bytes() == (d / "b.mask.pgm").read_bytes()
    capsys.readouterr()


def test_unmasked_outputs_agree(lightfield, capsys):
    d = lightfield
    common = ["--shift", "2/3", str(d / "in.ppm"), str(d / "meta.json")]
    assert main(["refocus", *common, str(d / "a.ppm")]) == 0
    assert main(["simulate", *common, str(d / "b.ppm")]) == 0
    assert (d / "a.ppm").read_bytes() == (d / "b.ppm").read_bytes()
    assert not (d / "a.mask.pgm").exists()
    capsys.readouterr()


def test_simulate_report(lightfield, capsys):
    d = lightfield
    assert main(["simulate", "--shift", "1/3", "--frames", "2", str(d / "in.ppm"),
                 str(d / "meta.json"), str(d / "o.ppm")]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep == {"first_frame_cycles": 2 * (1 + 3) + 2 * 14 + 14, "steady_state_cycles": 28,
                   "iota": 15, "M": 3, "K": 15, "L": 15, "frames": 2, "alignment_cycles": 0}
    assert pixels(d / "o.ppm").shape == (15, 15, 3)


def test_simulate_trace(lightfield, capsys):
    d = lightfield
    trace = d / "t.jsonl"
    assert main(["simulate", "--shift", "2/3", "--trace", str(trace), "--report", "table",
                 str(d / "in.ppm"), str(d / "meta.json"), str(d / "o.ppm")]) == 0
    assert "first_frame_cycles" in capsys.readouterr().out
    events = [json.loads(s) for s in trace.read_text().splitlines()]
    assert events and {"cycle", "p", "registers", "emitted", "we"} <= set(events[0])


def test_gen_switch(capsys):
    assert main(["gen-switch", "--shift", "1/3"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["rows"] == [[1, 1, 1]] * 3


def test_timing_benchmark_numbers(capsys):
    assert main(["timing", "--M", "11", "--K", "3201", "--L", "3201", "--clock-ns", "10",
                 "--report", "json"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["eta"] == 9624 and rep["latency_first_s"] == pytest.approx(96.24e-6)
    assert main(["timing", "--M", "11", "--K", "3201", "--L", "3201"]) == 0
    assert "96.24 us" in capsys.readouterr().out


def test_bench(capsys):
    assert main(["bench", "--rows", "1", "--length", "99", "--repeats", "1", "--report", "json"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert "python" in rep["seconds"]


def test_synth_then_refocus(tmp_path, capsys):
    out = tmp_path / "s.pgm"
    assert main(["synth", str(out), "--M", "3", "--grid", "8", "6", "--disparity", "3"]) == 0
    img = read_image(out, tmp_path / "s.json")
    assert img.pixels.shape == (1, 18, 24)
    assert main(["refocus", "--shift", "3/3", str(out), str(tmp_path / "s.json"), str(tmp_path / "r.pgm")]) == 0


def test_errors(lightfield, capsys):
    d = lightfield
    assert main(["refocus", "--shift", "1/5", str(d / "in.ppm"), str(d / "meta.json"), str(d / "x.ppm")]) == 1
    assert "does not match" in capsys.readouterr().err
    assert main(["refocus", "--shift", "1/3", str(d / "nope.ppm"), str(d / "meta.json"), str(d / "x.ppm")]) == 1
    assert "error" in capsys.readouterr().err
    for argv in (["refocus", "--shift", "1/4", "a", "b", "c"],
                 ["simulate", "--shift", "1/3", "--iota", "zero", "a", "b", "c"],
                 ["timing", "--M", "3", "--K", "3", "--L", "3", "--bogus"],
                 ["nonsense"]):
        with pytest.raises(SystemExit) as exc:
            main(argv)
        assert exc.value.code != 0
    capsys.readouterr()


def test_iota_too_large(lightfield, capsys):
    d = lightfield
    assert main(["simulate", "--shift", "1/3", "--iota", "99", str(d / "in.ppm"),
                 str(d / "meta.json"), str(d / "x.ppm")]) == 1
    assert "exceeds" in capsys.readouterr().err


def test_console_entry_point():
    r = subprocess.run([sys.executable, "-m", "lfrefocus.cli", "gen-switch", "--shift", "0/3",
                        "--report", "table"], capture_output=True, text=True)
    assert r.returncode == 0 and "W=3" in r.stdout
