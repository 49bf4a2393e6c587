import csv
import io
import json
import math
import subprocess
import sys

import pytest

from tlchannels import __version__
from tlchannels.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    assert code == 0, err
    return json.loads(out)


def test_info_envelope(capsys):
    doc = run_json(capsys, "info", "--group", "su2", "--triple", "3,3,2", "--traced", "left")
    assert set(doc) == {"group", "N", "triple", "traced", "operation", "result", "tolerances", "seed", "version"}
    assert doc["operation"] == "info" and doc["version"] == __version__
    assert (doc["result"]["d_A"], doc["result"]["d_B"], doc["result"]["d_E"]) == (4, 3, 4)
    assert doc["triple"] == [3, 3, 2] and doc["N"] == 2
    doc = run_json(capsys, "info", "--group", "onplus:3", "--triple", "1,2,1", "--traced", "right")
    assert (doc["result"]["d_A"], doc["result"]["d_B"], doc["result"]["d_E"]) == (3, 8, 3)


def test_bits_rescale_entropies(capsys):
    nats = run_json(capsys, "capacity", "--group", "onplus:3", "--triple", "1,2,1", "--traced", "right")
    bits = run_json(capsys, "capacity", "--group", "onplus:3", "--triple", "1,2,1", "--traced", "right", "--bits")
    assert bits["result"]["units"] == "bits"
    assert bits["result"]["q1_lower"] == pytest.approx(nats["result"]["q1_lower"] / math.log(2))
    assert bits["result"]["q1_lower"] == pytest.approx(math.log2(8 / 3))


@pytest.mark.parametrize("argv", [
    ("info", "--triple", "3,1,1"),
    ("info", "--triple", "1,2"),
    ("info", "--group", "sp4", "--triple", "1,1,0"),
    ("info", "--triple", "1,1,0", "--samples", "0"),
    ("bogus",),
    ("choi", "--triple", "1,1,0", "--format", "csv"),
    ("haar-sep", "--group", "onplus:3", "--triple", "1,2,1"),
    ("degrade-check", "--triple", "3,1,2"),
])
def test_invalid_input_exits_1(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 1 and out == "" and err


def test_cap_exits_3(capsys):
    code, out, err = run(capsys, "choi", "--group", "onplus:4", "--triple", "2,2,2", "--max-ambient", "10")
    assert code == 3 and "resource cap" in err


def test_choi(capsys):
    doc = run_json(capsys, "choi", "--group", "su2", "--triple", "3,2,1", "--traced", "right")
    assert doc["result"]["rank"] == doc["result"]["expected_rank"] == 2
    assert doc["result"]["frobenius_distance"] < 1e-10


def test_ppt(capsys):
    doc = run_json(capsys, "ppt", "--group", "su2", "--triple", "0,2,2", "--traced", "right")
    assert doc["result"]["is_ppt"] is True and doc["result"]["witness_det"] is None
    doc = run_json(capsys, "ppt", "--group", "su2", "--triple", "1,1,0", "--traced", "right")
    assert doc["result"]["is_ppt"] is False
    assert doc["result"]["witness_det"] < 0


def test_moe_witness_reaches_zero(capsys):
    doc = run_json(capsys, "moe", "--group", "onplus:3", "--triple", "3,2,1", "--traced", "right")
    assert doc["result"]["best_entropy"] == pytest.approx(0, abs=1e-10)
    doc = run_json(capsys, "moe", "--group", "su2", "--triple", "2,1,1", "--strategy", "random", "--samples", "50")
    assert doc["result"]["best_entropy"] >= 0


def test_tensor_spectrum_json_and_csv(capsys):
    base = ("tensor-spectrum", "--group", "onplus:3", "--triple", "1,2,1", "--triple2", "2,1,1", "--i", "1")
    doc = run_json(capsys, *base)
    assert doc["result"]["match"] is True
    assert {r["l"] for r in doc["result"]["Formula"]} == {r["l"] for r in doc["result"]["BruteForce"]}
    code, out, _ = run(capsys, *base, "--format", "csv", "--source", "bruteforce")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert out.splitlines()[0] == "l,eigenvalue,multiplicity"
    total = sum(float(r["eigenvalue"]) * int(r["multiplicity"]) for r in rows)
    assert total == pytest.approx(1.0)


def test_haar_sep_and_degrade_check(capsys):
    doc = run_json(capsys, "haar-sep", "--triple", "1,2,1", "--samples", "400", "--seed", "1")
    assert doc["result"]["distance"] <= doc["result"]["bound"]
    doc = run_json(capsys, "degrade-check", "--triple", "3,2,1")
    assert doc["result"]["deviation"] < 1e-10


def test_out_is_written_atomically(capsys, tmp_path):
    target = tmp_path / "info.json"
    target.write_text("old")
    code, out, _ = run(capsys, "info", "--triple", "1,1,0", "--out", str(target))
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["operation"] == "info"
    assert [p.name for p in tmp_path.iterdir()] == ["info.json"]


def test_seeded_output_is_identical_across_thread_counts(capsys):
    argv = ("moe", "--group", "onplus:3", "--triple", "2,2,2", "--strategy", "random", "--samples", "200",
            "--seed", "7")
    _, one, _ = run(capsys, *argv, "--threads", "1")
    _, two, _ = run(capsys, *argv, "--threads", "2")
    assert one == two


def test_verify(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "snake")
    lines = [json.loads(x) for x in out.splitlines()]
    assert code == 0 and lines[-1]["failed"] is False
    assert all(r["status"] == "pass" for r in lines[:-1])
    assert {r["group"] for r in lines[:-1]} == {"su2", "onplus:2", "onplus:3", "onplus:4"}
    code, out, _ = run(capsys, "verify", "--suite", "jw", "--group", "onplus:4", "--max-ambient", "100")
    statuses = {json.loads(x).get("status") for x in out.splitlines()[:-1]}
    assert code == 0 and "skipped" in statuses


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "tlchannels.cli", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip() == __version__
