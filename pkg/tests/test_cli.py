import csv
import json
import subprocess
import sys

import pytest

from linear_centralizer.cli import bench_rows, parse_group, run


def simulate(tmp_path, name, *extra, proto="commutator", group="matrix:4:101", seed=3):
    out = tmp_path / name
    code = run(["simulate", "--protocol", proto, "--group", group, "--seed", str(seed), "--out", str(out), *extra])
    assert code == 0
    return out


def error_of(capsys):
    return json.loads(capsys.readouterr().err.strip().splitlines()[-1])


def test_simulate_is_byte_reproducible(tmp_path):
    a = simulate(tmp_path, "a.json", "--with-secrets")
    b = simulate(tmp_path, "b.json", "--with-secrets")
    assert a.read_bytes() == b.read_bytes()
    obj = json.loads(a.read_text())
    assert obj["config"]["seed"] == 3 and "secrets" in obj
    c = simulate(tmp_path, "c.json")
    assert "secrets" not in json.loads(c.read_text())


@pytest.mark.parametrize("proto,group", [
    ("commutator", "matrix:5"),
    ("stickel", "matrix:3:101"),
    ("braid-dh", "braid:4"),
    ("commutator", "braid:3"),
])
def test_attack_verifies(tmp_path, proto, group):
    extra = ["--m", "1", "--ell", "1", "--k", "1"] if group == "braid:3" else []
    inst = simulate(tmp_path, "inst.json", "--with-secrets", *extra, proto=proto, group=group)
    out = tmp_path / "report.json"
    assert run(["attack", "--instance", str(inst), "--out", str(out)]) == 0
    report = json.loads(out.read_text())
    assert report["verified"] is True and report["protocol"] == proto
    assert "timings_ms" in json.loads((tmp_path / "report.json.timings.json").read_text())
    out2 = tmp_path / "report2.json"
    assert run(["attack", "--instance", str(inst), "--out", str(out2)]) == 0
    assert out.read_text().replace("report.json", "") == out2.read_text().replace("report2.json", "")


def test_attack_without_secrets_reports_null(tmp_path):
    inst = simulate(tmp_path, "inst.json")
    out = tmp_path / "r.json"
    assert run(["attack", "--instance", str(inst), "--out", str(out)]) == 0
    assert json.loads(out.read_text())["verified"] is None


def test_malformed_inputs_exit_2(tmp_path, capsys):
    inst = simulate(tmp_path, "inst.json", "--with-secrets")
    text = inst.read_text()
    trunc = tmp_path / "trunc.json"
    trunc.write_text(text[: len(text) // 2])
    assert run(["attack", "--instance", str(trunc), "--out", str(tmp_path / "r.json")]) == 2
    assert error_of(capsys)["error"] == "json"
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({**json.loads(text), "protocol": "nope"}))
    assert run(["attack", "--instance", str(bad), "--out", str(tmp_path / "r.json")]) == 2
    assert error_of(capsys)["error"] == "instance"
    assert run(["attack", "--instance", str(tmp_path / "missing.json"), "--out", "x"]) == 2
    assert run(["simulate", "--protocol", "nope", "--group", "braid:4", "--out", "x"]) == 2
    assert run(["simulate", "--protocol", "stickel", "--group", "braid:4", "--out", str(tmp_path / "x")]) == 2
    assert run(["simulate", "--protocol", "commutator", "--group", "torus:3", "--out", "x"]) == 2
    assert run(["bench", "--suite", "lk", "--sizes", "a,b", "--out", "x"]) == 2
    assert run(["frobnicate"]) == 2


def test_tampered_key_exits_3(tmp_path, capsys):
    inst = simulate(tmp_path, "inst.json", "--with-secrets", proto="braid-dh", group="matrix:3:101")
    obj = json.loads(inst.read_text())
    obj["shared_key"] = obj["public"]["g"]
    inst.write_text(json.dumps(obj))
    assert run(["attack", "--instance", str(inst), "--out", str(tmp_path / "r.json")]) == 3
    assert error_of(capsys)["error"] == "verification"


def test_parse_group():
    G = parse_group("matrix:3:0x65")
    assert G.n == 3 and G.field.p == 101
    assert parse_group("braid:5").N == 5
    assert parse_group("matrix:2").field.p > 1 << 61


def test_selfcheck(tmp_path, capsys):
    out = tmp_path / "sc.json"
    assert run(["selfcheck", "--out", str(out)]) == 0
    lines = capsys.readouterr().out.split("\n")
    assert all(line.startswith("PASS") for line in lines if line)
    assert all(r["passed"] for r in json.loads(out.read_text())["results"].values())


def test_bench_csv(tmp_path):
    out = tmp_path / "b.csv"
    assert run(["bench", "--suite", "braid-core", "--sizes", "3,4", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("# suite=braid-core")
    rows = list(csv.DictReader(lines[1:]))
    assert [r["N"] for r in rows] == ["3", "4"]
    rows = bench_rows("matrix-attacks", [3], protocols=("commutator", "stickel"))
    assert rows[0]["commutator_ok"] and rows[0]["stickel_ok"]
    assert bench_rows("lk", [3])[0]["bounds_ok"]
    assert run(["bench", "--suite", "matrix-attacks", "--sizes", "3", "--protocols", "bogus", "--out", str(out)]) == 2


def test_console_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "linear_centralizer.cli", "selfcheck"],
                          capture_output=True, text=True, timeout=600)
    assert proc.returncode == 0 and "PASS pipeline" in proc.stdout
