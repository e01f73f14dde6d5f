"""End-to-end checks of the mdpu command-line tool.

Usage: cli_smoke.py <mdpu executable> <scenarios dir>
"""

import csv
import io
import json
import subprocess
import sys
import tempfile
from pathlib import Path


def run(exe, *args, expect=0):
    proc = subprocess.run([exe, *args], capture_output=True, text=True)
    if proc.returncode != expect:
        raise AssertionError(
            f"{' '.join(args)}: exit {proc.returncode}, expected {expect}\n{proc.stdout}\n{proc.stderr}"
        )
    return proc


def main():
    exe, scenarios = sys.argv[1], Path(sys.argv[2])

    for path in sorted(scenarios.glob("*.json")):
        out = json.loads(run(exe, "validate", str(path)).stdout)
        assert out["valid"], out

    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        bad = tmp / "bad.json"
        bad.write_text('{"name": "x",\n "states": [\n')
        err = run(exe, "validate", str(bad), expect=1).stderr
        assert err.startswith("error:"), err
        run(exe, "validate", str(tmp / "missing.json"), expect=1)

        k0 = json.loads(run(exe, "theory", "k0", "--family", "constant", "--c", "0.5", "--N", "4", "--delta", "0.1").stdout)
        assert k0["k0"]["value"] == 11, k0
        k1 = json.loads(run(exe, "theory", "k1", "--N", "2", "--k", "2", "--T", "1", "--rmax", "1",
                            "--epsilon", "1", "--delta", "0.25").stdout)
        assert k1["k1"]["value"] == 915, k1
        k1r = json.loads(run(exe, "theory", "k1", "--variant", "rmax", "--N", "2", "--k", "2", "--T", "1",
                             "--rmax", "1", "--epsilon", "1", "--delta", "0.25").stdout)
        assert k1r["k1"]["value"] == 873, k1r
        k23 = json.loads(run(exe, "theory", "k2k3", "--N", "1", "--k", "1", "--T", "1", "--rmax", "1",
                             "--epsilon", "1", "--delta", "0.25", "--k0", "1").stdout)
        assert k23["k3"]["value"] == 512, k23
        lb = json.loads(run(exe, "theory", "lower-bound", "--f", "log", "--m1", "1", "--m2", "1",
                            "--c", "0.5", "--delta", "0.1").stdout)
        assert lb["steps"]["value"] == 2, lb
        gap = json.loads(run(exe, "theory", "gap", "--family", "power", "--alpha", "2", "--r1", "1", "--r2", "2").stdout)
        assert abs(gap["d"] - 0.4760921382251592) < 1e-12, gap
        run(exe, "theory", "gap", "--family", "harmonic_j", "--r1", "1", "--r2", "2", expect=1)
        run(exe, "theory", "k0", "--family", "constant", "--c", "0.5", "--N", "4", "--delta", "2", expect=1)
        inf = json.loads(run(exe, "theory", "k0", "--family", "power", "--alpha", "2", "--N", "1", "--delta", "0.01").stdout)
        assert inf["k0"]["infinite"] and inf["k0"]["value"] is None, inf

        out_a, out_b = tmp / "a", tmp / "b"
        for out in (out_a, out_b):
            run(exe, "run", "--scenario", str(scenarios / "hidden2.json"), "--algo", "urmax-inner",
                "--seeds", "0..4", "--override-k1", "50", "--override-replay", "1000", "--oracle",
                "--out", str(out))
        for name in ["summary.csv", "summary.json"] + [f"trace_seed{i}.jsonl" for i in range(5)]:
            assert (out_a / name).read_bytes() == (out_b / name).read_bytes(), name
        raw = (out_a / "summary.csv").read_bytes()
        assert b"\r" not in raw
        rows = list(csv.DictReader(io.StringIO(raw.decode())))
        assert [r["seed"] for r in rows] == ["0", "1", "2", "3", "4"]
        assert all(r["regret"] != "" for r in rows)

        run(exe, "run", "--scenario", str(scenarios / "hidden2.json"), "--algo", "e3", "--seeds", "0",
            "--out", str(tmp / "c"), expect=1)
        run(exe, "run", "--scenario", str(scenarios / "hidden2.json"), "--algo", "rmax", "--seeds", "5..1",
            "--out", str(tmp / "c"), expect=1)

        run(exe, "demo", "example1", "--trials", "2000", "--horizon", "100", "--out", str(tmp / "demo"))
        lines = (tmp / "demo" / "demo_example1.csv").read_text().splitlines()
        assert lines[0] == "t,empirical,closed_form,sigma", lines[0]
        assert len(lines) > 3

    print("cli smoke: ok")


if __name__ == "__main__":
    main()
