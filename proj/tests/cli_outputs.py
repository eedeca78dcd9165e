"""Drives the lagflow binary and checks exit codes, file layout and summary.json against the schema."""

import csv
import json
import os
import pathlib
import shutil
import subprocess
import sys

import jsonschema

HEADER = ("time,volume,dissipation,meanzero_residual,intA2,intDA2,intD2A2,supA,"
          "theta_residual,slope_margin,isoperimetric").split(",")

exe, share, work = sys.argv[1], pathlib.Path(sys.argv[2]), pathlib.Path(sys.argv[3])
shutil.rmtree(work, ignore_errors=True)
work.mkdir(parents=True)
schema = json.loads((share / "summary.schema.json").read_text())
failures = []


def expect(cond, what):
    print(("ok   " if cond else "FAIL ") + what)
    if not cond:
        failures.append(what)


def lagflow(*args, out=None):
    env = dict(os.environ)
    env.pop("LAGFLOW_OUTPUT", None)
    if out is not None:
        env["LAGFLOW_OUTPUT"] = str(out)
    return subprocess.run([exe, *args], capture_output=True, text=True, env=env, cwd=work)


def check_outputs(d, mode):
    summary = json.loads((d / "summary.json").read_text())
    jsonschema.validate(summary, schema)
    rows = list(csv.reader((d / "diagnostics.csv").open()))
    expect(rows[0] == HEADER, f"{d.name}: diagnostics header")
    blank = HEADER.index("isoperimetric" if mode == "scalar" else "slope_margin")
    expect(all(len(r) == len(HEADER) and r[blank] == "" for r in rows[1:]), f"{d.name}: mode-only columns blank")
    # 17 significant digits: every value round-trips and long mantissas are not truncated
    expect(any(len(c.replace("-", "").replace(".", "").split("e")[0]) == 17 for r in rows[1:] for c in r if c),
           f"{d.name}: 17-digit numbers")
    for s in summary["files"]["snapshots"]:
        expect((d / s).exists(), f"{d.name}: {s} exists")
    first = next(csv.reader((d / summary["files"]["snapshots"][0]).open()))
    expect(first == (["x", "y"] if mode == "curve" else [f"x{a}" for a in range(summary["config"]["dim"])] + ["phi"]),
           f"{d.name}: snapshot header {first}")
    return summary


r = lagflow("presets")
expect(r.returncode == 0 and "figure_eight" in r.stdout, "presets lists figure_eight")

out = work / "circle"
r = lagflow("run", str(share / "configs/circle.conf"), out=out)
expect(r.returncode == 0, f"circle exits 0 (got {r.returncode}: {r.stderr.strip()})")
s = check_outputs(out, "curve")
expect(abs(s["final"]["volume"] - s["initial"]["volume"]) < 1e-10, "circle length constant")
expect(abs(s["final"]["signed_area"] - s["initial"]["signed_area"]) < 1e-10, "circle area constant")

out = work / "eight"
r = lagflow("run", str(share / "configs/figure_eight.conf"), out=out)
expect(r.returncode == 2, f"figure_eight exits 2 (got {r.returncode})")
s = check_outputs(out, "curve")
expect(s["blowup"] and s["blowup_time"] > 0, "figure_eight blowup_time > 0")

out = work / "sine"
r = lagflow("run", str(share / "configs/scalar_sine.conf"), out=out)
expect(r.returncode == 0, f"scalar sine exits 0 (got {r.returncode})")
check_outputs(out, "scalar")

# output_dir from the config is used when LAGFLOW_OUTPUT is unset
cfg = work / "local.conf"
cfg.write_text("mode = scalar\ndim = 2\ngrid_m = 8\nt_end = 0.001\noutput_dir = from_config\n")
r = lagflow("run", str(cfg))
expect(r.returncode == 0 and (work / "from_config/summary.json").exists(), "output_dir honoured")
r = lagflow("run", str(cfg), out=work / "from_env")
expect((work / "from_env/summary.json").exists(), "LAGFLOW_OUTPUT overrides output_dir")

bad = work / "bad.conf"
bad.write_text("moed = scalar\nt_end = 1\n")
r = lagflow("run", str(bad))
expect(r.returncode == 1 and "line 1" in r.stderr and "moed" in r.stderr, f"unknown key exits 1 naming line 1 ({r.stderr.strip()})")
r = lagflow("run", str(work / "missing.conf"))
expect(r.returncode == 1, "missing config exits 1")

r = lagflow("run", str(share / "configs/check_theta.conf"))
expect(r.returncode == 0 and r.stdout.startswith("PASS  [4] theta"), "mode = check runs the suite")
r = lagflow("check", "symbol", "--json", str(work / "report.json"))
expect(r.returncode == 0 and json.loads((work / "report.json").read_text())["results"][0]["pass"], "check symbol --json")
r = lagflow("check", "nope")
expect(r.returncode == 1 and "unknown suite" in r.stderr, "unknown suite exits 1")

sys.exit(1 if failures else 0)
