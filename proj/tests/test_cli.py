#!/usr/bin/env python3
"""End-to-end checks of the ncc command line tool against the fixture corpus.

Usage: test_cli.py <path-to-ncc-binary> <fixtures-dir>
"""

import json
import subprocess
import sys
import tempfile
from pathlib import Path

BIN = Path(sys.argv[1])
FIX = Path(sys.argv[2])

failures = []


def run(*args, expect_code=0):
    proc = subprocess.run(
        [str(BIN), *args], capture_output=True, text=True, timeout=300
    )
    if proc.returncode != expect_code:
        raise AssertionError(
            f"ncc {' '.join(args)}: exit {proc.returncode}, expected {expect_code}\n"
            f"stdout: {proc.stdout[:500]}\nstderr: {proc.stderr[:500]}"
        )
    return json.loads(proc.stdout) if expect_code == 0 and proc.stdout else None


def check(name, fn):
    try:
        fn()
        print(f"ok   {name}")
    except Exception as exc:  # noqa: BLE001 - report and continue
        failures.append(name)
        print(f"FAIL {name}: {exc}")


def fx(name):
    return str(FIX / name)


def t_membership():
    rep = run("membership", "--set", fx("interval.json"), "--point", fx("zero.json"))
    assert rep["result"]["inside"] and abs(rep["result"]["margin"] - 1) < 1e-9, rep
    rep = run("membership", "--set", fx("interval.json"), "--point", fx("two.json"))
    assert not rep["result"]["inside"], rep
    assert "witness" in rep["result"], "outside verdict must carry a certificate"


def t_classify_endpoint():
    rep = run("classify", "--set", fx("interval.json"), "--point", fx("endpoint.json"))
    r = rep["result"]
    assert r["nc_extreme"] and r["irreducible"] and r["maximal"], r


def t_envelope_cube():
    rep = run(
        "envelope",
        "--set", fx("interval.json"),
        "--poly", fx("x3.json"),
        "--point", fx("zero.json"),
    )
    lo = rep["result"]["lower_bound"]["data"][0][0]
    hi = rep["result"]["upper_bound"]["data"][0][0]
    assert -0.251 <= lo <= -0.249, lo
    assert -0.251 <= hi <= -0.249, hi


def t_order_pair():
    rep = run(
        "order",
        "--set", fx("interval.json"),
        "--mu", fx("mu_delta0.json"),
        "--nu", fx("nu_half_mixture.json"),
    )
    assert rep["result"]["dilation"]["relation"] == "dominates", rep["result"]
    rep = run(
        "order",
        "--set", fx("interval.json"),
        "--mu", fx("nu_half_mixture.json"),
        "--nu", fx("mu_delta0.json"),
    )
    assert rep["result"]["dilation"]["relation"] == "violated", rep["result"]
    assert rep["result"]["choquet"]["relation"] == "violated", rep["result"]


def t_decompose():
    rep = run("decompose", "--set", fx("interval.json"), "--mu", fx("mu_delta0.json"))
    r = rep["result"]
    assert not r["capped"] and r["supported_on_extreme"], r
    values = sorted(a["point"]["mats"][0]["data"][0][0] for a in r["measure"]["atoms"])
    assert abs(values[0] + 1) < 1e-5 and abs(values[-1] - 1) < 1e-5, values
    assert all(a["flags"]["nc_extreme"] for a in r["measure"]["atoms"]), r


def t_separate():
    rep = run("separate", "--set", fx("interval.json"), "--point", fx("two.json"))
    assert rep["result"]["verified"], rep["result"]
    run("separate", "--set", fx("interval.json"), "--point", fx("zero.json"),
        expect_code=2)


def t_input_errors():
    run("membership", "--set", fx("malformed.json"), "--point", fx("zero.json"),
        expect_code=2)
    run("membership", "--set", fx("interval.json"), "--point", fx("missing.json"),
        expect_code=2)
    run("demo", "nonsense", expect_code=2)
    run("bogus-command", expect_code=2)


def t_demo_semicircular():
    rep = run("demo", "semicircular")
    runs = {tuple(r["lambda"]): r for r in rep["result"]["report"]["runs"]}
    assert runs[(1.0, 0.0)]["defect_norm"] <= 1e-8
    assert runs[(-1.0, 0.0)]["defect_norm"] <= 1e-8
    assert abs(runs[(0.0, 1.0)]["defect_norm"] - 1.0) <= 1e-8
    for r in runs.values():
        assert r["identity_residual"] <= 1e-8, r


def t_determinism():
    with tempfile.TemporaryDirectory() as td:
        outs = []
        for i in range(2):
            out = Path(td) / f"r{i}.json"
            run(
                "envelope",
                "--set", fx("interval.json"),
                "--poly", fx("x3.json"),
                "--point", fx("zero.json"),
                "--seed", "7",
                "--out", str(out),
            )
            rep = json.loads(out.read_text())
            rep.pop("wall_time_ms")
            outs.append(json.dumps(rep, sort_keys=True))
        assert outs[0] == outs[1], "identical jobs must produce identical reports"


check("membership verdicts and exit codes", t_membership)
check("classify marks the endpoint extreme", t_classify_endpoint)
check("envelope bounds for the cube at zero", t_envelope_cube)
check("order verdicts both directions", t_order_pair)
check("decompose yields the endpoint measure", t_decompose)
check("separate certifies and rejects members", t_separate)
check("input errors exit with code 2", t_input_errors)
check("semicircular demo defect values", t_demo_semicircular)
check("reports are deterministic modulo timing", t_determinism)

if failures:
    print(f"{len(failures)} CLI check(s) failed: {failures}")
    sys.exit(1)
print("all CLI checks passed")
