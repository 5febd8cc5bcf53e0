#!/usr/bin/env python3
"""Black-box checks of the qcfilter command line: exit codes, output
formats, determinism, and the metadata round trip."""

import csv
import json
import math
import subprocess
import sys
import tempfile
from pathlib import Path

BIN = Path(sys.argv[1])
FAILURES = []


def run(*args, **kw):
    return subprocess.run([str(BIN), *args], capture_output=True, text=True, **kw)


def check(name, cond, detail=""):
    status = "ok" if cond else "FAIL"
    print(f"[{status}] {name} {detail}")
    if not cond:
        FAILURES.append(name)


def main():
    tmp = Path(tempfile.mkdtemp(prefix="qcfilter_cli_"))

    # locations: printed values and exit code 0
    r = run("locations", "udd", "2")
    check("locations udd 2 exit", r.returncode == 0, r.stderr)
    vals = [float(x) for x in r.stdout.strip().split(",")]
    check("locations udd 2 values", vals == [0.25, 0.75], r.stdout)

    r = run("locations", "cp", "6")
    vals = [float(x) for x in r.stdout.strip().split(",")]
    check("locations cp 6", max(abs(v - (2 * i + 1) / 12.0) for i, v in enumerate(vals)) < 1e-15)

    # config errors exit with 2
    r = run("locations", "fibonacci", "3")
    check("bad rule exits 2", r.returncode == 2, f"rc={r.returncode}")
    r = run("filter", "--preset", "no-such-preset", "--out", str(tmp / "x.csv"))
    check("bad preset exits 2", r.returncode == 2, f"rc={r.returncode}")
    bad = tmp / "bad.json"
    bad.write_text('{"sequence": {"segments": [{"kind": "planar_rotation"}]}}')
    r = run("filter", "--config", str(bad), "--out", str(tmp / "x.csv"))
    check("missing field exits 2", r.returncode == 2, r.stderr.strip())
    check("diagnostic names the field", "duration" in r.stderr, r.stderr.strip())

    # filter preset: CSV columns + fitted alpha in metadata
    out = tmp / "cp6p.csv"
    r = run("filter", "--preset", "cp6-primitive", "--out", str(out),
            "--precision", "extended")
    check("filter cp6-primitive exit", r.returncode == 0, r.stderr)
    with out.open() as fh:
        rows = list(csv.reader(fh))
    check("filter csv header", rows[0] == ["omega", "omega_tau", "F_x", "F_y", "F_z"])
    check("filter csv rows", len(rows) == 1202, str(len(rows)))
    meta = json.loads(out.with_suffix(".meta.json").read_text())
    check("cp6-primitive alpha == 1", abs(meta["alpha_fit"]["alpha"] - 1.0) < 0.1,
          str(meta["alpha_fit"]["alpha"]))

    out_bb = tmp / "cp6bb.csv"
    run("filter", "--preset", "cp6-bangbang", "--out", str(out_bb), "--precision", "extended")
    meta_bb = json.loads(out_bb.with_suffix(".meta.json").read_text())
    check("cp6-bangbang alpha == 2", abs(meta_bb["alpha_fit"]["alpha"] - 2.0) < 0.1,
          str(meta_bb["alpha_fit"]["alpha"]))

    # free evolution: F_z = 4 sin^2(omega/2) samples
    out_fe = tmp / "free.csv"
    run("filter", "--preset", "free-evolution", "--out", str(out_fe))
    with out_fe.open() as fh:
        rows = list(csv.DictReader(fh))
    worst = max(abs(float(row["F_z"]) - 4 * math.sin(float(row["omega"]) / 2) ** 2)
                for row in rows[::97])
    check("free-evolution F_z", worst < 1e-12, str(worst))

    # metadata round trip reproduces identical bytes
    out2 = tmp / "cp6p_again.csv"
    cfg = {"sequence": meta["config"]["sequence"], "grid": meta["config"]["grid"]}
    cfg_path = tmp / "roundtrip.json"
    cfg_path.write_text(json.dumps(cfg))
    r = run("filter", "--config", str(cfg_path), "--out", str(out2),
            "--precision", "extended")
    check("round-trip exit", r.returncode == 0, r.stderr)
    check("round-trip identical csv", out.read_bytes() == out2.read_bytes())
    meta2 = json.loads(out2.with_suffix(".meta.json").read_text())
    check("round-trip hash equality", meta["sequence_hash"] == meta2["sequence_hash"])

    # fidelity: S = 0 -> F_av = 1
    cfg0 = {"sequence": {"gate": {"kind": "primitive_pi", "tau_pi": 0.5}},
            "noise": {"axes": []}}
    p0 = tmp / "fid0.json"
    p0.write_text(json.dumps(cfg0))
    r = run("fidelity", "--config", str(p0))
    rep = json.loads(r.stdout)
    check("fidelity S=0", rep["f_av"] == 1.0 and rep["chi"] == 0.0, r.stdout[:80])

    # numerical-validity failures exit with 3: a 16-node grid cannot
    # resolve fourth-order terms for noise this fast
    coarse_cfg = {"sequence": {"segments": [{"kind": "free_evolution", "duration": 2.0}]},
                  "noise": {"axes": [{"axis": "z", "type": "gaussian",
                                      "delta_beta": 0.4, "sigma": 40.0}]}}
    pg = tmp / "coarse.json"
    pg.write_text(json.dumps(coarse_cfg))
    r = run("fidelity", "--config", str(pg), "--higher-order", "--grid", "16")
    check("grid too coarse exits 3", r.returncode == 3, f"rc={r.returncode}")

    # the time-domain route agrees with the frequency route
    td_cfg = {"sequence": {"gate": {"kind": "primitive_pi", "tau_pi": 0.7}},
              "noise": {"axes": [{"axis": "z", "type": "gaussian",
                                  "delta_beta": 0.3, "sigma": 1.0}]}}
    pt = tmp / "td.json"
    pt.write_text(json.dumps(td_cfg))
    freq = json.loads(run("fidelity", "--config", str(pt)).stdout)
    td = json.loads(run("fidelity", "--config", str(pt), "--time-domain").stdout)
    check("method tags", freq["method"] == "frequency" and td["method"] == "time-domain")
    check("routes agree", abs(freq["chi"] - td["chi"]) < 1e-5 * freq["chi"],
          f'{freq["chi"]} vs {td["chi"]}')

    # simulate: byte-identical output for a fixed seed
    sim_cfg = {"sequence": {"gate": {"kind": "primitive_pi", "tau_pi": 0.4}},
               "noise": {"axes": [{"axis": "z", "type": "gaussian",
                                   "delta_beta": 0.25, "sigma": 1.0}]},
               "ensemble": {"realizations": 20, "seed": 5}}
    ps = tmp / "sim.json"
    ps.write_text(json.dumps(sim_cfg))
    a = run("simulate", "--config", str(ps))
    b = run("simulate", "--config", str(ps))
    check("simulate deterministic", a.stdout == b.stdout and a.returncode == 0)
    rep = json.loads(a.stdout)
    check("simulate report fields",
          all(k in rep for k in ("F_av", "stderr", "n_realizations", "seed", "dt")))

    # compare: empty sweep -> header-only CSV, exit 0
    cmp_cfg = {"sweep": {"variable": "tau_pi", "values": []},
               "gate": {"kind": "primitive_pi"},
               "noise": {"axes": [{"axis": "z", "type": "gaussian",
                                   "delta_beta": 0.25, "sigma": 1.0}]},
               "ensemble": {"realizations": 10, "seed": 1}}
    pc = tmp / "cmp.json"
    pc.write_text(json.dumps(cmp_cfg))
    out_cmp = tmp / "cmp.csv"
    r = run("compare", "--config", str(pc), "--out", str(out_cmp))
    check("empty sweep exit 0", r.returncode == 0, r.stderr)
    lines = out_cmp.read_text().splitlines()
    check("empty sweep header only",
          lines == ["tau_pi,analytic_error,mc_error,mc_stderr,xi2,valid"])

    # compare with points: validity flag flips once xi^2 >= 0.1
    cmp_cfg["sweep"]["values"] = [0.2, 40.0]
    pc.write_text(json.dumps(cmp_cfg))
    r = run("compare", "--config", str(pc), "--out", str(out_cmp))
    check("compare exit", r.returncode == 0, r.stderr)
    with out_cmp.open() as fh:
        rows = list(csv.DictReader(fh))
    check("validity flag", rows[0]["valid"] == "true" and rows[1]["valid"] == "false",
          str([row["valid"] for row in rows]))

    # figure command writes the whole family; relative paths resolve under
    # QCFILTER_OUT_DIR
    import os
    env = dict(os.environ, QCFILTER_OUT_DIR=str(tmp))
    r = subprocess.run([str(BIN), "figure", "--preset", "fig3b", "--out-dir", "figs"],
                       capture_output=True, text=True, env=env)
    check("figure fig3b exit", r.returncode == 0, r.stderr)
    for name in ("udd6-bangbang", "udd6-primitive", "udd6-dcg"):
        check(f"figure wrote {name}", (tmp / "figs" / f"{name}.csv").exists())

    print()
    if FAILURES:
        print("FAILED:", ", ".join(FAILURES))
        return 1
    print("all cli checks passed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
