#!/usr/bin/env python3
"""End-to-end checks of the command-line surface: planted-signal analysis,
exit codes, reproducibility, and file-format round trips."""

import json
import os
import random
import shutil
import subprocess
import sys


def main():
    iss_bin = sys.argv[1]
    work = sys.argv[2]
    shutil.rmtree(work, ignore_errors=True)
    os.makedirs(work)

    failures = []

    def check(name, condition, detail=""):
        status = "ok" if condition else "FAIL"
        print(f"[{status}] {name}{(' - ' + detail) if detail and not condition else ''}")
        if not condition:
            failures.append(name)

    def run(*args, expect=0):
        proc = subprocess.run([iss_bin, *args], capture_output=True, text=True)
        if proc.returncode != expect:
            print("  stdout:", proc.stdout.strip())
            print("  stderr:", proc.stderr.strip())
        return proc

    def slurp(path):
        with open(path, "rb") as f:
            return f.read()

    # ---- planted signal: (1,1) is the only high-risk combination ----------
    toy = os.path.join(work, "toy.csv")
    with open(toy, "w") as f:
        f.write("a,b,Y,PART\n")
        for part in ("red", "blue"):
            for _ in range(15):
                f.write(f"1,1,1,{part}\n")
        for part in ("red", "blue"):
            for _ in range(15):
                f.write(f"0,0,0,{part}\n")

    out1 = os.path.join(work, "analyze1")
    proc = run("analyze", "--data", toy, "--tau", "0.5", "--out-dir", out1, "--seed", "11")
    check("analyze exits 0", proc.returncode == 0)
    rep_csv = slurp(os.path.join(out1, "corners_replicable.csv")).decode()
    check("replicable corner table matches the hand analysis",
          rep_csv == "corner,a,b\n1,1,1\n", rep_csv)
    manifest = json.loads(slurp(os.path.join(out1, "manifest.json")))
    check("manifest reports one replicable corner",
          manifest["results"]["replicable"]["corners"] == 1)
    check("manifest flags exactly the (1,1) rows",
          manifest["results"]["replicable"]["flagged"] == 30)

    # byte-identical rerun with the same seed and config
    out2 = os.path.join(work, "analyze2")
    run("analyze", "--data", toy, "--tau", "0.5", "--out-dir", out2, "--seed", "11")
    same = True
    for name in os.listdir(out1):
        a = slurp(os.path.join(out1, name))
        b = slurp(os.path.join(out2, name)).replace(out2.encode(), out1.encode())
        if a != b:
            same = False
    check("rerun with the same seed is byte-identical", same)

    # thread cap must not change results
    out3 = os.path.join(work, "analyze3")
    run("analyze", "--data", toy, "--tau", "0.5", "--out-dir", out3, "--seed", "11",
        "--threads", "1")
    check("thread count does not change corner tables",
          slurp(os.path.join(out1, "corners_replicable.csv")) ==
          slurp(os.path.join(out3, "corners_replicable.csv")))

    # ---- empty selection -----------------------------------------------
    null_csv = os.path.join(work, "null.csv")
    with open(null_csv, "w") as f:
        f.write("a,b,Y,PART\n")
        for i in range(40):
            f.write(f"{i % 2},{(i // 2) % 2},0,{'red' if i % 2 == 0 else 'blue'}\n")
    out_null = os.path.join(work, "analyze_null")
    proc = run("analyze", "--data", null_csv, "--tau", "0.5", "--out-dir", out_null)
    check("null analysis exits 0", proc.returncode == 0)
    check("empty selection writes a header-only corner file",
          slurp(os.path.join(out_null, "corners_global.csv")).decode() == "corner,a,b\n")
    manifest = json.loads(slurp(os.path.join(out_null, "manifest.json")))
    check("empty selection has zero coverage",
          manifest["results"]["global"]["grid_coverage"] == 0)

    # ---- exit codes ------------------------------------------------------
    nopart = os.path.join(work, "nopart.csv")
    with open(nopart, "w") as f:
        f.write("a,b,Y\n1,1,1\n")
    check("missing PART column is a config error (2)",
          run("analyze", "--data", nopart, expect=2).returncode == 2)

    bad = os.path.join(work, "bad.csv")
    with open(bad, "w") as f:
        f.write("a,b,Y,PART\n1,1,1,red\n5,banana,1,blue\n")
    check("bad level values are a data error (3)",
          run("analyze", "--data", bad, expect=3).returncode == 3)

    check("unachievable calibration target is a numerical error (4)",
          run("simulate", "--mode", "part1", "--targets", "0.995", "--n", "400",
              "--reps", "1", "--out-dir", os.path.join(work, "sim_bad"),
              expect=4).returncode == 4)

    badcfg = os.path.join(work, "bad_config.json")
    with open(badcfg, "w") as f:
        json.dump({"tau": 0.5, "bogus": 1}, f)
    check("unknown config keys are rejected (2)",
          run("analyze", "--data", toy, "--config", badcfg, expect=2).returncode == 2)

    # config file feeds defaults, flags override
    cfg = os.path.join(work, "config.json")
    with open(cfg, "w") as f:
        json.dump({"tau": 0.5, "seed": 3}, f)
    out_cfg = os.path.join(work, "analyze_cfg")
    run("analyze", "--data", toy, "--config", cfg, "--tau", "0.45", "--out-dir", out_cfg)
    manifest = json.loads(slurp(os.path.join(out_cfg, "manifest.json")))
    check("flags override config-file keys", manifest["config"]["tau"] == 0.45)
    check("config-file keys fill unset options", manifest["config"]["seed"] == 3)

    # ---- corners file round trip ----------------------------------------
    proc = run("corners-count", "--corners", os.path.join(out1, "corners_replicable.json"))
    counted = json.loads(proc.stdout)
    check("corners-count on the 2x2 toy closure", counted["closure_count"] == 1)

    out_eval = os.path.join(work, "eval_toy")
    proc = run("evaluate", "--data", toy, "--corners",
               os.path.join(out1, "corners_replicable.json"), "--ks", "1", "2",
               "--out-dir", out_eval)
    check("evaluate consumes analyze corners without edits", proc.returncode == 0)
    report = slurp(os.path.join(out_eval, "report.csv")).decode().strip().splitlines()
    check("toy evaluate report has 2 cutoffs + subgroup",
          len(report) == 4 and report[0] == "rule,PPR,Sensitivity,Specificity,PPV,NPV")
    # hand tally: flagged = the 30 (1,1) rows, all depressed
    sub = report[-1].split(",")
    check("subgroup row matches the hand tally",
          abs(float(sub[1]) - 0.5) < 1e-9 and abs(float(sub[2]) - 1.0) < 1e-9
          and abs(float(sub[3]) - 1.0) < 1e-9)

    # ---- ten-item dataset: default cutoffs produce 10 rows ----------------
    random.seed(5)
    names = ["ACEDEPRS", "ACESUB", "ACEPRISN", "ACEDIVRC", "ACEPUNCH", "ACEHURT1",
             "ACESWEAR", "ACESEX", "ACEADSAF", "ACEADNED"]
    levels = [2, 2, 2, 2, 3, 3, 3, 3, 5, 5]
    ace = os.path.join(work, "ace.csv")
    with open(ace, "w") as f:
        f.write(",".join(names) + ",Y,PART\n")
        for _ in range(300):
            row = [str(random.randrange(L)) for L in levels]
            score = sum(1 for v in row if v != "0")
            y = 1 if random.random() < (0.08 + 0.06 * score) else 0
            f.write(",".join(row) + f",{y},{'red' if random.random() < .5 else 'blue'}\n")
    corners_json = {
        "grid": {"items": [{"name": n, "levels": L, "reverse_coded": L == 5}
                            for n, L in zip(names, levels)]},
        "corners": [[1, 0, 0, 0, 0, 0, 0, 0, 0, 0], [0, 0, 0, 0, 0, 0, 2, 1, 0, 0]],
    }
    corners_path = os.path.join(work, "ace_corners.json")
    with open(corners_path, "w") as f:
        json.dump(corners_json, f)
    out_ace = os.path.join(work, "eval_ace")
    proc = run("evaluate", "--data", ace, "--corners", corners_path, "--out-dir", out_ace)
    check("ace evaluate exits 0", proc.returncode == 0)
    report = slurp(os.path.join(out_ace, "report.csv")).decode().strip().splitlines()
    check("default cutoff list gives 9 cutoffs + subgroup", len(report) == 11)

    mismatched = {
        "grid": {"items": [{"name": n, "levels": 2, "reverse_coded": False}
                            for n in names]},
        "corners": [[1, 0, 0, 0, 0, 0, 0, 0, 0, 0]],
    }
    mis_path = os.path.join(work, "mismatch_corners.json")
    with open(mis_path, "w") as f:
        json.dump(mismatched, f)
    check("grid mismatch between corners and data is a data error (3)",
          run("evaluate", "--data", ace, "--corners", mis_path, expect=3).returncode == 3)

    # ---- upset-data -------------------------------------------------------
    upset_csv = os.path.join(work, "upset.csv")
    with open(upset_csv, "w") as f:
        f.write("a,b,Y\n1,0,0\n1,0,1\n1,1,0\n0,0,0\n1,0,1\n")
    out_upset = os.path.join(work, "upset_out")
    run("upset-data", "--data", upset_csv, "--out-dir", out_upset)
    inter = slurp(os.path.join(out_upset, "upset_intersections.csv")).decode().strip().splitlines()
    check("upset intersections are ranked by count",
          inter[0] == "rank,count,a,b" and inter[1] == "1,3,1,0")
    counts = sum(int(line.split(",")[1]) for line in inter[1:])
    check("upset combination counts sum to n", counts == 5)
    marg = slurp(os.path.join(out_upset, "upset_marginals.csv")).decode().strip().splitlines()
    check("upset marginals count item-positive rows",
          marg[1] == "a,4" and marg[2] == "b,1")

    # ---- simulate smoke ----------------------------------------------------
    out_sim = os.path.join(work, "sim1")
    proc = run("simulate", "--mode", "part2", "--n", "1200", "--reps", "2",
               "--seed", "9", "--out-dir", out_sim)
    check("simulate part2 smoke exits 0", proc.returncode == 0)
    table = slurp(os.path.join(out_sim, "results_part2.csv")).decode().strip().splitlines()
    check("part2 table has methods x metrics rows", len(table) == 1 + 3 * 4)

    out_sim2 = os.path.join(work, "sim2")
    run("simulate", "--mode", "part2", "--n", "1200", "--reps", "2", "--seed", "9",
        "--out-dir", out_sim2, "--threads", "1")
    check("fixed seed gives identical simulation bytes across thread counts",
          slurp(os.path.join(out_sim, "results_part2.csv")) ==
          slurp(os.path.join(out_sim2, "results_part2.csv")))

    print()
    if failures:
        print(f"{len(failures)} CLI check(s) failed: {failures}")
        return 1
    print("all CLI checks passed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
