#!/usr/bin/env python3
# Copyright 2026 The kuramoto-graphs Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Calibrate the constant c in the distance tolerance eps(n) = c / sqrt(n).

Runs the finite-time experiment on the complete graph (no graph
fluctuations, so only the particle-number term remains), recomputes the
per-n mean of sup_t ||mu^n_t - mu_t||_{-1} directly from the stored series
CSVs, and fits c by least squares through the origin against n^{-1/2}.

    tools/calibrate.py --kuramoto build/tools/kuramoto --out runs/calibration

The printed tolerances are c * margin / sqrt(n). The shipped configs freeze
the resulting values; rerun this script after changing the integrator, the
initial condition or the truncation order.
"""

import argparse
import csv
import json
import math
import pathlib
import statistics
import subprocess
import sys


def sup_of_series(path):
    with open(path, newline="") as f:
        return max(float(row["dist"]) for row in csv.DictReader(f))


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--kuramoto", default="build/tools/kuramoto", help="path to the CLI")
    parser.add_argument("--out", default="runs/calibration", help="run directory")
    parser.add_argument("--sizes", default="250,500,1000,2000")
    parser.add_argument("--replicas", type=int, default=10)
    parser.add_argument("--K", type=float, default=2.0)
    parser.add_argument("--t-end", type=float, default=5.0)
    parser.add_argument("--init", default="cardioid:0.8")
    parser.add_argument("--margin", type=float, default=1.5,
                        help="safety factor applied to the fitted constant")
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--skip-run", action="store_true",
                        help="reuse the series already in --out")
    args = parser.parse_args()

    sizes = [int(s) for s in args.sizes.split(",")]
    out = pathlib.Path(args.out)
    config = {
        "name": "calibration_complete",
        "kind": "finite_time",
        "graph": {"kind": "complete"},
        "sizes": sizes,
        "replicas": args.replicas,
        "base_seed": 1,
        "model": {"K": args.K, "dt": 0.01 / max(1.0, args.K), "t_end": args.t_end,
                  "record_every": 20, "L": 256},
        "init": args.init,
        # The calibration run only collects series; its own pass flag is moot.
        "tolerance": {"eps": 1.0},
    }
    if not args.skip_run:
        out.mkdir(parents=True, exist_ok=True)
        config_path = out.parent / (out.name + ".config.json")
        config_path.write_text(json.dumps(config, indent=2) + "\n")
        subprocess.run([args.kuramoto, "run", "--config", str(config_path), "--out", str(out),
                        "--threads", str(args.threads)], check=True)

    report = json.loads((out / "report.json").read_text())
    sups = {}
    for replica in report["replicas"]:
        sups.setdefault(replica["n"], []).append(sup_of_series(out / replica["path"]))

    xs = [1.0 / math.sqrt(n) for n in sorted(sups)]
    ys = [statistics.fmean(sups[n]) for n in sorted(sups)]
    c = sum(x * y for x, y in zip(xs, ys)) / sum(x * x for x in xs)

    print(f"{'n':>6} {'mean sup':>10} {'sqrt(n)*mean':>13} {'eps(n)':>8}")
    for n, y in zip(sorted(sups), ys):
        print(f"{n:>6} {y:>10.4f} {y * math.sqrt(n):>13.3f} {args.margin * c / math.sqrt(n):>8.4f}")
    print(f"fitted c = {c:.4f}; margin {args.margin} -> c_frozen = {args.margin * c:.4f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
