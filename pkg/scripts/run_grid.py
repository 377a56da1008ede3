"""Sweep the Heisenberg metric diag(1, 1, t) and tabulate the proof-chain margins.

For each t the chain is verified at scale 1 and 4; the table shows the
systoles, the isoperimetric quotient, the tightest line and the
dimensionless margin at both scales.

    python scripts/run_grid.py --points 9 --out grid.json
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

import numpy as np

from syswork.pipeline import ScenarioSpec, run_grid


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--model", default="heisenberg")
    ap.add_argument("--param", default="t")
    ap.add_argument("--lo", type=float, default=-2.0, help="log10 of the first value")
    ap.add_argument("--hi", type=float, default=2.0, help="log10 of the last value")
    ap.add_argument("--points", type=int, default=9)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out")
    args = ap.parse_args(argv)

    values = [Fraction(float(v)).limit_denominator(10**9) for v in np.logspace(args.lo, args.hi, args.points)]
    docs = {}
    for scale in (1, 4):
        spec = ScenarioSpec(args.model, "thm22", 1, scale=Fraction(scale), seed=args.seed)
        docs[scale] = run_grid(spec, args.param, values)

    print(f"{args.param:>10} {'stsys_1':>9} {'stsys_2':>9} {'IQ_2':>9} {'tightest line':>26} {'margin':>10} {'margin@4g':>10}")
    for v, r1, r4 in zip(values, docs[1]["reports"], docs[4]["reports"]):
        if r1["status"] != "pass":
            print(f"{float(v):10.4g}  {r1['status']}: {r1.get('error', '')}")
            continue
        tight = min(r1["lines"], key=lambda l: l["ratio"] if isinstance(l["ratio"], float) else float("inf"))
        c = r1["data"]["constants"]
        print(f"{float(v):10.4g} {c['lambda1_homology']['value']:9.5f} {r1['data']['x0']['norm']['value']:9.5f} "
              f"{r1['data']['iq']['value']:9.5f} {tight['name']:>26} {c['dimensionless_margin']:10.6f} "
              f"{r4['data']['constants']['dimensionless_margin']:10.6f}")
    print(f"IQ trend: {docs[1]['iq_trend']}; status: {docs[1]['status']} / {docs[4]['status']}")
    if args.out:
        with open(args.out, "w") as fh:
            json.dump({"schema": 1, "scale_1": docs[1], "scale_4": docs[4]}, fh, sort_keys=True, indent=2,
                      default=str)
    return 0 if docs[1]["status"] == docs[4]["status"] == "pass" else 1


if __name__ == "__main__":
    sys.exit(main())
