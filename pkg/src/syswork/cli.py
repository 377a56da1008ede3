"""``syswork`` command line.

Exit codes: 0 pass, 1 an inequality was violated, 2 usage, load or
hypothesis error.  Every command prints one JSON document with
``"schema": 1``.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import __version__
from .cohomology import CohomologyRing, cup_is_zero_on_degree, torsion_report
from .geometry import Geometry
from .io import ModelLoadError, fraction_str, load_lattice, load_model
from .lattice import EnumerationBudgetExceeded, successive_minima, transference_profile
from .massey import all_triples, massey_spanning_check
from .pipeline import (SCHEMA, THEOREMS, HypothesisError, ScenarioError, ScenarioSpec, _jsonable,
                       run_grid, run_scenario)


class UsageError(Exception):
    pass


def parse_grid(text: str) -> tuple[str, list]:
    """``t=-2:2:9`` is a log10 range (9 points); ``t=1/4,1,4`` lists values."""
    if "=" not in text:
        raise UsageError(f"grid must look like NAME=LO:HI:COUNT or NAME=v1,v2,...: {text!r}")
    name, rng = text.split("=", 1)
    name = name.strip()
    if ":" in rng:
        try:
            lo, hi, n = rng.split(":")
            values = [float(v) for v in np.logspace(float(lo), float(hi), int(n))]
        except ValueError:
            raise UsageError(f"bad log range {rng!r}") from None
    else:
        try:
            values = [Fraction(v.strip()) for v in rng.split(",") if v.strip()]
        except ValueError:
            raise UsageError(f"bad value list {rng!r}") from None
    if not values:
        raise UsageError("empty grid")
    return name, values


def parse_params(items: Sequence[str]) -> dict:
    out = {}
    for item in items or ():
        if "=" not in item:
            raise UsageError(f"--param expects NAME=VALUE, got {item!r}")
        k, v = item.split("=", 1)
        try:
            out[k.strip()] = Fraction(v.strip())
        except ValueError:
            raise UsageError(f"bad parameter value {v!r}") from None
    return out


def _emit(doc: dict, out: str | None) -> None:
    text = json.dumps(_jsonable(doc), sort_keys=True, indent=2) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _fr(c) -> list[str]:
    return [fraction_str(x) for x in c]


def cmd_cohomology(args) -> int:
    loaded = load_model(args.model)
    ring = loaded.ring()
    M = ring.model
    degrees = []
    for k in range(M.top_degree + 1):
        tr = torsion_report(M, k)
        degrees.append({
            "degree": k, "betti": ring.dim(k),
            "representatives": [_fr(r.coeffs) for r in ring.reps(k)],
            "integral_basis": [_fr(r) for r in ring.integral_image[k]],
            "torsion": list(tr.invariant_factors),
        })
    doc = {"schema": SCHEMA, "model": loaded.name, "kind": M.kind, "betti": list(ring.betti),
           "euler_characteristic": ring.euler_characteristic(),
           "labels": [[list(l) for l in M.labels[k]] for k in range(M.top_degree + 1)],
           "degrees": degrees}
    if args.m is not None:
        doc["cup_zero"] = {"degree": args.m, "holds": cup_is_zero_on_degree(ring, args.m)}
        if ring.dim(2 * args.m):
            doc["cup_table"] = [[_fr(c) for c in row] for row in ring.cup_table(args.m, args.m)]
    _emit(doc, args.out)
    return 0


def cmd_massey(args) -> int:
    loaded = load_model(args.model)
    ring = loaded.ring()
    m = args.m or 1
    sp = massey_spanning_check(ring, m)
    doc = {"schema": SCHEMA, "model": loaded.name, "m": m,
           "cup_zero": cup_is_zero_on_degree(ring, m),
           "triples": all_triples(ring, m),
           "spanning": {"sufficient": sp.sufficient, "spanned_dim": sp.spanned.dim,
                        "target_dim": sp.target_dim, "witnesses": [list(w) for w in sp.witnesses]}}
    _emit(doc, args.out)
    return 0


def cmd_minima(args) -> int:
    L = load_lattice(args.lattice)
    prof = successive_minima(L)
    doc = {"schema": SCHEMA, "rank": L.rank, "norm": L.norm.kind,
           "lambdas": list(prof.lambdas), "witnesses": [list(w) for w in prof.witnesses],
           "vectors": [_fr(v) for v in prof.vectors], "visited": prof.visited}
    if prof.squares is not None:
        doc["lambdas_squared"] = _fr(prof.squares)
    if args.dual:
        tp = transference_profile(L)
        doc["dual_lambdas"] = list(tp.dual.lambdas)
        doc["transference_products"] = list(tp.products)
        doc["transference_ratios"] = list(tp.ratios)
    _emit(doc, args.out)
    return 0


def _systoles(loaded, ring, params, tol, seed) -> dict:
    geo = Geometry(ring, loaded.metric(params), tol=tol, seed=seed, covolume=loaded.covolume)
    rep = geo.systole_report()
    stsys = {str(k): {**e.bracket.as_dict(), "witness": list(e.witness), "class": _fr(e.homology.coords)}
             for k, e in rep.stsys.items()}
    iq = {str(k): {**q.bracket.as_dict(), "no_exact_forms": q.no_exact_forms} for k, q in rep.iq.items()}
    return {"params": {k: str(v) for k, v in sorted(params.items())}, "stsys": stsys, "iq": iq,
            "volume": rep.volume}


def cmd_systoles(args) -> int:
    loaded = load_model(args.model)
    if loaded.lie is None:
        raise HypothesisError("systoles need a Chevalley–Eilenberg model with an invariant metric")
    ring = loaded.ring()
    params = parse_params(args.param)
    doc = {"schema": SCHEMA, "model": loaded.name}
    if args.grid:
        name, values = parse_grid(args.grid)
        doc["grid"] = {"param": name, "values": [str(v) for v in values]}
        doc["points"] = [_systoles(loaded, ring, {**params, name: v}, args.tol, args.seed) for v in values]
    else:
        doc.update(_systoles(loaded, ring, params, args.tol, args.seed))
    _emit(doc, args.out)
    return 0


def cmd_verify(args) -> int:
    spec = ScenarioSpec(args.model, args.theorem, args.m or (2 if args.theorem == "thm222" else 1),
                        parse_params(args.param), Fraction(args.scale), args.tol, args.seed, args.branch)
    if args.grid:
        name, values = parse_grid(args.grid)
        doc = run_grid(spec, name, values)
        _emit(doc, args.out)
        return {"pass": 0, "violated": 1}.get(doc["status"], 2)
    report = run_scenario(spec)
    _emit(report.as_dict(), args.out)
    return report.exit_code


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--m", type=int, default=None, help="degree m")
    common.add_argument("--tol", type=float, default=1e-6)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--grid", help="NAME=LO:HI:COUNT (log10 range) or NAME=v1,v2,...")
    common.add_argument("--param", action="append", default=[], help="metric parameter NAME=VALUE")
    common.add_argument("--out", help="write the JSON report here")

    ap = argparse.ArgumentParser(prog="syswork", description="Massey products, lattices and systolic chains")
    ap.add_argument("--version", action="version", version=f"syswork {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cohomology", parents=[common], help="Betti numbers, representatives, torsion")
    p.add_argument("model")
    p.set_defaults(func=cmd_cohomology)

    p = sub.add_parser("massey", parents=[common], help="all triple Massey products of H^m basis classes")
    p.add_argument("model")
    p.set_defaults(func=cmd_massey)

    p = sub.add_parser("minima", parents=[common], help="successive minima of a normed lattice")
    p.add_argument("lattice")
    p.add_argument("--dual", action="store_true", help="also the dual lattice and transference products")
    p.set_defaults(func=cmd_minima)

    p = sub.add_parser("systoles", parents=[common], help="stable systoles, IQ^inv and volume")
    p.add_argument("model")
    p.set_defaults(func=cmd_systoles)

    p = sub.add_parser("verify", parents=[common], help="check an inequality chain on a model")
    p.add_argument("theorem", choices=THEOREMS)
    p.add_argument("model")
    p.add_argument("--scale", default="1", help="multiply the metric Gram by this factor")
    p.add_argument("--branch", default="auto", choices=("auto", "massey", "cup-square"))
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ScenarioError, ValueError) as exc:
        print(f"syswork: error: {exc}", file=sys.stderr)
        return 2
    except (ModelLoadError, HypothesisError, EnumerationBudgetExceeded) as exc:
        print(f"syswork: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
