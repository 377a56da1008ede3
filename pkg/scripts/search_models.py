"""Random search for nilpotent CE models with vanishing cup product on H^2
and a nontrivial Massey triple of degree-2 classes.

Candidates are positively graded: generator e^k gets a weight and d e^k
only uses monomials e^i∧e^j of the same total weight.  The grading splits
cohomology by weight, which makes vanishing cup products far more common
than for unstructured random algebras.

    python scripts/search_models.py --dim 7 --seconds 600 --seed 1 --out model.json
"""

from __future__ import annotations

import argparse
import itertools
import json
import random
import sys
import time
from fractions import Fraction

from syswork import exact_linear as el
from syswork.cohomology import CohomologyRing, cup_is_zero_on_degree, torsion_free_check
from syswork.dga import LieStructure, build_chevalley_eilenberg
from syswork.massey import UndefinedMassey, is_nontrivial, massey_triple


def graded_lie(weights: list[int], rng: random.Random, max_coeff: int = 1) -> LieStructure:
    """d e^k: random closed weight-homogeneous 2-form in e^1..e^{k-1}."""
    n = len(weights)
    constants: dict[tuple[int, int, int], Fraction] = {}
    for k in range(n):
        allowed = [(i, j) for i, j in itertools.combinations(range(k), 2) if weights[i] + weights[j] == weights[k]]
        if not allowed:
            continue
        partial = LieStructure(k, {key: v for key, v in constants.items() if key[2] < k})
        model = build_chevalley_eilenberg(partial)
        idx = [model.index_of(2, p) for p in allowed]
        # closed forms supported on the allowed monomials
        D = model.differential[2] if k >= 3 else el.zeros(0, model.dim(2))
        sub = [[row[i] for i in idx] for row in D] if D else []
        basis = el.nullspace(sub, len(idx)) if sub else el.identity(len(idx))
        vec = [Fraction(0)] * len(idx)
        for z in basis:
            t = rng.randint(-max_coeff, max_coeff)
            if t:
                den = 1
                for x in z:
                    den = den * x.denominator // el._gcd(den, x.denominator)
                vec = [a + t * den * b for a, b in zip(vec, z)]
        for (i, j), v in zip(allowed, vec):
            if v:
                constants[(i, j, k)] = -v
    return LieStructure(n, constants)


def nontrivial_triples(ring, degree: int = 2) -> list[tuple[int, int, int]]:
    basis = ring.basis_classes(degree)
    out = []
    for s, t, r in itertools.product(range(len(basis)), repeat=3):
        try:
            c = massey_triple(ring, basis[s], basis[t], basis[r])
        except UndefinedMassey:
            continue
        if is_nontrivial(c):
            out.append((s, t, r))
    return out


def qualifies(L: LieStructure, dim: int) -> dict | None:
    model = build_chevalley_eilenberg(L)
    ring = CohomologyRing(model)
    if ring.dim(2) == 0 or ring.dim(5) == 0 or ring.dim(dim) != 1:
        return None
    if not cup_is_zero_on_degree(ring, 2):
        return None
    if dim >= 8 and not all(ring.dim(k) for k in (3, 4, 8)):
        return None
    triples = nontrivial_triples(ring)
    if not triples:
        return None
    if not torsion_free_check(model, 4):
        return None
    return {"betti": list(ring.betti), "nontrivial_triples": len(triples)}


def weight_vectors(dim: int, max_weight: int):
    for tail in itertools.combinations_with_replacement(range(1, max_weight + 1), dim - 2):
        yield [1, 1, *tail]


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--dim", type=int, default=7)
    ap.add_argument("--seconds", type=float, default=300)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--max-weight", type=int, default=5)
    ap.add_argument("--samples", type=int, default=2, help="random draws per weight vector")
    ap.add_argument("--out")
    args = ap.parse_args(argv)
    rng = random.Random(args.seed)
    t0 = time.time()
    tried = 0
    weights = list(weight_vectors(args.dim, args.max_weight))
    rng.shuffle(weights)
    for w in weights:
        for _ in range(args.samples):
            if time.time() - t0 > args.seconds:
                print(f"no model after {tried} candidates", file=sys.stderr)
                return 1
            L = graded_lie(w, rng)
            tried += 1
            info = qualifies(L, args.dim)
            if info is None:
                continue
            c = [[i + 1, j + 1, k + 1, str(v)] for (i, j, k), v in sorted(L.constants.items())]
            doc = {"type": "lie", "dim": args.dim, "c": c, "weights": w}
            print(f"found after {tried} candidates ({time.time() - t0:.1f}s): {info}", file=sys.stderr)
            text = json.dumps(doc)
            if args.out:
                with open(args.out, "w") as fh:
                    fh.write(text + "\n")
            else:
                print(text)
            return 0
    print(f"weight vectors exhausted after {tried} candidates", file=sys.stderr)
    return 1


if __name__ == "__main__":
    sys.exit(main())
