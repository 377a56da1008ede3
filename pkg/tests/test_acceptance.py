"""Acceptance suite: one test per criterion, each reporting a PASS/FAIL line with its runtime.

Every criterion compares the package against an independent route from
``oracles`` and checks its runtime budget.  The lines are printed in the
terminal summary (see ``conftest.py``).
"""

import json
import math
import random
import subprocess
import sys
import time
from contextlib import contextmanager
from fractions import Fraction

import numpy as np

from oracles import (brute_minima_squares, dga_axioms, exterior_oracle, heisenberg_iq2_scan, massey_by_hand,
                     model_agrees, random_lattice, random_quadratic, rank_betti,
                     simplicial_oracle, two_form_comass_sampled)
from syswork import dga
from syswork.cohomology import CohomologyRing, cup_is_zero_on_degree
from syswork.geometry import Geometry, InvariantMetric
from syswork.io import load_model
from syswork.lattice import NormedLattice, NormOracle, banaszczyk_scale, successive_minima, transference_profile
from syswork.massey import all_triples, integrality_check, is_nontrivial, massey_spanning_check, massey_triple
from syswork.pipeline import ScenarioSpec, run_scenario


RESULTS: list[str] = []


class Criterion:
    """Collects named checks and reports one line."""

    def __init__(self, number, title, budget):
        self.number, self.title, self.budget = number, title, budget
        self.failures = []
        self.notes = []
        self.oracle_time = 0.0

    def check(self, ok, what):
        if not ok:
            self.failures.append(what)

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    @contextmanager
    def oracle(self):
        """Time spent in independent oracles is reported but not charged to the budget."""
        t = time.perf_counter()
        try:
            yield
        finally:
            self.oracle_time += time.perf_counter() - t

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start - self.oracle_time
        if exc[0] is not None:
            self.failures.append(f"raised {exc[0].__name__}: {exc[1]}")
        self.check(self.elapsed < self.budget, f"runtime {self.elapsed:.1f}s over {self.budget}s")
        verdict = "PASS" if not self.failures else "FAIL"
        line = (f"criterion {self.number} ({self.title}): {verdict} in {self.elapsed:.2f}s "
                f"(budget {self.budget}s; oracles {self.oracle_time:.2f}s)")
        for n in self.notes:
            line += f"\n    {n}"
        for f in self.failures[:10]:
            line += f"\n    failed: {f}"
        RESULTS.append(line)
        return True  # failures are asserted by the test body

    def assert_ok(self):
        assert not self.failures, self.failures


# -- 1 -------------------------------------------------------------------------


def test_dga_validity():
    lies = [(f"abelian {n}", dga.abelian_lie(n)) for n in range(1, 7)]
    lies.append(("heisenberg", dga.heisenberg_lie()))
    rng = random.Random(2024)
    lies += [(f"random nilpotent {n}", dga.random_nilpotent_lie(n, rng)) for n in (3, 4, 5, 5, 6, 6)]
    complexes = [("torus", dga.torus_triangulation()), ("rp2", dga.projective_plane_triangulation()),
                 ("circle", dga.circle_triangulation())]
    with Criterion(1, "DGA validity", 5.0) as c:
        for name, L in lies:
            M = dga.build_chevalley_eilenberg(L)
            c.check(dga.check_model(M).ok, f"{name}: package check")
            with c.oracle():
                d, prod = exterior_oracle(L.constants)
                c.check(all(dga_axioms(M.labels, d, prod, lambda lab: True).values()), f"{name}: oracle axioms")
                c.check(model_agrees(M, d, prod), f"{name}: differential or product differs from oracle")
        prod, d_on = simplicial_oracle()
        for name, K in complexes:
            M = dga.build_simplicial_cochains(K)
            c.check(dga.check_model(M).ok, f"{name}: package check")
            with c.oracle():
                d = d_on({k: K.simplices[k] for k in range(1, len(K.simplices))})
                present = {s for level in K.simplices for s in level}
                c.check(all(dga_axioms(M.labels, d, prod, present.__contains__).values()), f"{name}: oracle axioms")
                c.check(model_agrees(M, d, prod), f"{name}: differential or product differs from oracle")
        c.notes.append(f"{len(lies)} Lie models, {len(complexes)} simplicial complexes, both routes")
    c.assert_ok()


# -- 2 -------------------------------------------------------------------------


def test_heisenberg_benchmark():
    with Criterion(2, "Heisenberg benchmark", 1.0) as c:
        M = dga.build_chevalley_eilenberg(dga.heisenberg_lie())
        R = CohomologyRing(M)
        betti = tuple(R.dim(k) for k in range(4))
        with c.oracle():
            c.check(betti == (1, 2, 2, 1) == rank_betti(M), f"betti {betti}")
        c.check(cup_is_zero_on_degree(R, 1), "cup product on H^1 is not zero")
        e1, e2 = R.basis_classes(1)
        for u, v, w, name in [(e1, e1, e2, "<e1,e1,e2>"), (e2, e2, e1, "<e2,e2,e1>")]:
            q = massey_triple(R, u, v, w)
            c.check(is_nontrivial(q) and q.indet.dim == 0, f"{name} trivial or indeterminate")
            with c.oracle():
                c.check(q.representative == massey_by_hand(R, u, v, w), f"{name} differs from direct solve")
            pairs = [integrality_check(R, q, R.homology_class(2, x)) for x in ((1, 0), (0, 1))]
            c.check(sorted(abs(p) for p in pairs) == [0, 1], f"{name} pairings {pairs}")
        c.check(massey_spanning_check(R, 1).sufficient, "spanning check")
    c.assert_ok()


# -- 3 -------------------------------------------------------------------------


def test_torus_negative_controls():
    with Criterion(3, "torus negative controls", 1.0) as c:
        R = load_model("torus3").ring()
        triples = all_triples(R, 1)
        defined = [t for t in triples if t["defined"]]
        c.check(all(not t["nontrivial"] for t in defined), "a defined triple avoids 0")
        c.notes.append(f"{len(defined)} of {len(triples)} triples defined, all contain 0")
        c.check(not cup_is_zero_on_degree(R, 1), "cup product vanished")
        rep = run_scenario(ScenarioSpec("torus3", "thm22"))
        c.check(rep.status == "refused" and rep.exit_code == 2 and not rep.lines, f"pipeline status {rep.status}")
        failed = sorted(k for k, v in rep.hypotheses.items() if not v["holds"])
        c.check("cup_zero" in failed, f"hypothesis report {failed}")
        c.notes.append(f"refused on {', '.join(failed)}")
    c.assert_ok()


# -- 4 -------------------------------------------------------------------------


def test_lattice_minima_exhaustive():
    rng = random.Random(4)
    with Criterion(4, "successive minima vs exhaustive enumeration", 60.0) as c:
        for i in range(50):
            b = 1 + i % 4
            B, Q = random_lattice(rng, b), random_quadratic(rng, b)
            got = successive_minima(NormedLattice(B, NormOracle.quadratic(Q))).squares
            with c.oracle():
                want = brute_minima_squares(B, Q)
            c.check(got == want, f"lattice {i}: {got} vs {want}")
        c.notes.append("50 lattices of rank 1..4, exact squared minima compared")
    c.assert_ok()


# -- 5 -------------------------------------------------------------------------


def random_polyhedral(rng, b):
    verts = [[int(i == j) for j in range(b)] for i in range(b)]
    verts += [[rng.randint(-2, 2) for _ in range(b)] for _ in range(b)]
    return NormOracle.polyhedral(vertices=[v for v in verts if any(v)])


def test_transference():
    rng = random.Random(5)
    with Criterion(5, "transference", 120.0) as c:
        worst = {}
        for i in range(40):
            b = 1 + i % 4
            tp = transference_profile(NormedLattice(random_lattice(rng, b), NormOracle.euclidean(b)))
            c.check(all(p >= 1 for p in tp.products_squared), f"euclidean {i}: product below 1")
            c.check(tp.products_squared[0] <= b * b, f"euclidean {i}: λ1·Λ* = {tp.products[0]} > {b}")
        for diag in [(1, 2), (3, 5, 7), (1, 4, 9, 16), (Fraction(1, 2), 3, Fraction(5, 3))]:
            b = len(diag)
            B = [[diag[i] if i == j else 0 for j in range(b)] for i in range(b)]
            for N in (NormOracle.euclidean(b), NormOracle.l1(b), NormOracle.linf(b)):
                tp = transference_profile(NormedLattice(B, N))
                ok = tp.products_squared == (1,) * b if tp.products_squared else all(
                    abs(p - 1) < 1e-12 for p in tp.products)
                c.check(ok, f"diagonal {diag} under {N.kind}: {tp.products}")
        general = 0
        for i in range(40):
            b = 1 + i % 4
            kind = i % 4
            if kind == 0:
                N = NormOracle.quadratic(random_quadratic(rng, b))
            elif kind == 1:
                N = NormOracle.l1(b)
            elif kind == 2:
                N = NormOracle.linf(b)
            else:
                N = random_polyhedral(rng, b)
            tp = transference_profile(NormedLattice(random_lattice(rng, b), N))
            c.check(all(p >= 1 - 1e-12 for p in tp.products), f"general {i}: product {min(tp.products)}")
            ratio = tp.products[0] / banaszczyk_scale(b)
            worst[b] = max(worst.get(b, 0.0), ratio)
            c.check(ratio <= 10, f"general {i}: ratio {ratio}")
            general += 1
        per_rank = ", ".join(f"b={b}: {w:.4f}" for b, w in sorted(worst.items()))
        c.notes.append(f"general-norm corpus ({general} lattices), worst λ1·Λ*/(b(1+log b)) by rank: {per_rank}")
    c.assert_ok()


# -- 6 -------------------------------------------------------------------------


def _geometry(L, gram):
    return Geometry(CohomologyRing(dga.build_chevalley_eilenberg(L)), InvariantMetric(gram))


def _random_gram(rng, n):
    A = [[Fraction(rng.randint(-2, 2), rng.randint(1, 2)) for _ in range(n)] for _ in range(n)]
    return [[sum(A[i][k] * A[j][k] for k in range(n)) + (1 if i == j else 0) for j in range(n)] for i in range(n)]


def test_norm_layer():
    with Criterion(6, "norm layer", 120.0) as c:
        # flat tori: stable norm is the Euclidean length of the lattice vector
        for ells in [(1, 1, 1), (2, 3, Fraction(1, 2)), (1, 2, 3, 5)]:
            n = len(ells)
            geo = _geometry(dga.abelian_lie(n), InvariantMetric.diagonal([Fraction(l) ** 2 for l in ells]).gram)
            rng = random.Random(n)
            for _ in range(8):
                h = [rng.randint(-3, 3) for _ in range(n)]
                want = math.sqrt(sum(float(l * x) ** 2 for l, x in zip(ells, h)))
                got = geo.stable_norm(geo.ring.homology_class(1, h)).value
                c.check(abs(got - want) <= 1e-9, f"flat {ells} h={h}: {got} vs {want}")
        # duality defect on 100 random pairs
        pairs = 0
        worst = -math.inf
        models = [(dga.LieStructure(5, {(0, 1, 4): 1, (2, 3, 4): 1}), _random_gram(random.Random(4), 5), (1, 2, 3, 4)),
                  (dga.heisenberg_lie(), InvariantMetric.diagonal([1, 1, 3]).gram, (1, 2)),
                  (dga.abelian_lie(4), _random_gram(random.Random(1), 4), (1, 2, 3))]
        rng = random.Random(6)
        while pairs < 100:
            for L, gram, degrees in models:
                geo = _geometry(L, gram)
                R = geo.ring
                for k in degrees:
                    if pairs >= 100:
                        break
                    a = R.cls(k, [rng.randint(-3, 3) for _ in range(R.dim(k))])
                    h = R.homology_class(k, [rng.randint(-3, 3) for _ in range(R.dim(k))])
                    if a.is_zero() or not any(h.coords):
                        continue
                    pair = abs(float(R.pair(a, h)))
                    bound = geo.min_comass_in_class(a).bracket.hi * geo.stable_norm(h).hi
                    c.check(pair <= bound * (1 + 1e-6), f"duality: {pair} > {bound}")
                    worst = max(worst, pair / bound - 1)
                    pairs += 1
        c.notes.append(f"duality defect: worst <α,h>/(|α||h|) - 1 = {worst:.3e} over {pairs} pairs")
        # canonical 2-forms
        flat = {n: _geometry(dga.abelian_lie(n), InvariantMetric.identity(n).gram) for n in (4, 6)}
        for coefs in [(1, 0), (2, 3), (-5, 1), (0.5, -0.25), (1, -2, 3), (0.1, 0.2, -0.05)]:
            n = 2 * len(coefs)
            geo = flat[n]
            form = geo.model.element(2, {(2 * i, 2 * i + 1): Fraction(x) for i, x in enumerate(coefs)}).coeffs
            value = geo.comass(form, 2).value
            c.check(abs(value - max(map(abs, coefs))) <= 1e-9, f"canonical {coefs}: {value}")
            if n == 4:
                A = np.zeros((n, n))
                for (i, j), x in zip(geo.model.labels[2], form):
                    A[i, j], A[j, i] = float(x), -float(x)
                with c.oracle():
                    s = two_form_comass_sampled(A, np.eye(n), samples=2000, seed=1)
                c.check(abs(s - value) <= 1e-6, f"canonical {coefs}: sampled {s}")
        # IQ_2 on the Heisenberg model
        for t in (Fraction(1, 4), 1, 4):
            geo = _geometry(dga.heisenberg_lie(), InvariantMetric.diagonal([1, 1, t]).gram)
            q = geo.isoperimetric_quotient(2).bracket.value
            with c.oracle():
                scan = heisenberg_iq2_scan(float(t))
            c.check(abs(q - scan) <= 1e-6, f"IQ2 t={t}: {q} vs scan {scan}")
            c.notes.append(f"IQ2 t={t}: {q:.9f} (scan {scan:.9f})")
    c.assert_ok()


# -- 7 -------------------------------------------------------------------------


NAMED_STEPS = ("integrality floor", "primitive bound", "last successive minimum", "headline shape")


def test_heisenberg_chain_margins():
    with Criterion(7, "proof chain on Heisenberg", 180.0) as c:
        for i in range(9):
            t = Fraction(float(np.logspace(-2, 2, 9)[i])).limit_denominator(10**9)
            rep = run_scenario(ScenarioSpec("heisenberg", "thm22", 1, {"t": t}))
            c.check(rep.status == "pass", f"t={float(t):.4g}: status {rep.status}")
            for line in rep.lines:
                c.check(line.holds and line.margin >= 0, f"t={float(t):.4g}: {line.name} margin {line.margin}")
            for step in NAMED_STEPS:
                c.check(any(l.name.startswith(step) and l.holds for l in rep.lines), f"t={float(t):.4g}: {step}")
            floor = next(l for l in rep.lines if l.name == "integrality floor")
            v = floor.rhs.value
            c.check(v == int(v) >= 1 and floor.rhs.lo == floor.rhs.hi, f"floor {v}")
            c.check(rep.data["chain_monotone"], f"t={float(t):.4g}: chain not monotone")
            scaled = run_scenario(ScenarioSpec("heisenberg", "thm22", 1, {"t": t}, Fraction(4)))
            a = rep.data["constants"]["dimensionless_margin"]
            b = scaled.data["constants"]["dimensionless_margin"]
            c.check(abs(a - b) <= 1e-6 * max(1.0, abs(a)), f"t={float(t):.4g}: margin {a} vs scaled {b}")
            if i in (0, 4, 8):
                c.notes.append(f"t={float(t):.4g}: dimensionless margin {a:.6f}, scaled {b:.6f}")
    c.assert_ok()


# -- 8 -------------------------------------------------------------------------


def test_cli_determinism(tmp_path):
    with Criterion(8, "deterministic verify output", 60.0) as c:
        outs = []
        for i in range(2):
            path = tmp_path / f"run{i}.json"
            proc = subprocess.run([sys.executable, "-m", "syswork.cli", "verify", "thm22", "heisenberg.json",
                                   "--seed", "7", "--out", str(path)], capture_output=True)
            c.check(proc.returncode == 0, f"exit code {proc.returncode}: {proc.stderr.decode()[-300:]}")
            outs.append(path.read_bytes())
        c.check(outs[0] == outs[1], "outputs differ")
        c.check(json.loads(outs[0])["schema"] == 1, "schema key")
        c.notes.append(f"{len(outs[0])} bytes, identical")
    c.assert_ok()
