"""End-to-end verification of the systolic inequality chains on a model.

Each verifier checks the hypotheses, builds comass-quasiorthogonal
families from the integral cohomology lattices, picks a systole-realizing
cycle ``x0`` and evaluates every intermediate inequality of the argument
with explicit constants.  Unknown headline constants are never asserted;
the implied constant is reported instead.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Any, Mapping, Sequence

import numpy as np

from . import exact_linear as el
from .cohomology import CohomologyClass, CohomologyRing, HomologyClass, cup_is_zero_on_degree, torsion_report
from .dga import Cochain
from .geometry import Bracket, Geometry
from .io import LoadedModel, fraction_str, load_model
from .lattice import (EnumerationBudgetExceeded, MinimaProfile, banaszczyk_scale, quasiorthogonal_family,
                      successive_minima)
from .massey import (MissingPrimitive, NonIntegralPairing, QuasiFamily, UndefinedMassey,
                     indeterminacy, integrality_check, is_nontrivial, massey_spanning_check,
                     massey_triple, quasiorthogonal_massey_element)

SCHEMA = 1
THEOREMS = ("thm22", "thm222", "prop81", "banaszczyk-only")
SLACK = 1e-9  # relative float noise allowed in a "holds" verdict


class ScenarioError(ValueError):
    """Malformed scenario (usage error)."""


class HypothesisError(RuntimeError):
    """The model does not meet the hypotheses; ``report`` explains why."""

    def __init__(self, message: str, report: dict | None = None):
        super().__init__(message)
        self.report = report or {}


@dataclass(frozen=True)
class ScenarioSpec:
    model: str
    theorem: str = "thm22"
    m: int = 1
    params: Mapping[str, Any] = field(default_factory=dict)
    scale: Fraction = Fraction(1)
    tol: float = 1e-6
    seed: int = 0
    branch: str = "auto"

    def __post_init__(self):
        if self.theorem not in THEOREMS:
            raise ScenarioError(f"unknown theorem selector {self.theorem!r}; choose from {', '.join(THEOREMS)}")
        if self.m < 1:
            raise ScenarioError("degree m must be at least 1")
        if self.branch not in ("auto", "massey", "cup-square"):
            raise ScenarioError(f"unknown branch {self.branch!r}")
        if self.tol <= 0:
            raise ScenarioError("tolerance must be positive")

    def as_dict(self) -> dict:
        return {
            "model": self.model, "theorem": self.theorem, "m": self.m,
            "params": {k: _num(v) for k, v in sorted(self.params.items())},
            "scale": fraction_str(el.frac(self.scale)), "tol": self.tol, "seed": self.seed,
            "branch": self.branch,
        }


@dataclass(frozen=True)
class Line:
    """One inequality ``lhs <= rhs`` with both sides as brackets."""

    name: str
    lhs: Bracket
    rhs: Bracket
    note: str = ""

    @property
    def holds(self) -> bool:
        return self.lhs.lo <= self.rhs.hi + SLACK * max(1.0, abs(self.rhs.hi))

    @property
    def certified(self) -> bool:
        return self.lhs.hi <= self.rhs.lo

    @property
    def margin(self) -> float:
        return self.rhs.value - self.lhs.value

    @property
    def ratio(self) -> float:
        return self.rhs.value / self.lhs.value if self.lhs.value else math.inf

    def as_dict(self) -> dict:
        d = {
            "name": self.name, "lhs": self.lhs.as_dict(), "rhs": self.rhs.as_dict(),
            "margin": self.margin, "ratio": _num(self.ratio),
            "holds": self.holds, "certified": self.certified,
        }
        if self.note:
            d["note"] = self.note
        return d


@dataclass
class VerificationReport:
    scenario: dict
    hypotheses: dict
    status: str = "pass"
    lines: list[Line] = field(default_factory=list)
    data: dict = field(default_factory=dict)
    error: str = ""

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    @property
    def exit_code(self) -> int:
        return {"pass": 0, "violated": 1}.get(self.status, 2)

    def finalize(self) -> "VerificationReport":
        if self.status in ("pass", "violated"):
            self.status = "pass" if all(l.holds for l in self.lines) else "violated"
        return self

    def as_dict(self) -> dict:
        d = {"schema": SCHEMA, "scenario": self.scenario, "hypotheses": self.hypotheses,
             "status": self.status, "lines": [l.as_dict() for l in self.lines], "data": self.data}
        if self.error:
            d["error"] = self.error
        return d

    def to_json(self) -> str:
        return json.dumps(_jsonable(self.as_dict()), sort_keys=True, indent=2)


# -- helpers ---------------------------------------------------------------------


def _num(x):
    if isinstance(x, Fraction):
        return fraction_str(x)
    if isinstance(x, (np.floating, np.integer)):
        x = x.item()
    if isinstance(x, float) and not math.isfinite(x):
        return "inf" if x > 0 else ("-inf" if x < 0 else "nan")
    return x


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    return _num(obj)


def _coords(c: Sequence) -> list[str]:
    return [fraction_str(el.frac(x)) for x in c]


def _entry(b: Bracket, source: str, **extra) -> dict:
    d = b.as_dict()
    d["source"] = source
    d.update(extra)
    return d


def _prod(*brackets: Bracket, const: float = 1.0) -> Bracket:
    lo, hi, val = const, const, const
    approx, notes = False, []
    for b in brackets:
        lo, hi, val = lo * b.lo, hi * b.hi, val * b.value
        approx = approx or b.approximate
        if b.note:
            notes.append(b.note)
    return Bracket(lo, hi, val, approx, "; ".join(dict.fromkeys(notes)))


def _sum(a: Bracket, b: Bracket) -> Bracket:
    return Bracket(a.lo + b.lo, a.hi + b.hi, a.value + b.value, a.approximate or b.approximate,
                   "; ".join(n for n in dict.fromkeys((a.note, b.note)) if n))


def _exact(x) -> Bracket:
    return Bracket.exact(float(x))


def _float_cochain(k: int, vec) -> Cochain:
    return Cochain(k, tuple(float(x) for x in vec))


# -- hypotheses --------------------------------------------------------------------


def _hyp(holds: bool, **detail) -> dict:
    return {"holds": bool(holds), **detail}


def _massey_witnesses(ring: CohomologyRing, m: int, limit: int | None = None) -> list[tuple[int, int, int]]:
    basis = ring.basis_classes(m)
    out = []
    for s, t, r in itertools.product(range(len(basis)), repeat=3):
        try:
            coset = massey_triple(ring, basis[s], basis[t], basis[r])
        except UndefinedMassey:
            continue
        if is_nontrivial(coset):
            out.append((s, t, r))
            if limit is not None and len(out) >= limit:
                break
    return out


def _indeterminacy_verdicts(ring: CohomologyRing, m: int, q: CohomologyClass, coset) -> dict:
    """q modulo two indeterminacies: its own basis triple's and the first nontrivial witness triple's."""
    out = {"indeterminacy_dim": coset.indet.dim, "nonzero_mod_own_indeterminacy": q.coords not in coset.indet}
    found = _massey_witnesses(ring, m, limit=1)
    if found:
        basis = ring.basis_classes(m)
        w = massey_triple(ring, *(basis[i] for i in found[0]))
        out.update(witness_triple=list(found[0]), witness_indeterminacy_dim=w.indet.dim,
                   nonzero_mod_witness_indeterminacy=q.coords not in w.indet)
    return out


def check_hypotheses(ring: CohomologyRing, theorem: str, m: int = 1) -> dict:
    """Verdict and witnesses for each hypothesis of the selected statement."""
    M = ring.model
    top = M.top_degree
    out: dict[str, dict] = {}
    if theorem in ("thm22", "banaszczyk-only"):
        out["betti_positive"] = _hyp(ring.dim(m) > 0, degree=m, betti=ring.dim(m))
        if theorem == "banaszczyk-only":
            return out
        out["cup_zero"] = _hyp(cup_is_zero_on_degree(ring, m), degree=m)
        sp = massey_spanning_check(ring, m) if out["cup_zero"]["holds"] else None
        out["massey_type"] = _hyp(
            sp is not None and sp.sufficient, degree=3 * m - 1, target_dim=ring.dim(3 * m - 1),
            spanned_dim=sp.spanned.dim if sp else None,
            witnesses=[list(w) for w in sp.witnesses] if sp else [],
            method="zero-indeterminacy basis triples span (sufficient condition)",
        )
        tr = torsion_report(M, 2 * m)
        out["torsion_free"] = _hyp(tr.torsion_free, degree=2 * m, invariant_factors=list(tr.invariant_factors))
        return out
    if theorem == "thm222":
        out["dimension_7"] = _hyp(top == 7, top_degree=top)
        out["orientable"] = _hyp(ring.dim(top) == 1, top_betti=ring.dim(top))
        out["cup_zero"] = _hyp(top >= 4 and cup_is_zero_on_degree(ring, 2), degree=2)
        wit = _massey_witnesses(ring, 2, limit=8) if out["cup_zero"]["holds"] else []
        out["nontrivial_massey"] = _hyp(bool(wit), degree=5, witnesses=[list(w) for w in wit],
                                        method="search over basis triples of H^2 (first 8 witnesses)")
        tr = torsion_report(M, 4) if top >= 4 else None
        out["torsion_free"] = _hyp(bool(tr and tr.torsion_free), degree=4,
                                   invariant_factors=list(tr.invariant_factors) if tr else [])
        return out
    if theorem == "prop81":
        pattern = {k: ring.dim(k) for k in (2, 3, 4, 5, 8)}
        out["degree_pattern"] = _hyp(top >= 8 and all(pattern.values()), betti=pattern)
        if not out["degree_pattern"]["holds"]:
            return out
        out["cup_zero"] = _hyp(cup_is_zero_on_degree(ring, 2), degree=2)
        wit = _massey_witnesses(ring, 2) if out["cup_zero"]["holds"] else []
        out["nontrivial_massey"] = _hyp(bool(wit), degree=5, witnesses=[list(w) for w in wit[:8]])
        vecs = []
        basis2 = ring.basis_classes(2)
        for s, t, r in wit:
            q = massey_triple(ring, basis2[s], basis2[t], basis2[r]).representative
            vecs += [ring.cup(q, v).coords for v in ring.basis_classes(3)]
        b4 = ring.basis_classes(4)
        vecs += [ring.cup(a, b).coords for a in b4 for b in b4]
        span = el.Subspace.span(vecs, ring.dim(8))
        out["degree8_spanned"] = _hyp(span.dim == ring.dim(8), spanned_dim=span.dim, target_dim=ring.dim(8))
        tr = torsion_report(M, 4)
        out["torsion_free"] = _hyp(tr.torsion_free, degree=4, invariant_factors=list(tr.invariant_factors))
        return out
    raise ScenarioError(f"unknown theorem selector {theorem!r}")


# -- shared constructions ------------------------------------------------------------


@dataclass
class _Family:
    degree: int
    profile: MinimaProfile
    classes: list[CohomologyClass]
    forms: list[np.ndarray]
    norms: list[Bracket]

    @property
    def last(self) -> Bracket:
        return max(self.norms, key=lambda b: b.value)


def _family(geo: Geometry, m: int) -> _Family:
    ring = geo.ring
    L = geo.cohomology_lattice(m)
    prof = successive_minima(L)
    qf = quasiorthogonal_family(L, prof)
    classes = [ring.cls(m, v) for v in qf.vectors]
    forms, norms = [], []
    for c, lam in zip(classes, prof.lambdas):
        res = geo.min_comass_in_class(c)
        forms.append(res.form)
        norms.append(res.bracket if not geo.euclidean_degree(m) else Bracket.exact(lam))
    return _Family(m, prof, classes, forms, norms)


def _family_data(F: _Family) -> dict:
    return {
        "degree": F.degree,
        "lambdas": [_entry(b, "successive minima of the integral lattice under min-comass norm")
                    for b in F.norms],
        "witnesses": [list(w) for w in F.profile.witnesses],
        "classes": [_coords(c.coords) for c in F.classes],
    }


def _primitive_min(geo: Geometry, alpha: np.ndarray, k: int):
    """Least-comass primitive of an exact float k-form."""
    M = geo.model
    D = np.array(M.differential[k - 1], dtype=float)
    beta, *_ = np.linalg.lstsq(D, alpha, rcond=None)
    resid = float(np.linalg.norm(D @ beta - alpha))
    if resid > 1e-8 * max(1.0, float(np.linalg.norm(alpha))):
        raise HypothesisError(f"degree-{k} form is not exact (residual {resid:.3g})")
    return geo.min_comass_affine(beta, geo.ring.cycles(k - 1).basis, k - 1)


def _wedge(geo: Geometry, a: np.ndarray, k: int, b: np.ndarray, l: int) -> np.ndarray:
    return np.array(geo.model.wedge(_float_cochain(k, a), _float_cochain(l, b)).coeffs, dtype=float)


def _float_class_pairing(ring: CohomologyRing, form: np.ndarray, k: int, x0: HomologyClass) -> float:
    P = np.array(ring.projector(k), dtype=float)
    coords = P @ form
    return float(coords @ np.array([float(c) for c in x0.coords]))


def _geometry(spec: ScenarioSpec, loaded: LoadedModel, ring: CohomologyRing) -> Geometry:
    if loaded.lie is None:
        raise HypothesisError("metric computations need a Chevalley–Eilenberg (lie) model")
    metric = loaded.metric(spec.params).scaled(spec.scale)
    return Geometry(ring, metric, tol=spec.tol, seed=spec.seed, covolume=loaded.covolume)


@dataclass
class _MasseyPiece:
    """Quasiorthogonal Massey element with its metric data."""

    s: int
    t: int
    r: int
    exact: CohomologyClass
    form: np.ndarray
    w_st: Bracket
    w_tr: Bracket
    wedge_st: Bracket
    wedge_tr: Bracket
    indet_dim: int


def _massey_pieces(geo: Geometry, F: _Family, iq_degree: int):
    """IQ with the family's wedge forms as seeds, and all primitive data."""
    m = F.degree
    b = len(F.classes)
    wedges = {}
    for i, j in itertools.product(range(b), repeat=2):
        wedges[(i, j)] = _wedge(geo, F.forms[i], m, F.forms[j], m)
    seeds = [wedges[key] for key in sorted(wedges) if np.linalg.norm(wedges[key]) > 1e-14]
    iq = geo.isoperimetric_quotient(iq_degree, candidates=seeds)
    prims: dict[tuple[int, int], tuple[np.ndarray, Bracket, Bracket]] = {}
    for key, w in wedges.items():
        if np.linalg.norm(w) <= 1e-14:
            prims[key] = (np.zeros(geo.model.dim(2 * m - 1)), Bracket.exact(0.0), Bracket.exact(0.0))
            continue
        res = _primitive_min(geo, w, 2 * m)
        cm = geo.comass(w, 2 * m).bracket
        prims[key] = (res.form, res.bracket, cm)
    return iq, wedges, prims


def _massey_form(geo: Geometry, F: _Family, prims, s: int, t: int, r: int) -> np.ndarray:
    m = F.degree
    first = _wedge(geo, prims[(s, t)][0], 2 * m - 1, F.forms[r], m)
    second = _wedge(geo, F.forms[s], m, prims[(t, r)][0], 2 * m - 1)
    return first + second if m % 2 else first - second


def _eq42_lines(iq: Bracket, prims, pairs) -> list[Line]:
    out = []
    for (i, j) in pairs:
        _, w, cm = prims[(i, j)]
        out.append(Line(f"primitive bound w_{i}{j}", w, _prod(iq, cm),
                        "least primitive comass <= IQ * comass(v_i ^ v_j)"))
    return out


def _massey_chain(geo: Geometry, F: _Family, iq: Bracket, prims, s, t, r) -> tuple[list[Line], Bracket, Bracket]:
    """Lines bounding comass of the Massey cochain by λ_s λ_t λ_r IQ.

    Returns the lines, the wedge-constant bound, and the λ-product bound.
    """
    m = F.degree
    C1 = comb(3 * m - 1, m)
    C2 = comb(2 * m, m)
    form = _massey_form(geo, F, prims, s, t, r)
    cq = geo.comass(form, 3 * m - 1).bracket
    A = _prod(_sum(_prod(prims[(s, t)][1], F.norms[r]), _prod(F.norms[s], prims[(t, r)][1])), const=C1)
    B = _prod(iq, _sum(_prod(prims[(s, t)][2], F.norms[r]), _prod(F.norms[s], prims[(t, r)][2])), const=C1)
    Cc = _prod(F.norms[s], F.norms[t], F.norms[r], iq, const=2 * C1 * C2)
    lines = [Line("massey cochain comass", cq, A,
                  f"comass(w_st^v_r -+ v_s^w_tr) <= {C1}(|w_st||v_r| + |v_s||w_tr|)")]
    lines += _eq42_lines(iq, prims, sorted({(s, t), (t, r)}))
    lines += [
        Line("isoperimetric substitution", A, B, "primitive comass replaced by IQ times wedge comass"),
        Line("wedge bound", B, Cc, f"comass(v_i^v_j) <= {C2} λ_i λ_j"),
    ]
    return lines, form, cq


def _monotone(values: Sequence[Bracket]) -> bool:
    v = [b.value for b in values]
    return all(a <= b + SLACK * max(1.0, abs(b)) for a, b in zip(v, v[1:]))


def _select_triple(ring: CohomologyRing, F: _Family, x0: HomologyClass, extra=None):
    """Lexicographically least (s, t, r[, p]) pairing nontrivially with x0."""
    exact = QuasiFamily.build(ring, F.classes)
    b = len(F.classes)
    tail = extra if extra is not None else [None]
    for s, t, r in itertools.product(range(b), repeat=3):
        try:
            q = quasiorthogonal_massey_element(ring, exact, s, t, r)
        except MissingPrimitive:
            continue
        for p in tail:
            target = q if p is None else ring.cup(q, p[1])
            if target.is_zero():
                continue
            try:
                val = integrality_check(ring, target, x0)
            except NonIntegralPairing as exc:
                raise HypothesisError(str(exc)) from None
            if val:
                coset = massey_triple(ring, F.classes[s], F.classes[t], F.classes[r])
                return (s, t, r), (None if p is None else p[0]), q, val, coset
    return None


# -- verifiers -----------------------------------------------------------------------


def _start(spec: ScenarioSpec):
    loaded = load_model(spec.model)
    ring = loaded.ring()
    hyps = check_hypotheses(ring, spec.theorem, spec.m)
    report = VerificationReport(spec.as_dict(), hyps)
    report.data["betti"] = list(ring.betti)
    failed = [k for k, v in hyps.items() if not v["holds"]]
    if failed:
        raise HypothesisError(f"hypotheses not satisfied: {', '.join(failed)}", report.as_dict())
    return loaded, ring, report


def verify_chain_thm22(spec: ScenarioSpec) -> VerificationReport:
    loaded, ring, report = _start(spec)
    m = spec.m
    geo = _geometry(spec, loaded, ring)
    b = ring.dim(m)
    d = report.data
    # (a) x0 realizing the (3m-1)-systole
    sys_top = geo.stable_systole(3 * m - 1)
    x0, x0n = sys_top.homology, sys_top.bracket
    d["x0"] = {"lattice": list(sys_top.witness), "coords": _coords(x0.coords),
               "norm": _entry(x0n, f"stable systole in degree {3 * m - 1}")}
    # (b) quasiorthogonal family in H^m
    F = _family(geo, m)
    d["family"] = _family_data(F)
    # (d) least triple pairing with x0
    found = _select_triple(ring, F, x0)
    if found is None:
        raise HypothesisError("Massey-type insufficient for this x0: no quasiorthogonal Massey "
                              "element pairs nontrivially with it", report.as_dict())
    (s, t, r), _, q, pairing, coset = found
    # (c) IQ and least-comass primitives
    iq_res, wedges, prims = _massey_pieces(geo, F, 2 * m)
    iq = iq_res.bracket
    d["iq"] = _entry(iq, f"invariant isoperimetric quotient in degree {2 * m}",
                     no_exact_forms=iq_res.no_exact_forms)
    lines_mid, form, cq = _massey_chain(geo, F, iq, prims, s, t, r)
    actual = _float_class_pairing(ring, form, 3 * m - 1, x0)
    d["triple"] = {
        "indices": [s, t, r], "class": _coords(q.coords), "pairing_exact": pairing,
        "pairing_actual": actual, "coset_contains_zero": coset.contains_zero(),
        **_indeterminacy_verdicts(ring, m, q, coset),
    }
    C1, C2 = comb(3 * m - 1, m), comb(2 * m, m)
    P = _exact(abs(pairing))
    Pa = _exact(abs(actual))
    lam1 = geo.stable_systole(m)
    Lam = F.last
    D = _prod(Lam, Lam, Lam, iq, x0n, const=2 * C1 * C2)
    Cc = _prod(F.norms[s], F.norms[t], F.norms[r], iq, x0n, const=2 * C1 * C2)
    lines = [
        Line("integrality floor", _exact(1), P, "exact integer pairing of the Massey element with x0"),
        Line("pairing agreement", _exact(abs(actual - pairing)), _exact(spec.tol),
             "optimised cochains pair with x0 like the exact class"),
        Line("comass-stable duality", Pa, _prod(cq, x0n), "|<q, x0>| <= comass(q) * |x0|"),
    ]
    # comass lines scaled by |x0| to sit in the pairing chain
    for ln in lines_mid:
        if ln.name.startswith("primitive bound"):
            lines.append(ln)
        else:
            lines.append(Line(ln.name, _prod(ln.lhs, x0n), _prod(ln.rhs, x0n), ln.note))
    lines.append(Line("last successive minimum", Cc, D, "λ_s λ_t λ_r <= Λ^3"))
    smin = _prod(lam1.bracket, lam1.bracket, lam1.bracket)
    E = _prod(lam1.bracket, Lam, lam1.bracket, Lam, lam1.bracket, Lam, iq, x0n, const=2 * C1 * C2)
    lines.append(Line("systole form", smin, E, f"stsys_{m}^3 <= {2 * C1 * C2} (λ_1 Λ)^3 IQ stsys_{3 * m - 1}"))
    scale = banaszczyk_scale(b)
    rho = lam1.value * Lam.value / scale
    implied = 2 * C1 * C2 * rho ** 3
    final_rhs = _prod(iq, x0n, const=implied * scale ** 3)
    lines.append(Line("headline shape", smin, final_rhs,
                      f"stsys_{m}^3 <= C (b(1+log b))^3 IQ stsys_{3 * m - 1} with computed C"))
    report.lines = lines
    chain = [_exact(1), P] + [_prod(cq, x0n)] + [l.rhs for l in lines if l.name in
             ("massey cochain comass", "isoperimetric substitution", "wedge bound", "last successive minimum")]
    d["constants"] = {
        "wedge_constant": C1, "wedge_constant_inner": C2, "b": b, "b_log_scale": scale,
        "lambda1_homology": _entry(lam1.bracket, f"stable systole in degree {m}"),
        "Lambda_cohomology": _entry(Lam, "last successive minimum of the H^m lattice"),
        "transference_ratio": rho, "implied_constant": implied,
        "dimensionless_margin": final_rhs.value / smin.value,
    }
    d["chain_monotone"] = _monotone(chain)
    d["transference"] = _transference(geo, m, F)
    return report.finalize()


def _transference(geo: Geometry, m: int, F: _Family) -> dict:
    H = successive_minima(geo.homology_lattice(m))
    lam = [b.value for b in F.norms]
    bdim = len(lam)
    prods = [lam[i] * H.lambdas[bdim - 1 - i] for i in range(bdim)]
    return {"cohomology_lambdas": lam, "homology_lambdas": list(H.lambdas), "products": prods,
            "ratio_to_b_log_b": [p / banaszczyk_scale(bdim) for p in prods]}


def verify_chain_thm222(spec: ScenarioSpec) -> VerificationReport:
    loaded, ring, report = _start(spec)
    geo = _geometry(spec, loaded, ring)
    d = report.data
    m = 2
    F = _family(geo, m)
    d["family"] = _family_data(F)
    x0 = ring.homology_class(7, [1])
    x0n = geo.stable_norm(x0)
    vol = geo.volume()
    d["x0"] = {"coords": _coords(x0.coords), "norm": _entry(x0n, "stable norm of the fundamental class"),
               "volume": vol}
    extra = list(enumerate(F.classes))
    found = _select_triple(ring, F, x0, extra)
    if found is None:
        raise HypothesisError("no quasiorthogonal Massey element cups nontrivially with a family class",
                              report.as_dict())
    (s, t, r), p, q, pairing, coset = found
    iq_res, wedges, prims = _massey_pieces(geo, F, 4)
    iq = iq_res.bracket
    d["iq"] = _entry(iq, "invariant isoperimetric quotient in degree 4")
    lines_mid, form, cq = _massey_chain(geo, F, iq, prims, s, t, r)
    top_form = _wedge(geo, form, 5, F.forms[p], 2)
    actual = _float_class_pairing(ring, top_form, 7, x0)
    d["triple"] = {"indices": [s, t, r, p], "class": _coords(q.coords), "pairing_exact": pairing,
                   "pairing_actual": actual, **_indeterminacy_verdicts(ring, 2, q, coset)}
    C7 = comb(7, 2)
    C1, C2 = comb(5, 2), comb(4, 2)
    ctop = geo.comass(top_form, 7).bracket
    P, Pa = _exact(abs(pairing)), _exact(abs(actual))
    lines = [
        Line("integrality floor", _exact(1), P, "exact integer: Massey element cup v_p on [X]"),
        Line("pairing agreement", _exact(abs(actual - pairing)), _exact(spec.tol)),
        Line("comass-stable duality", Pa, _prod(ctop, x0n), "|<q v_p, [X]>| <= comass * |[X]|"),
        Line("stable norm of [X] equals volume", _exact(x0n.value), _exact(vol * (1 + spec.tol))),
        Line("top wedge", _prod(ctop, x0n), _prod(cq, F.norms[p], x0n, const=C7),
             f"comass(q^v_p) <= {C7} comass(q) λ_p"),
    ]
    for ln in lines_mid:
        if ln.name.startswith("primitive bound"):
            lines.append(ln)
        else:
            lines.append(Line(ln.name, _prod(ln.lhs, F.norms[p], x0n, const=C7),
                              _prod(ln.rhs, F.norms[p], x0n, const=C7), ln.note))
    K = 2 * C7 * C1 * C2
    Lam = F.last
    Cc = _prod(F.norms[s], F.norms[t], F.norms[r], F.norms[p], iq, x0n, const=K)
    D = _prod(Lam, Lam, Lam, Lam, iq, x0n, const=K)
    lines.append(Line("last successive minimum", Cc, D, "λ_s λ_t λ_r λ_p <= Λ^4"))
    lam1 = geo.stable_systole(2)
    s4 = _prod(*(lam1.bracket,) * 4)
    E = _prod(*(lam1.bracket,) * 4, *(Lam,) * 4, iq, x0n, const=K)
    lines.append(Line("systole form", s4, E, f"stsys_2^4 <= {K} (λ_1 Λ)^4 IQ_4 vol_7"))
    b = ring.dim(2)
    rho = lam1.value * Lam.value
    lines.append(Line("headline shape", s4, _prod(iq, _exact(vol), const=K * rho ** 4),
                      "stsys_2^4 <= C(b_2) IQ_4 vol_7 with computed C"))
    report.lines = lines
    d["constants"] = {"K": K, "b": b, "lambda1_Lambda": rho, "implied_constant": K * rho ** 4,
                      "implied_over_b_log_b4": K * (rho / banaszczyk_scale(b)) ** 4,
                      "dimensionless_margin": E.value / s4.value}
    return report.finalize()


def prop81_branches(ring: CohomologyRing, x0: HomologyClass, F2: _Family, F3: _Family, F4: _Family,
                    order: Sequence[str] = ("massey", "cup-square")):
    """First applicable branch: (name, indices, exact pairing) or None."""
    for name in order:
        if name == "massey":
            found = _select_triple(ring, F2, x0, list(enumerate(F3.classes)))
            if found:
                (s, t, r), j, q, val, coset = found
                return "massey", (s, t, r, j), val, q
        else:
            b = len(F4.classes)
            for i, j in itertools.product(range(b), repeat=2):
                w = ring.cup(F4.classes[i], F4.classes[j])
                if w.is_zero():
                    continue
                val = integrality_check(ring, w, x0)
                if val:
                    return "cup-square", (i, j), val, w
    return None


def verify_prop81(spec: ScenarioSpec) -> VerificationReport:
    loaded, ring, report = _start(spec)
    geo = _geometry(spec, loaded, ring)
    d = report.data
    sys8 = geo.stable_systole(8)
    x0, x0n = sys8.homology, sys8.bracket
    d["x0"] = {"lattice": list(sys8.witness), "coords": _coords(x0.coords),
               "norm": _entry(x0n, "stable systole in degree 8")}
    F2, F3, F4 = _family(geo, 2), _family(geo, 3), _family(geo, 4)
    d["families"] = [_family_data(F) for F in (F2, F3, F4)]
    order = {"auto": ("massey", "cup-square"), "massey": ("massey",), "cup-square": ("cup-square",)}[spec.branch]
    found = prop81_branches(ring, x0, F2, F3, F4, order)
    if found is None:
        raise HypothesisError("x0 pairs trivially with every Massey-branch and cup-square candidate",
                              report.as_dict())
    branch, idx, pairing, cls = found
    s2 = geo.stable_systole(2).bracket
    s3 = geo.stable_systole(3).bracket
    s4 = geo.stable_systole(4).bracket
    P = _exact(abs(pairing))
    lines = [Line("integrality floor", _exact(1), P, f"exact integer pairing ({branch} branch)")]
    if branch == "massey":
        s, t, r, j = idx
        iq_res, wedges, prims = _massey_pieces(geo, F2, 4)
        iq = iq_res.bracket
        d["iq"] = _entry(iq, "invariant isoperimetric quotient in degree 4")
        lines_mid, form, cq = _massey_chain(geo, F2, iq, prims, s, t, r)
        f8 = _wedge(geo, form, 5, F3.forms[j], 3)
        actual = _float_class_pairing(ring, f8, 8, x0)
        C8 = comb(8, 3)
        c8 = geo.comass(f8, 8).bracket
        lines += [
            Line("pairing agreement", _exact(abs(actual - pairing)), _exact(spec.tol)),
            Line("comass-stable duality", _exact(abs(actual)), _prod(c8, x0n)),
            Line("top wedge", _prod(c8, x0n), _prod(cq, F3.norms[j], x0n, const=C8),
                 f"comass(q^v) <= {C8} comass(q) λ'_j"),
        ]
        for ln in lines_mid:
            if ln.name.startswith("primitive bound"):
                lines.append(ln)
            else:
                lines.append(Line(ln.name, _prod(ln.lhs, F3.norms[j], x0n, const=C8),
                                  _prod(ln.rhs, F3.norms[j], x0n, const=C8), ln.note))
        K = 2 * C8 * comb(5, 2) * comb(4, 2)
        L2, L3 = F2.last, F3.last
        lines.append(Line("last successive minimum",
                          _prod(F2.norms[s], F2.norms[t], F2.norms[r], F3.norms[j], iq, x0n, const=K),
                          _prod(L2, L2, L2, L3, iq, x0n, const=K)))
        quantity = Bracket(s2.lo ** 3 * s3.lo / iq.hi if iq.hi < math.inf else 0.0,
                           s2.hi ** 3 * s3.hi / iq.lo if iq.lo > 0 else math.inf,
                           s2.value ** 3 * s3.value / iq.value, iq.approximate)
        const = K * (s2.value * L2.value) ** 3 * (s3.value * L3.value)
        d["triple"] = {"indices": list(idx), "class": _coords(cls.coords), "pairing_exact": pairing,
                       "pairing_actual": actual}
    else:
        i, j = idx
        C8 = comb(8, 4)
        f8 = _wedge(geo, F4.forms[i], 4, F4.forms[j], 4)
        actual = _float_class_pairing(ring, f8, 8, x0)
        c8 = geo.comass(f8, 8).bracket
        L4 = F4.last
        lines += [
            Line("pairing agreement", _exact(abs(actual - pairing)), _exact(spec.tol)),
            Line("comass-stable duality", _exact(abs(actual)), _prod(c8, x0n)),
            Line("wedge bound", _prod(c8, x0n), _prod(F4.norms[i], F4.norms[j], x0n, const=C8),
                 f"comass(z_i^z_j) <= {C8} λ_i λ_j"),
            Line("last successive minimum", _prod(F4.norms[i], F4.norms[j], x0n, const=C8),
                 _prod(L4, L4, x0n, const=C8)),
        ]
        quantity = _prod(s4, s4)
        const = C8 * (s4.value * L4.value) ** 2
        d["pair"] = {"indices": list(idx), "pairing_exact": pairing, "pairing_actual": actual}
    lines.append(Line("branch bound", quantity, _prod(x0n, const=const),
                      f"{branch} branch quantity <= C stsys_8 with computed C"))
    iq4 = d.get("iq")
    other = s4.value ** 2
    if branch == "massey":
        mn = min(quantity.value, other)
    else:
        mn = min(quantity.value, s2.value ** 3 * s3.value / iq4["value"]) if iq4 else quantity.value
    lines.append(Line("minimum form", _exact(mn), _prod(x0n, const=const),
                      "min{stsys_2^3 stsys_3 / IQ_4, stsys_4^2} <= C stsys_8"))
    report.lines = lines
    d["branch"] = branch
    d["systoles"] = {"2": s2.as_dict(), "3": s3.as_dict(), "4": s4.as_dict(), "8": x0n.as_dict()}
    d["constants"] = {"computed_constant": const, "implied_constant": mn / x0n.value}
    return report.finalize()


def verify_transference(spec: ScenarioSpec) -> VerificationReport:
    loaded, ring, report = _start(spec)
    geo = _geometry(spec, loaded, ring)
    F = _family(geo, spec.m)
    tr = _transference(geo, spec.m, F)
    report.data["family"] = _family_data(F)
    report.data["transference"] = tr
    report.lines = [Line(f"transference product {i + 1}", _exact(1), _exact(p))
                    for i, p in enumerate(tr["products"])]
    return report.finalize()


_VERIFIERS = {"thm22": verify_chain_thm22, "thm222": verify_chain_thm222,
              "prop81": verify_prop81, "banaszczyk-only": verify_transference}


def run_scenario(spec: ScenarioSpec) -> VerificationReport:
    """Dispatch; hypothesis failures become a refused report and an exhausted
    lattice enumeration an incomplete one (both exit code 2)."""
    try:
        return _VERIFIERS[spec.theorem](spec)
    except HypothesisError as exc:
        rep = exc.report or {}
        return VerificationReport(spec.as_dict(), rep.get("hypotheses", {}), status="refused",
                                  data=rep.get("data", {}), error=str(exc))
    except EnumerationBudgetExceeded as exc:
        return VerificationReport(spec.as_dict(), {}, status="incomplete", error=str(exc))


def run_grid(spec: ScenarioSpec, name: str, values: Sequence[float]) -> dict:
    """Independent runs over one metric parameter; reports stay in grid order."""
    reports = []
    for v in values:
        params = dict(spec.params)
        params[name] = v
        sub = ScenarioSpec(spec.model, spec.theorem, spec.m, params, spec.scale, spec.tol, spec.seed, spec.branch)
        reports.append(run_scenario(sub))
    iqs = [r.data.get("iq", {}).get("value") for r in reports]
    trend = "n/a"
    if all(isinstance(x, float) for x in iqs) and len(iqs) > 1:
        if all(a >= b for a, b in zip(iqs, iqs[1:])):
            trend = "nonincreasing"
        elif all(a <= b for a, b in zip(iqs, iqs[1:])):
            trend = "nondecreasing"
        else:
            trend = "not monotone"
    statuses = {r.status for r in reports}
    status = next((st for st in ("violated", "refused", "incomplete") if st in statuses), "pass")
    return {"schema": SCHEMA, "grid": {"param": name, "values": list(values)},
            "iq_trend": trend, "status": status, "reports": [r.as_dict() for r in reports]}
