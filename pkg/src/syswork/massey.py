"""Triple Massey products, indeterminacy, and quasiorthogonal Massey elements."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from . import exact_linear as el
from .cohomology import CohomologyClass, CohomologyRing, HomologyClass
from .dga import Cochain, NotExact


class UndefinedMassey(ValueError):
    """⟨u, v, w⟩ needs u∪v = 0 and v∪w = 0."""


class MissingPrimitive(KeyError):
    pass


class NonIntegralPairing(ValueError):
    pass


@dataclass(frozen=True)
class MasseyCoset:
    representative: CohomologyClass
    indet: el.Subspace
    inputs: tuple[CohomologyClass, CohomologyClass, CohomologyClass]
    primitives_used: tuple[Cochain, Cochain]

    @property
    def degree(self) -> int:
        return self.representative.degree

    def contains_zero(self) -> bool:
        return self.representative.coords in self.indet

    def contains(self, cls: CohomologyClass) -> bool:
        diff = tuple(a - b for a, b in zip(cls.coords, self.representative.coords))
        return diff in self.indet


def _cup_coords(ring: CohomologyRing, a: CohomologyClass, b: CohomologyClass):
    return ring.cup(a, b).coords


def indeterminacy(ring: CohomologyRing, u: CohomologyClass, v: CohomologyClass,
                  w: CohomologyClass) -> el.Subspace:
    """u·H^{|v|+|w|-1} + H^{|u|+|v|-1}·w inside H^{|u|+|v|+|w|-1}."""
    target = u.degree + v.degree + w.degree - 1
    dim = ring.dim(target)
    vecs = []
    if not u.is_zero():
        vecs += [ring.cup(u, h).coords for h in ring.basis_classes(v.degree + w.degree - 1)]
    if not w.is_zero():
        vecs += [ring.cup(h, w).coords for h in ring.basis_classes(u.degree + v.degree - 1)]
    return el.Subspace.span(vecs, dim)


def massey_triple(ring: CohomologyRing, u: CohomologyClass, v: CohomologyClass,
                  w: CohomologyClass) -> MasseyCoset:
    """The coset ⟨u, v, w⟩ with representative x∧c − (−1)^{|u|} a∧y."""
    M = ring.model
    for name, p, q in (("u∪v", u, v), ("v∪w", v, w)):
        prod = ring.cup(p, q)
        if not prod.is_zero():
            raise UndefinedMassey(
                f"undefined Massey product: {name} = {[str(c) for c in prod.coords]} is nonzero"
            )
    a, b, c = u.representative, v.representative, w.representative
    x = M.solve_primitive(M.wedge(a, b))
    y = M.solve_primitive(M.wedge(b, c))
    rep = M.wedge(x, c)
    ay = M.wedge(a, y)
    rep = rep + ay if u.degree % 2 else rep - ay
    return MasseyCoset(ring.class_of(rep), indeterminacy(ring, u, v, w), (u, v, w), (x, y))


def is_nontrivial(coset: MasseyCoset) -> bool:
    return not coset.contains_zero()


def closed_form_ambiguity(ring: CohomologyRing, coset: MasseyCoset) -> el.Subspace:
    """Span of [z∧c] and [a∧z'] over closed z, z' (changes of primitives)."""
    M = ring.model
    u, v, w = coset.inputs
    a, c = u.representative, w.representative
    vecs = []
    for z in ring.cycles(u.degree + v.degree - 1).basis:
        vecs.append(ring.class_of(M.wedge(Cochain(u.degree + v.degree - 1, tuple(z)), c)).coords)
    for z in ring.cycles(v.degree + w.degree - 1).basis:
        vecs.append(ring.class_of(M.wedge(a, Cochain(v.degree + w.degree - 1, tuple(z)))).coords)
    return el.Subspace.span(vecs, ring.dim(coset.degree))


# -- quasiorthogonal families ---------------------------------------------------


@dataclass(frozen=True)
class QuasiFamily:
    """Classes v_1..v_b of degree m with primitives w_ij of v_i∧v_j.

    ``norms`` holds the successive minima λ_i when the family was built
    against a metric; the structural variant leaves it ``None``.
    """

    degree: int
    classes: tuple[CohomologyClass, ...]
    primitives: dict[tuple[int, int], Cochain] = field(default_factory=dict)
    norms: tuple[float, ...] | None = None

    @classmethod
    def build(cls, ring: CohomologyRing, classes: Sequence[CohomologyClass],
              norms: Sequence[float] | None = None,
              primitive: Callable[[Cochain], Cochain] | None = None) -> "QuasiFamily":
        M = ring.model
        classes = tuple(classes)
        if not classes:
            raise ValueError("empty family")
        m = classes[0].degree
        if any(c.degree != m for c in classes):
            raise ValueError("family classes must share a degree")
        if el.rank([c.coords for c in classes], ring.dim(m)) != len(classes):
            raise ValueError("family classes are linearly dependent")
        solve = primitive or M.solve_primitive
        prims = {}
        for i, j in itertools.product(range(len(classes)), repeat=2):
            try:
                prims[(i, j)] = solve(M.wedge(classes[i].representative, classes[j].representative))
            except NotExact:
                pass
        return cls(m, classes, prims, None if norms is None else tuple(norms))

    def primitive(self, i: int, j: int) -> Cochain:
        try:
            return self.primitives[(i, j)]
        except KeyError:
            raise MissingPrimitive(f"v_{i}∧v_{j} is not exact: cup product nonzero") from None

    def __len__(self) -> int:
        return len(self.classes)


def quasiorthogonal_element_cochain(ring: CohomologyRing, F: QuasiFamily,
                                    s: int, t: int, r: int) -> Cochain:
    M = ring.model
    first = M.wedge(F.primitive(s, t), F.classes[r].representative)
    second = M.wedge(F.classes[s].representative, F.primitive(t, r))
    return first + second if F.degree % 2 else first - second


def quasiorthogonal_massey_element(ring: CohomologyRing, F: QuasiFamily,
                                   s: int, t: int, r: int) -> CohomologyClass:
    """[w_st∧v_r − (−1)^m v_s∧w_tr] (0-based indices)."""
    return ring.class_of(quasiorthogonal_element_cochain(ring, F, s, t, r))


def _combine(F: QuasiFamily, coeffs: Sequence, ring: CohomologyRing) -> Cochain:
    out = ring.model.zero(F.degree)
    for a, c in zip(coeffs, F.classes):
        a = el.frac(a)
        if a:
            out = out + a * c.representative
    return out


def linearity_identity_check(ring: CohomologyRing, F: QuasiFamily, alpha: Sequence,
                             beta: Sequence, gamma: Sequence) -> bool:
    """Cochain-level check of

        α^i β^j w_ij∧γ − (−1)^m α∧β^j γ^k w_jk
            = α^i β^j γ^k (w_ij∧v_k − (−1)^m v_i∧w_jk).
    """
    M = ring.model
    m = F.degree
    b = len(F)
    alpha, beta, gamma = ([el.frac(x) for x in v] for v in (alpha, beta, gamma))
    sgn = -1 if m % 2 else 1
    a_form, g_form = _combine(F, alpha, ring), _combine(F, gamma, ring)
    X = M.zero(2 * m - 1)
    Y = M.zero(2 * m - 1)
    for i, j in itertools.product(range(b), repeat=2):
        if alpha[i] * beta[j]:
            X = X + (alpha[i] * beta[j]) * F.primitive(i, j)
        if beta[i] * gamma[j]:
            Y = Y + (beta[i] * gamma[j]) * F.primitive(i, j)
    lhs = M.wedge(X, g_form) - sgn * M.wedge(a_form, Y)
    rhs = M.zero(3 * m - 1)
    for i, j, k in itertools.product(range(b), repeat=3):
        coeff = alpha[i] * beta[j] * gamma[k]
        if coeff:
            rhs = rhs + coeff * quasiorthogonal_element_cochain(ring, F, i, j, k)
    return lhs.coeffs == rhs.coeffs


@dataclass(frozen=True)
class SpanningResult:
    sufficient: bool
    spanned: el.Subspace
    target_dim: int
    witnesses: tuple[tuple[int, int, int], ...]


def massey_spanning_check(ring: CohomologyRing, m: int) -> SpanningResult:
    """One-sided test that H^{3m-1} is of Massey type.

    Collects representatives of all zero-indeterminacy triples over basis
    classes of H^m.  If they span H^{3m-1}, any subspace meeting every
    nontrivial Massey product contains a spanning set.  A ``False`` verdict
    does not prove the property fails; ``spanned`` is the deficient span.
    """
    target = 3 * m - 1
    dim = ring.dim(target)
    if dim == 0:
        return SpanningResult(True, el.Subspace.zero(0), 0, ())
    basis = ring.basis_classes(m)
    vecs, used = [], []
    for s, t, r in itertools.product(range(len(basis)), repeat=3):
        try:
            coset = massey_triple(ring, basis[s], basis[t], basis[r])
        except UndefinedMassey:
            continue
        if coset.indet.dim == 0 and not coset.representative.is_zero():
            vecs.append(coset.representative.coords)
            used.append((s, t, r))
    spanned = el.Subspace.span(vecs, dim)
    return SpanningResult(spanned.dim == dim, spanned, dim, tuple(used))


def all_triples(ring: CohomologyRing, m: int) -> list[dict]:
    """Every triple of basis classes of H^m: defined?, representative, indet, verdict."""
    basis = ring.basis_classes(m)
    out = []
    for s, t, r in itertools.product(range(len(basis)), repeat=3):
        entry = {"triple": [s, t, r]}
        try:
            coset = massey_triple(ring, basis[s], basis[t], basis[r])
        except UndefinedMassey as exc:
            entry.update(defined=False, reason=str(exc))
        else:
            entry.update(
                defined=True,
                representative=[str(c) for c in coset.representative.coords],
                indet_dim=coset.indet.dim,
                nontrivial=is_nontrivial(coset),
            )
        out.append(entry)
    return out


def integrality_check(ring: CohomologyRing, cls: CohomologyClass | MasseyCoset,
                      x0: HomologyClass) -> int:
    """Evaluate the pairing of a Massey element with an integral cycle.

    The value must be an integer; otherwise either a primitive was not
    integral or H^{2m}(X, ℤ) has torsion, and ``NonIntegralPairing`` is raised.
    """
    if isinstance(cls, MasseyCoset):
        cls = cls.representative
    value = ring.pair(cls, x0)
    if value.denominator != 1:
        raise NonIntegralPairing(
            f"pairing {value} is not an integer: non-integral primitive or torsion obstruction"
        )
    return int(value)
