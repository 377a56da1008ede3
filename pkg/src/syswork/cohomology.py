"""Cohomology rings of cochain models, with integral lattices and pairings."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from . import exact_linear as el
from .dga import Cochain, CochainModel


@dataclass(frozen=True)
class CohomologyClass:
    degree: int
    coords: tuple[Fraction, ...]
    representative: Cochain

    def is_zero(self) -> bool:
        return not any(self.coords)


@dataclass(frozen=True)
class HomologyClass:
    """Coordinates in the basis of H_k dual to the cohomology representatives."""

    degree: int
    coords: tuple[Fraction, ...]


@dataclass(frozen=True)
class _Degree:
    cycles: el.Subspace
    boundaries: el.Subspace
    reps: tuple[Cochain, ...]
    projector: el.Matrix  # betti x dim, valid on closed cochains


class CohomologyRing:
    """``H^k = ker d_k / im d_{k-1}`` for every degree of a model.

    Representatives are the first vectors of the canonical echelon basis of
    the cycles that are independent modulo boundaries.  ``integral_image[k]``
    is a ℤ-basis (rows, in class coordinates) of the image of integral
    cohomology.  ``pairings[k]`` is the declared unimodular matrix pairing
    that ℤ-basis with a ℤ-basis of homology (identity by default).
    """

    def __init__(self, model: CochainModel, pairings: Mapping[int, Sequence[Sequence]] | None = None):
        self.model = model
        self._degrees = [self._compute_degree(k) for k in range(model.top_degree + 1)]
        self.betti = tuple(len(d.reps) for d in self._degrees)
        self._cup: dict[tuple[int, int], list[list[tuple[Fraction, ...]]]] = {}
        self.integral_image = tuple(self._integral_image(k) for k in range(model.top_degree + 1))
        self.pairings = {}
        for k, b in enumerate(self.betti):
            P = (pairings or {}).get(k)
            P = el.identity(b) if P is None else el.as_matrix(P)
            if len(P) != b or (b and abs(el.det(P)) != 1):
                raise ValueError(f"pairing matrix in degree {k} must be {b}x{b} unimodular")
            self.pairings[k] = P

    # -- construction ---------------------------------------------------------

    def _compute_degree(self, k: int) -> _Degree:
        M = self.model
        n = M.dim(k)
        if k < M.top_degree:
            cycles = el.Subspace.span(el.nullspace(M.differential[k], n), n)
        else:
            cycles = el.Subspace.full(n)
        if k > 0:
            boundaries = el.Subspace.span(el.transpose(M.differential[k - 1], n), n)
        else:
            boundaries = el.Subspace.zero(n)
        chosen: list[tuple] = []
        span = boundaries
        for z in cycles.basis:
            if z not in span:
                chosen.append(z)
                span = span + el.Subspace.span([z], n)
        reps = tuple(Cochain(k, tuple(z)) for z in chosen)
        A = [tuple(z) for z in chosen] + list(boundaries.basis)
        if A:
            AT = el.transpose(A)  # n x (h + beta)
            gram = el.matmul(A, AT)
            left = el.matmul(el.inverse(gram), A)
            projector = left[: len(chosen)]
        else:
            projector = ()
        return _Degree(cycles, boundaries, reps, projector)

    def _integral_image(self, k: int) -> el.Matrix:
        M = self.model
        b = len(self._degrees[k].reps)
        if b == 0:
            return ()
        n = M.dim(k)
        if k < M.top_degree:
            A = M.lattice_differential(k)
            kernel = el.integer_kernel(A, n)
        else:
            kernel = tuple(tuple(int(i == j) for j in range(n)) for i in range(n))
        B = M.integral[k]
        gens = []
        for c in kernel:
            z = tuple(sum((ci * row[j] for ci, row in zip(c, B) if ci), Fraction(0)) for j in range(n))
            gens.append(self.coords_of(Cochain(k, z)))
        return el.lattice_basis(gens, b)

    # -- classes ---------------------------------------------------------------

    def reps(self, k: int) -> tuple[Cochain, ...]:
        if 0 <= k <= self.model.top_degree:
            return self._degrees[k].reps
        return ()

    def dim(self, k: int) -> int:
        return self.betti[k] if 0 <= k <= self.model.top_degree else 0

    def boundaries(self, k: int) -> el.Subspace:
        return self._degrees[k].boundaries

    def cycles(self, k: int) -> el.Subspace:
        return self._degrees[k].cycles

    def coords_of(self, z: Cochain) -> tuple[Fraction, ...]:
        k = z.degree
        if not 0 <= k <= self.model.top_degree:
            return ()
        if not self.model.d(z).is_zero():
            raise ValueError(f"degree-{k} cochain is not closed")
        P = self._degrees[k].projector
        return tuple(el.frac(x) for x in el.matvec(P, z.coeffs)) if P else ()

    def projector(self, k: int) -> el.Matrix:
        """Matrix sending a closed k-cochain to its class coordinates."""
        return self._degrees[k].projector

    def class_of(self, z: Cochain) -> CohomologyClass:
        return CohomologyClass(z.degree, self.coords_of(z), z)

    def cls(self, k: int, coords: Sequence) -> CohomologyClass:
        coords = tuple(el.frac(x) for x in coords)
        if len(coords) != self.dim(k):
            raise ValueError(f"H^{k} has dimension {self.dim(k)}")
        rep = self.model.zero(k)
        for c, r in zip(coords, self.reps(k)):
            if c:
                rep = rep + c * r
        return CohomologyClass(k, coords, rep)

    def basis_class(self, k: int, i: int) -> CohomologyClass:
        return self.cls(k, [int(j == i) for j in range(self.dim(k))])

    def basis_classes(self, k: int) -> list[CohomologyClass]:
        return [self.basis_class(k, i) for i in range(self.dim(k))]

    def zero_class(self, k: int) -> CohomologyClass:
        return self.cls(k, [0] * self.dim(k))

    def unit(self) -> CohomologyClass:
        return self.class_of(self.model.cochain(0, [1] * self.model.dim(0)))

    # -- products ----------------------------------------------------------------

    def cup(self, a: CohomologyClass, b: CohomologyClass) -> CohomologyClass:
        return self.class_of(self.model.wedge(a.representative, b.representative))

    def cup_table(self, k: int, l: int) -> list[list[tuple[Fraction, ...]]]:
        """``table[i][j]`` = coordinates of (basis i of H^k) ∪ (basis j of H^l)."""
        if (k, l) not in self._cup:
            self._cup[(k, l)] = [
                [self.cup(a, b).coords for b in self.basis_classes(l)]
                for a in self.basis_classes(k)
            ]
        return self._cup[(k, l)]

    def subspace(self, k: int, classes: Sequence[CohomologyClass]) -> el.Subspace:
        return el.Subspace.span([c.coords for c in classes], self.dim(k))

    # -- homology and pairing -------------------------------------------------------

    def integral_homology_basis(self, k: int) -> el.Matrix:
        """ℤ-basis of H_k(X,ℤ)_ℝ (rows, dual-basis coordinates).

        Rows ``h_j`` satisfy ``integral_image[k][i] · h_j = pairings[k][i][j]``.
        """
        B = self.integral_image[k]
        if not B:
            return ()
        P = self.pairings[k]
        return el.transpose(el.matmul(el.inverse(B), P))

    def homology_class(self, k: int, lattice_coords: Sequence[int]) -> HomologyClass:
        H = self.integral_homology_basis(k)
        coords = tuple(
            sum((el.frac(c) * row[j] for c, row in zip(lattice_coords, H)), Fraction(0))
            for j in range(self.dim(k))
        )
        return HomologyClass(k, coords)

    def pair(self, a: CohomologyClass, x: HomologyClass) -> Fraction:
        if a.degree != x.degree:
            raise ValueError(f"cannot pair a degree-{a.degree} class with a degree-{x.degree} cycle")
        return sum((p * q for p, q in zip(a.coords, x.coords)), Fraction(0))

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * b for k, b in enumerate(self.betti))


def compute_cohomology(model: CochainModel, pairings: Mapping | None = None) -> CohomologyRing:
    return CohomologyRing(model, pairings)


def pair_with_homology(ring: CohomologyRing, a: CohomologyClass, x0: HomologyClass) -> Fraction:
    return ring.pair(a, x0)


def cup_is_zero_on_degree(ring: CohomologyRing, m: int) -> bool:
    if ring.dim(2 * m) == 0:
        return True
    return all(not any(c) for row in ring.cup_table(m, m) for c in row)


@dataclass(frozen=True)
class TorsionReport:
    degree: int
    torsion_free: bool
    invariant_factors: tuple[int, ...]


def torsion_report(model: CochainModel, k: int) -> TorsionReport:
    if k == 0 or k > model.top_degree:
        return TorsionReport(k, True, ())
    A = model.lattice_differential(k - 1)
    snf = el.smith_normal_form(A, model.dim(k - 1))
    tors = snf.torsion
    return TorsionReport(k, not tors, tors)


def torsion_free_check(model: CochainModel, k: int) -> bool:
    """True iff H^k(X, ℤ) of the integral cochain lattice has no torsion."""
    return torsion_report(model, k).torsion_free
