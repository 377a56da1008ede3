"""Finite-dimensional differential graded algebras.

A :class:`CochainModel` is the stand-in for a de Rham complex: graded
pieces with bases, a differential per degree, the product as sparse
structure tensors, and a marked integral lattice in every degree.

Two builders are provided: Chevalley–Eilenberg complexes of Lie algebras
(exterior algebra on the dual, invariant forms of a nilmanifold) and
simplicial cochains with the front-face/back-face cup product.

Conventions for the exterior algebra: basis ``k``-forms are
``e^{i1}∧…∧e^{ik}`` with ``i1 < … < ik`` and

    d e^k = - Σ_{i<j} c^k_{ij} e^i∧e^j.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from . import exact_linear as el


class NotExact(ValueError):
    """The cochain is not in the image of the differential."""

    def __init__(self, degree: int, residual):
        super().__init__(f"degree-{degree} cochain is not exact")
        self.degree = degree
        self.residual = residual


@dataclass(frozen=True)
class Cochain:
    degree: int
    coeffs: tuple[Fraction, ...]

    def __add__(self, other: "Cochain") -> "Cochain":
        if other.degree != self.degree:
            raise ValueError(f"cannot add degrees {self.degree} and {other.degree}")
        return Cochain(self.degree, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> "Cochain":
        return Cochain(self.degree, tuple(-a for a in self.coeffs))

    def __sub__(self, other: "Cochain") -> "Cochain":
        return self + (-other)

    def __rmul__(self, s) -> "Cochain":
        s = el.frac(s)
        return Cochain(self.degree, tuple(s * a for a in self.coeffs))

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def support(self) -> dict[int, Fraction]:
        return {i: a for i, a in enumerate(self.coeffs) if a}


class CochainModel:
    """Cochain DGA with products given by sparse structure constants.

    ``differential[k]`` is a ``dims[k+1] x dims[k]`` matrix acting on
    coefficient column vectors.  ``products[(k, l)][i][j]`` maps an output
    basis index to a coefficient.  ``integral[k]`` lists lattice generators
    (rows) spanning the integral cochains of degree ``k``.
    """

    def __init__(
        self,
        dims: Sequence[int],
        labels: Sequence[Sequence],
        differential: Sequence[el.Matrix],
        products: Mapping[tuple[int, int], list[list[dict[int, Fraction]]]],
        integral: Sequence[el.Matrix] | None = None,
        commutative: bool = True,
        kind: str = "generic",
        generators: int | None = None,
    ):
        self.dims = tuple(dims)
        self.top_degree = len(self.dims) - 1
        self.labels = tuple(tuple(l) for l in labels)
        self.differential = tuple(differential)
        self.products = dict(products)
        if integral is None:
            integral = [el.identity(n) for n in self.dims]
        self.integral = tuple(integral)
        self.commutative = commutative
        self.kind = kind
        self.generators = generators
        self._index = [{lab: i for i, lab in enumerate(ls)} for ls in self.labels]

    # -- elements -----------------------------------------------------------

    def dim(self, k: int) -> int:
        return self.dims[k] if 0 <= k <= self.top_degree else 0

    def zero(self, k: int) -> Cochain:
        return Cochain(k, (Fraction(0),) * self.dim(k))

    def basis(self, k: int, i: int) -> Cochain:
        c = [Fraction(0)] * self.dim(k)
        c[i] = Fraction(1)
        return Cochain(k, tuple(c))

    def cochain(self, k: int, coeffs: Iterable) -> Cochain:
        coeffs = tuple(el.frac(x) for x in coeffs)
        if len(coeffs) != self.dim(k):
            raise ValueError(f"degree {k} has dimension {self.dim(k)}, got {len(coeffs)} coefficients")
        return Cochain(k, coeffs)

    def element(self, k: int, terms: Mapping) -> Cochain:
        """Cochain from ``{label: coefficient}``."""
        c = [Fraction(0)] * self.dim(k)
        for lab, v in terms.items():
            c[self._index[k][lab]] += el.frac(v)
        return Cochain(k, tuple(c))

    def index_of(self, k: int, label) -> int:
        return self._index[k][label]

    # -- operations ---------------------------------------------------------

    def d(self, a: Cochain) -> Cochain:
        k = a.degree
        if k >= self.top_degree:
            return self.zero(k + 1)
        return Cochain(k + 1, tuple(el.frac(x) for x in el.matvec(self.differential[k], a.coeffs)))

    def wedge(self, a: Cochain, b: Cochain) -> Cochain:
        k, l = a.degree, b.degree
        out = [Fraction(0)] * self.dim(k + l)
        if k + l > self.top_degree:
            return Cochain(k + l, ())
        mu = self.products[(k, l)]
        for i, x in enumerate(a.coeffs):
            if not x:
                continue
            row = mu[i]
            for j, y in enumerate(b.coeffs):
                if not y:
                    continue
                xy = x * y
                for idx, c in row[j].items():
                    out[idx] += c * xy
        return Cochain(k + l, tuple(out))

    def solve_primitive(self, alpha: Cochain) -> Cochain:
        """A cochain ``x`` with ``d x = alpha``; free variables set to zero."""
        k = alpha.degree
        if k == 0 or k > self.top_degree:
            if alpha.is_zero():
                return self.zero(k - 1)
            raise NotExact(k, alpha.coeffs)
        try:
            x = el.solve(self.differential[k - 1], alpha.coeffs, self.dims[k - 1])
        except el.NotInSpan as exc:
            raise NotExact(k, exc.residual) from None
        return Cochain(k - 1, x)

    def is_exact(self, alpha: Cochain) -> bool:
        try:
            self.solve_primitive(alpha)
        except NotExact:
            return False
        return True

    def lattice_differential(self, k: int) -> tuple[tuple[int, ...], ...]:
        """``d_k`` expressed in integral-lattice coordinates.

        With lattice generators ``B_k`` as rows, a cochain with lattice
        coordinates ``c`` is ``c @ B_k`` and ``d`` becomes
        ``B_{k+1}^{-T} D_k B_k^T``.  Raises if the result is not integral.
        """
        Bk = self.integral[k]
        Bk1 = self.integral[k + 1]
        M = el.matmul(el.transpose(el.inverse(Bk1)), el.matmul(self.differential[k], el.transpose(Bk)))
        for row in M:
            for x in row:
                if el.frac(x).denominator != 1:
                    raise ValueError(f"d_{k} does not preserve the integral lattice")
        return tuple(tuple(int(x) for x in row) for row in M)


# -- validity -----------------------------------------------------------------


@dataclass
class ValidityReport:
    d_squared: bool = True
    leibniz: bool = True
    associative: bool = True
    graded_commutative: bool | None = None
    lattice_closed: bool = True
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return (
            self.d_squared
            and self.leibniz
            and self.associative
            and self.graded_commutative is not False
            and self.lattice_closed
        )


def _accumulate(acc: dict, terms: Mapping, scale) -> None:
    for idx, c in terms.items():
        v = acc.get(idx, 0) + c * scale
        if v:
            acc[idx] = v
        else:
            acc.pop(idx, None)


def check_model(M: CochainModel, associativity: bool = True) -> ValidityReport:
    """Exhaustive check of the DGA axioms on all basis pairs and triples.

    Works directly on the sparse structure tensors, so the cost is
    proportional to the number of nonzero products.
    """
    rep = ValidityReport()
    n = M.top_degree
    for k in range(n - 1):
        if M.dim(k) and M.dim(k + 2):
            DD = el.matmul(M.differential[k + 1], M.differential[k])
            if any(x for row in DD for x in row):
                rep.d_squared = False
                rep.failures.append(f"d_{k+1} d_{k} != 0")
    # sparse columns of d: dcol[k][i] = {row: value}
    dcol = []
    for k in range(n + 1):
        cols = [dict() for _ in range(M.dim(k))]
        if k < n:
            for r, row in enumerate(M.differential[k]):
                for i, x in enumerate(row):
                    if x:
                        cols[i][r] = x
        dcol.append(cols)
    mu = M.products
    for k in range(n + 1):
        for l in range(n + 1 - k):
            sign = -1 if k % 2 else 1
            for i in range(M.dim(k)):
                for j in range(M.dim(l)):
                    lhs: dict = {}
                    for idx, c in mu[(k, l)][i][j].items():
                        _accumulate(lhs, dcol[k + l][idx], c)
                    rhs: dict = {}
                    if k + l + 1 <= n:
                        for p, c in dcol[k][i].items():
                            _accumulate(rhs, mu[(k + 1, l)][p][j], c)
                        for q, c in dcol[l][j].items():
                            _accumulate(rhs, mu[(k, l + 1)][i][q], sign * c)
                    if lhs != rhs:
                        rep.leibniz = False
                        rep.failures.append(f"Leibniz fails on ({k},{i}),({l},{j})")
    if M.commutative:
        rep.graded_commutative = True
        for k in range(n + 1):
            for l in range(n + 1 - k):
                sign = -1 if (k * l) % 2 else 1
                for i in range(M.dim(k)):
                    for j in range(M.dim(l)):
                        ab = mu[(k, l)][i][j]
                        ba = mu[(l, k)][j][i]
                        if ab != {idx: sign * c for idx, c in ba.items()}:
                            rep.graded_commutative = False
                            rep.failures.append(f"graded commutativity fails on ({k},{i}),({l},{j})")
    if associativity:
        for k in range(n + 1):
            for l in range(n + 1 - k):
                for m in range(n + 1 - k - l):
                    left_t, right_t = mu[(k + l, m)], mu[(k, l + m)]
                    for i in range(M.dim(k)):
                        for j in range(M.dim(l)):
                            ab = mu[(k, l)][i][j]
                            for c_idx in range(M.dim(m)):
                                left: dict = {}
                                for idx, c in ab.items():
                                    _accumulate(left, left_t[idx][c_idx], c)
                                right: dict = {}
                                for idx, c in mu[(l, m)][j][c_idx].items():
                                    _accumulate(right, right_t[i][idx], c)
                                if left != right:
                                    rep.associative = False
                                    rep.failures.append(
                                        f"associativity fails on ({k},{i}),({l},{j}),({m},{c_idx})"
                                    )
    for k in range(n):
        try:
            M.lattice_differential(k)
        except (ValueError, ZeroDivisionError):
            rep.lattice_closed = False
            rep.failures.append(f"d_{k} leaves the integral lattice")
    return rep


# -- Lie algebras and Chevalley–Eilenberg ------------------------------------


@dataclass(frozen=True)
class LieStructure:
    """Structure constants ``[e_i, e_j] = Σ_k c^k_{ij} e_k`` (0-based indices).

    ``constants`` maps ``(i, j, k)`` with ``i < j`` to ``c^k_{ij}``;
    antisymmetry fills in ``i > j``.  The Jacobi identity is verified on
    construction.
    """

    dim: int
    constants: Mapping[tuple[int, int, int], Fraction]

    def __post_init__(self):
        clean = {}
        for (i, j, k), v in dict(self.constants).items():
            v = el.frac(v)
            if not (0 <= i < self.dim and 0 <= j < self.dim and 0 <= k < self.dim):
                raise ValueError(f"structure constant index out of range: {(i, j, k)}")
            if i == j:
                if v:
                    raise ValueError("c^k_{ii} must vanish")
                continue
            if i > j:
                i, j, v = j, i, -v
            if v:
                clean[(i, j, k)] = clean.get((i, j, k), Fraction(0)) + v
        object.__setattr__(self, "constants", {key: v for key, v in clean.items() if v})
        bad = self.jacobi_failure()
        if bad is not None:
            raise ValueError(f"Jacobi identity fails on generators {bad}")

    def bracket(self, x: Sequence, y: Sequence) -> tuple[Fraction, ...]:
        out = [Fraction(0)] * self.dim
        for (i, j, k), c in self.constants.items():
            coeff = x[i] * y[j] - x[j] * y[i]
            if coeff:
                out[k] += c * coeff
        return tuple(out)

    def jacobi_failure(self) -> tuple[int, int, int] | None:
        e = el.identity(self.dim)
        for i, j, k in itertools.combinations(range(self.dim), 3):
            a = self.bracket(self.bracket(e[i], e[j]), e[k])
            b = self.bracket(self.bracket(e[j], e[k]), e[i])
            c = self.bracket(self.bracket(e[k], e[i]), e[j])
            if any(x + y + z for x, y, z in zip(a, b, c)):
                return (i, j, k)
        return None

    def lower_central_series(self) -> list[int]:
        """Dimensions of g ⊃ [g,g] ⊃ [g,[g,g]] ⊃ … until it stabilises."""
        e = el.identity(self.dim)
        current = el.Subspace.full(self.dim)
        dims = [current.dim]
        while True:
            nxt = el.Subspace.span(
                [self.bracket(x, y) for x in e for y in current.basis], self.dim
            )
            if nxt.dim == current.dim:
                return dims
            dims.append(nxt.dim)
            current = nxt
            if nxt.dim == 0:
                return dims

    @property
    def is_nilpotent(self) -> bool:
        return self.lower_central_series()[-1] == 0


def _monomial_product(I: tuple[int, ...], J: tuple[int, ...]) -> tuple[int, tuple[int, ...]]:
    if set(I) & set(J):
        return 0, ()
    seq = I + J
    inv = sum(1 for a in range(len(seq)) for b in range(a + 1, len(seq)) if seq[a] > seq[b])
    return (-1 if inv % 2 else 1), tuple(sorted(seq))


def exterior_products(n: int) -> tuple[list[list[tuple[int, ...]]], dict]:
    monos = [list(itertools.combinations(range(n), k)) for k in range(n + 1)]
    index = [{m: i for i, m in enumerate(ms)} for ms in monos]
    products = {}
    for k in range(n + 1):
        for l in range(n + 1 - k):
            table = []
            for I in monos[k]:
                row = []
                for J in monos[l]:
                    s, K = _monomial_product(I, J)
                    row.append({index[k + l][K]: s} if s else {})
                table.append(row)
            products[(k, l)] = table
    return monos, products


def build_chevalley_eilenberg(L: LieStructure, integral: Sequence | None = None) -> CochainModel:
    n = L.dim
    monos, products = exterior_products(n)
    dims = [len(m) for m in monos]
    proto = CochainModel(dims, monos, [el.zeros(dims[k + 1], dims[k]) for k in range(n)],
                         products, kind="lie", generators=n)
    # d on generators, then Leibniz on monomials
    d1 = []
    for k in range(n):
        coeffs = [Fraction(0)] * proto.dim(2)
        for (i, j, kk), c in L.constants.items():
            if kk == k:
                coeffs[proto.index_of(2, (i, j))] -= c
        d1.append(Cochain(2, tuple(coeffs)))
    dmono: dict[tuple[int, ...], Cochain] = {(): proto.zero(1)}
    for k in range(1, n + 1):
        for I in monos[k]:
            first = proto.element(1, {(I[0],): 1})
            rest = proto.element(k - 1, {I[1:]: 1})
            val = proto.wedge(d1[I[0]], rest)
            if k > 1:
                val = val - proto.wedge(first, dmono[I[1:]])
            dmono[I] = val
    differential = []
    for k in range(n):
        cols = [dmono[I].coeffs for I in monos[k]]
        differential.append(el.transpose(cols, dims[k + 1]) if cols else ())
    if integral is None:
        integral = [el.identity(dk) for dk in dims]
    return CochainModel(dims, monos, differential, products, integral=integral,
                        commutative=True, kind="lie", generators=n)


def abelian_lie(n: int) -> LieStructure:
    return LieStructure(n, {})


def heisenberg_lie() -> LieStructure:
    return LieStructure(3, {(0, 1, 2): Fraction(1)})


def random_nilpotent_lie(n: int, rng: random.Random, max_coeff: int = 2,
                         density: float = 0.6) -> LieStructure:
    """Random nilpotent Lie algebra with integer structure constants.

    Built inductively on the dual side: ``d e^k`` is a random integral
    closed 2-form in the subalgebra generated by ``e^1..e^{k-1}``, which
    makes d² = 0 (hence Jacobi) and nilpotency automatic.
    """
    constants: dict[tuple[int, int, int], Fraction] = {}
    for k in range(n):
        if k < 2 or rng.random() > density:
            continue
        partial = LieStructure(k, {key: v for key, v in constants.items() if key[2] < k})
        model = build_chevalley_eilenberg(partial)
        closed = el.nullspace(model.differential[2], model.dims[2]) if k >= 3 else el.identity(1)
        vec = [Fraction(0)] * model.dims[2]
        for z in closed:
            t = rng.randint(-max_coeff, max_coeff)
            if t:
                den = 1
                for x in z:
                    den = den * x.denominator // el._gcd(den, x.denominator)
                vec = [a + t * den * b for a, b in zip(vec, z)]
        for idx, v in enumerate(vec):
            if v:
                i, j = model.labels[2][idx]
                constants[(i, j, k)] = -v
    return LieStructure(n, constants)


# -- simplicial complexes ------------------------------------------------------


@dataclass(frozen=True)
class SimplicialComplex:
    simplices: tuple[tuple[tuple[int, ...], ...], ...]

    def __post_init__(self):
        present = [set(s) for s in self.simplices]
        for k, level in enumerate(self.simplices):
            for s in level:
                if len(s) != k + 1 or any(a >= b for a, b in zip(s, s[1:])):
                    raise ValueError(f"simplex {s} is not a strictly increasing {k}-simplex")
                if k > 0:
                    for f in itertools.combinations(s, k):
                        if f not in present[k - 1]:
                            raise ValueError(f"face {f} of {s} is missing")

    @classmethod
    def from_facets(cls, facets: Iterable[Iterable[int]]) -> "SimplicialComplex":
        levels: dict[int, set] = {}
        for f in facets:
            f = tuple(sorted(set(f)))
            for k in range(1, len(f) + 1):
                for s in itertools.combinations(f, k):
                    levels.setdefault(k - 1, set()).add(s)
        top = max(levels) if levels else -1
        return cls(tuple(tuple(sorted(levels.get(k, ()))) for k in range(top + 1)))

    @property
    def dimension(self) -> int:
        return len(self.simplices) - 1

    @property
    def vertices(self) -> int:
        return len(self.simplices[0]) if self.simplices else 0


def build_simplicial_cochains(K: SimplicialComplex) -> CochainModel:
    n = K.dimension
    index = [{s: i for i, s in enumerate(level)} for level in K.simplices]
    dims = [len(level) for level in K.simplices]
    differential = []
    for k in range(n):
        rows = []
        for s in K.simplices[k + 1]:
            row = [Fraction(0)] * dims[k]
            for i in range(k + 2):
                row[index[k][s[:i] + s[i + 1:]]] += (-1) ** i
            rows.append(tuple(row))
        differential.append(tuple(rows))
    products = {}
    for p in range(n + 1):
        for q in range(n + 1 - p):
            table = [[{} for _ in range(dims[q])] for _ in range(dims[p])]
            for idx, s in enumerate(K.simplices[p + q]):
                table[index[p][s[: p + 1]]][index[q][s[p:]]][idx] = 1
            products[(p, q)] = table
    return CochainModel(dims, K.simplices, differential, products,
                        commutative=False, kind="simplicial")


def torus_triangulation() -> SimplicialComplex:
    """The 7-vertex (Möbius–Császár) torus."""
    facets = []
    for i in range(7):
        facets.append((i, (i + 1) % 7, (i + 3) % 7))
        facets.append((i, (i + 2) % 7, (i + 3) % 7))
    return SimplicialComplex.from_facets(facets)


def projective_plane_triangulation() -> SimplicialComplex:
    """The 6-vertex real projective plane."""
    facets = [(0, 1, 2), (0, 1, 3), (0, 2, 4), (0, 3, 5), (0, 4, 5),
              (1, 2, 5), (1, 3, 4), (1, 4, 5), (2, 3, 4), (2, 3, 5)]
    return SimplicialComplex.from_facets(facets)


def circle_triangulation() -> SimplicialComplex:
    return SimplicialComplex.from_facets([(0, 1), (1, 2), (0, 2)])
