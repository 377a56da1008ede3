"""Successive minima of lattices in finite-dimensional normed spaces.

Norms come in three kinds.  Quadratic and polyhedral norms are evaluated
exactly (squared values are rationals); external norms are arbitrary
callables and must supply a quadratic lower bound so that enumeration can
be proved complete.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from . import exact_linear as el


class EnumerationBudgetExceeded(RuntimeError):
    def __init__(self, radius: float, visited: int):
        super().__init__(f"enumeration budget exceeded at radius {radius:.6g} after {visited} points")
        self.radius = radius
        self.visited = visited


def _polar_facets(points: el.Matrix, dim: int) -> el.Matrix:
    """Exact facet normals ``a`` (with a·x = 1 on the facet) of conv(±points)."""
    pts = [tuple(map(el.frac, p)) for p in points]
    if dim == 1:
        m = max(abs(p[0]) for p in pts)
        return ((1 / m,),)
    from scipy.spatial import ConvexHull

    cloud = pts + [tuple(-x for x in p) for p in pts]
    hull = ConvexHull(np.array([[float(x) for x in p] for p in cloud]))
    facets = set()
    for simplex in hull.simplices:
        rows = [cloud[i] for i in simplex]
        try:
            a = el.solve(rows, [1] * len(rows), dim)
        except el.NotInSpan:
            continue
        # keep one of ±a: all facets come in antipodal pairs
        lead = next(x for x in a if x)
        facets.add(a if lead > 0 else tuple(-x for x in a))
    # drop hyperplanes that are not supporting (numerical hull artefacts)
    out = []
    for a in sorted(facets):
        if max(abs(el.dot(a, p)) for p in pts) == 1:
            out.append(a)
    return tuple(out)


@dataclass(frozen=True)
class NormOracle:
    dim: int
    kind: str
    lower_bound_gram: el.Matrix
    gram: el.Matrix | None = None
    facets: el.Matrix | None = None
    vertices: el.Matrix | None = None
    func: Callable[[np.ndarray], float] | None = field(default=None, compare=False)
    dual_func: Callable[[np.ndarray], float] | None = field(default=None, compare=False)
    upper_bound_gram: el.Matrix | None = None

    # -- constructors ------------------------------------------------------

    @classmethod
    def quadratic(cls, gram: Sequence[Sequence]) -> "NormOracle":
        G = el.as_matrix(gram)
        if not el.leading_minors_positive(G):
            raise ValueError("Gram matrix must be symmetric positive definite")
        return cls(len(G), "quadratic", G, gram=G, upper_bound_gram=G)

    @classmethod
    def euclidean(cls, n: int) -> "NormOracle":
        return cls.quadratic(el.identity(n))

    @classmethod
    def polyhedral(cls, facets: Sequence[Sequence] | None = None,
                   vertices: Sequence[Sequence] | None = None) -> "NormOracle":
        """``‖x‖ = max_i |a_i·x|`` from facets, or the gauge of conv(±v_i)."""
        if (facets is None) == (vertices is None):
            raise ValueError("give exactly one of facets or vertices")
        if facets is not None:
            A = el.as_matrix(facets)
            dim = len(A[0])
            V = _polar_facets(A, dim)
        else:
            V = el.as_matrix(vertices)
            dim = len(V[0])
            A = _polar_facets(V, dim)
        if el.rank(A, dim) < dim:
            raise ValueError("polyhedral unit ball is unbounded")
        N = len(A)
        lower = tuple(
            tuple(sum((a[i] * a[j] for a in A), Fraction(0)) / N for j in range(dim))
            for i in range(dim)
        )
        # ‖x‖ ≤ sqrt(Σ (a·x)²)
        upper = tuple(tuple(x * N for x in row) for row in lower)
        return cls(dim, "polyhedral", lower, facets=A, vertices=V, upper_bound_gram=upper)

    @classmethod
    def l1(cls, n: int) -> "NormOracle":
        return cls.polyhedral(vertices=el.identity(n))

    @classmethod
    def linf(cls, n: int) -> "NormOracle":
        return cls.polyhedral(facets=el.identity(n))

    @classmethod
    def external(cls, func: Callable[[np.ndarray], float], lower_bound_gram: Sequence[Sequence],
                 upper_bound_gram: Sequence[Sequence] | None = None,
                 dual_func: Callable[[np.ndarray], float] | None = None,
                 check: bool = True, seed: int = 0) -> "NormOracle":
        Q = el.as_matrix(lower_bound_gram)
        if not el.leading_minors_positive(Q):
            raise ValueError("lower_bound_gram must be positive definite")
        P = None if upper_bound_gram is None else el.as_matrix(upper_bound_gram)
        N = cls(len(Q), "external", Q, func=func, dual_func=dual_func, upper_bound_gram=P)
        if check:
            N.spot_check(seed=seed)
        return N

    # -- evaluation ----------------------------------------------------------

    @property
    def exact(self) -> bool:
        return self.kind in ("quadratic", "polyhedral")

    def squared(self, x: Sequence) -> Fraction:
        """Exact squared norm (quadratic and polyhedral kinds)."""
        x = tuple(map(el.frac, x))
        if self.kind == "quadratic":
            return el.dot(x, el.matvec(self.gram, x))
        if self.kind == "polyhedral":
            return max(abs(el.dot(a, x)) for a in self.facets) ** 2
        raise TypeError("external norms have no exact squared value")

    def __call__(self, x: Sequence) -> float:
        if self.exact:
            return math.sqrt(self.squared(x))
        return float(self.func(np.asarray([float(v) for v in x], dtype=float)))

    def key(self, x: Sequence):
        """Sort key that orders vectors by norm without rounding when possible."""
        return self.squared(x) if self.exact else self(x)

    def lower_bound(self, x: Sequence) -> float:
        x = tuple(map(el.frac, x))
        return math.sqrt(el.dot(x, el.matvec(self.lower_bound_gram, x)))

    def spot_check(self, samples: int = 64, seed: int = 0, rtol: float = 1e-7) -> None:
        """Positivity, homogeneity, triangle inequality and lower-bound validity."""
        rng = np.random.default_rng(seed)
        Q = np.array(self.lower_bound_gram, dtype=float)
        for _ in range(samples):
            x = rng.standard_normal(self.dim)
            y = rng.standard_normal(self.dim)
            nx, ny, nxy = self(x), self(y), self(x + y)
            if not nx > 0:
                raise ValueError("norm is not positive on a nonzero vector")
            if abs(self(2.5 * x) - 2.5 * nx) > rtol * (1 + nx) * 2.5:
                raise ValueError("norm is not homogeneous")
            if nxy > (nx + ny) * (1 + rtol) + rtol:
                raise ValueError("norm violates the triangle inequality")
            if math.sqrt(x @ Q @ x) > nx * (1 + rtol) + rtol:
                raise ValueError("lower_bound_gram is not a lower bound for the norm")


def dual_norm(N: NormOracle) -> NormOracle:
    """``‖f‖* = max{f(x) : ‖x‖ ≤ 1}``."""
    if N.kind == "quadratic":
        return NormOracle.quadratic(el.inverse(N.gram))
    if N.kind == "polyhedral":
        upper = el.inverse(N.lower_bound_gram)
        lower = el.inverse(N.upper_bound_gram)
        return NormOracle(N.dim, "polyhedral", lower, facets=N.vertices, vertices=N.facets,
                          upper_bound_gram=upper)
    if N.upper_bound_gram is None:
        raise ValueError("dualising an external norm needs an upper_bound_gram")
    lower = el.inverse(N.upper_bound_gram)
    upper = el.inverse(N.lower_bound_gram)
    func = N.dual_func or (lambda f, _N=N: numeric_dual_value(_N, f))
    return NormOracle(N.dim, "external", lower, func=func, dual_func=N.func, upper_bound_gram=upper)


def numeric_dual_value(N: NormOracle, f: np.ndarray, starts: int = 8, seed: int = 0) -> float:
    """``1 / min{‖x‖ : f·x = 1}`` by multistart Nelder–Mead (not certified)."""
    from scipy.optimize import minimize

    f = np.asarray(f, dtype=float)
    nf = float(f @ f)
    if nf == 0:
        return 0.0
    x0 = f / nf
    Z = np.linalg.svd(f.reshape(1, -1))[2][1:].T
    if Z.shape[1] == 0:
        return 1.0 / N(x0)
    rng = np.random.default_rng(seed)
    best = N(x0)
    for s in range(starts):
        y0 = np.zeros(Z.shape[1]) if s == 0 else rng.standard_normal(Z.shape[1]) * np.linalg.norm(x0)
        res = minimize(lambda y: N(x0 + Z @ y), y0, method="Nelder-Mead",
                       options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 4000})
        best = min(best, float(res.fun))
    return 1.0 / best


@dataclass(frozen=True)
class NormedLattice:
    basis: el.Matrix
    norm: NormOracle

    def __post_init__(self):
        B = el.as_matrix(self.basis)
        object.__setattr__(self, "basis", B)
        if not B or len(B) != len(B[0]) or el.rank(B) < len(B):
            raise ValueError("lattice basis must be square and of full rank")
        if self.norm.dim != len(B):
            raise ValueError("norm dimension does not match the lattice")

    @property
    def rank(self) -> int:
        return len(self.basis)

    def vector(self, coords: Sequence[int]) -> tuple[Fraction, ...]:
        return tuple(
            sum((c * row[j] for c, row in zip(coords, self.basis) if c), Fraction(0))
            for j in range(self.rank)
        )

    def scaled(self, c) -> "NormedLattice":
        c = el.frac(c)
        return NormedLattice(tuple(tuple(c * x for x in row) for row in self.basis), self.norm)


def dual_lattice(L: NormedLattice) -> NormedLattice:
    return NormedLattice(el.transpose(el.inverse(L.basis)), dual_norm(L.norm))


@dataclass(frozen=True)
class MinimaProfile:
    lambdas: tuple[float, ...]
    squares: tuple[Fraction, ...] | None
    witnesses: tuple[tuple[int, ...], ...]
    vectors: tuple[tuple[Fraction, ...], ...]
    radius: float
    visited: int

    @property
    def last(self) -> float:
        return self.lambdas[-1]


def _coordinate_gram(L: NormedLattice) -> el.Matrix:
    B = L.basis
    return el.matmul(el.matmul(B, L.norm.lower_bound_gram), el.transpose(B))


def enumerate_ball(G: el.Matrix, radius_sq, budget: int = 2_000_000) -> list[tuple[int, ...]]:
    """All nonzero integer ``c`` with ``c^T G c ≤ radius_sq``, first nonzero entry > 0.

    Fincke–Pohst over the exact LDL^T factorisation of ``G``; float bounds
    are widened and every leaf is confirmed in exact arithmetic.
    """
    b = len(G)
    Lm, D = el.ldl(G)
    Lf = [[float(x) for x in row] for row in Lm]
    Df = [float(x) for x in D]
    R2 = float(radius_sq)
    slack = 1e-9 * (1 + R2)
    out: list[tuple[int, ...]] = []
    c = [0] * b
    count = 0

    def rec(j: int, remaining: float):
        nonlocal count
        center = -sum(Lf[i][j] * c[i] for i in range(j + 1, b))
        span = math.sqrt(max(remaining + slack, 0.0) / Df[j])
        lo, hi = math.ceil(center - span - 1e-9), math.floor(center + span + 1e-9)
        for v in range(lo, hi + 1):
            c[j] = v
            used = Df[j] * (v - center) ** 2
            if used > remaining + slack:
                continue
            if j == 0:
                count += 1
                if count > budget:
                    raise EnumerationBudgetExceeded(math.sqrt(R2), count)
                if any(c):
                    first = next(x for x in c if x)
                    if first > 0:
                        exact = el.dot(c, el.matvec(G, c))
                        if exact <= radius_sq:
                            out.append(tuple(c))
            else:
                rec(j - 1, remaining - used)
        c[j] = 0

    rec(b - 1, R2)
    return out


_EXTERNAL_SLACK = Fraction(1_000_001, 1_000_000)


def successive_minima(L: NormedLattice, budget: int = 2_000_000) -> MinimaProfile:
    """λ_1 ≤ … ≤ λ_b with witnesses, by complete enumeration.

    Every lattice point whose true norm is at most ``R`` has quadratic lower
    bound at most ``R`` and is therefore enumerated.  ``R`` grows from the
    shortest basis vector until ``b`` independent vectors of norm ≤ ``R``
    exist; it never needs to exceed the longest basis vector.
    """
    N = L.norm
    b = L.rank
    G = _coordinate_gram(L)
    unit = [tuple(int(i == j) for j in range(b)) for i in range(b)]
    basis_keys = [N.key(L.vector(e)) for e in unit]
    exact = N.exact
    to_sq = (lambda k: k) if exact else (lambda k: Fraction(k) ** 2)
    R2 = to_sq(min(basis_keys))
    R2_max = to_sq(max(basis_keys))
    visited = 0
    while True:
        # external norms are only known to working precision: widen the ball
        pts = enumerate_ball(G, R2 if exact else R2 * _EXTERNAL_SLACK, budget=budget - visited)
        visited += len(pts)
        cand = []
        for cvec in pts:
            k = N.key(L.vector(cvec))
            if to_sq(k) <= R2:
                cand.append((k, cvec))
        cand.sort()
        chosen: list[tuple[int, ...]] = []
        keys = []
        for k, cvec in cand:
            if el.rank(chosen + [cvec], b) > len(chosen):
                chosen.append(cvec)
                keys.append(k)
                if len(chosen) == b:
                    break
        if len(chosen) == b:
            break
        if R2 >= R2_max:
            raise RuntimeError("enumeration failed to find independent vectors (bad lower bound?)")
        R2 = min(R2 * 4, R2_max)
    lambdas = tuple(math.sqrt(k) if exact else float(k) for k in keys)
    return MinimaProfile(
        lambdas=lambdas,
        squares=tuple(keys) if exact else None,
        witnesses=tuple(chosen),
        vectors=tuple(L.vector(cv) for cv in chosen),
        radius=math.sqrt(R2),
        visited=visited,
    )


@dataclass(frozen=True)
class QuasiorthogonalFamily:
    witnesses: tuple[tuple[int, ...], ...]
    vectors: tuple[tuple[Fraction, ...], ...]
    lambdas: tuple[float, ...]
    index: int

    @property
    def is_basis(self) -> bool:
        return self.index == 1


def quasiorthogonal_family(L: NormedLattice, profile: MinimaProfile | None = None) -> QuasiorthogonalFamily:
    """Witnesses of the successive minima; ``index`` = [L : span of witnesses]."""
    profile = profile or successive_minima(L)
    index = abs(el.det(profile.witnesses))
    return QuasiorthogonalFamily(profile.witnesses, profile.vectors, profile.lambdas, int(index))


@dataclass(frozen=True)
class TransferenceProfile:
    products: tuple[float, ...]
    products_squared: tuple[Fraction, ...] | None
    ratios: tuple[float, ...]
    rank: int
    primal: MinimaProfile
    dual: MinimaProfile

    @property
    def banaszczyk_product(self) -> float:
        """λ_1(L) · Λ(L*)."""
        return self.products[0]


def banaszczyk_scale(b: int) -> float:
    return b * (1 + math.log(b))


def transference_profile(L: NormedLattice) -> TransferenceProfile:
    """Products λ_i(L)·λ_{b-i+1}(L*) and their ratios to b(1+log b)."""
    P = successive_minima(L)
    Q = successive_minima(dual_lattice(L))
    b = L.rank
    prods = tuple(P.lambdas[i] * Q.lambdas[b - 1 - i] for i in range(b))
    sq = None
    if P.squares is not None and Q.squares is not None:
        sq = tuple(P.squares[i] * Q.squares[b - 1 - i] for i in range(b))
    scale = banaszczyk_scale(b)
    return TransferenceProfile(prods, sq, tuple(p / scale for p in prods), b, P, Q)
