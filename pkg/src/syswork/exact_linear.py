"""Exact rational and integer linear algebra.

Matrices are tuples of row tuples of :class:`fractions.Fraction` (or ``int``
for integer matrices).  Vectors are plain tuples.  Nothing in this module
touches floating point.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

Matrix = tuple[tuple[Fraction, ...], ...]
Vector = tuple[Fraction, ...]


class NotInSpan(ValueError):
    """Raised when a linear system has no solution.

    ``residual`` holds the right-hand-side entries that survived elimination
    in rows whose coefficient part reduced to zero.
    """

    def __init__(self, residual: Vector):
        super().__init__(f"system is inconsistent (residual {[str(r) for r in residual]})")
        self.residual = residual


def frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    return Fraction(x)


def as_matrix(M: Iterable[Iterable]) -> Matrix:
    return tuple(tuple(frac(x) for x in row) for row in M)


def zeros(rows: int, cols: int) -> Matrix:
    return tuple((Fraction(0),) * cols for _ in range(rows))


def identity(n: int) -> Matrix:
    return tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n))


def transpose(M: Sequence[Sequence], ncols: int | None = None) -> Matrix:
    if not M:
        return tuple(() for _ in range(ncols or 0))
    return tuple(zip(*M))


def matmul(A: Sequence[Sequence], B: Sequence[Sequence], inner: int | None = None) -> tuple:
    if not A:
        return ()
    ncols = len(B[0]) if B else 0
    Bt = list(zip(*B)) if B else [()] * ncols
    return tuple(
        tuple(sum((a * b for a, b in zip(row, col) if a and b), 0) for col in Bt) for row in A
    )


def matvec(A: Sequence[Sequence], x: Sequence) -> tuple:
    return tuple(sum((a * b for a, b in zip(row, x) if a and b), 0) for row in A)


def dot(x: Sequence, y: Sequence):
    return sum((a * b for a, b in zip(x, y) if a and b), 0)


def rref(M: Sequence[Sequence], ncols: int | None = None) -> tuple[Matrix, tuple[int, ...], int]:
    """Reduced row echelon form of ``M``.

    Returns ``(R, pivots, rank)`` where ``R`` has the same shape as ``M``
    (zero rows kept at the bottom).
    """
    rows = [[frac(x) for x in r] for r in M]
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == len(rows):
            break
        p = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        prow = rows[r]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], prow)]
        pivots.append(c)
        r += 1
    return tuple(tuple(row) for row in rows), tuple(pivots), len(pivots)


def rank(M: Sequence[Sequence], ncols: int | None = None) -> int:
    return rref(M, ncols)[2]


def nullspace(M: Sequence[Sequence], ncols: int) -> Matrix:
    """Basis (as rows) of ``{x : M x = 0}``, one vector per free column."""
    R, pivots, rk = rref(M, ncols)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for i, p in enumerate(pivots):
            x[p] = -R[i][f]
        basis.append(tuple(x))
    return tuple(basis)


def solve(M: Sequence[Sequence], b: Sequence, ncols: int) -> Vector:
    """One solution of ``M x = b`` with all free variables set to zero."""
    aug = [list(row) + [frac(bi)] for row, bi in zip(M, b)]
    R, pivots, rk = rref(aug, ncols + 1)
    if ncols in pivots:
        residual = tuple(row[ncols] for row in R[rk - 1 :] if row[ncols] != 0)
        raise NotInSpan(residual)
    x = [Fraction(0)] * ncols
    for i, p in enumerate(pivots):
        x[p] = R[i][ncols]
    return tuple(x)


def inverse(M: Sequence[Sequence]) -> Matrix:
    n = len(M)
    if n == 0:
        return ()
    aug = [list(map(frac, row)) + list(e) for row, e in zip(M, identity(n))]
    R, pivots, rk = rref(aug, 2 * n)
    if rk < n or pivots[n - 1] >= n:
        raise ZeroDivisionError("matrix is singular")
    return tuple(tuple(row[n:]) for row in R)


def det(M: Sequence[Sequence]) -> Fraction:
    rows = [[frac(x) for x in r] for r in M]
    n = len(rows)
    d = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if rows[i][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            rows[c], rows[p] = rows[p], rows[c]
            d = -d
        d *= rows[c][c]
        for i in range(c + 1, n):
            if rows[i][c]:
                f = rows[i][c] / rows[c][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[c])]
    return d


def leading_minors_positive(M: Sequence[Sequence]) -> bool:
    """Sylvester's criterion for a symmetric rational matrix."""
    n = len(M)
    if any(frac(M[i][j]) != frac(M[j][i]) for i in range(n) for j in range(n)):
        return False
    return all(det([row[:k] for row in M[:k]]) > 0 for k in range(1, n + 1))


def ldl(G: Sequence[Sequence]) -> tuple[Matrix, Vector]:
    """``G = L diag(D) L^T`` with unit lower-triangular ``L`` (exact)."""
    n = len(G)
    L = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    D = [Fraction(0)] * n
    for j in range(n):
        D[j] = frac(G[j][j]) - sum((L[j][k] ** 2 * D[k] for k in range(j)), Fraction(0))
        if D[j] <= 0:
            raise ValueError("matrix is not positive definite")
        for i in range(j + 1, n):
            s = frac(G[i][j]) - sum((L[i][k] * L[j][k] * D[k] for k in range(j)), Fraction(0))
            L[i][j] = s / D[j]
    return tuple(map(tuple, L)), tuple(D)


# -- integer matrices -------------------------------------------------------


@dataclass(frozen=True)
class SmithDecomposition:
    """``U @ M @ V == D`` with ``U``, ``V`` unimodular and ``D`` diagonal."""

    U: tuple[tuple[int, ...], ...]
    D: tuple[tuple[int, ...], ...]
    V: tuple[tuple[int, ...], ...]

    @property
    def diagonal(self) -> tuple[int, ...]:
        return tuple(self.D[i][i] for i in range(min(len(self.D), len(self.D[0]) if self.D else 0)))

    @property
    def rank(self) -> int:
        return sum(1 for x in self.diagonal if x != 0)

    @property
    def torsion(self) -> tuple[int, ...]:
        """Invariant factors > 1 (torsion of the cokernel)."""
        return tuple(x for x in self.diagonal if x > 1)


def _as_int_matrix(M) -> list[list[int]]:
    out = []
    for row in M:
        r = []
        for x in row:
            x = frac(x)
            if x.denominator != 1:
                raise ValueError(f"non-integer entry {x}")
            r.append(int(x))
        out.append(r)
    return out


def smith_normal_form(M: Sequence[Sequence], ncols: int | None = None) -> SmithDecomposition:
    A = _as_int_matrix(M)
    m = len(A)
    n = ncols if ncols is not None else (len(A[0]) if A else 0)
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(src, dst, q):  # row_dst += q * row_src
        A[dst] = [a + q * b for a, b in zip(A[dst], A[src])]
        U[dst] = [a + q * b for a, b in zip(U[dst], U[src])]

    def add_col(src, dst, q):  # col_dst += q * col_src
        for row in A:
            row[dst] += q * row[src]
        for row in V:
            row[dst] += q * row[src]

    for t in range(min(m, n)):
        while True:
            # minimal-|.| pivot limits entry growth
            best = None
            for i in range(t, m):
                for j in range(t, n):
                    if A[i][j] and (best is None or abs(A[i][j]) < abs(A[best[0]][best[1]])):
                        best = (i, j)
            if best is None:
                break
            swap_rows(t, best[0])
            swap_cols(t, best[1])
            p = A[t][t]
            done = True
            for i in range(t + 1, m):
                if A[i][t]:
                    add_row(t, i, -(A[i][t] // p))
                    if A[i][t]:
                        done = False
            for j in range(t + 1, n):
                if A[t][j]:
                    add_col(t, j, -(A[t][j] // p))
                    if A[t][j]:
                        done = False
            if not done:
                continue
            bad = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if A[i][j] % p),
                None,
            )
            if bad is None:
                break
            add_row(bad, t, 1)
        if A[t][t] < 0:
            A[t] = [-a for a in A[t]]
            U[t] = [-a for a in U[t]]
    return SmithDecomposition(
        tuple(map(tuple, U)), tuple(map(tuple, A)), tuple(map(tuple, V))
    )


def integer_kernel(M: Sequence[Sequence], ncols: int) -> tuple[tuple[int, ...], ...]:
    """A ℤ-basis (rows) of ``{x ∈ ℤ^n : M x = 0}``."""
    snf = smith_normal_form(M, ncols)
    r = snf.rank
    return tuple(tuple(snf.V[i][j] for i in range(ncols)) for j in range(r, ncols))


def hermite_rows(M: Sequence[Sequence], ncols: int) -> tuple[tuple[int, ...], ...]:
    """Row-style Hermite normal form of an integer matrix, zero rows dropped."""
    A = _as_int_matrix(M)
    m = len(A)
    r = 0
    for c in range(ncols):
        if r == m:
            break
        while True:
            nz = [i for i in range(r, m) if A[i][c]]
            if not nz:
                break
            p = min(nz, key=lambda i: abs(A[i][c]))
            A[r], A[p] = A[p], A[r]
            others = [i for i in range(r + 1, m) if A[i][c]]
            if not others:
                break
            for i in others:
                q = A[i][c] // A[r][c]
                A[i] = [a - q * b for a, b in zip(A[i], A[r])]
        if r < m and A[r][c]:
            if A[r][c] < 0:
                A[r] = [-a for a in A[r]]
            for i in range(r):
                q = A[i][c] // A[r][c]
                if q:
                    A[i] = [a - q * b for a, b in zip(A[i], A[r])]
            r += 1
    return tuple(tuple(row) for row in A[:r])


def lattice_basis(generators: Sequence[Sequence], dim: int) -> Matrix:
    """Canonical ℤ-basis (Hermite rows) of the lattice generated by rational rows."""
    gens = [tuple(map(frac, g)) for g in generators]
    if not gens:
        return ()
    den = 1
    for g in gens:
        for x in g:
            den = den * x.denominator // _gcd(den, x.denominator)
    ints = [[int(x * den) for x in g] for g in gens]
    H = hermite_rows(ints, dim)
    return tuple(tuple(Fraction(x, den) for x in row) for row in H)


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return abs(a)


# -- subspaces --------------------------------------------------------------


@dataclass(frozen=True)
class Subspace:
    """A subspace of ℚ^n stored by its canonical reduced echelon basis.

    Two ``Subspace`` objects are equal iff they are the same subspace.
    """

    ambient_dim: int
    basis: Matrix

    @classmethod
    def span(cls, vectors: Iterable[Sequence], ambient_dim: int) -> "Subspace":
        vecs = [tuple(map(frac, v)) for v in vectors]
        for v in vecs:
            if len(v) != ambient_dim:
                raise ValueError(f"vector of length {len(v)} in ambient dimension {ambient_dim}")
        R, _, rk = rref(vecs, ambient_dim)
        return cls(ambient_dim, R[:rk])

    @classmethod
    def zero(cls, ambient_dim: int) -> "Subspace":
        return cls(ambient_dim, ())

    @classmethod
    def full(cls, ambient_dim: int) -> "Subspace":
        return cls(ambient_dim, identity(ambient_dim))

    @property
    def dim(self) -> int:
        return len(self.basis)

    def _check(self, other: "Subspace") -> None:
        if self.ambient_dim != other.ambient_dim:
            raise ValueError(
                f"ambient dimension mismatch: {self.ambient_dim} vs {other.ambient_dim}"
            )

    def __add__(self, other: "Subspace") -> "Subspace":
        self._check(other)
        return Subspace.span(self.basis + other.basis, self.ambient_dim)

    def intersect(self, other: "Subspace") -> "Subspace":
        self._check(other)
        if not self.basis or not other.basis:
            return Subspace.zero(self.ambient_dim)
        # a·A = b·B  <=>  [A^T | -B^T] (a, b) = 0
        cols = list(self.basis) + [tuple(-x for x in v) for v in other.basis]
        K = nullspace(transpose(cols), len(cols))
        k = self.dim
        vecs = [
            tuple(sum((c * v[j] for c, v in zip(sol[:k], self.basis) if c), Fraction(0))
                  for j in range(self.ambient_dim))
            for sol in K
        ]
        return Subspace.span(vecs, self.ambient_dim)

    def __contains__(self, v: Sequence) -> bool:
        v = tuple(map(frac, v))
        if len(v) != self.ambient_dim:
            raise ValueError("dimension mismatch")
        if not any(v):
            return True
        return rank(self.basis + (v,), self.ambient_dim) == self.dim

    def contains_subspace(self, other: "Subspace") -> bool:
        self._check(other)
        return all(v in self for v in other.basis)

    def quotient_dim(self, sub: "Subspace") -> int:
        """dim(self / (self ∩ sub))."""
        return self.dim - self.intersect(sub).dim
