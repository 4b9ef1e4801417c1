"""Exact integer matrix algebra.

Everything here works on Python ints, so intermediate entries never
overflow. Matrices are immutable; every function returns new values.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence


class DimensionError(ValueError):
    """Raised when matrix or vector shapes do not fit together."""


@dataclass(frozen=True)
class IntMatrix:
    rows: int
    cols: int
    entries: tuple[int, ...]

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise DimensionError("negative dimension")
        if len(self.entries) != self.rows * self.cols:
            raise DimensionError(
                f"{len(self.entries)} entries for a {self.rows}x{self.cols} matrix"
            )
        if not all(type(e) is int for e in self.entries):
            object.__setattr__(self, "entries", tuple(_as_int(e) for e in self.entries))

    # -- construction ---------------------------------------------------

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: Optional[int] = None) -> "IntMatrix":
        rows = [list(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        for r in rows:
            if len(r) != cols:
                raise DimensionError("ragged rows")
        return cls(len(rows), cols, tuple(e for r in rows for e in r))

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]], rows: Optional[int] = None) -> "IntMatrix":
        columns = [list(c) for c in columns]
        if rows is None:
            rows = len(columns[0]) if columns else 0
        return cls.from_rows(columns, cols=rows).T if columns else cls.zeros(rows, 0)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls(rows, cols, (0,) * (rows * cols))

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(n, n, tuple(int(i == j) for i in range(n) for j in range(n)))

    @classmethod
    def diagonal(cls, values: Sequence[int], rows: Optional[int] = None, cols: Optional[int] = None) -> "IntMatrix":
        rows = len(values) if rows is None else rows
        cols = len(values) if cols is None else cols
        data = [[0] * cols for _ in range(rows)]
        for i, v in enumerate(values):
            data[i][i] = v
        return cls.from_rows(data, cols=cols)

    # -- access ---------------------------------------------------------

    def __getitem__(self, index: tuple[int, int]) -> int:
        i, j = index
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(index)
        return self.entries[i * self.cols + j]

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def row(self, i: int) -> tuple[int, ...]:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(self.entries[i * self.cols + j] for i in range(self.rows))

    def to_rows(self) -> list[list[int]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def columns(self) -> list[tuple[int, ...]]:
        return [self.column(j) for j in range(self.cols)]

    # -- arithmetic -----------------------------------------------------

    @property
    def T(self) -> "IntMatrix":
        return transpose(self)

    def __matmul__(self, other):
        if isinstance(other, IntMatrix):
            if self.cols != other.rows:
                raise DimensionError(f"cannot multiply {self.shape} by {other.shape}")
            ocols = [other.column(j) for j in range(other.cols)]
            return IntMatrix(
                self.rows,
                other.cols,
                tuple(
                    sum(a * b for a, b in zip(self.row(i), c))
                    for i in range(self.rows)
                    for c in ocols
                ),
            )
        vec = tuple(other)
        if len(vec) != self.cols:
            raise DimensionError(f"vector of length {len(vec)} for {self.shape} matrix")
        return tuple(sum(a * b for a, b in zip(self.row(i), vec)) for i in range(self.rows))

    def __add__(self, other: "IntMatrix") -> "IntMatrix":
        if self.shape != other.shape:
            raise DimensionError("shape mismatch in addition")
        return IntMatrix(self.rows, self.cols, tuple(a + b for a, b in zip(self.entries, other.entries)))

    def __neg__(self) -> "IntMatrix":
        return IntMatrix(self.rows, self.cols, tuple(-a for a in self.entries))

    def __sub__(self, other: "IntMatrix") -> "IntMatrix":
        return self + (-other)

    def scale(self, c: int) -> "IntMatrix":
        return IntMatrix(self.rows, self.cols, tuple(c * a for a in self.entries))

    def is_square(self) -> bool:
        return self.rows == self.cols

    def is_symmetric(self) -> bool:
        return self.is_square() and all(
            self[i, j] == self[j, i] for i in range(self.rows) for j in range(i)
        )

    def is_zero(self) -> bool:
        return not any(self.entries)

    def det(self) -> int:
        return determinant(self)

    def __repr__(self) -> str:
        return f"IntMatrix({self.to_rows()!r})" if self.rows else f"IntMatrix.zeros(0, {self.cols})"


def _as_int(value) -> int:
    if isinstance(value, bool):
        return int(value)
    iv = int(value)
    if iv != value:
        raise TypeError(f"non-integral matrix entry {value!r}")
    return iv


def hstack(blocks: Iterable[IntMatrix], rows: Optional[int] = None) -> IntMatrix:
    blocks = list(blocks)
    if not blocks:
        return IntMatrix.zeros(rows or 0, 0)
    n = blocks[0].rows
    if any(b.rows != n for b in blocks):
        raise DimensionError("hstack needs equal row counts")
    data = [[e for b in blocks for e in b.row(i)] for i in range(n)]
    return IntMatrix.from_rows(data, cols=sum(b.cols for b in blocks))


def vstack(blocks: Iterable[IntMatrix], cols: Optional[int] = None) -> IntMatrix:
    blocks = list(blocks)
    if not blocks:
        return IntMatrix.zeros(0, cols or 0)
    m = blocks[0].cols
    if any(b.cols != m for b in blocks):
        raise DimensionError("vstack needs equal column counts")
    return IntMatrix(sum(b.rows for b in blocks), m, tuple(e for b in blocks for e in b.entries))


def block_diagonal(blocks: Iterable[IntMatrix]) -> IntMatrix:
    blocks = list(blocks)
    n = sum(b.rows for b in blocks)
    m = sum(b.cols for b in blocks)
    data = [[0] * m for _ in range(n)]
    r0 = c0 = 0
    for b in blocks:
        for i in range(b.rows):
            for j in range(b.cols):
                data[r0 + i][c0 + j] = b[i, j]
        r0 += b.rows
        c0 += b.cols
    return IntMatrix.from_rows(data, cols=m)


def transpose(A: IntMatrix) -> IntMatrix:
    return IntMatrix(A.cols, A.rows, tuple(A[i, j] for j in range(A.cols) for i in range(A.rows)))


def determinant(A: IntMatrix) -> int:
    """Fraction-free (Bareiss) determinant of a square matrix."""
    if not A.is_square():
        raise DimensionError("determinant of a non-square matrix")
    n = A.rows
    if n == 0:
        return 1
    M = A.to_rows()
    sign = 1
    prev = 1
    for k in range(n - 1):
        if M[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if M[i][k] != 0), None)
            if swap is None:
                return 0
            M[k], M[swap] = M[swap], M[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


# ---------------------------------------------------------------------------
# Smith normal form


@dataclass(frozen=True)
class SmithDecomposition:
    """``U @ source @ V == D`` with ``U``, ``V`` unimodular and ``D`` in Smith form."""

    U: IntMatrix
    D: IntMatrix
    V: IntMatrix
    source: IntMatrix

    @property
    def diagonal(self) -> tuple[int, ...]:
        return tuple(self.D[i, i] for i in range(min(self.D.rows, self.D.cols)))

    @property
    def invariant_factors(self) -> tuple[int, ...]:
        return tuple(d for d in self.diagonal if d != 0)

    @property
    def rank(self) -> int:
        return len(self.invariant_factors)


def smith_normal_form(A: IntMatrix) -> SmithDecomposition:
    """Diagonalize ``A`` by unimodular row and column operations.

    At each stage the pivot is the nonzero entry of least absolute value in
    the trailing submatrix, ties broken in row-major order. The result is
    deterministic for a fixed input.
    """
    m, n = A.rows, A.cols
    D = A.to_rows()
    U = IntMatrix.identity(m).to_rows()
    V = IntMatrix.identity(n).to_rows()

    def swap_rows(i, k):
        D[i], D[k] = D[k], D[i]
        U[i], U[k] = U[k], U[i]

    def swap_cols(j, k):
        for row in D:
            row[j], row[k] = row[k], row[j]
        for row in V:
            row[j], row[k] = row[k], row[j]

    def add_row(dst, src, q):
        # row[dst] += q * row[src]
        D[dst] = [a + q * b for a, b in zip(D[dst], D[src])]
        U[dst] = [a + q * b for a, b in zip(U[dst], U[src])]

    def add_col(dst, src, q):
        for row in D:
            row[dst] += q * row[src]
        for row in V:
            row[dst] += q * row[src]

    for t in range(min(m, n)):
        while True:
            pivot = None
            for i in range(t, m):
                for j in range(t, n):
                    v = D[i][j]
                    if v and (pivot is None or abs(v) < abs(D[pivot[0]][pivot[1]])):
                        pivot = (i, j)
            if pivot is None:
                break
            swap_rows(t, pivot[0])
            swap_cols(t, pivot[1])
            p = D[t][t]
            clean = True
            for i in range(t + 1, m):
                if D[i][t]:
                    add_row(i, t, -(D[i][t] // p))
                    clean = clean and D[i][t] == 0
            for j in range(t + 1, n):
                if D[t][j]:
                    add_col(j, t, -(D[t][j] // p))
                    clean = clean and D[t][j] == 0
            if not clean:
                continue
            bad = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if D[i][j] % p),
                None,
            )
            if bad is None:
                break
            add_row(t, bad, 1)
        if t < m and t < n and D[t][t] < 0:
            D[t] = [-a for a in D[t]]
            U[t] = [-a for a in U[t]]
        if all(D[i][j] == 0 for i in range(t, m) for j in range(t, n)):
            break

    return SmithDecomposition(
        U=IntMatrix.from_rows(U, cols=m),
        D=IntMatrix.from_rows(D, cols=n),
        V=IntMatrix.from_rows(V, cols=n),
        source=A,
    )


def rank(A: IntMatrix) -> int:
    return smith_normal_form(A).rank


# ---------------------------------------------------------------------------
# Abelian groups


@dataclass(frozen=True)
class FinAbGroup:
    """A finitely generated abelian group ``Z^free_rank + sum Z/t_i``.

    ``torsion`` lists the invariant factors greater than one, each dividing
    the next.
    """

    free_rank: int = 0
    torsion: tuple[int, ...] = ()

    def __post_init__(self):
        if self.free_rank < 0:
            raise ValueError("negative free rank")
        t = tuple(int(x) for x in self.torsion)
        if any(x <= 1 for x in t):
            raise ValueError(f"torsion coefficients must exceed 1: {t}")
        if any(b % a for a, b in zip(t, t[1:])):
            raise ValueError(f"torsion coefficients must form a divisor chain: {t}")
        object.__setattr__(self, "torsion", t)

    @property
    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    @property
    def is_free(self) -> bool:
        return not self.torsion

    def __str__(self) -> str:
        parts = [f"Z/{t}" for t in self.torsion]
        if self.free_rank:
            parts.insert(0, "Z" if self.free_rank == 1 else f"Z^{self.free_rank}")
        return " + ".join(parts) if parts else "0"

    def to_dict(self) -> dict:
        return {"free_rank": self.free_rank, "torsion": list(self.torsion)}


def cokernel(A: IntMatrix) -> FinAbGroup:
    """``Z^rows / image(A)`` for ``A`` viewed as a map ``Z^cols -> Z^rows``."""
    snf = smith_normal_form(A)
    factors = snf.invariant_factors
    return FinAbGroup(A.rows - len(factors), tuple(d for d in factors if d > 1))


def kernel_basis(A: IntMatrix) -> list[tuple[int, ...]]:
    """A Z-basis of ``{x : A x = 0}``, read off the right transform of the SNF."""
    snf = smith_normal_form(A)
    return [snf.V.column(j) for j in range(snf.rank, A.cols)]


def quotient_map(A: IntMatrix) -> tuple[FinAbGroup, IntMatrix]:
    """Cokernel of ``A`` together with the projection onto its free part.

    The second value is a ``free_rank x rows`` matrix ``q`` such that
    ``v -> q v`` induces ``coker(A) / torsion ~= Z^free_rank``.
    """
    snf = smith_normal_form(A)
    r = snf.rank
    q = IntMatrix.from_rows([snf.U.row(i) for i in range(r, A.rows)], cols=A.rows)
    return cokernel(A), q


def solve_integral(A: IntMatrix, b: Sequence[int]) -> Optional[tuple[int, ...]]:
    """Return an integer ``x`` with ``A x = b``, or ``None`` if there is none."""
    b = tuple(_as_int(v) for v in b)
    if len(b) != A.rows:
        raise DimensionError(f"right-hand side of length {len(b)} for {A.rows} rows")
    snf = smith_normal_form(A)
    c = snf.U @ b
    y = [0] * A.cols
    for i, ci in enumerate(c):
        d = snf.D[i, i] if i < A.cols else 0
        if d == 0:
            if ci != 0:
                return None
        elif ci % d:
            return None
        else:
            y[i] = ci // d
    return snf.V @ y


def is_unimodular(A: IntMatrix) -> bool:
    return A.is_square() and abs(determinant(A)) == 1
