"""Integral lattices: a labeled basis with a symmetric integer pairing.

These model second homology groups together with their intersection
forms. Signatures are computed by exact congruence diagonalization over
the rationals; no floating point is involved.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .intalg import IntMatrix, determinant, kernel_basis, block_diagonal


class LatticeError(ValueError):
    pass


@dataclass(frozen=True)
class Lattice:
    basis_labels: tuple[str, ...]
    gram: IntMatrix

    def __post_init__(self):
        object.__setattr__(self, "basis_labels", tuple(self.basis_labels))
        if not self.gram.is_square():
            raise LatticeError("Gram matrix must be square")
        if self.gram.rows != len(self.basis_labels):
            raise LatticeError(
                f"{len(self.basis_labels)} labels for a rank-{self.gram.rows} Gram matrix"
            )
        if len(set(self.basis_labels)) != len(self.basis_labels):
            raise LatticeError(f"duplicate basis labels in {self.basis_labels}")
        if not self.gram.is_symmetric():
            raise LatticeError("Gram matrix must be symmetric")

    @classmethod
    def from_gram(cls, labels: Sequence[str], gram: Sequence[Sequence[int]]) -> "Lattice":
        return cls(tuple(labels), IntMatrix.from_rows(gram, cols=len(labels)))

    @classmethod
    def empty(cls) -> "Lattice":
        return cls((), IntMatrix.zeros(0, 0))

    @property
    def rank(self) -> int:
        return len(self.basis_labels)

    def index(self, label: str) -> int:
        try:
            return self.basis_labels.index(label)
        except ValueError:
            raise LatticeError(f"no basis vector named {label!r}") from None

    def basis_vector(self, label: str) -> "LatticeVector":
        coords = [0] * self.rank
        coords[self.index(label)] = 1
        return LatticeVector(tuple(coords), self)

    def zero(self) -> "LatticeVector":
        return LatticeVector((0,) * self.rank, self)

    def vector(self, coords: Sequence[int]) -> "LatticeVector":
        return LatticeVector(tuple(coords), self)

    def combination(self, terms: Mapping[str, int]) -> "LatticeVector":
        """Vector from a ``{label: coefficient}`` mapping."""
        coords = [0] * self.rank
        for label, c in terms.items():
            coords[self.index(label)] += c
        return LatticeVector(tuple(coords), self)

    def basis(self) -> list["LatticeVector"]:
        return [self.basis_vector(lab) for lab in self.basis_labels]

    def direct_sum(self, other: "Lattice") -> "Lattice":
        return Lattice(self.basis_labels + other.basis_labels, block_diagonal([self.gram, other.gram]))


@dataclass(frozen=True, eq=False)
class LatticeVector:
    coords: tuple[int, ...]
    home: Lattice

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(int(c) for c in self.coords))
        if len(self.coords) != self.home.rank:
            raise LatticeError(
                f"vector with {len(self.coords)} coordinates in a rank-{self.home.rank} lattice"
            )

    def _check(self, other: "LatticeVector"):
        if not isinstance(other, LatticeVector):
            return NotImplemented
        if other.home != self.home:
            raise LatticeError("vectors live in different lattices")

    def __eq__(self, other):
        if not isinstance(other, LatticeVector):
            return NotImplemented
        return self.home == other.home and self.coords == other.coords

    def __hash__(self):
        return hash((self.coords, self.home.basis_labels))

    def __add__(self, other: "LatticeVector") -> "LatticeVector":
        self._check(other)
        return LatticeVector(tuple(a + b for a, b in zip(self.coords, other.coords)), self.home)

    def __sub__(self, other: "LatticeVector") -> "LatticeVector":
        self._check(other)
        return LatticeVector(tuple(a - b for a, b in zip(self.coords, other.coords)), self.home)

    def __neg__(self) -> "LatticeVector":
        return LatticeVector(tuple(-a for a in self.coords), self.home)

    def __mul__(self, c: int) -> "LatticeVector":
        return LatticeVector(tuple(c * a for a in self.coords), self.home)

    __rmul__ = __mul__

    def __matmul__(self, other: "LatticeVector") -> int:
        return pair(self, other)

    @property
    def square(self) -> int:
        return pair(self, self)

    def is_zero(self) -> bool:
        return not any(self.coords)

    def as_dict(self, drop_zero: bool = True) -> dict[str, int]:
        return {
            lab: c for lab, c in zip(self.home.basis_labels, self.coords) if c or not drop_zero
        }

    def __repr__(self) -> str:
        terms = self.as_dict()
        if not terms:
            return "0"
        return " + ".join(f"{c}*{lab}" for lab, c in terms.items()).replace("+ -", "- ")


def pair(u: LatticeVector, v: LatticeVector) -> int:
    """Intersection number ``u^T G v``."""
    if u.home != v.home:
        raise LatticeError("cannot pair vectors from different lattices")
    G = u.home.gram
    return sum(a * sum(G[i, j] * b for j, b in enumerate(v.coords) if b) for i, a in enumerate(u.coords) if a)


def gram_of(vectors: Sequence[LatticeVector]) -> IntMatrix:
    return IntMatrix.from_rows([[pair(u, v) for v in vectors] for u in vectors], cols=len(vectors))


@dataclass(frozen=True)
class Signature:
    b_plus: int
    b_minus: int
    null_rank: int

    @property
    def value(self) -> int:
        return self.b_plus - self.b_minus

    def __iter__(self):
        return iter((self.b_plus, self.b_minus, self.null_rank))


def form_signature(gram: IntMatrix) -> Signature:
    """Inertia of a symmetric integer matrix by rational congruence."""
    n = gram.rows
    G = [[Fraction(x) for x in row] for row in gram.to_rows()]
    pos = neg = 0
    k = 0
    while k < n:
        piv = next((i for i in range(k, n) if G[i][i] != 0), None)
        if piv is None:
            # Zero diagonal: if an off-diagonal entry survives, replace e_i by
            # e_i + e_j, which gives a diagonal entry 2*G[i][j] != 0.
            off = next(((i, j) for i in range(k, n) for j in range(i + 1, n) if G[i][j] != 0), None)
            if off is None:
                break
            i, j = off
            for c in range(n):
                G[i][c] += G[j][c]
            for r in range(n):
                G[r][i] += G[r][j]
            piv = i
        if piv != k:
            G[k], G[piv] = G[piv], G[k]
            for row in G:
                row[k], row[piv] = row[piv], row[k]
        p = G[k][k]
        for r in range(k + 1, n):
            f = G[r][k] / p
            if f:
                for c in range(k, n):
                    G[r][c] -= f * G[k][c]
                for c in range(k, n):
                    G[c][r] = G[r][c]
        if p > 0:
            pos += 1
        else:
            neg += 1
        k += 1
    return Signature(pos, neg, n - pos - neg)


def signature(L: Lattice) -> Signature:
    return form_signature(L.gram)


def is_characteristic(K: LatticeVector) -> bool:
    """Whether ``K . x == x . x (mod 2)`` for every basis vector ``x``."""
    G = K.home.gram
    return all(
        (sum(G[i, j] * c for j, c in enumerate(K.coords)) - G[i, i]) % 2 == 0
        for i in range(K.home.rank)
    )


def parity(L: Lattice) -> str:
    return "odd" if any(L.gram[i, i] % 2 for i in range(L.rank)) else "even"


@dataclass(frozen=True)
class SplitLattice:
    """``ambient = Z sigma + Z b + complement``, an orthogonal splitting."""

    ambient: Lattice
    marked: tuple[LatticeVector, ...]
    complement_basis: tuple[LatticeVector, ...]
    complement: Lattice

    @property
    def complement_rank(self) -> int:
        return len(self.complement_basis)

    def change_of_basis(self) -> IntMatrix:
        """Columns: the marked pair followed by the complement basis."""
        return IntMatrix.from_columns(
            [v.coords for v in self.marked + self.complement_basis], rows=self.ambient.rank
        )

    def complement_coordinates(self, v: LatticeVector) -> tuple[int, ...]:
        """Coordinates of ``v`` (assumed in the complement) in the complement basis."""
        from .intalg import solve_integral

        basis = IntMatrix.from_columns([p.coords for p in self.complement_basis], rows=self.ambient.rank)
        x = solve_integral(basis, v.coords)
        if x is None:
            raise LatticeError(f"{v!r} is not in the orthogonal complement")
        return x


def split_unimodular(
    L: Lattice,
    sigma: LatticeVector,
    b: LatticeVector,
    complement_labels: Iterable[str] | None = None,
) -> SplitLattice:
    """Split off the pair ``{sigma, b}``, which must span a unimodular sublattice.

    The complement basis is a Z-basis of the kernel of the pairing with
    ``sigma`` and ``b``.
    """
    for v in (sigma, b):
        if v.home != L:
            raise LatticeError("marked vectors must lie in the lattice being split")
    d = determinant(gram_of([sigma, b]))
    if abs(d) != 1:
        raise LatticeError(f"marked pair is not unimodular (determinant {d})")

    pairing = IntMatrix.from_rows(
        [[pair(v, e) for e in L.basis()] for v in (sigma, b)], cols=L.rank
    )
    comp = tuple(LatticeVector(c, L) for c in kernel_basis(pairing))
    labels = tuple(complement_labels) if complement_labels is not None else tuple(
        f"p{i + 1}" for i in range(len(comp))
    )
    if len(labels) != len(comp):
        raise LatticeError(f"{len(labels)} labels for a rank-{len(comp)} complement")
    split = SplitLattice(L, (sigma, b), comp, Lattice(labels, gram_of(comp)))
    # Guard: the pair and the kernel basis must together be a basis of L.
    if abs(determinant(split.change_of_basis())) != 1:
        raise LatticeError("complement does not give a direct-sum decomposition")
    return split
