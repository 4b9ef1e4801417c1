"""Closed oriented 4-manifolds recorded by their invariants.

A :class:`Manifold4` carries H_1 (with names for the free generators), the
intersection lattice on H_2, Euler characteristic, signature, an optional
canonical class and a set of embedded surfaces. Blocks are axiomatized by
these records; nothing here is derived from a surgery description.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from types import MappingProxyType
from typing import Mapping, Optional, Sequence

from .intalg import FinAbGroup, IntMatrix, block_diagonal, hstack
from .lattice import (
    Lattice,
    LatticeVector,
    is_characteristic,
    pair,
    parity,
    signature as lattice_signature,
)


class ManifoldError(ValueError):
    pass


@dataclass(frozen=True)
class CheckResult:
    name: str
    status: str  # "pass", "fail" or "skipped"
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def __str__(self) -> str:
        return self.status if not self.detail else f"{self.status} ({self.detail})"


def check(name: str, ok: bool, detail: str = "") -> CheckResult:
    return CheckResult(name, "pass" if ok else "fail", detail)


@dataclass(frozen=True)
class SurfaceEmbedding:
    """An embedded closed oriented surface.

    ``h1_map`` has one column per standard generator ``a1, b1, ..., ag, bg``
    of the reference surface and one row per free generator of the
    ambient H_1.
    """

    label: str
    genus: int
    h2_class: LatticeVector
    h1_map: IntMatrix
    symplectic: bool = True

    def __post_init__(self):
        if self.genus < 0:
            raise ManifoldError(f"surface {self.label!r} has negative genus")
        if self.h1_map.cols != 2 * self.genus:
            raise ManifoldError(
                f"surface {self.label!r}: h1_map has {self.h1_map.cols} columns, "
                f"expected {2 * self.genus}"
            )

    @property
    def self_intersection(self) -> int:
        return pair(self.h2_class, self.h2_class)


@dataclass(frozen=True)
class Manifold4:
    label: str
    euler: int
    signature: int
    h1: FinAbGroup
    h1_labels: tuple[str, ...]
    h2: Lattice
    canonical: Optional[LatticeVector] = None
    symplectic: bool = False
    surfaces: Mapping[str, SurfaceEmbedding] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "h1_labels", tuple(self.h1_labels))
        object.__setattr__(self, "surfaces", MappingProxyType(dict(self.surfaces)))
        if len(self.h1_labels) != self.h1.free_rank:
            raise ManifoldError(
                f"{self.label}: {len(self.h1_labels)} H1 labels for free rank {self.h1.free_rank}"
            )
        b2 = self.h2.rank
        if self.euler != 2 - 2 * self.h1.free_rank + b2:
            raise ManifoldError(
                f"{self.label}: euler {self.euler} inconsistent with b1={self.b1}, b2={b2}"
            )
        if abs(self.signature) > b2 or (self.signature - b2) % 2:
            raise ManifoldError(f"{self.label}: signature {self.signature} impossible for b2={b2}")
        if self.canonical is not None and self.canonical.home != self.h2:
            raise ManifoldError(f"{self.label}: canonical class lives in a different lattice")
        for name, s in self.surfaces.items():
            if name != s.label:
                raise ManifoldError(f"surface keyed {name!r} is labeled {s.label!r}")
            if s.h2_class.home != self.h2:
                raise ManifoldError(f"{self.label}: surface {name!r} class not in H2")
            if s.h1_map.rows != self.b1:
                raise ManifoldError(
                    f"{self.label}: surface {name!r} h1_map has {s.h1_map.rows} rows, b1={self.b1}"
                )

    @property
    def b1(self) -> int:
        return self.h1.free_rank

    @property
    def b2(self) -> int:
        return self.h2.rank

    def surface(self, label: str) -> SurfaceEmbedding:
        try:
            return self.surfaces[label]
        except KeyError:
            raise ManifoldError(f"{self.label} has no surface {label!r}") from None

    def with_surface(self, s: SurfaceEmbedding) -> "Manifold4":
        return replace(self, surfaces={**self.surfaces, s.label: s})

    def relabel(self, label: Optional[str] = None, h1_labels: Optional[Sequence[str]] = None) -> "Manifold4":
        """Rename the manifold and/or its free H_1 generators."""
        return replace(
            self,
            label=self.label if label is None else label,
            h1_labels=self.h1_labels if h1_labels is None else tuple(h1_labels),
        )

    def consistency_checks(self) -> list[CheckResult]:
        sig = lattice_signature(self.h2)
        out = [
            check("euler_betti", self.euler == 2 - 2 * self.b1 + self.b2),
            check(
                "signature_matches_form",
                sig.value == self.signature and sig.null_rank == 0,
                f"form {sig.b_plus - sig.b_minus}, recorded {self.signature}",
            ),
        ]
        K = self.canonical
        if K is None:
            out.append(CheckResult("characteristic", "skipped", "canonical class absent"))
            out.append(CheckResult("K_squared", "skipped", "canonical class absent"))
        else:
            out.append(check("characteristic", is_characteristic(K)))
            if self.symplectic:
                k2 = pair(K, K)
                rhs = 2 * self.euler + 3 * self.signature
                out.append(check("K_squared", k2 == rhs, f"K^2={k2}, 2e+3sigma={rhs}"))
            else:
                out.append(CheckResult("K_squared", "skipped", "not symplectic"))
        for name, s in self.surfaces.items():
            if not s.symplectic:
                continue
            if K is None:
                out.append(CheckResult(f"adjunction:{name}", "skipped", "canonical class absent"))
            else:
                out.append(adjunction_check(self, name))
        return out


def adjunction_check(M: Manifold4, surface: str) -> CheckResult:
    """Compare ``2g - 2`` with ``S.S + K.S``."""
    if M.canonical is None:
        raise ManifoldError(f"{M.label}: adjunction needs a canonical class")
    s = M.surface(surface)
    lhs = 2 * s.genus - 2
    rhs = s.self_intersection + pair(M.canonical, s.h2_class)
    return check(f"adjunction:{surface}", lhs == rhs, f"2g-2={lhs}, S^2+K.S={rhs}")


# ---------------------------------------------------------------------------
# Structural operations


def _move(v: Optional[LatticeVector], L: Lattice) -> Optional[LatticeVector]:
    """Re-home ``v`` into ``L``, whose basis extends the old one."""
    if v is None:
        return None
    return LatticeVector(v.coords + (0,) * (L.rank - v.home.rank), L)


def blow_up(M: Manifold4, count: int, on_surface: Optional[str] = None) -> Manifold4:
    """Connected sum with ``count`` copies of the reversed complex projective plane.

    New classes ``E_i`` of square -1 are appended to H_2 and registered as
    spheres. If ``on_surface`` is given, the blow-up points lie on that
    surface and its class loses each ``E_i``.
    """
    if count < 0:
        raise ManifoldError("blow-up count must be nonnegative")
    if on_surface is not None:
        M.surface(on_surface)
    if count == 0:
        return M
    used = {lab for lab in M.h2.basis_labels}
    new_labels = []
    n = 1
    while len(new_labels) < count:
        if f"E{n}" not in used:
            new_labels.append(f"E{n}")
        n += 1
    minus = IntMatrix.diagonal([-1] * count)
    L = Lattice(M.h2.basis_labels + tuple(new_labels), block_diagonal([M.h2.gram, minus]))
    es = [L.basis_vector(lab) for lab in new_labels]
    esum = L.zero()
    for e in es:
        esum = esum + e

    surfaces = {}
    for name, s in M.surfaces.items():
        cls = _move(s.h2_class, L)
        if name == on_surface:
            cls = cls - esum
        surfaces[name] = replace(s, h2_class=cls)
    for lab, e in zip(new_labels, es):
        surfaces[lab] = SurfaceEmbedding(lab, 0, e, IntMatrix.zeros(M.b1, 0), M.symplectic)

    K = _move(M.canonical, L)
    return replace(
        M,
        euler=M.euler + count,
        signature=M.signature - count,
        h2=L,
        canonical=None if K is None else K + esum,
        surfaces=surfaces,
    )


def symplectic_resolve(M: Manifold4, a: str, b: str, new_label: str) -> Manifold4:
    """Smooth the positive transverse intersections of two symplectic surfaces.

    The new surface has class ``A + B`` and genus ``g_A + g_B + n - 1``
    where ``n = A.B``; its H_1 generators are those of ``A`` followed by
    those of ``B``. The ``n - 1`` extra handles get zero images: each neck
    circle bounds a local disk, and the dual loops are taken to be
    null-homologous (they depend on a choice of paths between the points).
    """
    sa, sb = M.surface(a), M.surface(b)
    if not (sa.symplectic and sb.symplectic):
        raise ManifoldError("symplectic resolution needs two symplectic surfaces")
    n = pair(sa.h2_class, sb.h2_class)
    if n <= 0:
        raise ManifoldError(f"cannot resolve {a!r} and {b!r}: intersection number {n}")
    if new_label in M.surfaces:
        raise ManifoldError(f"surface {new_label!r} already exists")
    new = SurfaceEmbedding(
        new_label,
        sa.genus + sb.genus + n - 1,
        sa.h2_class + sb.h2_class,
        hstack([sa.h1_map, sb.h1_map, IntMatrix.zeros(M.b1, 2 * (n - 1))], rows=M.b1),
        True,
    )
    return M.with_surface(new)


# ---------------------------------------------------------------------------
# Homology model


def homology_model(M: Manifold4) -> str:
    """Standard simply connected manifold with the same intersection form, if any."""
    sig = lattice_signature(M.h2)
    par = parity(M.h2)
    if M.h1.is_trivial and sig.null_rank == 0:
        indefinite = sig.b_plus > 0 and sig.b_minus > 0
        if par == "odd" and indefinite:
            return f"{sig.b_plus} ℂP² # {sig.b_minus} ℂP²bar (homology)"
        if par == "even" and indefinite and sig.value == 0:
            return f"{sig.b_plus}(S²×S²) (homology)"
    return f"rank {M.b2}, signature {sig.value}, {par}, H1 = {M.h1} (no standard model)"


HOMOLOGY_ONLY_NOTE = "homology-level only — π₁ not computed"


# ---------------------------------------------------------------------------
# Building blocks


def _labels(default: Sequence[str], override: Optional[Sequence[str]]) -> tuple[str, ...]:
    if override is None:
        return tuple(default)
    if len(override) != len(default):
        raise ManifoldError(f"expected {len(default)} H1 labels, got {len(override)}")
    return tuple(override)


def make_s1_times_mk(label: str = "S1xMK", h1_labels: Optional[Sequence[str]] = None) -> Manifold4:
    """S^1 x M_K for the left-handed trefoil: a T^2-bundle over T^2.

    H_1 is free on ``x`` (the circle factor) and ``b`` (the section curve);
    H_2 is the hyperbolic plane on the section ``S`` and the fibre ``F``.
    The section carries H_1(S) isomorphically onto H_1; the fibre maps to
    zero. The canonical class vanishes.
    """
    L = Lattice.from_gram(("S", "F"), [[0, 1], [1, 0]])
    surfaces = {
        "S": SurfaceEmbedding("S", 1, L.basis_vector("S"), IntMatrix.identity(2)),
        "F": SurfaceEmbedding("F", 1, L.basis_vector("F"), IntMatrix.zeros(2, 2)),
    }
    return Manifold4(
        label, 0, 0, FinAbGroup(2), _labels(("x", "b"), h1_labels), L, L.zero(), True, surfaces
    )


def make_t4(label: str = "T4", h1_labels: Optional[Sequence[str]] = None) -> Manifold4:
    """The 4-torus with H_2 spanned by the six coordinate 2-tori.

    ``T1 = a1 x a2`` and ``T2 = a3 x a4`` are the two torus factors; the
    remaining coordinate tori are oriented so that every dual pair meets
    with intersection +1.
    """
    labels = ("T1", "T2", "T13", "T24", "T14", "T23")
    hyp = IntMatrix.from_rows([[0, 1], [1, 0]])
    L = Lattice(labels, block_diagonal([hyp, hyp, hyp]))
    e = [[0] * 4 for _ in range(4)]
    for i in range(4):
        e[i][i] = 1
    t1_map = IntMatrix.from_columns([e[0], e[1]], rows=4)
    t2_map = IntMatrix.from_columns([e[2], e[3]], rows=4)
    surfaces = {
        "T1": SurfaceEmbedding("T1", 1, L.basis_vector("T1"), t1_map),
        "T2": SurfaceEmbedding("T2", 1, L.basis_vector("T2"), t2_map),
    }
    gens = _labels(("alpha1", "alpha2", "alpha3", "alpha4"), h1_labels)
    return Manifold4(label, 0, 0, FinAbGroup(4), gens, L, L.zero(), True, surfaces)


def make_t2_times_s2(label: str = "T2xS2", h1_labels: Optional[Sequence[str]] = None) -> Manifold4:
    """T^2 x S^2 with the torus ``T`` and sphere ``S`` spanning H_2.

    The genus-2 surface ``Sigma2'`` in class ``S + 2T`` (square 4) is the
    curve that becomes the regular Lefschetz fibre after four blow-ups.
    Its H_1 images are ``a1, b1, -a1, -b1``. No canonical class is stored.
    """
    L = Lattice.from_gram(("T", "S"), [[0, 1], [1, 0]])
    fibre_map = IntMatrix.from_columns([(1, 0), (0, 1), (-1, 0), (0, -1)], rows=2)
    surfaces = {
        "T": SurfaceEmbedding("T", 1, L.basis_vector("T"), IntMatrix.identity(2)),
        "S": SurfaceEmbedding("S", 0, L.basis_vector("S"), IntMatrix.zeros(2, 0)),
        "Sigma2'": SurfaceEmbedding("Sigma2'", 2, L.combination({"S": 1, "T": 2}), fibre_map),
    }
    return Manifold4(
        label, 0, 0, FinAbGroup(2), _labels(("a1", "b1"), h1_labels), L, None, True, surfaces
    )


def make_z_block(label: str = "Z", h1_labels: Optional[Sequence[str]] = None) -> Manifold4:
    """``Z = T^2 x S^2 # 4 CP^2bar`` with its genus-2 fibre ``Sigma2'`` of square 0."""
    return blow_up(make_t2_times_s2(label, h1_labels), 4, on_surface="Sigma2'")


BLOCKS = {
    "s1_x_mk": make_s1_times_mk,
    "t4": make_t4,
    "t2_x_s2": make_t2_times_s2,
    "z_block": make_z_block,
}
