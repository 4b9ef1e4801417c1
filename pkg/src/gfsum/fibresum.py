"""Generalized fibre sums ``X = M #_phi N`` along genus-g surfaces of square 0.

The gluing is always the fixed trivial framing ``(x, z) -> (phi(x), conj z)``;
``phi`` is specified by two embeddings of a reference surface, i.e. by the
images of its standard H_1 generators in each summand.

H_1(X) is the cokernel of the stacked map ``H_1(Sigma_g) -> H_1(M) + H_1(N)``
and the rim tori form the cokernel of the transposed map on first
cohomology. With dual surfaces ``B_M``, ``B_N`` (``Sigma.B = 1``) the
second homology splits as

    Z Sigma_X + Z B_X + P(M) + P(N) + R(X) + S'(X)

where ``P`` is the orthogonal complement of the unimodular pair in each
summand and ``R``, ``S'`` are the rim tori and the dual vanishing classes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from .intalg import (
    FinAbGroup,
    IntMatrix,
    block_diagonal,
    cokernel,
    hstack,
    quotient_map,
    rank,
    solve_integral,
    vstack,
)
from .lattice import Lattice, LatticeVector, SplitLattice, gram_of, pair, signature, split_unimodular
from .manifold import CheckResult, Manifold4, SurfaceEmbedding, adjunction_check, check


class FibreSumError(ValueError):
    pass


class CanonicalClassError(FibreSumError):
    pass


def same_image(A: IntMatrix, B: IntMatrix) -> bool:
    """Whether the columns of ``A`` and ``B`` span the same subgroup."""
    if A.rows != B.rows:
        return False
    return all(solve_integral(A, c) is not None for c in B.columns()) and all(
        solve_integral(B, c) is not None for c in A.columns()
    )


@dataclass(frozen=True)
class GluingSide:
    """One summand of a fibre sum.

    ``h1_map`` optionally overrides the surface's native H_1 map; it encodes
    the choice of embedding of the reference surface and must have the same
    image as the native map.
    """

    manifold: Manifold4
    surface: str
    dual: Optional[str] = None
    h1_map: Optional[IntMatrix] = None

    @property
    def sigma(self) -> SurfaceEmbedding:
        return self.manifold.surface(self.surface)

    @property
    def b(self) -> Optional[SurfaceEmbedding]:
        return None if self.dual is None else self.manifold.surface(self.dual)

    @property
    def embedding(self) -> IntMatrix:
        return self.sigma.h1_map if self.h1_map is None else self.h1_map

    @property
    def genus(self) -> int:
        return self.sigma.genus


@dataclass(frozen=True)
class GluingSpec:
    left: GluingSide
    right: GluingSide
    framing: str = "fixed-trivial"

    def validate(self) -> None:
        if self.framing != "fixed-trivial":
            raise FibreSumError(f"unsupported framing {self.framing!r}")
        for side in (self.left, self.right):
            m, s = side.manifold, side.sigma
            if s.self_intersection != 0:
                raise FibreSumError(
                    f"{m.label}: surface {s.label!r} has self-intersection {s.self_intersection}, need 0"
                )
            if side.h1_map is not None:
                if side.h1_map.shape != s.h1_map.shape:
                    raise FibreSumError(
                        f"{m.label}: embedding map has shape {side.h1_map.shape}, "
                        f"surface {s.label!r} needs {s.h1_map.shape}"
                    )
                if not same_image(side.h1_map, s.h1_map):
                    raise FibreSumError(
                        f"{m.label}: embedding map does not have the image of {s.label!r} in H1"
                    )
            if side.dual is not None:
                n = pair(s.h2_class, side.b.h2_class)
                if n != 1:
                    raise FibreSumError(f"{m.label}: {s.label}.{side.dual} = {n}, need 1")
        if self.left.genus != self.right.genus:
            raise FibreSumError(
                f"genus mismatch: {self.left.genus} ({self.left.manifold.label}) vs "
                f"{self.right.genus} ({self.right.manifold.label})"
            )

    @property
    def genus(self) -> int:
        return self.left.genus

    def swapped(self) -> "GluingSpec":
        return GluingSpec(self.right, self.left, self.framing)


def h1_gluing_matrix(spec: GluingSpec) -> IntMatrix:
    """``(b1(M) + b1(N)) x 2g`` matrix of the two embedding maps, stacked."""
    return vstack([spec.left.embedding, spec.right.embedding], cols=2 * spec.genus)


def first_homology(spec: GluingSpec) -> FinAbGroup:
    spec.validate()
    return cokernel(h1_gluing_matrix(spec))


def rim_tori_group(spec: GluingSpec) -> FinAbGroup:
    """Cokernel of ``H^1(M) + H^1(N) -> H^1(Sigma_g)`` on free parts."""
    spec.validate()
    A = h1_gluing_matrix(spec)
    return cokernel(A.T)


@dataclass(frozen=True)
class BettiData:
    euler: int
    signature: int
    b1: int
    b2: int
    b2_plus: int
    b2_minus: int


def betti_and_signature(spec: GluingSpec) -> BettiData:
    spec.validate()
    M, N, g = spec.left.manifold, spec.right.manifold, spec.genus
    euler = M.euler + N.euler + 4 * (g - 1)
    sig = M.signature + N.signature
    b1 = first_homology(spec).free_rank
    b2 = euler - 2 + 2 * b1
    if b2 < 0 or (b2 + sig) % 2 or abs(sig) > b2:
        raise FibreSumError(f"inconsistent Betti numbers: b2={b2}, signature={sig}")
    return BettiData(euler, sig, b1, b2, (b2 + sig) // 2, (b2 - sig) // 2)


def sew_dual_surfaces(spec: GluingSpec) -> tuple[int, int]:
    """Genus and square of the surface sewn from the punctured duals."""
    bl, br = spec.left.b, spec.right.b
    if bl is None or br is None:
        raise FibreSumError("sewing needs a dual surface on both sides")
    return bl.genus + br.genus, bl.self_intersection + br.self_intersection


@dataclass(frozen=True)
class Splitting:
    """Tagged basis of H_2(X) adapted to the fibre sum."""

    sigma: str
    b: str
    p_left: tuple[str, ...]
    p_right: tuple[str, ...]
    rim: tuple[str, ...]
    vanishing: tuple[str, ...]
    left_split: SplitLattice
    right_split: SplitLattice

    def ranks(self) -> dict[str, int]:
        return {
            "sigma": 1,
            "b": 1,
            "p_left": len(self.p_left),
            "p_right": len(self.p_right),
            "rim": len(self.rim),
            "vanishing": len(self.vanishing),
        }

    @property
    def total_rank(self) -> int:
        return sum(self.ranks().values())


@dataclass(frozen=True)
class FibreSumResult:
    manifold: Manifold4
    spec: GluingSpec
    sigma_X: str
    b_X: Optional[str]
    splitting: Splitting
    rim_tori: FinAbGroup
    vanishing: FinAbGroup
    checks: tuple[CheckResult, ...] = field(default=())
    canonical_note: str = ""

    @property
    def all_passed(self) -> bool:
        return all(c.status != "fail" for c in self.checks)


def _p_labels(spec: GluingSpec, split_l: SplitLattice, split_r: SplitLattice):
    ll, rl = spec.left.manifold.label, spec.right.manifold.label
    if ll == rl:
        ll, rl = f"{ll}/1", f"{rl}/2"
    return (
        tuple(f"P({ll}).{i + 1}" for i in range(split_l.complement_rank)),
        tuple(f"P({rl}).{i + 1}" for i in range(split_r.complement_rank)),
    )


def _side_split(side: GluingSide) -> SplitLattice:
    L = side.manifold.h2
    return split_unimodular(L, side.sigma.h2_class, side.b.h2_class)


def _canonical_parts(side: GluingSide, split: SplitLattice, g: int):
    """``(K_bar coordinates in P, eta, K_bar)`` for one summand."""
    K = side.manifold.canonical
    if K is None:
        raise CanonicalClassError(f"{side.manifold.label} has no canonical class")
    S, B = side.sigma.h2_class, side.b.h2_class
    c = 2 * g - 2
    kb = pair(K, B)
    b2 = pair(B, B)
    kbar = K - c * B - (kb - c * b2) * S
    if pair(kbar, S) or pair(kbar, B):
        raise CanonicalClassError(
            f"{side.manifold.label}: reduced canonical class is not orthogonal to "
            f"{side.surface} and {side.dual} (adjunction fails on {side.surface})"
        )
    return split.complement_coordinates(kbar), kb + 1 - c * b2, kbar


def fibre_sum(
    spec: GluingSpec,
    label: str = "X",
    sigma_label: Optional[str] = None,
    b_label: Optional[str] = None,
    h1_labels: Optional[Sequence[str]] = None,
) -> FibreSumResult:
    """Assemble the invariant record of ``M #_phi N``.

    Both sides need a dual surface. The canonical class is computed when
    both summands carry one and there are no rim tori; otherwise it is left
    absent and the reason is recorded in ``canonical_note``.
    """
    spec.validate()
    if spec.left.dual is None or spec.right.dual is None:
        raise FibreSumError("fibre_sum needs a dual surface on both sides to split H2")
    M, N, g = spec.left.manifold, spec.right.manifold, spec.genus
    sigma_label = sigma_label or f"Sigma_{label}"
    b_label = b_label or f"B_{label}"

    A = h1_gluing_matrix(spec)
    h1, q = quotient_map(A)
    if h1_labels is None:
        h1_labels = tuple(f"{label}.h{i + 1}" for i in range(h1.free_rank))
    elif len(h1_labels) != h1.free_rank:
        raise FibreSumError(f"{len(h1_labels)} H1 labels for free rank {h1.free_rank}")
    rim = cokernel(A.T)
    vanishing = FinAbGroup(rim.free_rank)
    bd = betti_and_signature(spec)

    split_l, split_r = _side_split(spec.left), _side_split(spec.right)
    p_l, p_r = _p_labels(spec, split_l, split_r)
    r = rim.free_rank
    rim_labels = tuple(f"R{i + 1}" for i in range(r))
    van_labels = tuple(f"S'{i + 1}" for i in range(r))
    for lab in (sigma_label, b_label):
        if lab in p_l + p_r + rim_labels + van_labels:
            raise FibreSumError(f"label {lab!r} collides with a generated basis label")
    if sigma_label == b_label:
        raise FibreSumError("sigma and dual labels must differ")

    bx_genus, bx_square = sew_dual_surfaces(spec)
    rim_block = IntMatrix.from_rows(
        [[0] * r + [int(i == j) for j in range(r)] for i in range(r)]
        + [[int(i == j) for j in range(r)] + [0] * r for i in range(r)],
        cols=2 * r,
    )
    gram = block_diagonal(
        [
            IntMatrix.from_rows([[0, 1], [1, bx_square]]),
            split_l.complement.gram,
            split_r.complement.gram,
            rim_block,
        ]
    )
    L = Lattice((sigma_label, b_label) + p_l + p_r + rim_labels + van_labels, gram)
    splitting = Splitting(sigma_label, b_label, p_l, p_r, rim_labels, van_labels, split_l, split_r)

    # H_1 images of the new surfaces, through the free part of the quotient.
    bl, br = spec.left.b, spec.right.b
    b1m, b1n = M.b1, N.b1
    sigma_h1 = q @ vstack([spec.left.embedding, IntMatrix.zeros(b1n, 2 * g)])
    b_h1 = q @ vstack(
        [
            hstack([bl.h1_map, IntMatrix.zeros(b1m, br.h1_map.cols)], rows=b1m),
            hstack([IntMatrix.zeros(b1n, bl.h1_map.cols), br.h1_map], rows=b1n),
        ],
        cols=bl.h1_map.cols + br.h1_map.cols,
    )
    surfaces = {
        sigma_label: SurfaceEmbedding(
            sigma_label, g, L.basis_vector(sigma_label), sigma_h1,
            spec.left.sigma.symplectic and spec.right.sigma.symplectic,
        ),
        b_label: SurfaceEmbedding(
            b_label, bx_genus, L.basis_vector(b_label), b_h1, bl.symplectic and br.symplectic
        ),
    }

    symplectic = M.symplectic and N.symplectic and surfaces[sigma_label].symplectic
    canonical = None
    note = ""
    kbars = {}
    if not rim.is_trivial:
        note = f"absent: rim tori rank {rim.free_rank}" + (
            f", torsion {list(rim.torsion)}" if rim.torsion else ""
        )
    elif M.canonical is None or N.canonical is None:
        missing = M.label if M.canonical is None else N.label
        note = f"absent: no canonical class on {missing}"
    elif not symplectic:
        note = "absent: summands not symplectically glued"
    else:
        c = 2 * g - 2
        pl, eta_l, kbars["left"] = _canonical_parts(spec.left, split_l, g)
        pr, eta_r, kbars["right"] = _canonical_parts(spec.right, split_r, g)
        canonical = LatticeVector((eta_l + eta_r, c) + pl + pr + (0,) * (2 * r), L)

    X = Manifold4(
        label, bd.euler, bd.signature, h1, tuple(h1_labels), L, canonical, symplectic, surfaces
    )

    checks = list(X.consistency_checks())
    sig = signature(L)
    checks.append(
        check(
            "signature_two_routes",
            sig.value == bd.signature and sig.null_rank == 0,
            f"additivity {bd.signature}, form {sig.value}",
        )
    )
    checks.append(
        check(
            "splitting_rank",
            splitting.total_rank == bd.b2 == L.rank,
            f"parts {splitting.total_rank}, b2 {bd.b2}",
        )
    )
    rk = rank(A)
    checks.append(
        check(
            "rank_nullity",
            h1.free_rank == b1m + b1n - rk and rim.free_rank == 2 * g - rk,
            f"rank {rk}",
        )
    )
    for side_name, kbar in kbars.items():
        side = spec.left if side_name == "left" else spec.right
        checks.append(
            check(
                f"Kbar_in_P:{side.manifold.label}",
                pair(kbar, side.sigma.h2_class) == 0 and pair(kbar, side.b.h2_class) == 0,
            )
        )
    return FibreSumResult(
        X, spec, sigma_label, b_label, splitting, rim, vanishing, tuple(checks), note
    )


def canonical_class(spec: GluingSpec, result: FibreSumResult) -> LatticeVector:
    """Canonical class of the fibre sum in the adapted basis.

    ``K_X = Kbar_M + Kbar_N + (2g-2) B_X + (eta_M + eta_N) Sigma_X`` with
    ``Kbar = K - (2g-2) B - (K.B - (2g-2) B^2) Sigma`` and
    ``eta = K.B + 1 - (2g-2) B^2`` on each side.
    """
    if not result.rim_tori.is_trivial:
        raise CanonicalClassError(
            f"canonical class refused: rim tori of rank {result.rim_tori.free_rank} "
            "contribute a term that depends on the gluing"
        )
    if result.manifold.canonical is None:
        raise CanonicalClassError(f"canonical class unavailable: {result.canonical_note}")
    return result.manifold.canonical


def canonical_p_parts(result: FibreSumResult) -> dict[str, LatticeVector]:
    """The complement components of ``K_X`` as vectors in each summand's H_2."""
    K = result.manifold.canonical
    if K is None:
        raise CanonicalClassError(result.canonical_note or "no canonical class")
    sp = result.splitting
    out = {}
    offset = 2
    for key, split, labels in (
        ("left", sp.left_split, sp.p_left),
        ("right", sp.right_split, sp.p_right),
    ):
        coords = K.coords[offset:offset + len(labels)]
        v = split.ambient.zero()
        for c, p in zip(coords, split.complement_basis):
            v = v + c * p
        out[key] = v
        offset += len(labels)
    return out


def form_isomorphism_check(result: FibreSumResult, reference: Manifold4) -> CheckResult:
    """Test that ``Sigma -> Sigma_X, B -> B_X`` plus the identity on ``P`` preserves the form."""
    name = f"form_isomorphism:{reference.label}"
    X = result.manifold
    if X.b2 != reference.b2:
        return CheckResult(name, "fail", f"rank mismatch {X.b2} vs {reference.b2}")
    if not result.rim_tori.is_trivial:
        return CheckResult(name, "fail", "rim tori present")
    spec, sp = result.spec, result.splitting
    if reference is spec.left.manifold:
        side, split, p_labels = spec.left, sp.left_split, sp.p_left
    elif reference is spec.right.manifold:
        side, split, p_labels = spec.right, sp.right_split, sp.p_right
    else:
        return CheckResult(name, "fail", f"{reference.label} is not a summand")
    if len(p_labels) != X.b2 - 2:
        return CheckResult(name, "fail", "other summand contributes a complement")
    ref_basis = list(split.marked) + list(split.complement_basis)
    ref_gram = gram_of(ref_basis)
    x_basis = [X.h2.basis_vector(lab) for lab in (sp.sigma, sp.b) + p_labels]
    x_gram = gram_of(x_basis)
    if abs(split.change_of_basis().det()) != 1:
        return CheckResult(name, "fail", "reference basis not unimodular")
    return check(name, ref_gram == x_gram, f"via {side.surface}, {side.dual}")
