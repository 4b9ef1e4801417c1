"""Seeded randomized consistency suites.

Each suite draws its cases from a fixed seed, so reruns are identical.
They are shared by ``check-all`` and the test suite.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .fibresum import GluingSide, GluingSpec, fibre_sum, h1_gluing_matrix
from .intalg import (
    FinAbGroup,
    IntMatrix,
    block_diagonal,
    cokernel,
    determinant,
    smith_normal_form,
    solve_integral,
)
from .lattice import Lattice, form_signature, gram_of, pair, signature, split_unimodular
from .manifold import Manifold4, SurfaceEmbedding


@dataclass
class SuiteResult:
    name: str
    trials: int = 0
    failures: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        return {
            "trials": self.trials,
            "failures": len(self.failures),
            "first_failure": self.failures[0] if self.failures else None,
            "status": "pass" if self.passed else "fail",
        }


def random_matrix(rng: random.Random, rows: int, cols: int, lo: int = -9, hi: int = 9) -> IntMatrix:
    return IntMatrix(rows, cols, tuple(rng.randint(lo, hi) for _ in range(rows * cols)))


def random_unimodular(rng: random.Random, n: int, steps: int = 12) -> IntMatrix:
    """Product of random elementary matrices (row additions, swaps, sign flips)."""
    M = IntMatrix.identity(n).to_rows()
    if n == 0:
        return IntMatrix.identity(0)
    for _ in range(steps):
        kind = rng.random()
        i = rng.randrange(n)
        if kind < 0.7 and n > 1:
            j = rng.choice([k for k in range(n) if k != i])
            q = rng.randint(-2, 2)
            M[i] = [a + q * b for a, b in zip(M[i], M[j])]
        elif kind < 0.85 and n > 1:
            j = rng.randrange(n)
            M[i], M[j] = M[j], M[i]
        else:
            M[i] = [-a for a in M[i]]
    return IntMatrix.from_rows(M, cols=n)


def check_smith(A: IntMatrix) -> str | None:
    """Return a failure description, or ``None`` if the SNF invariants hold."""
    snf = smith_normal_form(A)
    if snf.U @ A @ snf.V != snf.D:
        return f"U A V != D for {A!r}"
    if abs(determinant(snf.U)) != 1 or abs(determinant(snf.V)) != 1:
        return f"non-unimodular transform for {A!r}"
    D = snf.D
    if any(D[i, j] for i in range(D.rows) for j in range(D.cols) if i != j):
        return f"off-diagonal entry for {A!r}"
    diag = snf.diagonal
    if any(d < 0 for d in diag):
        return f"negative diagonal for {A!r}"
    nz = [d for d in diag if d]
    if diag[: len(nz)] != tuple(nz):
        return f"zeros before nonzeros on diagonal for {A!r}"
    if any(b % a for a, b in zip(nz, nz[1:])):
        return f"divisor chain broken for {A!r}: {nz}"
    return None


def snf_suite(trials: int = 500, seed: int = 20081) -> SuiteResult:
    rng = random.Random(seed)
    out = SuiteResult("smith_normal_form")
    for t in range(trials):
        A = random_matrix(rng, rng.randint(0, 8), rng.randint(0, 8))
        out.trials += 1
        msg = check_smith(A)
        if msg:
            out.failures.append(f"trial {t}: {msg}")
    return out


def cokernel_invariance_suite(trials: int = 100, seed: int = 20082) -> SuiteResult:
    rng = random.Random(seed)
    out = SuiteResult("cokernel_unimodular_invariance")
    for t in range(trials):
        m, n = rng.randint(1, 6), rng.randint(1, 6)
        A = random_matrix(rng, m, n, -5, 5)
        P, Q = random_unimodular(rng, m), random_unimodular(rng, n)
        out.trials += 1
        if cokernel(P @ A @ Q) != cokernel(A):
            out.failures.append(f"trial {t}: cokernel changed for {A!r}")
    return out


def solve_suite(trials: int = 200, seed: int = 20083) -> SuiteResult:
    rng = random.Random(seed)
    out = SuiteResult("solve_integral")
    for t in range(trials):
        m, n = rng.randint(1, 6), rng.randint(1, 6)
        A = random_matrix(rng, m, n, -4, 4)
        if rng.random() < 0.5:
            b = A @ [rng.randint(-3, 3) for _ in range(n)]
        else:
            b = tuple(rng.randint(-6, 6) for _ in range(m))
        out.trials += 1
        x = solve_integral(A, b)
        snf = smith_normal_form(A)
        c = snf.U @ b
        solvable = all(
            (c[i] % snf.D[i, i] == 0) if i < n and snf.D[i, i] else c[i] == 0 for i in range(m)
        )
        if solvable != (x is not None) or (x is not None and A @ x != tuple(b)):
            out.failures.append(f"trial {t}: solve_integral wrong for {A!r}, b={b}")
    return out


def random_symmetric(rng: random.Random, n: int, lo: int = -4, hi: int = 4) -> IntMatrix:
    rows = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            rows[i][j] = rows[j][i] = rng.randint(lo, hi)
    return IntMatrix.from_rows(rows, cols=n)


def signature_congruence_suite(trials: int = 100, seed: int = 20084) -> SuiteResult:
    rng = random.Random(seed)
    out = SuiteResult("signature_congruence")
    for t in range(trials):
        n = rng.randint(0, 6)
        G = random_symmetric(rng, n)
        P = random_unimodular(rng, n)
        out.trials += 1
        if form_signature(P.T @ G @ P) != form_signature(G):
            out.failures.append(f"trial {t}: signature not invariant for {G!r}")
    return out


def split_suite(lattices_and_pairs) -> SuiteResult:
    """Orthogonality, unimodularity and signature additivity on given splits."""
    out = SuiteResult("split_unimodular")
    for tag, L, sigma, b in lattices_and_pairs:
        out.trials += 1
        sp = split_unimodular(L, sigma, b)
        if any(pair(p, m) for p in sp.complement_basis for m in sp.marked):
            out.failures.append(f"{tag}: complement not orthogonal")
        if abs(determinant(sp.change_of_basis())) != 1:
            out.failures.append(f"{tag}: change of basis not unimodular")
        s_all = signature(L)
        s_m = form_signature(gram_of(list(sp.marked)))
        s_p = form_signature(sp.complement.gram)
        if (s_all.b_plus, s_all.b_minus) != (s_m.b_plus + s_p.b_plus, s_m.b_minus + s_p.b_minus):
            out.failures.append(f"{tag}: signature not additive")
    return out


def random_block(rng: random.Random, index: int, b1: int, genus: int) -> Manifold4:
    """A synthetic manifold record with a square-0 genus-``genus`` surface and a dual."""
    extra = [rng.choice((1, -1)) for _ in range(rng.randint(0, 2))]
    labels = ("Sg", "Bd") + tuple(f"e{i + 1}" for i in range(len(extra)))
    gram = block_diagonal(
        [IntMatrix.from_rows([[0, 1], [1, rng.randint(-2, 2)]]), IntMatrix.diagonal(extra)]
    )
    L = Lattice(labels, gram)
    sig = form_signature(gram).value
    bg = rng.randint(0, 2)
    surfaces = {
        "Sg": SurfaceEmbedding("Sg", genus, L.basis_vector("Sg"), random_matrix(rng, b1, 2 * genus, -2, 2), False),
        "Bd": SurfaceEmbedding("Bd", bg, L.basis_vector("Bd"), random_matrix(rng, b1, 2 * bg, -2, 2), False),
    }
    return Manifold4(
        f"M{index}", 2 - 2 * b1 + L.rank, sig, FinAbGroup(b1),
        tuple(f"g{i + 1}" for i in range(b1)), L, None, False, surfaces,
    )


def rank_nullity_suite(trials: int = 100, seed: int = 20085) -> SuiteResult:
    rng = random.Random(seed)
    out = SuiteResult("rank_nullity")
    for t in range(trials):
        g = rng.randint(1, 3)
        M = random_block(rng, 2 * t, rng.randint(0, 6), g)
        N = random_block(rng, 2 * t + 1, rng.randint(0, 6), g)
        spec = GluingSpec(GluingSide(M, "Sg", "Bd"), GluingSide(N, "Sg", "Bd"))
        out.trials += 1
        A = h1_gluing_matrix(spec)
        rk = smith_normal_form(A).rank
        res = fibre_sum(spec, f"X{t}")
        if res.manifold.h1.free_rank != M.b1 + N.b1 - rk:
            out.failures.append(f"trial {t}: H1 rank mismatch")
        if res.rim_tori.free_rank != 2 * g - rk:
            out.failures.append(f"trial {t}: rim tori rank mismatch")
        bad = [c.name for c in res.checks if c.status == "fail"]
        if bad:
            out.failures.append(f"trial {t}: failed checks {bad}")
    return out

