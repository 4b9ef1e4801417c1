import random

import numpy as np
import pytest

from gfsum import suites
from gfsum.intalg import IntMatrix, determinant, solve_integral
from gfsum.lattice import (
    Lattice,
    LatticeError,
    form_signature,
    gram_of,
    is_characteristic,
    pair,
    parity,
    signature,
    split_unimodular,
)
from gfsum.manifold import blow_up, make_s1_times_mk, make_t4, symplectic_resolve

HYP = Lattice.from_gram(("a", "b"), [[0, 1], [1, 0]])


def eig_signature(G: IntMatrix):
    """Float eigenvalue count; fine for small integer matrices."""
    if G.rows == 0:
        return (0, 0, 0)
    w = np.linalg.eigvalsh(np.array(G.to_rows(), dtype=float))
    tol = 1e-9 * max(1.0, float(np.abs(w).max()))
    return (int((w > tol).sum()), int((w < -tol).sum()), int((np.abs(w) <= tol).sum()))


@pytest.fixture
def q_block():
    M = make_s1_times_mk()
    M = symplectic_resolve(M, "S", "F", "Sigma'")
    return blow_up(M, 2, on_surface="Sigma'")


@pytest.fixture
def r_block():
    M = symplectic_resolve(make_t4(), "T1", "T2", "Sigma''")
    return blow_up(M, 2, on_surface="Sigma''")


def test_pair_examples(q_block):
    L = make_s1_times_mk().h2
    S, F = L.basis_vector("S"), L.basis_vector("F")
    assert pair(S, F) == 1
    assert pair(F, S) == 1
    assert pair(S, S) == 0
    E1 = q_block.h2.basis_vector("E1")
    assert pair(E1, E1) == -1


def test_pair_rejects_mixed_lattices():
    other = Lattice.from_gram(("c",), [[1]])
    with pytest.raises(LatticeError):
        pair(HYP.basis_vector("a"), other.basis_vector("c"))


def test_lattice_rejects_asymmetric():
    with pytest.raises(LatticeError):
        Lattice.from_gram(("a", "b"), [[0, 1], [2, 0]])


def test_signature_examples(q_block):
    assert tuple(signature(HYP)) == (1, 1, 0)
    assert tuple(signature(Lattice.from_gram(("x", "y"), [[-1, 0], [0, -1]]))) == (0, 2, 0)
    assert tuple(signature(q_block.h2)) == (1, 3, 0)


def test_signature_degenerate():
    G = IntMatrix.from_rows([[0, 0, 0], [0, 0, 2], [0, 2, 0]])
    assert tuple(form_signature(G)) == (1, 1, 1)


def test_signature_matches_eigen_oracle():
    rng = random.Random(5)
    for _ in range(200):
        G = suites.random_symmetric(rng, rng.randint(0, 6))
        assert tuple(form_signature(G)) == eig_signature(G)


def test_signature_congruence_suite():
    res = suites.signature_congruence_suite(100)
    assert res.trials == 100 and res.failures == []


def test_split_hyperbolic_plane():
    sp = split_unimodular(HYP, HYP.basis_vector("a"), HYP.basis_vector("b"))
    assert sp.complement_rank == 0


def complement_by_projection(L, sigma, b):
    """Independent route: project each basis vector off the unimodular pair.

    Solves the 2x2 unimodular system for the marked coefficients and checks
    that the residual is orthogonal to both marked vectors.
    """
    g = gram_of([sigma, b])
    residuals = []
    for e in L.basis():
        coef = solve_integral(g, (pair(sigma, e), pair(b, e)))
        assert coef is not None
        r = e - coef[0] * sigma - coef[1] * b
        assert pair(r, sigma) == 0 and pair(r, b) == 0
        residuals.append(r)
    return residuals


def test_split_q(q_block):
    L = q_block.h2
    sigma = q_block.surface("Sigma'").h2_class
    S = L.basis_vector("S")
    assert sigma == L.combination({"S": 1, "F": 1, "E1": -1, "E2": -1})
    sp = split_unimodular(L, sigma, S)
    assert sp.complement_rank == 2
    assert abs(determinant(sp.change_of_basis())) == 1
    for p in sp.complement_basis:
        assert pair(p, sigma) == 0 and pair(p, S) == 0
    # Every projected basis vector must lie in the computed complement.
    basis = IntMatrix.from_columns([p.coords for p in sp.complement_basis], rows=L.rank)
    for r in complement_by_projection(L, sigma, S):
        assert solve_integral(basis, r.coords) is not None
    kbar = L.combination({"E1": 1, "E2": 1, "S": -2})
    assert solve_integral(basis, kbar.coords) is not None


def test_split_r(r_block):
    L = r_block.h2
    sigma = r_block.surface("Sigma''").h2_class
    sp = split_unimodular(L, sigma, L.basis_vector("T1"))
    assert L.rank == 8
    assert sp.complement_rank == 6
    assert abs(determinant(sp.change_of_basis())) == 1
    basis = IntMatrix.from_columns([p.coords for p in sp.complement_basis], rows=L.rank)
    for r in complement_by_projection(L, sigma, L.basis_vector("T1")):
        assert solve_integral(basis, r.coords) is not None


def test_split_rejects_non_unimodular():
    L = Lattice.from_gram(("a", "b"), [[0, 2], [2, 0]])
    with pytest.raises(LatticeError, match="determinant -4"):
        split_unimodular(L, L.basis_vector("a"), L.basis_vector("b"))


def test_split_signature_additive(q_block, r_block):
    cases = [
        ("Q", q_block.h2, q_block.surface("Sigma'").h2_class, q_block.h2.basis_vector("F")),
        ("R", r_block.h2, r_block.surface("Sigma''").h2_class, r_block.h2.basis_vector("T2")),
    ]
    assert suites.split_suite(cases).failures == []


def test_characteristic_examples(q_block):
    assert is_characteristic(HYP.zero())
    assert not is_characteristic(Lattice.from_gram(("e",), [[-1]]).zero())
    assert is_characteristic(q_block.canonical)


def test_characteristic_invariant_under_basis_change():
    rng = random.Random(9)
    for _ in range(100):
        n = rng.randint(1, 5)
        G = suites.random_symmetric(rng, n)
        L = Lattice(tuple(f"v{i}" for i in range(n)), G)
        K = L.vector([rng.randint(-3, 3) for _ in range(n)])
        P = suites.random_unimodular(rng, n)
        # New basis = columns of P; K's new coordinates solve P x = K.
        L2 = Lattice(L.basis_labels, P.T @ G @ P)
        x = solve_integral(P, K.coords)
        assert is_characteristic(K) == is_characteristic(L2.vector(x))


def test_parity_examples(q_block):
    assert parity(HYP) == "even"
    assert parity(Lattice.from_gram(("e",), [[1]])) == "odd"
    assert parity(q_block.h2) == "odd"
    assert q_block.h2.basis_vector("E1").square % 2 == 1
