import pytest

from gfsum.intalg import FinAbGroup, IntMatrix
from gfsum.lattice import Lattice, pair
from gfsum.manifold import (
    BLOCKS,
    Manifold4,
    ManifoldError,
    adjunction_check,
    blow_up,
    homology_model,
    make_s1_times_mk,
    make_t4,
    make_z_block,
    symplectic_resolve,
)


def no_failures(M):
    return [c for c in M.consistency_checks() if c.status == "fail"]


def test_s1_times_mk():
    M = make_s1_times_mk()
    assert M.h1 == FinAbGroup(2)
    assert M.h1_labels == ("x", "b")
    assert M.h2.gram.to_rows() == [[0, 1], [1, 0]]
    assert M.canonical.is_zero()
    assert (M.euler, M.signature) == (0, 0)
    assert M.surface("F").h1_map.is_zero()
    assert M.surface("S").h1_map == IntMatrix.identity(2)
    assert M.symplectic


def test_t4():
    M = make_t4()
    assert M.b1 == 4 and M.b2 == 6
    assert M.canonical.is_zero()
    T1, T2 = M.surface("T1").h2_class, M.surface("T2").h2_class
    assert pair(T1, T2) == 1
    assert M.signature == 0
    assert M.surface("T2").h1_map.columns() == [(0, 0, 1, 0), (0, 0, 0, 1)]


def test_z_block():
    Z = make_z_block()
    s = Z.surface("Sigma2'")
    assert s.genus == 2 and s.self_intersection == 0
    assert s.h1_map.columns() == [(1, 0), (0, 1), (-1, 0), (0, -1)]
    assert (Z.euler, Z.signature) == (4, -4)
    assert Z.b2 == 6
    assert Z.canonical is None
    assert pair(s.h2_class, Z.surface("T").h2_class) == 1


@pytest.mark.parametrize("kind", sorted(BLOCKS))
def test_blocks_self_consistent(kind):
    assert no_failures(BLOCKS[kind]()) == []


def test_invalid_euler_rejected():
    L = Lattice.from_gram(("a", "b"), [[0, 1], [1, 0]])
    with pytest.raises(ManifoldError, match="euler"):
        Manifold4("bad", 3, 0, FinAbGroup(0), (), L)


def test_invalid_signature_rejected():
    L = Lattice.from_gram(("a", "b"), [[0, 1], [1, 0]])
    with pytest.raises(ManifoldError, match="signature"):
        Manifold4("bad", 4, 1, FinAbGroup(0), (), L)


def test_blow_up_zero_is_identity():
    M = make_s1_times_mk()
    assert blow_up(M, 0) is M


def test_blow_up_t4_canonical():
    R = blow_up(make_t4(), 2)
    assert R.canonical.as_dict() == {"E1": 1, "E2": 1}
    assert (R.euler, R.signature) == (2, -2)


def test_blow_up_on_resolved_surface():
    M = symplectic_resolve(make_s1_times_mk(), "S", "F", "Sigma'")
    assert M.surface("Sigma'").self_intersection == 2
    Q = blow_up(M, 2, on_surface="Sigma'")
    s = Q.surface("Sigma'")
    assert s.self_intersection == 0
    assert s.genus == 2


def test_blow_up_additive():
    M = symplectic_resolve(make_s1_times_mk(), "S", "F", "Sigma'")
    once_twice = blow_up(blow_up(M, 1, "Sigma'"), 1, "Sigma'")
    both = blow_up(M, 2, "Sigma'")
    assert once_twice == both


def test_blow_up_unknown_surface():
    with pytest.raises(ManifoldError):
        blow_up(make_t4(), 1, on_surface="nope")


def test_resolve_s_f():
    M = symplectic_resolve(make_s1_times_mk(), "S", "F", "Sigma'")
    s = M.surface("Sigma'")
    assert s.genus == 2
    assert s.h2_class == M.surface("S").h2_class + M.surface("F").h2_class
    assert s.self_intersection == 0 + 0 + 2 * 1
    assert s.h1_map.columns() == [(1, 0), (0, 1), (0, 0), (0, 0)]


def test_resolve_t1_t2():
    M = symplectic_resolve(make_t4(), "T1", "T2", "Sigma''")
    assert M.surface("Sigma''").genus == 2
    assert M.surface("Sigma''").h1_map == IntMatrix.identity(4)


def test_resolve_two_points_gives_genus_3():
    L = Lattice.from_gram(("A", "B"), [[0, 2], [2, 0]])
    from gfsum.manifold import SurfaceEmbedding

    M = Manifold4(
        "toy", 4, 0, FinAbGroup(0), (), L, None, True,
        {
            "A": SurfaceEmbedding("A", 1, L.basis_vector("A"), IntMatrix.zeros(0, 2)),
            "B": SurfaceEmbedding("B", 1, L.basis_vector("B"), IntMatrix.zeros(0, 2)),
        },
    )
    s = symplectic_resolve(M, "A", "B", "C").surface("C")
    assert s.genus == 3
    assert s.self_intersection == 0 + 0 + 2 * 2


def test_resolve_needs_positive_intersection():
    with pytest.raises(ManifoldError):
        symplectic_resolve(make_t4(), "T1", "T1", "X")


def test_adjunction_examples():
    M = make_s1_times_mk()
    assert adjunction_check(M, "S").passed
    Q = blow_up(symplectic_resolve(M, "S", "F", "Sigma'"), 2, "Sigma'")
    e1 = adjunction_check(Q, "E1")
    assert e1.passed and "2g-2=-2" in e1.detail
    sig = adjunction_check(Q, "Sigma'")
    assert sig.passed and "2g-2=2" in sig.detail


def test_adjunction_needs_canonical():
    with pytest.raises(ManifoldError):
        adjunction_check(make_z_block(), "Sigma2'")


def test_homology_model_raw_invariants():
    text = homology_model(make_s1_times_mk())
    assert "no standard model" in text
    assert "H1 = Z^2" in text
