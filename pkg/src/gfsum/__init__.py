"""Exact invariants of generalized fibre sums of 4-manifolds.

Submodules:

* :mod:`gfsum.intalg`: integer matrices, Smith normal form, cokernels
* :mod:`gfsum.lattice`: intersection lattices, signatures, splittings
* :mod:`gfsum.manifold`: 4-manifold records, building blocks, blow-ups
* :mod:`gfsum.fibresum`: the fibre sum engine and canonical classes
* :mod:`gfsum.pipeline`: JSON construction pipelines and reports
"""

from .intalg import FinAbGroup, IntMatrix, SmithDecomposition, cokernel, smith_normal_form, solve_integral
from .lattice import Lattice, LatticeVector, is_characteristic, pair, parity, signature, split_unimodular
from .manifold import (
    Manifold4,
    SurfaceEmbedding,
    adjunction_check,
    blow_up,
    homology_model,
    make_s1_times_mk,
    make_t4,
    make_z_block,
    symplectic_resolve,
)
from .fibresum import (
    CanonicalClassError,
    FibreSumError,
    GluingSide,
    GluingSpec,
    betti_and_signature,
    canonical_class,
    fibre_sum,
    first_homology,
    form_isomorphism_check,
    rim_tori_group,
    sew_dual_surfaces,
)
from .pipeline import builtin_scenario, emit_report, parse_pipeline, run_pipeline

__version__ = "0.1.0"
