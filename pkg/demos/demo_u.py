"""Build U from Y_K and Q step by step and inspect its canonical class."""

from gfsum.fibresum import GluingSide, GluingSpec, canonical_p_parts, fibre_sum, form_isomorphism_check
from gfsum.manifold import blow_up, make_s1_times_mk, symplectic_resolve
from gfsum.pipeline import h1_map_from_expressions

# Y_K: knot surgery on S^1 x M_K, written as a fibre sum of two tori.
A = make_s1_times_mk("A")
yk = fibre_sum(
    GluingSpec(GluingSide(A, "S", "F"), GluingSide(A, "F", "S")),
    "YK", sigma_label="T_YK", b_label="Sigma", h1_labels=("y", "d"),
).manifold
print("Y_K: H1 =", yk.h1, " K =", yk.canonical)

# Q: resolve S + F to a genus-2 surface of square 2, then blow up twice on it.
B = symplectic_resolve(make_s1_times_mk("B", ("z", "h")), "S", "F", "Sigma'")
Q = blow_up(B, 2, on_surface="Sigma'").relabel("Q")
print("Q: Sigma' =", Q.surface("Sigma'").h2_class, " square", Q.surface("Sigma'").self_intersection)

# Glue with the chosen identifications of H1 of the genus-2 surface.
spec = GluingSpec(
    GluingSide(yk, "Sigma", "T_YK", h1_map_from_expressions(["y", "d", "0", "0"], yk.h1_labels)),
    GluingSide(Q, "Sigma'", "S", h1_map_from_expressions(["0", "0", "z", "h"], Q.h1_labels)),
)
res = fibre_sum(spec, "U", sigma_label="Sigma_U", b_label="B_U")
U = res.manifold
print("U: H1 =", U.h1, " b2 =", U.b2, " signature =", U.signature)
print("K_U =", U.canonical, " K^2 =", U.canonical.square)
print("complement part from Q:", canonical_p_parts(res)["right"])
print(form_isomorphism_check(res, Q).name, form_isomorphism_check(res, Q).status)
for c in res.checks:
    print(f"  {c.name}: {c}")
