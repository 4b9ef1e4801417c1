"""Smith normal form and cokernels on small matrices."""

from gfsum.intalg import IntMatrix, cokernel, smith_normal_form, solve_integral

A = IntMatrix.from_rows([[2, 4, 4], [-6, 6, 12], [10, -4, -16]])
snf = smith_normal_form(A)
print("A =", A.to_rows())
print("invariant factors:", snf.invariant_factors)
print("U A V == D:", snf.U @ A @ snf.V == snf.D)

# The cokernel Z^3 / im(A) reads off the diagonal.
print("coker A =", cokernel(A))

# Integer solvability differs from rational solvability.
print("solve A x = (2, -6, 10):", solve_integral(A, (2, -6, 10)))
print("solve A x = (1, 0, 0):", solve_integral(A, (1, 0, 0)))
