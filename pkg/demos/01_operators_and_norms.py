"""Tour of the grid layer: fields, the discrete Laplacian, and the norms.

Everything downstream is built from these pieces, so this script checks the
two identities the rest of the package leans on: summation by parts (the
discrete Dirichlet energy equals the Laplacian pairing) and the exact
eigenpair of the operator on the unit cube.
"""

import numpy as np

from spball import (
    ScalarField,
    apply_laplacian,
    build_grid,
    first_eigenpair,
    grad_l2_norm,
    h1_inner,
    l2_inner,
    lp_norm,
    w2n_norm,
)

grid = build_grid(12)
print(f"grid: n={grid.n}, h={grid.h:.4f}, interior nodes={grid.interior_count}")

x, y, z = grid.meshgrid()
u = ScalarField(grid, np.sin(np.pi * x) * y * (1.0 - y) * z * (1.0 - z))

print(f"lp_norm(u, 2)   = {lp_norm(u, 2):.6e}")
print(f"lp_norm(u, 3)   = {lp_norm(u, 3):.6e}")
print(f"grad_l2_norm(u) = {grad_l2_norm(u):.6e}")
print(f"w2n_norm(u)     = {w2n_norm(u):.6e}")

# summation by parts: ||grad u||^2 == <-lap u, u> exactly in floats
lhs = grad_l2_norm(u) ** 2
rhs = l2_inner(apply_laplacian(u), u)
print(f"summation by parts: |lhs - rhs| = {abs(lhs - rhs):.3e}")

# the sampled first eigenfunction is an exact discrete eigenpair
e1, lam = first_eigenpair(grid)
residual = apply_laplacian(e1) - lam * e1
print(f"first eigenvalue lambda_h = {lam:.8f}  (3*pi^2 = {3 * np.pi**2:.8f})")
print(f"eigen residual (sup norm) = {np.abs(residual.values).max():.3e}")

# h1_inner is the bilinear form behind grad_l2_norm
print(f"h1_inner(u, u) - grad^2   = {h1_inner(u, u) - lhs:.3e}")
