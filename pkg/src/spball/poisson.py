"""Conjugate-gradient Poisson solver for the 7-point Dirichlet stencil.

The stencil is symmetric positive definite, so plain CG without a
preconditioner is adequate at desk scale. The recurrence residual is
re-checked against a recomputed true residual before a solve is accepted;
if drift is detected the iteration restarts from the current iterate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AssumptionViolationError, IterativeSolverError
from .grid import DomainGrid, ScalarField, neg_laplacian_array


@dataclass(frozen=True)
class LinearSolveOptions:
    """Tolerances for the linear solve.

    rel_tol is relative to the L2 norm of the right-hand side; max_iters of
    None resolves to 10 n^3 for the grid being solved.
    """

    rel_tol: float = 1e-10
    max_iters: int | None = None

    def __post_init__(self):
        if not 0.0 < self.rel_tol < 1.0:
            raise ValueError(f"rel_tol must lie in (0, 1), got {self.rel_tol}")
        if self.max_iters is not None and self.max_iters < 1:
            raise ValueError(f"max_iters must be positive, got {self.max_iters}")

    def resolved_max_iters(self, grid: DomainGrid) -> int:
        if self.max_iters is None:
            return 10 * grid.n**3
        return self.max_iters


@dataclass(frozen=True)
class PoissonSolution:
    """Solution field plus iteration count and final true residual (discrete L2)."""

    field: ScalarField
    iterations: int
    final_residual: float


def solve_dirichlet_poisson(
    f: ScalarField, opts: LinearSolveOptions | None = None
) -> PoissonSolution:
    """Solve -Delta_h w = f with zero Dirichlet boundary by conjugate gradients.

    A zero right-hand side returns the zero field without iterating. On
    failure to converge within the budget, raises IterativeSolverError with
    the residual history attached.
    """
    if opts is None:
        opts = LinearSolveOptions()
    grid = f.grid
    h = grid.h
    hw = h**1.5  # converts Euclidean vector norms to discrete-L2 norms

    b = f.values
    b_norm = float(np.linalg.norm(b))
    if b_norm == 0.0:
        return PoissonSolution(ScalarField.zeros(grid), 0, 0.0)

    target = opts.rel_tol * b_norm
    budget = opts.resolved_max_iters(grid)

    x = np.zeros_like(b)
    history: list[float] = []
    iterations = 0

    while True:
        # true residual; also the restart point if the recurrence drifted
        r = b - neg_laplacian_array(x, h)
        r_norm = float(np.linalg.norm(r))
        history.append(r_norm * hw)
        if r_norm <= target:
            return PoissonSolution(ScalarField(grid, x), iterations, r_norm * hw)
        if iterations >= budget:
            raise IterativeSolverError(
                f"no convergence in {iterations} iterations "
                f"(residual {r_norm * hw:.3e}, target {target * hw:.3e})",
                history,
            )

        p = r.copy()
        rs = r_norm * r_norm
        while iterations < budget:
            ap = neg_laplacian_array(p, h)
            alpha = rs / float(np.sum(p * ap))
            x = x + alpha * p
            r = r - alpha * ap
            iterations += 1
            rs_next = float(np.sum(r * r))
            history.append(np.sqrt(rs_next) * hw)
            if np.sqrt(rs_next) <= target:
                break
            p = r + (rs_next / rs) * p
            rs = rs_next
        # outer loop re-checks with a recomputed residual


def compute_phi(
    u: ScalarField, coupling: ScalarField, opts: LinearSolveOptions | None = None
) -> ScalarField:
    """Potential generated by u: solve -Delta_h phi = coupling * u^2.

    The coupling field must be nonnegative; that sign condition is what
    makes the potential nonnegative and the energy term well behaved.
    """
    if u.grid != coupling.grid:
        # reuse the field arithmetic check for a consistent error type
        u._check_same_grid(coupling)
    if float(coupling.values.min()) < 0.0:
        raise AssumptionViolationError("coupling field must be nonnegative")
    rhs = ScalarField(u.grid, coupling.values * u.values**2)
    return solve_dirichlet_poisson(rhs, opts).field
