"""Poisson solver tests: closed-form eigenfunction inversion, a dense
direct-solve oracle, manufactured-solution convergence, and the potential's
structural properties (sign, scaling, quadratic bound)."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from spball import (
    AssumptionViolationError,
    GridMismatchError,
    IterativeSolverError,
    ScalarField,
    build_grid,
    first_eigenpair,
    grad_l2_norm,
    lp_norm,
)
from spball.poisson import LinearSolveOptions, PoissonSolution, compute_phi, solve_dirichlet_poisson

from conftest import dense_neg_laplacian, random_field


def test_options_validation():
    with pytest.raises(ValueError):
        LinearSolveOptions(rel_tol=0.0)
    with pytest.raises(ValueError):
        LinearSolveOptions(rel_tol=1.5)
    with pytest.raises(ValueError):
        LinearSolveOptions(max_iters=0)
    assert LinearSolveOptions().resolved_max_iters(build_grid(8)) == 10 * 8**3
    assert LinearSolveOptions(max_iters=7).resolved_max_iters(build_grid(8)) == 7


def test_zero_rhs_returns_zero_without_iterating():
    g = build_grid(6)
    sol = solve_dirichlet_poisson(ScalarField.zeros(g))
    assert sol.iterations == 0
    assert sol.final_residual == 0.0
    assert np.all(sol.field.values == 0.0)


def test_eigenfunction_inversion():
    # f = lambda_h e1 has the exact discrete solution e1
    g = build_grid(8)
    e1, lam = first_eigenpair(g)
    sol = solve_dirichlet_poisson(ScalarField(g, lam * e1.values))
    err = lp_norm(sol.field - e1, 2) / lp_norm(e1, 2)
    assert err <= 1e-9
    assert sol.iterations >= 1


def test_matches_dense_oracle(rng):
    g = build_grid(4)
    a = dense_neg_laplacian(4)
    f = random_field(g, rng)
    expected = np.linalg.solve(a, f.values.ravel()).reshape(g.shape)
    sol = solve_dirichlet_poisson(f, LinearSolveOptions(rel_tol=1e-12))
    assert_allclose(sol.field.values, expected, rtol=0, atol=1e-11 * np.abs(expected).max())


def test_solution_linearity(rng):
    g = build_grid(5)
    opts = LinearSolveOptions(rel_tol=1e-12)
    f1, f2 = random_field(g, rng), random_field(g, rng)
    combo = ScalarField(g, 2.0 * f1.values - 3.0 * f2.values)
    w_combo = solve_dirichlet_poisson(combo, opts).field
    w_sep = (
        2.0 * solve_dirichlet_poisson(f1, opts).field.values
        - 3.0 * solve_dirichlet_poisson(f2, opts).field.values
    )
    assert_allclose(w_combo.values, w_sep, atol=1e-10 * np.abs(w_sep).max())


def test_manufactured_convergence_is_second_order():
    # forcing 3 pi^2 sin(pi x) sin(pi y) sin(pi z); continuum solution is the
    # product of sines, so the discrete error is governed by the eigenvalue gap
    errs = {}
    for n in (8, 16):
        g = build_grid(n)
        star = first_eigenpair(g)[0]
        f = ScalarField(g, 3.0 * np.pi**2 * star.values)
        w = solve_dirichlet_poisson(f).field
        errs[n] = lp_norm(w - star, 2) / lp_norm(star, 2)
    ratio = errs[8] / errs[16]
    assert 3.5 <= ratio <= 4.5


def test_residual_meets_target(rng):
    g = build_grid(6)
    f = random_field(g, rng)
    opts = LinearSolveOptions(rel_tol=1e-10)
    sol = solve_dirichlet_poisson(f, opts)
    assert sol.final_residual <= opts.rel_tol * lp_norm(f, 2) * 1.0000001


def test_nonconvergence_raises_with_history(rng):
    g = build_grid(6)
    f = random_field(g, rng)
    with pytest.raises(IterativeSolverError) as excinfo:
        solve_dirichlet_poisson(f, LinearSolveOptions(max_iters=2))
    hist = excinfo.value.residual_history
    assert len(hist) >= 2
    assert all(r >= 0.0 for r in hist)


# ---------------------------------------------------------------- potential


def test_compute_phi_zero_coupling(rng):
    g = build_grid(5)
    u = random_field(g, rng)
    phi = compute_phi(u, ScalarField.zeros(g))
    assert np.all(phi.values == 0.0)


def test_compute_phi_requires_nonnegative_coupling(rng):
    g = build_grid(4)
    u = random_field(g, rng)
    bad = ScalarField(g, -np.ones(g.shape))
    with pytest.raises(AssumptionViolationError):
        compute_phi(u, bad)


def test_compute_phi_grid_mismatch(rng):
    u = random_field(build_grid(4), rng)
    coupling = ScalarField(build_grid(5), np.ones((4, 4, 4)))
    with pytest.raises(GridMismatchError):
        compute_phi(u, coupling)


def test_compute_phi_dense_oracle(rng):
    g = build_grid(4)
    a = dense_neg_laplacian(4)
    u = random_field(g, rng)
    coupling = ScalarField(g, np.ones(g.shape))
    expected = np.linalg.solve(a, (u.values**2).ravel()).reshape(g.shape)
    phi = compute_phi(u, coupling, LinearSolveOptions(rel_tol=1e-12))
    assert_allclose(phi.values, expected, atol=1e-12 * np.abs(expected).max())


def test_compute_phi_nonnegative(rng):
    # rhs >= 0 and the stencil satisfies a discrete maximum principle, so the
    # potential is nonnegative up to solver tolerance
    g = build_grid(8)
    coupling = ScalarField(g, np.ones(g.shape))
    for _ in range(5):
        u = random_field(g, rng)
        phi = compute_phi(u, coupling)
        floor = -1e-8 * max(1.0, float(np.abs(phi.values).max()))
        assert float(phi.values.min()) >= floor


def test_compute_phi_quadratic_scaling(rng):
    # phi(t u) = t^2 phi(u); solves are deterministic so only solver noise enters
    g = build_grid(6)
    coupling = ScalarField(g, np.ones(g.shape))
    u = random_field(g, rng)
    phi1 = compute_phi(u, coupling)
    phi2 = compute_phi(2.0 * u, coupling)
    rel = lp_norm(phi2 - 4.0 * phi1, 2) / lp_norm(phi1, 2)
    assert rel <= 1e-9


def test_compute_phi_gradient_bound_stable_constant(rng):
    # the ratio ||grad phi|| / ||grad u||^2 stays bounded across samples
    g = build_grid(6)
    coupling = ScalarField(g, np.ones(g.shape))
    ratios = []
    for _ in range(8):
        u = random_field(g, rng)
        phi = compute_phi(u, coupling)
        ratios.append(grad_l2_norm(phi) / grad_l2_norm(u) ** 2)
    assert max(ratios) <= 10.0 * min(r for r in ratios if r > 0)
    assert max(ratios) < 1.0  # crude desk-scale sanity bound
