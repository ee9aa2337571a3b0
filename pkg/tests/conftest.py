"""Shared oracles and helpers for the test suite."""

import numpy as np
import pytest

from spball.ball import make_ball
from spball.energy import ProblemSpec
from spball.grid import DomainGrid, ScalarField, first_eigenpair, lp_norm


def dense_neg_laplacian(n: int) -> np.ndarray:
    """Dense matrix of the 7-point -Laplacian on the interior of an n-grid.

    Built independently of the solver code via Kronecker products of the 1D
    second-difference matrix; row/column order matches C-order flattening of
    the (n-1, n-1, n-1) interior array.
    """
    m = n - 1
    h2 = (1.0 / n) ** 2
    t = 2.0 * np.eye(m) - np.eye(m, k=1) - np.eye(m, k=-1)
    eye = np.eye(m)
    a = (
        np.kron(np.kron(t, eye), eye)
        + np.kron(np.kron(eye, t), eye)
        + np.kron(np.kron(eye, eye), t)
    )
    return a / h2


def random_field(grid: DomainGrid, rng: np.random.Generator, scale: float = 1.0) -> ScalarField:
    return ScalarField(grid, scale * rng.standard_normal(grid.shape))


def standard_problem(n=8, p=7.0, fraction=1.0, samples=12, seed=3):
    """Constant coupling, sine-bump forcing scaled to a fraction of the bound."""
    from spball.grid import build_grid

    g = build_grid(n)
    coupling = ScalarField(g, np.ones(g.shape))
    bump, _ = first_eigenpair(g)
    probe = ProblemSpec(p=p, coupling=coupling, forcing=bump, grid=g)
    ball = make_ball(probe, samples=samples, seed=seed)
    forcing = (fraction * ball.forcing_bound / lp_norm(bump, 3)) * bump
    spec = ProblemSpec(p=p, coupling=coupling, forcing=forcing, grid=g)
    return spec, ball


@pytest.fixture
def rng():
    return np.random.default_rng(20260814)
