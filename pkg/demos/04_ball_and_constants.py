"""Building the certified ball: constants, radius, and the forcing budget.

The constrained minimization runs inside a ball whose radius is chosen so
that a trapping inequality holds. This script estimates the two embedding
constants from sampled fields, solves for the largest certified radius,
and then spot-checks the resulting residual bound on fresh samples.
"""

import numpy as np

from spball import (
    ProblemSpec,
    ScalarField,
    ball_samples,
    build_grid,
    check_residual_bound,
    estimate_constants,
    make_ball,
)

grid = build_grid(8)
spec = ProblemSpec(
    p=7.0,
    coupling=ScalarField(grid, np.ones(grid.shape)),
    forcing=ScalarField(grid, np.ones(grid.shape)),
    grid=grid,
)

c1, c2 = estimate_constants(spec, samples=64, seed=5, safety=2.0)
print(f"coupling constant (safety 2): {c1:.6e}")
print(f"power constant    (safety 2): {c2:.6e}")

ball = make_ball(spec, samples=64, seed=5, safety=2.0)
print(f"certified radius:             {ball.radius:.6f}")
print(f"forcing bound (radius / 2):   {ball.forcing_bound:.6f}")
check = ball.coupling_constant * ball.radius**3 + ball.power_constant * ball.radius**ball.p
print(f"defining inequality: {check:.6f} <= {ball.radius / 2:.6f}")

# every field in the ball should satisfy the residual bound with room
worst = 0.0
for u in ball_samples(grid, 25, seed=99, radius=ball.radius):
    lhs, rhs, holds = check_residual_bound(u, ball, spec)
    assert holds
    worst = max(worst, lhs / rhs)
print(f"residual bound over 25 fresh samples: worst lhs/rhs = {worst:.3f}")
