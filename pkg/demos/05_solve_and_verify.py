"""End to end: minimize the energy in the ball, then verify the solution.

Mirrors what `spball run --config ...` does, but through the library so the
intermediate objects are visible. The forcing is scaled to sit exactly at
the admissible bound, the hardest case the theory still covers.
"""

from spball.runner import ExperimentConfig, run_experiment

config = ExperimentConfig.from_dict(
    {
        "grid_n": 12,
        "p": 7.0,
        "coupling": {"constant": 1.0},
        "forcing": {"scaled_to_bound": 1.0},
        "samples": 100,
        "seed": 7,
    }
)

report = run_experiment(config, write_outputs=False)

print(f"ball radius         = {report.ball.radius:.6f}")
print(f"forcing bound       = {report.ball.forcing_bound:.6f}")
print(f"energy at minimizer = {report.energy:.8f}  (negative: beats u = 0)")
summary = report.minimize_summary
print(f"descent iterations  = {summary['iterations']}, "
      f"converged={summary['converged']}, on_boundary={summary['on_boundary']}")
print(f"minimizer norms     : W2N={summary['minimizer_w2n']:.6f}, "
      f"L2={summary['minimizer_l2']:.6f}")

v = report.verification
print("\nverification")
print(f"  fixed point residual (rel) = {v.fixed_point_rel_residual:.3e}")
print(f"  equation residual    (rel) = {v.pde_rel_residual:.3e}")
print(f"  vi violations              = {v.vi_violations} / {v.vi_samples}")
print(f"  aux stays in ball          = {v.aux_in_ball}")
print(f"  potential checks           = nonneg {v.phi_nonneg_ok}, "
      f"scaling {v.phi_scaling_ok}, bound {v.phi_bound_ok}")
print(f"  passed                     = {v.passed}")

for stage, seconds in report.wall_time.items():
    print(f"  {stage:<12} {seconds:.3f}s")
