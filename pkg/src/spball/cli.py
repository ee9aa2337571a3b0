"""Command-line front end.

    spball run --config cfg.json [--seed N] [--out DIR]
    spball study --config cfg.json --grids 8,16,32 [--seed N] [--out DIR]

`run` exits 0 only when verification passed; `study` exits 0 only when every
grid completed. Configuration or data errors exit 2.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .errors import ConfigError
from .runner import convergence_study, load_config, run_experiment, write_study_csv


def _parse_grids(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise ConfigError(f"--grids must be a comma-separated integer list, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spball",
        description="Ball-constrained variational solver for a Schrodinger-Poisson system",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="solve and verify one configuration")
    run.add_argument("--config", required=True, help="path to a JSON experiment config")
    run.add_argument("--seed", type=int, default=None, help="override the config seed")
    run.add_argument("--out", default=None, help="override the output directory")

    study = sub.add_parser("study", help="convergence study over a grid sequence")
    study.add_argument("--config", required=True, help="path to a JSON experiment config")
    study.add_argument("--grids", required=True, help="comma-separated grid sizes, e.g. 8,16,32")
    study.add_argument("--seed", type=int, default=None, help="override the config seed")
    study.add_argument("--out", default=None, help="override the output directory")
    return parser


def _apply_overrides(config, seed, out):
    if seed is not None:
        config = replace(config, seed=seed)
    if out is not None:
        config = replace(config, output_path=str(out))
    return config


def _cmd_run(args) -> int:
    config = _apply_overrides(load_config(args.config), args.seed, args.out)
    report = run_experiment(config, out_dir=args.out)
    ver = report.verification
    out_dir = Path(args.out) if args.out else Path(config.output_path)
    print(f"grid n={config.grid_n}  p={config.p}  seed={config.seed}")
    print(
        f"ball: radius={report.ball.radius:.6e}  "
        f"forcing_bound={report.ball.forcing_bound:.6e}"
    )
    print(
        f"descent: energy={report.energy:.9e}  "
        f"iterations={report.minimize_summary['iterations']}  "
        f"converged={report.minimize_summary['converged']}"
    )
    print(
        f"verify: fp_rel={ver.fixed_point_rel_residual:.3e}  "
        f"pde_rel={ver.pde_rel_residual:.3e}  "
        f"vi_violations={ver.vi_violations}/{ver.vi_samples}"
    )
    print(f"outputs: {out_dir / 'report.json'}  {out_dir / 'trace.csv'}")
    print("verification PASSED" if ver.passed else "verification FAILED")
    return 0 if ver.passed else 1


def _cmd_study(args) -> int:
    config = _apply_overrides(load_config(args.config), args.seed, args.out)
    grids = _parse_grids(args.grids)
    rows = convergence_study(config, grids)
    out_dir = Path(args.out) if args.out else Path(config.output_path)
    write_study_csv(rows, out_dir / "study.csv")
    header = f"{'n':>5}  {'poisson_rel_err':>15}  {'order':>7}  {'energy':>14}  {'pde_rel':>10}"
    print(header)
    for row in rows:
        if row.error:
            print(f"{row.n:>5}  failed: {row.error}")
            continue
        order = f"{row.observed_order:7.3f}" if row.observed_order is not None else "      -"
        print(
            f"{row.n:>5}  {row.poisson_rel_error:15.6e}  {order}  "
            f"{row.energy:14.6e}  {row.pde_rel_residual:10.3e}"
        )
    print(f"study written to {out_dir / 'study.csv'}")
    return 0 if all(not row.error for row in rows) else 1


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        return _cmd_study(args)
    except (ConfigError, ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
