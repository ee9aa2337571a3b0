"""Experiment pipeline: config -> constants -> radius -> descent -> verification.

Configs are plain JSON with a strict schema; reports serialize losslessly
(identical runs differ only in wall_time). The convergence study replays a
manufactured Poisson problem and the full pipeline over a grid sequence.
"""

from __future__ import annotations

import csv
import json
import math
import time
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from .ball import BallSpec, admissible_radius, estimate_constants, max_forcing_norm
from .energy import ProblemSpec
from .errors import ConfigError, ForcingTooLargeError
from .grid import (
    DomainGrid,
    ScalarField,
    build_grid,
    first_eigenpair,
    lp_norm,
    w2n_norm,
)
from .minimize import MinimizeOptions, MinimizeResult, minimize
from .poisson import LinearSolveOptions, solve_dirichlet_poisson
from .verify import VerificationReport, verify
from .version import __version__

# the verifier's random probes must not reuse the estimation stream
VI_SEED_OFFSET = 1_000_003

_COUPLING_KINDS = ("constant", "sine_bump")
_FORCING_KINDS = ("constant", "sine_bump", "scaled_to_bound")


def _validate_field_spec(spec: dict, kinds: tuple[str, ...], label: str) -> None:
    if not isinstance(spec, dict) or len(spec) != 1:
        raise ConfigError(f"{label} must be an object with exactly one key from {kinds}")
    (kind, value), = spec.items()
    if kind not in kinds:
        raise ConfigError(f"unknown {label} kind {kind!r}; expected one of {kinds}")
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{label}.{kind} must be a number, got {value!r}") from None
    if not math.isfinite(value):
        raise ConfigError(f"{label}.{kind} must be finite")
    if kind == "constant" and label == "coupling":
        if value < 0.0:
            raise ConfigError("coupling constant must be nonnegative")
    elif kind == "scaled_to_bound":
        if not 0.0 < value <= 1.0:
            raise ConfigError(f"scaled_to_bound fraction must lie in (0, 1], got {value}")
    elif value <= 0.0:
        raise ConfigError(f"{label}.{kind} must be positive, got {value}")


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated experiment description; see README for the JSON schema."""

    grid_n: int
    p: float
    coupling: dict
    forcing: dict
    safety: float = 2.0
    samples: int = 64
    seed: int = 0
    linear: LinearSolveOptions = field(default_factory=LinearSolveOptions)
    descent: MinimizeOptions = field(default_factory=MinimizeOptions)
    output_path: str = "out"
    schema_version: int = 1

    def __post_init__(self):
        if self.schema_version != 1:
            raise ConfigError(f"unsupported schema_version {self.schema_version}")
        if not isinstance(self.grid_n, int) or self.grid_n < 3:
            raise ConfigError(f"grid_n must be an integer >= 3, got {self.grid_n}")
        if not (isinstance(self.p, (int, float)) and math.isfinite(self.p) and self.p > 1.0):
            raise ConfigError(f"p must be a finite number > 1, got {self.p}")
        _validate_field_spec(self.coupling, _COUPLING_KINDS, "coupling")
        _validate_field_spec(self.forcing, _FORCING_KINDS, "forcing")
        if not self.safety >= 1.0:
            raise ConfigError(f"safety must be >= 1, got {self.safety}")
        if not (isinstance(self.samples, int) and self.samples >= 1):
            raise ConfigError(f"samples must be a positive integer, got {self.samples}")
        if not isinstance(self.seed, int):
            raise ConfigError(f"seed must be an integer, got {self.seed!r}")
        if not isinstance(self.output_path, str) or not self.output_path:
            raise ConfigError("output_path must be a nonempty string")

    def to_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "grid_n": self.grid_n,
            "p": self.p,
            "coupling": dict(self.coupling),
            "forcing": dict(self.forcing),
            "safety": self.safety,
            "samples": self.samples,
            "seed": self.seed,
            "tolerances": {"linear": asdict(self.linear), "descent": asdict(self.descent)},
            "output_path": self.output_path,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        known = {
            "schema_version",
            "grid_n",
            "p",
            "coupling",
            "forcing",
            "safety",
            "samples",
            "seed",
            "tolerances",
            "output_path",
        }
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        missing = {"grid_n", "p", "coupling", "forcing"} - set(data)
        if missing:
            raise ConfigError(f"missing required config keys: {sorted(missing)}")

        tolerances = data.get("tolerances", {})
        if not isinstance(tolerances, dict):
            raise ConfigError("tolerances must be an object")
        bad = set(tolerances) - {"linear", "descent"}
        if bad:
            raise ConfigError(f"unknown tolerances sections: {sorted(bad)}")
        try:
            linear = LinearSolveOptions(**tolerances.get("linear", {}))
            descent = MinimizeOptions(**tolerances.get("descent", {}))
        except TypeError as exc:
            raise ConfigError(f"bad tolerances: {exc}") from None
        except ValueError as exc:
            raise ConfigError(f"bad tolerances: {exc}") from None

        kwargs = {k: data[k] for k in known - {"tolerances"} if k in data}
        kwargs["linear"] = linear
        kwargs["descent"] = descent
        if "p" in kwargs:
            kwargs["p"] = float(kwargs["p"])
        if "safety" in kwargs:
            kwargs["safety"] = float(kwargs["safety"])
        return cls(**kwargs)


def load_config(path: str | Path) -> ExperimentConfig:
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from None
    return ExperimentConfig.from_dict(data)


def _sine_bump(grid: DomainGrid) -> ScalarField:
    return first_eigenpair(grid)[0]


def _build_coupling(grid: DomainGrid, spec: dict) -> ScalarField:
    (kind, value), = spec.items()
    if kind == "constant":
        return ScalarField(grid, np.full(grid.shape, float(value)))
    return float(value) * _sine_bump(grid)


def _build_forcing(grid: DomainGrid, spec: dict, forcing_bound: float | None) -> ScalarField:
    (kind, value), = spec.items()
    if kind == "constant":
        return ScalarField(grid, np.full(grid.shape, float(value)))
    if kind == "sine_bump":
        return float(value) * _sine_bump(grid)
    if forcing_bound is None:
        raise ValueError("scaled_to_bound needs the computed forcing bound")
    base = _sine_bump(grid)
    return (float(value) * forcing_bound / lp_norm(base, 3)) * base


@dataclass(frozen=True)
class SolveReport:
    """Everything a run produced, minus the raw field data."""

    config: ExperimentConfig
    ball: BallSpec
    energy: float
    minimize_summary: dict
    verification: VerificationReport
    wall_time: dict
    version: str
    seeds: dict

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "ball": asdict(self.ball),
            "energy": self.energy,
            "minimize_summary": dict(self.minimize_summary),
            "verification": self.verification.to_dict(),
            "wall_time": dict(self.wall_time),
            "version": self.version,
            "seeds": dict(self.seeds),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SolveReport":
        return cls(
            config=ExperimentConfig.from_dict(data["config"]),
            ball=BallSpec(**data["ball"]),
            energy=data["energy"],
            minimize_summary=dict(data["minimize_summary"]),
            verification=VerificationReport.from_dict(data["verification"]),
            wall_time=dict(data["wall_time"]),
            version=data["version"],
            seeds=dict(data["seeds"]),
        )


def _summarize(result: MinimizeResult) -> dict:
    last = result.trace[-1]
    return {
        "iterations": result.iterations,
        "converged": result.converged,
        "on_boundary": result.on_boundary,
        "final_step": last[2],
        "final_displacement": last[3],
        "trace_rows": len(result.trace),
        "minimizer_w2n": w2n_norm(result.minimizer),
        "minimizer_l2": lp_norm(result.minimizer, 2),
    }


def run_experiment(
    config: ExperimentConfig,
    out_dir: str | Path | None = None,
    write_outputs: bool = True,
) -> SolveReport:
    """Run the full pipeline and (by default) write report.json and trace.csv.

    Raises ForcingTooLargeError, with the computed bound in the message,
    when an absolute forcing spec lands above the admissible bound.
    """
    timings: dict[str, float] = {}
    t_total = time.perf_counter()

    t0 = time.perf_counter()
    grid = build_grid(config.grid_n)
    coupling = _build_coupling(grid, config.coupling)
    probe_forcing = (
        _build_forcing(grid, config.forcing, None)
        if "scaled_to_bound" not in config.forcing
        else _sine_bump(grid)
    )
    probe_spec = ProblemSpec(
        p=config.p, coupling=coupling, forcing=probe_forcing, grid=grid,
        linear_opts=config.linear,
    )
    timings["setup"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    coupling_constant, power_constant = estimate_constants(
        probe_spec, config.samples, config.seed, config.safety
    )
    timings["constants"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    radius = admissible_radius(coupling_constant, power_constant, config.p)
    ball = BallSpec(
        coupling_constant=coupling_constant,
        power_constant=power_constant,
        radius=radius,
        forcing_bound=max_forcing_norm(radius),
        p=config.p,
        sample_count=config.samples,
        seed=config.seed,
    )
    forcing = _build_forcing(grid, config.forcing, ball.forcing_bound)
    forcing_norm = lp_norm(forcing, 3)
    if forcing_norm > ball.forcing_bound * (1.0 + 1e-12):
        raise ForcingTooLargeError(forcing_norm, ball.forcing_bound)
    spec = ProblemSpec(
        p=config.p, coupling=coupling, forcing=forcing, grid=grid,
        linear_opts=config.linear,
    )
    timings["radius"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    result = minimize(spec, ball, config.descent)
    timings["minimize"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    vi_seed = config.seed + VI_SEED_OFFSET
    report_v = verify(result.minimizer, spec, ball, samples=config.samples, seed=vi_seed)
    timings["verify"] = time.perf_counter() - t0
    timings["total"] = time.perf_counter() - t_total

    report = SolveReport(
        config=config,
        ball=ball,
        energy=result.energy,
        minimize_summary=_summarize(result),
        verification=report_v,
        wall_time=timings,
        version=__version__,
        seeds={
            "estimation": config.seed,
            "vi": vi_seed,
            "descent": config.descent.seed,
        },
    )
    if write_outputs:
        write_run_outputs(report, result, out_dir)
    return report


def write_run_outputs(
    report: SolveReport, result: MinimizeResult, out_dir: str | Path | None = None
) -> Path:
    """Write report.json and trace.csv; returns the output directory."""
    out = Path(out_dir) if out_dir is not None else Path(report.config.output_path)
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(
        json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n"
    )
    with (out / "trace.csv").open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iteration", "energy", "step", "displacement"])
        for row in result.trace:
            writer.writerow([row[0], repr(row[1]), repr(row[2]), repr(row[3])])
    return out


def load_report(path: str | Path) -> SolveReport:
    return SolveReport.from_dict(json.loads(Path(path).read_text()))


# ---------------------------------------------------------------- study


@dataclass(frozen=True)
class StudyRow:
    """Per-grid study outcome; error holds a message when the grid failed."""

    n: int
    poisson_rel_error: float | None
    observed_order: float | None
    energy: float | None
    pde_rel_residual: float | None
    error: str = ""


def manufactured_poisson_error(n: int, opts: LinearSolveOptions | None = None) -> float:
    """Relative L2 error of the solver against a known smooth solution.

    The forcing 3 pi^2 sin(pi x) sin(pi y) sin(pi z) has the continuum
    solution sin(pi x) sin(pi y) sin(pi z); the discrete error is second
    order in h.
    """
    grid = build_grid(n)
    star = _sine_bump(grid)
    f = ScalarField(grid, 3.0 * np.pi**2 * star.values)
    w = solve_dirichlet_poisson(f, opts).field
    return lp_norm(w - star, 2) / lp_norm(star, 2)


def convergence_study(config: ExperimentConfig, grids: list[int]) -> list[StudyRow]:
    """Manufactured Poisson error plus the full pipeline on each grid.

    Grids must be strictly increasing. Per-grid failures are recorded in the
    row and the study continues; observed orders are computed between
    consecutive grids that both produced a Poisson error.
    """
    if not grids:
        raise ConfigError("study needs at least one grid")
    if any(not isinstance(n, int) or n < 3 for n in grids):
        raise ConfigError(f"grids must be integers >= 3, got {grids}")
    if any(b <= a for a, b in zip(grids, grids[1:])):
        raise ConfigError(f"grids must be strictly increasing, got {grids}")

    rows: list[StudyRow] = []
    prev: tuple[int, float] | None = None
    for n in grids:
        try:
            poisson_err = manufactured_poisson_error(n, config.linear)
            report = run_experiment(replace(config, grid_n=n), write_outputs=False)
            order = None
            if prev is not None:
                order = math.log(prev[1] / poisson_err) / math.log(n / prev[0])
            rows.append(
                StudyRow(
                    n=n,
                    poisson_rel_error=poisson_err,
                    observed_order=order,
                    energy=report.energy,
                    pde_rel_residual=report.verification.pde_rel_residual,
                )
            )
            prev = (n, poisson_err)
        except Exception as exc:  # recorded, study continues
            rows.append(StudyRow(n=n, poisson_rel_error=None, observed_order=None,
                                 energy=None, pde_rel_residual=None, error=str(exc)))
    return rows


def write_study_csv(rows: list[StudyRow], path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["n", "poisson_rel_error", "observed_order", "energy", "pde_rel_residual", "error"]
        )
        for row in rows:
            writer.writerow(
                [
                    row.n,
                    "" if row.poisson_rel_error is None else repr(row.poisson_rel_error),
                    "" if row.observed_order is None else repr(row.observed_order),
                    "" if row.energy is None else repr(row.energy),
                    "" if row.pde_rel_residual is None else repr(row.pde_rel_residual),
                    row.error,
                ]
            )
