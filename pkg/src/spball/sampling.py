"""Smoothed random interior fields for constant estimation and audits.

Each sample is a weighted random combination of low sine modes plus a
smoothed noise component, drawn at several amplitudes. Fields are generated
up front from a single seeded generator, so results do not depend on any
evaluation schedule.
"""

from __future__ import annotations

import numpy as np

from .grid import DomainGrid, ScalarField, w2n_norm

_DEFAULT_AMPLITUDES = (0.1, 1.0, 10.0)


def _neighbor_smooth(values: np.ndarray) -> np.ndarray:
    w = np.pad(values, 1)
    c = w[1:-1, 1:-1, 1:-1]
    nb = (
        w[:-2, 1:-1, 1:-1]
        + w[2:, 1:-1, 1:-1]
        + w[1:-1, :-2, 1:-1]
        + w[1:-1, 2:, 1:-1]
        + w[1:-1, 1:-1, :-2]
        + w[1:-1, 1:-1, 2:]
    )
    return (2.0 * c + nb) / 8.0


def smoothed_random_fields(
    grid: DomainGrid,
    count: int,
    seed: int,
    *,
    max_mode: int = 4,
    amplitudes: tuple[float, ...] = _DEFAULT_AMPLITUDES,
    noise_weight: float = 0.25,
    smoothing_sweeps: int = 2,
) -> list[ScalarField]:
    """Deterministic list of `count` random fields on `grid`."""
    if count < 0:
        raise ValueError(f"count must be nonnegative, got {count}")
    rng = np.random.default_rng(seed)
    coords = grid.interior_coordinates()
    modes = np.arange(1, max_mode + 1)
    sines = np.sin(np.pi * np.outer(modes, coords))  # (max_mode, n-1)
    k2 = (
        modes[:, None, None] ** 2
        + modes[None, :, None] ** 2
        + modes[None, None, :] ** 2
    ).astype(float)
    weights = 1.0 / k2

    fields = []
    for i in range(count):
        coeffs = rng.standard_normal((max_mode,) * 3) * weights
        smooth = np.einsum("abc,ai,bj,ck->ijk", coeffs, sines, sines, sines)
        noise = rng.standard_normal(grid.shape)
        for _ in range(smoothing_sweeps):
            noise = _neighbor_smooth(noise)
        rms_s = float(np.sqrt(np.mean(smooth**2)))
        rms_n = float(np.sqrt(np.mean(noise**2)))
        if rms_n > 0.0:
            noise = noise * (noise_weight * rms_s / max(rms_n, 1e-300))
        amp = amplitudes[i % len(amplitudes)]
        fields.append(ScalarField(grid, amp * (smooth + noise)))
    return fields


def ball_samples(grid: DomainGrid, count: int, seed: int, radius: float) -> list[ScalarField]:
    """Random fields rescaled to random fractions of the constraint-ball radius."""
    if not radius > 0.0:
        raise ValueError(f"radius must be positive, got {radius}")
    fields = smoothed_random_fields(grid, count, seed)
    # independent stream for the radial fractions
    frac_rng = np.random.default_rng([seed, 1])
    out = []
    for u in fields:
        w = w2n_norm(u)
        if w == 0.0:
            out.append(u)
            continue
        frac = float(frac_rng.uniform(0.05, 1.0))
        out.append((frac * radius / w) * u)
    return out
