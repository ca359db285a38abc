"""End-to-end simulation of the quasi-linear stochastic equations.

Pipeline: build the exact covariance of the linear solution field on the
reported grid, factor it, draw Gaussian replicates, add the initial-data
term, and run the deterministic fixed-point solver per replicate.
Replicates are independent CBRNG streams, so results are reproducible
and byte-identical for any thread count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .covariance import cov_matrix
from .det_solver import (DriftSpec, GridFunction, InitialData,
                         drift_truncate, initial_term_grid,
                         picard_apply, solve_F)
from .errors import MaxIterExceededError
from .sampler import factor_psd, sample_field
from .spectral import DEFAULT_QUAD, EquationKind, HurstIndex, QuadratureSpec

__all__ = [
    "SimulationConfig",
    "SimulationResult",
    "LadderResult",
    "simulate",
    "truncation_ladder_run",
    "mild_residual",
]


@dataclass(frozen=True)
class SimulationConfig:
    """Complete description of one simulation run."""

    eqn: EquationKind
    hurst: HurstIndex
    drift: DriftSpec
    data: InitialData
    grid: PointGrid
    master_seed: int
    n_replicates: int = 1
    truncation_ladder: tuple | None = None
    quad: QuadratureSpec = DEFAULT_QUAD
    tol: float = 1e-8
    max_iter: int = 60

    def __post_init__(self):
        if self.n_replicates < 1:
            raise ValueError(
                f"need n_replicates >= 1, got {self.n_replicates}")
        if self.master_seed < 0:
            raise ValueError(
                f"master_seed must be >= 0, got {self.master_seed}")
        if self.truncation_ladder is not None:
            ladder = tuple(float(m) for m in self.truncation_ladder)
            if len(ladder) < 2:
                raise ValueError("truncation ladder needs >= 2 levels")
            if any(b <= a for a, b in zip(ladder, ladder[1:])):
                raise ValueError(
                    f"truncation ladder must be strictly increasing: "
                    f"{ladder}")
            if self.drift.is_bounded:
                raise ValueError(
                    "a truncation ladder only applies to unbounded drifts")
            if self.eqn is not EquationKind.HEAT:
                raise ValueError(
                    "the truncation ladder study is a heat-equation tool")
            object.__setattr__(self, "truncation_ladder", ladder)
        if (self.eqn is EquationKind.HEAT and not self.drift.is_bounded
                and self.truncation_ladder is None):
            raise ValueError(
                "heat with an unbounded drift needs either a truncated "
                "drift or a truncation ladder")


@dataclass(frozen=True, eq=False)
class SimulationResult:
    """Replicated solution fields plus the ingredients that made them."""

    config: SimulationConfig
    points: tuple
    noise: np.ndarray
    fields: np.ndarray
    infos: tuple
    jitter_used: float


@dataclass(frozen=True, eq=False)
class LadderResult:
    """Truncation-level study with common random numbers across levels."""

    config: SimulationConfig
    levels: tuple
    deviation_vs_reference: np.ndarray
    deviation_consecutive: np.ndarray
    fields_by_level: np.ndarray


def _noise_fields(config: SimulationConfig):
    """Sample the linear solution field on the reported grid."""
    grid = config.grid
    points = grid.points()
    cov = cov_matrix(config.eqn, config.hurst, points, quad=config.quad)
    factor = factor_psd(cov)
    sample = sample_field(factor, config.master_seed, config.n_replicates)
    shaped = sample.values.reshape(
        config.n_replicates, grid.n_t + 1, grid.n_x + 1)
    return tuple(points), shaped, factor.jitter_used


def _solve_replicates(config: SimulationConfig, drift: DriftSpec,
                      eta_fields: np.ndarray, threads: int):
    """Run the deterministic solver for each replicate, order-stable."""
    grid = config.grid

    def solve_one(index: int):
        eta = GridFunction(grid=grid, values=eta_fields[index])
        try:
            return solve_F(config.eqn, drift, eta, tol=config.tol,
                           max_iter=config.max_iter, return_info=True)
        except MaxIterExceededError as exc:
            raise MaxIterExceededError(
                f"replicate {index}: {exc}",
                last_increment=exc.last_increment,
                iterations=exc.iterations,
                replicate_index=index) from exc

    indices = range(config.n_replicates)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            pairs = list(pool.map(solve_one, indices))
    else:
        pairs = [solve_one(i) for i in indices]
    fields = np.stack([gf.values for gf, _ in pairs])
    infos = tuple(info for _, info in pairs)
    return fields, infos


def simulate(config: SimulationConfig, *, threads: int = 1) -> SimulationResult:
    """Simulate the quasi-linear equation on the configured grid.

    Returns the replicated solution fields with shape ``(n_replicates,
    n_t + 1, n_x + 1)``; ``noise`` holds the linear solution fields that
    forced them.  The replicate loop may run on ``threads`` workers; the
    output bytes do not depend on the thread count.
    """
    if threads < 1:
        raise ValueError(f"threads must be >= 1, got {threads}")
    if config.truncation_ladder is not None:
        raise ValueError(
            "config carries a truncation ladder; use truncation_ladder_run")
    points, noise, jitter = _noise_fields(config)
    i0 = initial_term_grid(config.eqn, config.data, config.grid)
    eta_fields = noise + i0.values[None, :, :]
    fields, infos = _solve_replicates(config, config.drift, eta_fields,
                                      threads)
    return SimulationResult(config=config, points=points, noise=noise,
                            fields=fields, infos=infos, jitter_used=jitter)


def truncation_ladder_run(config: SimulationConfig, *,
                          threads: int = 1) -> LadderResult:
    """Solve at every truncation level with common random numbers.

    The same noise replicates force every level, so level-to-level
    deviations measure the truncation effect alone.  The deviation at
    level m is the grid maximum of the replicate mean of the squared
    difference, against the largest level (reference) and against the
    next level up (consecutive).
    """
    if threads < 1:
        raise ValueError(f"threads must be >= 1, got {threads}")
    if config.truncation_ladder is None:
        raise ValueError("config has no truncation ladder")
    points, noise, jitter = _noise_fields(config)
    i0 = initial_term_grid(config.eqn, config.data, config.grid)
    eta_fields = noise + i0.values[None, :, :]
    levels = config.truncation_ladder
    per_level = []
    for level in levels:
        drift_m = drift_truncate(config.drift, level)
        fields, _ = _solve_replicates(config, drift_m, eta_fields, threads)
        per_level.append(fields)
    stacked = np.stack(per_level)
    ref = stacked[-1]

    def deviation(a: np.ndarray, b: np.ndarray) -> float:
        return float(np.max(np.mean((a - b) ** 2, axis=0)))

    dev_ref = np.asarray([deviation(stacked[k], ref)
                          for k in range(len(levels))])
    dev_consec = np.asarray([deviation(stacked[k], stacked[k + 1])
                             for k in range(len(levels) - 1)])
    return LadderResult(config=config, levels=levels,
                        deviation_vs_reference=dev_ref,
                        deviation_consecutive=dev_consec,
                        fields_by_level=stacked)


def mild_residual(eqn: EquationKind, drift: DriftSpec, u: GridFunction,
                  eta: GridFunction) -> float:
    """Sup-norm defect of u as a solution of ``z = eta + G * b(z)``.

    One more fixed-point application of u minus u itself, maximized over
    the reported window; small residuals certify u a posteriori.
    """
    applied = picard_apply(eqn, drift, u, eta)
    return float(np.max(np.abs(applied.values - u.values)))
