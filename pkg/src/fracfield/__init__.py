"""Simulation and verification toolkit for stochastic heat and wave
fields on the line driven by noise white in time and fractional in space.

The package is organized bottom-up:

* :mod:`fracfield.spectral` -- noise density, propagator multipliers,
  finiteness integrals and increment-bound constants;
* :mod:`fracfield.covariance` -- exact second-order structure of the
  linear solution via spectral quadrature;
* :mod:`fracfield.sampler` -- reproducible Gaussian sampling from those
  covariances;
* :mod:`fracfield.det_solver` -- deterministic fixed-point solver for the
  quasi-linear integral equation;
* :mod:`fracfield.quasilinear` -- full simulation pipeline and drift
  truncation ladders;
* :mod:`fracfield.analysis` -- regularity fits, continuity in the Hurst
  index, and kernel increment bound checks;
* :mod:`fracfield.cli` -- command line front end.
"""

from __future__ import annotations

from .analysis import (Direction, ExponentFit, ShiftKind,
                       expected_hoelder_slope, fit_hoelder, fit_hoelder_mc,
                       fit_power_law, h_convergence, marginal_distance,
                       verify_lemma_bound)
from .covariance import (CovarianceMatrix, SpaceTimePoint, conv_cov,
                         cov_matrix, increment_moment2, noise_field_cov,
                         time_kernel)
from .det_solver import (DriftSpec, GridFunction, InitialData, PicardInfo,
                         PointGrid, drift_truncate, initial_term,
                         initial_term_grid, make_drift, make_initial_data,
                         ode_oracle, picard_apply, solve_F)
from .errors import (MaxIterExceededError, NotPsdError, NumericalError,
                     QuadratureError)
from .quasilinear import (LadderResult, SimulationConfig, SimulationResult,
                          mild_residual, simulate, truncation_ladder_run)
from .sampler import (FieldSample, PsdFactor, factor_psd, replicate_stream,
                      sample_field, standard_normals)
from .spectral import (DEFAULT_QUAD, EquationKind, HurstIndex,
                       LemmaConstantKind, QuadratureSpec,
                       dalang_integral_closed, dalang_integral_quad,
                       fourier_kernel, gaussian_abs_moment, lemma_constant,
                       noise_constant)

__version__ = "0.1.0"

__all__ = [
    "CovarianceMatrix",
    "DEFAULT_QUAD",
    "Direction",
    "DriftSpec",
    "EquationKind",
    "ExponentFit",
    "FieldSample",
    "GridFunction",
    "HurstIndex",
    "InitialData",
    "LadderResult",
    "LemmaConstantKind",
    "MaxIterExceededError",
    "NotPsdError",
    "NumericalError",
    "PicardInfo",
    "PointGrid",
    "PsdFactor",
    "QuadratureError",
    "QuadratureSpec",
    "ShiftKind",
    "SimulationConfig",
    "SimulationResult",
    "SpaceTimePoint",
    "conv_cov",
    "cov_matrix",
    "dalang_integral_closed",
    "dalang_integral_quad",
    "drift_truncate",
    "expected_hoelder_slope",
    "factor_psd",
    "fit_hoelder",
    "fit_hoelder_mc",
    "fit_power_law",
    "fourier_kernel",
    "gaussian_abs_moment",
    "h_convergence",
    "increment_moment2",
    "initial_term",
    "initial_term_grid",
    "lemma_constant",
    "make_drift",
    "make_initial_data",
    "marginal_distance",
    "mild_residual",
    "noise_constant",
    "noise_field_cov",
    "ode_oracle",
    "picard_apply",
    "replicate_stream",
    "sample_field",
    "simulate",
    "solve_F",
    "standard_normals",
    "time_kernel",
    "truncation_ladder_run",
    "verify_lemma_bound",
    "__version__",
]
