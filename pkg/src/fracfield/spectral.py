"""Spectral-domain building blocks: noise density, propagator multipliers,
and the finiteness integrals that control whether a solution exists.

The driving noise is white in time and fractional in space with Hurst
index H in (0, 1); its spatial spectral measure has density
``noise_constant(H) * |xi|^(1-2H)``.  All existence and regularity
statements funnel through weighted integrals of the squared propagator
multipliers, provided here both in closed form and by independent
two-dimensional quadrature so each route can check the other.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gamma as _gamma

from .errors import QuadratureError
from .quadrature import (QuadResult, cos_integral_constant, power_tail,
                         osc_power_tail, spectral_integral, _gl_eval,
                         _NODES16, _WEIGHTS16, _build_edges)

__all__ = [
    "EquationKind",
    "HurstIndex",
    "QuadratureSpec",
    "LemmaConstantKind",
    "noise_constant",
    "fourier_kernel",
    "gaussian_abs_moment",
    "dalang_integral_closed",
    "dalang_integral_quad",
    "lemma_constant",
]


class EquationKind(enum.Enum):
    """Which evolution equation drives the field."""

    WAVE = "wave"
    HEAT = "heat"

    @classmethod
    def parse(cls, name: str) -> "EquationKind":
        try:
            return cls(name.strip().lower())
        except ValueError:
            raise ValueError(
                f"unknown equation kind {name!r}; expected 'wave' or 'heat'"
            ) from None


@dataclass(frozen=True)
class HurstIndex:
    """Hurst index of the spatial noise, strictly inside (0, 1).

    The derived ``spectral_exponent`` alpha = 1 - 2H is the power of |xi|
    weighting every spectral integral; alpha in (-1, 1) mirrors H in (0, 1).
    """

    value: float

    def __post_init__(self):
        v = self.value
        if not (isinstance(v, (int, float)) and math.isfinite(v)):
            raise ValueError(f"Hurst index must be a finite number, got {v!r}")
        if not 0.0 < v < 1.0:
            raise ValueError(f"Hurst index must lie in (0, 1), got {v}")

    @property
    def spectral_exponent(self) -> float:
        return 1.0 - 2.0 * self.value


@dataclass(frozen=True)
class QuadratureSpec:
    """Knobs of the spectral quadrature engine.

    Attributes
    ----------
    cutoff : float
        Nominal frequency cutoff; analytic tails take over beyond it.
    rel_tol, abs_tol : float
        Convergence target ``err <= rel_tol * |value| + abs_tol``.
    small_xi_eps : float
        End of the analytic series head at the origin.
    max_panels : int
        Refinement budget for the adaptive core.
    """

    cutoff: float = 200.0
    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    small_xi_eps: float = 1e-4
    max_panels: int = 4000

    def __post_init__(self):
        if not 0.0 < self.rel_tol < 1.0:
            raise ValueError(f"rel_tol must lie in (0, 1), got {self.rel_tol}")
        if not 0.0 < self.abs_tol < 1.0:
            raise ValueError(f"abs_tol must lie in (0, 1), got {self.abs_tol}")
        if not 0.0 < self.small_xi_eps < self.cutoff:
            raise ValueError(
                "need 0 < small_xi_eps < cutoff, got "
                f"{self.small_xi_eps} vs {self.cutoff}")
        if self.max_panels < 1:
            raise ValueError(f"max_panels must be >= 1, got {self.max_panels}")


DEFAULT_QUAD = QuadratureSpec()


def noise_constant(H: float | HurstIndex) -> float:
    """Spectral density constant ``Gamma(2H+1) sin(pi H) / (2 pi)``.

    Continuous on (0, 1), bounded by 1/pi, and equal to ``1/(2 pi)`` at
    H = 1/2 where the noise is spatially white.
    """
    h = H.value if isinstance(H, HurstIndex) else HurstIndex(H).value
    return _gamma(2.0 * h + 1.0) * math.sin(math.pi * h) / (2.0 * math.pi)


def fourier_kernel(eqn: EquationKind, t: float, xi):
    """Fourier multiplier of the propagator at time t.

    Wave: ``sin(t |xi|) / |xi|`` with the limit value t at xi = 0.
    Heat: ``exp(-t xi^2 / 2)``.

    Accepts scalar or array ``xi``; ``t`` must be nonnegative.
    """
    if t < 0.0:
        raise ValueError(f"time must be nonnegative, got {t}")
    xi_arr = np.asarray(xi, dtype=float)
    if eqn is EquationKind.HEAT:
        out = np.exp(-t * xi_arr ** 2 / 2.0)
    elif eqn is EquationKind.WAVE:
        ax = np.abs(xi_arr)
        with np.errstate(invalid="ignore", divide="ignore"):
            out = np.where(ax > 0.0,
                           np.sin(t * ax) / np.where(ax > 0.0, ax, 1.0), t)
    else:
        raise TypeError(f"expected EquationKind, got {eqn!r}")
    return float(out) if np.ndim(xi) == 0 else out


def gaussian_abs_moment(p: float) -> float:
    """Absolute moment ``E|Z|^p`` of a standard Gaussian, p > 0.

    Equals ``2^(p/2) Gamma((p+1)/2) / sqrt(pi)``; reduces to the double
    factorial ``(2k-1)!!`` at even integer p = 2k and to ``sqrt(2/pi)``
    at p = 1.
    """
    if not p > 0.0:
        raise ValueError(f"moment order must be positive, got {p}")
    return 2.0 ** (p / 2.0) * _gamma((p + 1.0) / 2.0) / math.sqrt(math.pi)


def _check_alpha_horizon(alpha: float, horizon: float) -> None:
    if not -1.0 < alpha < 1.0:
        raise ValueError(
            f"spectral exponent must lie in (-1, 1), got {alpha}")
    if not horizon > 0.0:
        raise ValueError(f"time horizon must be positive, got {horizon}")


def dalang_integral_closed(eqn: EquationKind, alpha: float,
                           horizon: float) -> float:
    """Closed form of the time-integrated squared-multiplier integral.

    The quantity is ``int_0^T int_R |fourier_kernel(eqn, t, xi)|^2
    |xi|^alpha dxi dt``, finite exactly for alpha in (-1, 1).

    Wave: ``2^(1-alpha) * C(alpha) * T^(2-alpha) / (2-alpha)`` with
    C(alpha) = :func:`cos_integral_constant`.
    Heat: ``(2/(1-alpha)) * Gamma((alpha+1)/2) * T^((1-alpha)/2)``.
    """
    _check_alpha_horizon(alpha, horizon)
    T = horizon
    if eqn is EquationKind.WAVE:
        return (2.0 ** (1.0 - alpha) * cos_integral_constant(alpha)
                * T ** (2.0 - alpha) / (2.0 - alpha))
    if eqn is EquationKind.HEAT:
        return (2.0 / (1.0 - alpha)) * _gamma((alpha + 1.0) / 2.0) \
            * T ** ((1.0 - alpha) / 2.0)
    raise TypeError(f"expected EquationKind, got {eqn!r}")


def _wave_inner_time_integral(xi: np.ndarray, T: float) -> np.ndarray:
    """Numeric ``int_0^T sin(t xi)^2 / xi^2 dt`` for an array of xi > 0."""
    out = np.empty_like(xi)
    order = np.argsort(xi)
    xs = xi[order]
    res = np.empty_like(xs)
    start = 0
    while start < xs.size:
        stop = min(start + 1024, xs.size)
        chunk = xs[start:stop]
        ximax = chunk[-1]
        n_panels = max(4, math.ceil(T * ximax / (2.0 * math.pi)) + 2)
        edges = np.linspace(0.0, T, n_panels + 1)
        mid = 0.5 * (edges[:-1] + edges[1:])
        half = 0.5 * (edges[1:] - edges[:-1])
        t_nodes = (mid[:, None] + half[:, None] * _NODES16[None, :]).ravel()
        w_nodes = (half[:, None] * _WEIGHTS16[None, :]).ravel()
        s = np.sin(t_nodes[None, :] * chunk[:, None]) ** 2
        res[start:stop] = (s @ w_nodes) / chunk ** 2
        start = stop
    out[order] = res
    return out


def _heat_inner_time_integral(xi: np.ndarray, T: float) -> np.ndarray:
    """Numeric ``int_0^T exp(-t xi^2) dt`` on geometric time panels."""
    n_oct = max(8, math.ceil(math.log2(max(T * np.max(xi) ** 2, 2.0))) + 4)
    edges = [0.0] + [T * 2.0 ** (-k) for k in range(n_oct, -1, -1)]
    edges = np.asarray(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (edges[1:] - edges[:-1])
    t_nodes = (mid[:, None] + half[:, None] * _NODES16[None, :]).ravel()
    w_nodes = (half[:, None] * _WEIGHTS16[None, :]).ravel()
    vals = np.exp(-t_nodes[None, :] * (xi ** 2)[:, None])
    return vals @ w_nodes


def dalang_integral_quad(eqn: EquationKind, alpha: float, horizon: float,
                         quad: QuadratureSpec | None = None) -> QuadResult:
    """Iterated numeric evaluation of the squared-multiplier integral.

    The inner time integral is computed by composite Gauss-Legendre
    panels (oscillation-capped for the wave multiplier, geometrically
    graded for the heat one); the outer frequency integral uses the
    panel engine with a series head and analytic tails.  Never consults
    :func:`dalang_integral_closed`, so the two routes are independent.
    """
    _check_alpha_horizon(alpha, horizon)
    q = quad or DEFAULT_QUAD
    T = horizon
    if eqn is EquationKind.WAVE:
        head = (T ** 3 / 3.0, -T ** 5 / 15.0, 2.0 * T ** 7 / 315.0,
                -T ** 9 / 2835.0)
        res = spectral_integral(
            lambda x: _wave_inner_time_integral(x, T), alpha, q,
            head_coeffs=head,
            tail_terms=(("pow", T / 2.0, alpha - 2.0, 0.0),
                        ("sin", -0.25, alpha - 3.0, 2.0 * T)),
            freqs=(2.0 * T,))
    elif eqn is EquationKind.HEAT:
        head = (T, -T ** 2 / 2.0, T ** 3 / 6.0, -T ** 4 / 24.0)
        res = spectral_integral(
            lambda x: _heat_inner_time_integral(x, T), alpha, q,
            head_coeffs=head,
            tail_terms=(("pow", 1.0, alpha - 2.0, 0.0),),
            gauss_scales=(T,), gauss_suppressed_scale=1.0)
    else:
        raise TypeError(f"expected EquationKind, got {eqn!r}")
    # Both halves of the real line contribute equally.
    return QuadResult(value=2.0 * res.value,
                      err_estimate=2.0 * res.err_estimate,
                      panels_used=res.panels_used, converged=res.converged)


class LemmaConstantKind(enum.Enum):
    """Constants appearing in the increment bounds of the kernels."""

    COS_INTEGRAL = "cos-integral"
    WAVE_INCREMENT = "wave-increment"
    HEAT_INCREMENT = "heat-increment"


def lemma_constant(kind: LemmaConstantKind, parameter: float) -> float:
    """Evaluate one of the named increment-bound constants.

    ``COS_INTEGRAL``: ``int_R (1 - cos(u)) |u|^(alpha-2) du`` computed by
    quadrature (parameter = alpha in (-1, 1)); equals pi at alpha = 0.
    ``WAVE_INCREMENT``: ``4 (1/H + 1/(1-H))`` (parameter = H); 16 at 1/2.
    ``HEAT_INCREMENT``: ``1/H + 1/(1-H)`` (parameter = H); 4 at 1/2.
    """
    if kind is LemmaConstantKind.WAVE_INCREMENT:
        h = HurstIndex(parameter).value
        return 4.0 * (1.0 / h + 1.0 / (1.0 - h))
    if kind is LemmaConstantKind.HEAT_INCREMENT:
        h = HurstIndex(parameter).value
        return 1.0 / h + 1.0 / (1.0 - h)
    if kind is LemmaConstantKind.COS_INTEGRAL:
        alpha = parameter
        if not -1.0 < alpha < 1.0:
            raise ValueError(
                f"spectral exponent must lie in (-1, 1), got {alpha}")
        q = DEFAULT_QUAD
        # One cosine lobe resolved by panels, the rest analytically.
        edges = _build_edges(q.small_xi_eps, q.cutoff, (1.0,), ())

        def w(u: np.ndarray) -> np.ndarray:
            return (1.0 - np.cos(u)) * u ** (alpha - 2.0)

        core = float(_gl_eval(w, edges[:-1], edges[1:],
                              _NODES16, _WEIGHTS16).sum())
        eps = q.small_xi_eps
        head = (eps ** (alpha + 1) / (2.0 * (alpha + 1))
                - eps ** (alpha + 3) / (24.0 * (alpha + 3)))
        tail_pow = power_tail(alpha - 2.0, q.cutoff)
        tail_cos, tail_err = osc_power_tail(alpha - 2.0, 1.0, q.cutoff, "cos")
        half_line = head + core + tail_pow - tail_cos
        if not math.isfinite(half_line):
            raise QuadratureError("cosine increment constant quadrature "
                                  "failed", value=half_line)
        return 2.0 * half_line
    raise TypeError(f"expected LemmaConstantKind, got {kind!r}")
