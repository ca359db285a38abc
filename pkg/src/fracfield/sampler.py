"""Reproducible Gaussian sampling from covariance matrices.

Replicates are generated from independent counter-derived streams keyed
by ``(master_seed, replicate_index)``, so the i-th replicate is the same
bit pattern no matter how many replicates are requested, in what order
they are drawn, or how many worker threads are running.  Uniform draws
are mapped to normals through the inverse CDF, keeping the stream usage
per replicate a fixed, documented quantity (one 53-bit uniform per
matrix dimension).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

from .covariance import CovarianceMatrix
from .errors import NotPsdError

__all__ = [
    "PsdFactor",
    "FieldSample",
    "factor_psd",
    "replicate_stream",
    "standard_normals",
    "sample_field",
]

_JITTER_START = 1e-12
_JITTER_CAP = 1e-6


@dataclass(frozen=True)
class PsdFactor:
    """Lower-triangular factor of a covariance matrix.

    Attributes
    ----------
    points : tuple
        The space-time points the covariance was priced on.
    lower : ndarray, shape (k, k)
        Cholesky factor with ``lower @ lower.T`` equal to the covariance
        up to the jitter actually applied.
    jitter_used : float
        Diagonal jitter that made the factorization succeed; zero when
        none was needed.
    """

    points: tuple
    lower: np.ndarray
    jitter_used: float


@dataclass(frozen=True)
class FieldSample:
    """A batch of replicates of a Gaussian field on a fixed point set.

    Attributes
    ----------
    points : tuple
        Space-time points, one per column.
    values : ndarray, shape (n_replicates, k)
        One replicate per row.
    master_seed : int
        Seed the replicate streams were derived from.
    """

    points: tuple
    values: np.ndarray
    master_seed: int


def factor_psd(cov: CovarianceMatrix) -> PsdFactor:
    """Cholesky-factor a covariance, climbing a jitter ladder if needed.

    Starts at ``1e-12 * max_diag`` and multiplies by 10 up to
    ``1e-6 * max_diag``; raises :class:`NotPsdError` if the matrix still
    fails, which indicates an inconsistent covariance rather than normal
    roundoff.
    """
    a = np.asarray(cov.entries, dtype=float)
    if not np.all(np.isfinite(a)):
        raise ValueError("covariance entries must be finite")
    if not np.array_equal(a, a.T):
        raise ValueError("covariance entries must be exactly symmetric")
    if not a.any():
        # Degenerate all-zero covariance: the exact factor is zero, and
        # the jitter ladder has no scale to lean on.
        return PsdFactor(points=cov.points, lower=np.zeros_like(a),
                         jitter_used=0.0)
    try:
        return PsdFactor(points=cov.points, lower=np.linalg.cholesky(a),
                         jitter_used=0.0)
    except np.linalg.LinAlgError:
        pass
    max_diag = float(np.max(np.diag(a))) if a.size else 0.0
    scale = max_diag if max_diag > 0.0 else 1.0
    jitter = _JITTER_START * scale
    cap = _JITTER_CAP * scale
    eye = np.eye(a.shape[0])
    while jitter <= cap * (1.0 + 1e-15):
        try:
            low = np.linalg.cholesky(a + jitter * eye)
            return PsdFactor(points=cov.points, lower=low, jitter_used=jitter)
        except np.linalg.LinAlgError:
            jitter *= 10.0
    raise NotPsdError(
        "covariance not positive semidefinite within the jitter ladder "
        f"(max jitter tried {cap:.3e})", jitter_max=cap)


def replicate_stream(master_seed: int, replicate_index: int
                     ) -> np.random.Generator:
    """Independent generator for one replicate.

    Derived via ``SeedSequence(master_seed).spawn``-style keying: the
    stream depends only on ``(master_seed, replicate_index)``, making
    replicate i identical across batch sizes, orders and thread counts.
    """
    if replicate_index < 0:
        raise ValueError(
            f"replicate index must be >= 0, got {replicate_index}")
    ss = np.random.SeedSequence(entropy=master_seed,
                                spawn_key=(replicate_index,))
    return np.random.default_rng(ss)


def standard_normals(rng: np.random.Generator, n: int) -> np.ndarray:
    """n standard normals via the inverse CDF of 53-bit uniforms.

    The uniforms are offset to the strict interior of (0, 1), so the
    transform can never produce an infinity.
    """
    u = (rng.integers(0, 1 << 53, size=n) + 0.5) * 2.0 ** -53
    return ndtri(u)


def sample_field(factor: PsdFactor, master_seed: int,
                 n_replicates: int) -> FieldSample:
    """Draw replicates of the centered field with the given factor.

    Row i is ``lower @ z_i`` with ``z_i`` from ``replicate_stream(
    master_seed, i)``; doubling ``n_replicates`` reproduces the first
    half bit for bit.
    """
    if n_replicates < 1:
        raise ValueError(f"need at least one replicate, got {n_replicates}")
    k = factor.lower.shape[0]
    z = np.empty((n_replicates, k))
    for i in range(n_replicates):
        z[i] = standard_normals(replicate_stream(master_seed, i), k)
    values = z @ factor.lower.T
    return FieldSample(points=factor.points, values=values,
                       master_seed=int(master_seed))
