"""Seeded samplers for the simulation scenarios.

Draw order within each function is fixed and documented, so a given
stream position always produces the same values.
"""

from __future__ import annotations

import numpy as np

from .rng import RngStream, as_generator


def sample_mvn(
    mean: np.ndarray,
    cov: np.ndarray,
    rng: RngStream | np.random.Generator,
    size: int | None = None,
) -> np.ndarray:
    """Multivariate normal draws via the lower Cholesky factor.

    Each draw is ``mean + L z`` with ``L L^T = cov`` and ``z`` standard
    normal. Returns shape ``(d,)`` when ``size`` is None, else
    ``(size, d)``.
    """
    mean = np.asarray(mean, dtype=float)
    cov = np.asarray(cov, dtype=float)
    if cov.shape != (mean.size, mean.size):
        raise ValueError("cov must be square and match mean")
    if not np.allclose(cov, cov.T):
        raise ValueError("covariance not positive definite")
    try:
        chol = np.linalg.cholesky(cov)
    except np.linalg.LinAlgError as exc:
        raise ValueError("covariance not positive definite") from exc
    gen = as_generator(rng)
    if size is None:
        z = gen.standard_normal(mean.size)
        return mean + chol @ z
    z = gen.standard_normal((size, mean.size))
    return mean + z @ chol.T


def sample_noncentral_t(
    df: float,
    ncp: float,
    rng: RngStream | np.random.Generator,
    size: int | tuple[int, ...] | None = None,
) -> float | np.ndarray:
    """Noncentral t draws built as ``(Z + ncp) / sqrt(V / df)``.

    ``Z`` is standard normal and ``V`` chi-square with ``df`` degrees of
    freedom, drawn independently in that order (all ``Z`` first, then all
    ``V``).
    """
    if df <= 0:
        raise ValueError(f"df must be positive, got {df}")
    gen = as_generator(rng)
    z = gen.standard_normal(size)
    v = gen.chisquare(df, size)
    out = (z + ncp) / np.sqrt(v / df)
    return float(out) if size is None else out
