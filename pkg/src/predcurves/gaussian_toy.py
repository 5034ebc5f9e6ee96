"""Closed-form confidence and predictive curves for a Gaussian mean.

For ``y_1, ..., y_n`` iid ``N(theta, 1)`` with known unit variance, both
estimation and prediction admit exact sample-dependent distributions:

* confidence distribution  ``H(theta) = Phi(sqrt(n) (theta - ybar))``
* predictive distribution  ``Q(y) = Phi((y - ybar) / sqrt(1 + 1/n))``

and the corresponding curves ``2 min(H, 1 - H)`` and ``2 min(Q, 1 - Q)``
stack the two-sided intervals of every level, peaking at the sample mean
(the median-unbiased point estimate/prediction). These closed forms also
serve as ground truth for the conformal machinery: with an intercept-only
learner the conformal predictive curve converges to the analytic one.

``H`` and ``Q`` read as p-value functions of the one-sided tests about
``theta`` (respectively the unseen response); the curves are the
two-sided versions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr


@dataclass(frozen=True)
class GaussianToySample:
    """Sufficient statistics of the sample: its mean and size (variance fixed at 1)."""

    ybar: float
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be at least 1")

    @classmethod
    def from_data(cls, y: np.ndarray) -> "GaussianToySample":
        y = np.asarray(y, dtype=float)
        return cls(ybar=float(y.mean()), n=y.size)


def confidence_cdf(sample: GaussianToySample, theta: float) -> float:
    """``Phi(sqrt(n) (theta - ybar))``."""
    return float(ndtr(np.sqrt(sample.n) * (theta - sample.ybar)))


def confidence_curve(sample: GaussianToySample, theta: float) -> float:
    """``2 min(H, 1 - H)``; equals 1 at ``theta = ybar``."""
    h = confidence_cdf(sample, theta)
    return 2.0 * min(h, 1.0 - h)


def predictive_cdf_toy(sample: GaussianToySample, y: float) -> float:
    """``Phi((y - ybar) / sqrt(1 + 1/n))``."""
    scale = np.sqrt(1.0 + 1.0 / sample.n)
    return float(ndtr((y - sample.ybar) / scale))


def predictive_curve_toy(sample: GaussianToySample, y: float) -> float:
    """``2 min(Q, 1 - Q)``; peaks at the sample mean."""
    q = predictive_cdf_toy(sample, y)
    return 2.0 * min(q, 1.0 - q)
