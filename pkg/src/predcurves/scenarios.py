"""Data-generating scenarios for the Monte Carlo studies.

Two families are provided, each with an in-distribution ("iid") and a
covariate-shifted ("non-iid") test law. Training rows are always drawn
from the base law; test responses always follow the true model given the
test covariates, so only the covariate marginal shifts.

linear
    y = b0 + b1 z + b2 w + eps with (z, w) Gaussian, AR(1)-type
    covariance scaled by 1/2. The shifted test law moves the covariate
    mean and changes the correlation.

nn
    y = max(0, max(0, z1 + z2) - max(0, w)) + eps, a bias-free two-layer
    ReLU network in disguise. The shifted test law replaces the Gaussian
    covariates by three independent noncentral-t draws, which are both
    translated and heavy tailed.

Draw order inside each generator is fixed (training covariates, training
noise, test covariates, test noise) so that scenarios sharing a stream
see identical training data regardless of the test configuration.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .conformal import Dataset
from .mlp import MlpArchitecture, mlp_forward
from .rng import RngStream, as_generator
from .sampling import sample_mvn, sample_noncentral_t


def ar_covariance(dim: int, rho: float, scale: float = 0.5) -> np.ndarray:
    """Covariance with entries ``scale * rho ** |k - k'|``."""
    idx = np.arange(dim)
    return scale * rho ** np.abs(idx[:, None] - idx[None, :])


@dataclass(frozen=True)
class LinearScenario:
    beta: tuple[float, float, float] = (-1.0, 2.0, 2.0)
    sigma2: float = 1.0
    mu_x: tuple[float, float] = (0.0, 0.0)
    rho_x: float = 0.5
    shift: tuple[float, float] = (2.0, 2.0)
    rho_shift: float = 0.8
    n_train: int = 300

    @property
    def cov_x(self) -> np.ndarray:
        return ar_covariance(2, self.rho_x)

    @property
    def cov_shift(self) -> np.ndarray:
        return ar_covariance(2, self.rho_shift)

    @property
    def mu_shifted(self) -> np.ndarray:
        return np.asarray(self.mu_x) + np.asarray(self.shift)

    def mean_response(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        b = np.asarray(self.beta)
        return b[0] + X @ b[1:]


@dataclass(frozen=True)
class NnScenario:
    sigma2: float = 1.0
    mu_x: tuple[float, float, float] = (0.0, 0.0, 0.0)
    rho_x: float = 0.5
    t_df: float = 3.0
    t_ncp: float = 1.0
    n_train: int = 300

    @property
    def cov_x(self) -> np.ndarray:
        return ar_covariance(3, self.rho_x)

    @property
    def architecture(self) -> MlpArchitecture:
        return MlpArchitecture((3, 2, 1))

    def true_params(self) -> list:
        """Weights whose network computes max(0, max(0, z1+z2) - max(0, w))."""
        a1 = np.array([[1.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
        a2 = np.array([[1.0, -1.0]])
        return [a1, a2]

    def equivalent_true_params(self) -> list:
        """All canonical weight sets computing the true response surface.

        Beyond scale and permutation, this network has one more exact
        symmetry: pointwise in (a, w),

            max(0, a - max(0, w)) = max(0, max(0, a - w) - max(0, -w)),

        (check the cases w >= 0 and w < 0 separately), so shearing w into
        the first hidden unit while negating the second leaves the response
        surface identical everywhere. Parameters are therefore only
        identified up to this two-member class, and estimation error must
        be measured against the nearest member.
        """
        alt1 = np.array([[1.0, 1.0, -1.0], [0.0, 0.0, -1.0]])
        alt2 = np.array([[1.0, -1.0]])
        return [self.true_params(), [alt1, alt2]]

    def mean_response(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        params = self.true_params()
        return np.array([mlp_forward(params, x) for x in X])


def gen_linear(
    scenario: LinearScenario,
    iid: bool,
    rng: RngStream | np.random.Generator,
    n_train: int | None = None,
    n_test: int = 1,
) -> tuple[Dataset, tuple[np.ndarray, np.ndarray]]:
    """Training set plus test pairs under the linear scenario."""
    gen = as_generator(rng)
    n = scenario.n_train if n_train is None else n_train
    sigma = np.sqrt(scenario.sigma2)
    X = sample_mvn(np.asarray(scenario.mu_x), scenario.cov_x, gen, size=n)
    y = scenario.mean_response(X) + sigma * gen.standard_normal(n)
    if n_test == 0:
        empty = np.empty((0, 2)), np.empty(0)
        return Dataset(X, y), empty
    if iid:
        X_test = sample_mvn(np.asarray(scenario.mu_x), scenario.cov_x, gen, size=n_test)
    else:
        X_test = sample_mvn(scenario.mu_shifted, scenario.cov_shift, gen, size=n_test)
    y_test = scenario.mean_response(X_test) + sigma * gen.standard_normal(n_test)
    return Dataset(X, y), (X_test, y_test)


def gen_nn(
    scenario: NnScenario,
    iid: bool,
    rng: RngStream | np.random.Generator,
    n_train: int | None = None,
    n_test: int = 1,
) -> tuple[Dataset, tuple[np.ndarray, np.ndarray]]:
    """Training set plus test pairs under the neural-network scenario.

    The shifted test covariates are ``(T1, T2, T3)`` with independent
    noncentral-t components (df, noncentrality from the scenario).
    """
    gen = as_generator(rng)
    n = scenario.n_train if n_train is None else n_train
    sigma = np.sqrt(scenario.sigma2)
    X = sample_mvn(np.asarray(scenario.mu_x), scenario.cov_x, gen, size=n)
    y = scenario.mean_response(X) + sigma * gen.standard_normal(n)
    if n_test == 0:
        empty = np.empty((0, 3)), np.empty(0)
        return Dataset(X, y), empty
    if iid:
        X_test = sample_mvn(np.asarray(scenario.mu_x), scenario.cov_x, gen, size=n_test)
    else:
        X_test = sample_noncentral_t(scenario.t_df, scenario.t_ncp, gen, size=(n_test, 3))
    y_test = scenario.mean_response(X_test) + sigma * gen.standard_normal(n_test)
    return Dataset(X, y), (X_test, y_test)
