"""Exponential-family building blocks: cumulant functions, log-likelihood,
mean vectors, and scaled deviance.

Each family is canonical-link: the linear predictor theta = x'beta is the
canonical parameter, mu = b'(theta), and Var(Y) = phi * b''(theta) with
phi fixed at 1 for binomial and Poisson.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

GAUSSIAN = "gaussian"
BINOMIAL = "binomial"
POISSON = "poisson"

_KINDS = (GAUSSIAN, BINOMIAL, POISSON)

# Linear predictors are clamped here before exponentiation (binomial and
# Poisson); beyond this the result is unchanged at the 1e-13 level.
THETA_CLAMP = 30.0


class FamilyError(ValueError):
    pass


@dataclass(frozen=True)
class Family:
    """A canonical-link GLM family.

    ``phi`` is the known dispersion: the Gaussian sigma^2, fixed at 1 for
    binomial and Poisson.
    """

    kind: str
    phi: float = 1.0

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise FamilyError(f"unknown family kind: {self.kind!r}")
        if not np.isfinite(self.phi) or self.phi <= 0:
            raise FamilyError(f"phi must be positive, got {self.phi}")
        if self.kind != GAUSSIAN and self.phi != 1.0:
            raise FamilyError(f"{self.kind} family requires phi = 1")

    # -- cumulant function and derivatives ---------------------------------

    def b(self, theta):
        theta = _check_theta(theta)
        if self.kind == GAUSSIAN:
            return 0.5 * theta**2
        if self.kind == BINOMIAL:
            t = np.clip(theta, -THETA_CLAMP, THETA_CLAMP)
            return np.logaddexp(0.0, t)
        return np.exp(np.minimum(theta, THETA_CLAMP))

    def b_prime(self, theta):
        theta = _check_theta(theta)
        if self.kind == GAUSSIAN:
            return theta + 0.0
        if self.kind == BINOMIAL:
            t = np.clip(theta, -THETA_CLAMP, THETA_CLAMP)
            return 1.0 / (1.0 + np.exp(-t))
        return np.exp(np.minimum(theta, THETA_CLAMP))

    def b_double_prime(self, theta):
        theta = _check_theta(theta)
        if self.kind == GAUSSIAN:
            return np.ones_like(np.asarray(theta, dtype=float))
        if self.kind == BINOMIAL:
            mu = self.b_prime(theta)
            return mu * (1.0 - mu)
        return np.exp(np.minimum(theta, THETA_CLAMP))

    def variance(self, theta):
        """Response variance phi * b''(theta)."""
        return self.phi * self.b_double_prime(theta)


def make_family(kind, phi=1.0):
    return Family(kind=kind, phi=phi)


def _check_theta(theta):
    theta = np.asarray(theta, dtype=float)
    if not np.all(np.isfinite(theta)):
        raise FamilyError("non-finite linear predictor")
    return theta


def cumulant(family, theta):
    """Return (b, b', b'') at a scalar or vector theta."""
    return family.b(theta), family.b_prime(theta), family.b_double_prime(theta)


def log_likelihood(family, dataset, beta):
    """Log-likelihood sum_i {y_i theta_i - b(theta_i)} / phi, dropping the
    beta-free normalization term.
    """
    beta = np.asarray(beta, dtype=float)
    if beta.shape != (dataset.p,):
        raise FamilyError(
            f"beta has shape {beta.shape}, expected ({dataset.p},)"
        )
    theta = dataset.x @ beta
    return log_likelihood_theta(family, theta, dataset.y)


def log_likelihood_theta(family, theta, y):
    theta = _check_theta(theta)
    return float(np.sum(y * theta - family.b(theta)) / family.phi)


def mean_vector(family, dataset, beta):
    """Fitted mean b'(X beta)."""
    beta = np.asarray(beta, dtype=float)
    if beta.shape != (dataset.p,):
        raise FamilyError(
            f"beta has shape {beta.shape}, expected ({dataset.p},)"
        )
    return family.b_prime(dataset.x @ beta)


def deviance(family, mu, y):
    """Scaled deviance 2{l(y; y) - l(mu; y)}.

    Gaussian: ||y - mu||^2 / phi. Binomial and Poisson use the standard
    closed forms with 0 log 0 := 0.
    """
    mu = np.asarray(mu, dtype=float)
    y = np.asarray(y, dtype=float)
    if mu.shape != y.shape:
        raise FamilyError("mu and y must have the same shape")
    if family.kind == GAUSSIAN:
        r = y - mu
        return float(r @ r / family.phi)
    if family.kind == BINOMIAL:
        if np.any((mu <= 0) & (y > 0)) or np.any((mu >= 1) & (y < 1)):
            raise FamilyError("binomial mean on the boundary incompatible with y")
        with np.errstate(divide="ignore", invalid="ignore"):
            t1 = np.where(y > 0, y * np.log(mu), 0.0)
            t2 = np.where(y < 1, (1.0 - y) * np.log(1.0 - mu), 0.0)
        return float(-2.0 * np.sum(t1 + t2))
    # Poisson
    if np.any((mu <= 0) & (y > 0)):
        raise FamilyError("poisson mean must be positive where y > 0")
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(y > 0, y * np.log(y / mu), 0.0)
    return float(2.0 * np.sum(t - (y - mu)))
