"""Fitted Bernstein densities: pdf, cdf, log-likelihood and moments."""
from dataclasses import dataclass, field
from math import comb

import numpy as np

from .basis import eval_basis, eval_basis_cdf
from .exceptions import DomainError
from .transform import SupportMap

__all__ = [
    "BernsteinModel",
    "as_weights",
    "pdf",
    "cdf",
    "loglik",
    "mean_estimate",
    "moment_estimate",
]

SIMPLEX_TOL = 1e-10


def as_weights(w):
    """Validate a mixture-weight vector and return it as a normalized array."""
    w = np.array(w, dtype=float).ravel()
    if w.size == 0:
        raise DomainError("weights must have at least one entry")
    if np.any(~np.isfinite(w)) or np.any(w < 0):
        raise DomainError("weights must be finite and non-negative")
    total = w.sum()
    if abs(total - 1.0) > SIMPLEX_TOL:
        raise DomainError(f"weights must sum to 1, got {total!r}")
    return w / total


@dataclass(frozen=True, eq=False)
class BernsteinModel:
    """A Bernstein polynomial density on ``support``.

    ``loglik`` is measured on the unit-interval data the weights were fitted
    to, so it does not include the ``-n log(b - a)`` Jacobian term.
    """

    weights: np.ndarray
    support: SupportMap = field(default_factory=lambda: SupportMap(0.0, 1.0))
    loglik: float = float("nan")
    n_iter: int = 0
    converged: bool = False

    def __post_init__(self):
        w = as_weights(self.weights)
        w.flags.writeable = False
        object.__setattr__(self, "weights", w)

    @property
    def degree(self):
        return self.weights.size - 1

    def pdf(self, x):
        return pdf(self, x)

    def cdf(self, x):
        return cdf(self, x)

    def mean(self):
        return mean_estimate(self)

    def moment(self, k):
        return moment_estimate(self, k)


def _inside(model, x):
    x = np.asarray(x, dtype=float)
    s = model.support
    return x, (x >= s.a) & (x <= s.b)


def pdf(model, x):
    """Density of ``model`` at raw-scale ``x`` (zero outside the support)."""
    x, inside = _inside(model, x)
    out = np.zeros(x.shape)
    if np.any(inside):
        t = model.support.to_unit(x[inside])
        out[inside] = eval_basis(model.degree, t) @ model.weights / model.support.width
    return out if out.ndim else float(out)


def cdf(model, x):
    """Distribution function of ``model`` at raw-scale ``x``."""
    x, inside = _inside(model, x)
    out = np.where(x > model.support.b, 1.0, 0.0)
    if np.any(inside):
        t = model.support.to_unit(x[inside])
        out[inside] = np.clip(eval_basis_cdf(model.degree, t) @ model.weights, 0.0, 1.0)
    return out if out.ndim else float(out)


def loglik(weights, data):
    """Bernstein log-likelihood ``sum_j log f_B(x_j)`` for data in [0, 1].

    Returns ``-inf`` when the mixture density vanishes at some observation;
    callers treat that as an infeasible model.
    """
    w = np.asarray(weights, dtype=float)
    dens = eval_basis(w.size - 1, np.asarray(data, dtype=float).ravel()) @ w
    if np.any(dens <= 0):
        return -np.inf
    return float(np.sum(np.log(dens)))


def _unit_moments(weights, kmax):
    """E[T**j] for j = 0..kmax under the unit-interval mixture."""
    m = weights.size - 1
    i = np.arange(m + 1, dtype=float)
    out = np.ones(kmax + 1)
    comp = np.ones(m + 1)
    for s in range(kmax):
        # raw moments of beta(i+1, m-i+1): prod (i+1+s)/(m+2+s)
        comp = comp * (i + 1 + s) / (m + 2 + s)
        out[s + 1] = comp @ weights
    return out


def mean_estimate(model):
    """Mean of the fitted density on the raw scale."""
    m = model.degree
    unit_mean = float(np.arange(1, m + 2) @ model.weights) / (m + 2)
    return model.support.a + model.support.width * unit_mean


def moment_estimate(model, k):
    """k-th raw moment ``E[X**k]`` of the fitted density on the raw scale."""
    if int(k) != k or k < 1:
        raise DomainError(f"moment order must be a positive integer, got {k}")
    k = int(k)
    if k == 1:
        return mean_estimate(model)
    mu = _unit_moments(model.weights, k)
    a, w = model.support.a, model.support.width
    return float(sum(comb(k, j) * a ** (k - j) * w ** j * mu[j] for j in range(k + 1)))
