"""Beta-density basis of the Bernstein polynomial model.

The degree-``m`` basis consists of the beta(i+1, m-i+1) densities

    beta_mi(t) = (m + 1) * C(m, i) * t**i * (1 - t)**(m - i),  i = 0..m,

i.e. the Bernstein basis polynomials scaled by ``m + 1`` so that each one
integrates to one on [0, 1].
"""
from functools import lru_cache

import numpy as np
from scipy.special import gammaln

from .exceptions import DomainError

__all__ = ["eval_basis", "eval_basis_cdf", "elevate_degree", "log_binom"]


@lru_cache(maxsize=256)
def _log_binom_row(m):
    i = np.arange(m + 1)
    row = gammaln(m + 1.0) - gammaln(i + 1.0) - gammaln(m - i + 1.0)
    row.flags.writeable = False
    return row


def log_binom(m):
    """Return ``log C(m, i)`` for ``i = 0..m`` as a read-only array."""
    if m < 0:
        raise DomainError(f"degree must be non-negative, got {m}")
    return _log_binom_row(int(m))


def _check_unit(t):
    t = np.asarray(t, dtype=float)
    bad = ~((t >= 0.0) & (t <= 1.0))
    if np.any(bad):
        raise DomainError(f"points must lie in [0, 1]; got {t[bad].ravel()[:5]}")
    return t


def _log_basis(m, t):
    """log beta_mi(t) for interior points 0 < t < 1, shape (len(t), m+1)."""
    i = np.arange(m + 1)
    log_t = np.log(t)[:, None]
    # 1 - t is exact for t >= 0.5, log1p is accurate for small t
    log_1mt = np.log1p(-t)[:, None]
    return np.log(m + 1.0) + log_binom(m) + i * log_t + (m - i) * log_1mt


def eval_basis(m, t):
    """Evaluate the beta densities beta_mi(t), i = 0..m.

    Parameters
    ----------
    m : int
        Degree, ``m >= 0``.
    t : float or array_like
        Point(s) in [0, 1].

    Returns
    -------
    ndarray
        Shape ``(m + 1,)`` for scalar ``t``, otherwise ``t.shape + (m + 1,)``.

    Notes
    -----
    The ratio recurrence ``beta_{m,i+1} = beta_mi * (m - i) t / ((i + 1)(1 - t))``
    is carried out in log space, so the binomial factors become partial sums
    of ``log((m - k) / (k + 1))`` (equivalently log-gamma differences) and no
    intermediate value overflows even for ``m`` in the tens of thousands.
    The endpoints use their closed forms.
    """
    m = int(m)
    if m < 0:
        raise DomainError(f"degree must be non-negative, got {m}")
    t = _check_unit(t)
    flat = np.atleast_1d(t).ravel()
    out = np.zeros((flat.size, m + 1))
    interior = (flat > 0.0) & (flat < 1.0)
    if np.any(interior):
        logs = _log_basis(m, flat[interior])
        rows = np.exp(logs - logs.max(axis=1, keepdims=True))
        # the basis polynomials sum to exactly one; rescaling removes the
        # log-gamma rounding common to a row
        out[interior] = rows * ((m + 1.0) / rows.sum(axis=1, keepdims=True))
    out[flat == 0.0, 0] = m + 1.0
    out[flat == 1.0, m] = m + 1.0
    return out.reshape(t.shape + (m + 1,))


def eval_basis_cdf(m, t):
    """Evaluate the beta CDFs I_t(i + 1, m - i + 1), i = 0..m.

    Uses the binomial upper-tail identity

        I_t(i + 1, m - i + 1) = sum_{j > i} C(m+1, j) t**j (1 - t)**(m+1-j),

    summed from the far tail inward so small tails keep their relative
    accuracy. Output shape follows :func:`eval_basis`.
    """
    m = int(m)
    if m < 0:
        raise DomainError(f"degree must be non-negative, got {m}")
    t = _check_unit(t)
    pmf = eval_basis(m + 1, t) / (m + 2.0)
    tails = np.cumsum(pmf[..., ::-1], axis=-1)[..., ::-1]
    return np.clip(tails[..., 1:], 0.0, 1.0)


def elevate_degree(weights, r):
    """Rewrite a degree-m Bernstein density exactly at degree ``m + r``.

    The new coefficients are

        q_j = (m + 1)/(m + r + 1) * sum_i p_i C(m, i) C(r, j - i) / C(m + r, j),

    which follows from multiplying each basis polynomial by
    ``(t + (1 - t))**r``. The represented density is unchanged pointwise.

    Parameters
    ----------
    weights : array_like, shape (m + 1,)
        Mixture weights on the simplex.
    r : int
        Number of degrees to add, ``r >= 1``.
    """
    if int(r) != r or r <= 0:
        raise DomainError(f"elevation step must be a positive integer, got {r}")
    r = int(r)
    p = np.asarray(weights, dtype=float)
    m = p.size - 1
    i = np.arange(m + 1)[None, :]
    j = np.arange(m + r + 1)[:, None]
    d = j - i
    valid = (d >= 0) & (d <= r)
    lr = log_binom(r)
    log_c = (log_binom(m)[None, :] + lr[np.clip(d, 0, r)]
             - log_binom(m + r)[:, None])
    kernel = np.where(valid, np.exp(log_c), 0.0)
    q = (m + 1.0) / (m + r + 1.0) * (kernel @ p)
    return q / q.sum()
