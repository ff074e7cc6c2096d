"""Choosing the model degree.

Two tools: a moment-based lower bound for the degree, and a change-point
search over the increments of the profile log-likelihood. The increments
``y_i = l(m_i) - l(m_{i-1})`` are treated as two runs of exponentials with
a large mean before the optimal degree and a small one after; the degree
at the most likely change point is selected.
"""
import math
from dataclasses import dataclass, field

import numpy as np

from .basis import elevate_degree
from .exceptions import DomainError, InfeasibleModelError
from .fit import FitConfig, em_fit

__all__ = [
    "DegreeGrid",
    "DegreeSelection",
    "mb_from_moments",
    "lower_bound_mb",
    "default_grid",
    "profile_loglik",
    "changepoint_select",
    "select_degree",
]

INCREMENT_FLOOR = 1e-12
_CEIL_SLACK = 1e-9
_TIE_RTOL = 1e-11


@dataclass(frozen=True)
class DegreeGrid:
    """Consecutive candidate degrees ``m0, m0 + 1, ..., m0 + k``."""

    m0: int
    k: int

    def __post_init__(self):
        if self.m0 < 0:
            raise DomainError(f"grid start must be non-negative, got {self.m0}")
        if self.k < 2:
            raise DomainError(f"grid needs k >= 2 increments, got {self.k}")

    @property
    def degrees(self):
        return np.arange(self.m0, self.m0 + self.k + 1)


@dataclass(eq=False)
class DegreeSelection:
    grid: DegreeGrid
    profile: np.ndarray
    increments: np.ndarray
    R: np.ndarray
    tau_hat: int
    m_hat: int
    m_b: int = None
    flat: bool = False
    fits: list = field(default_factory=list, repr=False)

    def fit_at(self, m):
        """The EM result at degree ``m`` of the grid."""
        return self.fits[int(m) - self.grid.m0]

    def weights_at(self, m):
        return self.fit_at(m).weights


def _ceil(x):
    # population ratios such as 13 - 3 come out as 10.000000000000002
    return math.ceil(x - _CEIL_SLACK * max(1.0, abs(x)))


def mb_from_moments(mean, var):
    """Degree lower bound ``max(1, ceil(mean (1 - mean) / var - 3))``.

    ``mean`` and ``var`` refer to a distribution on [0, 1].
    """
    if not var > 0:
        raise DomainError(f"variance must be positive, got {var}")
    return max(1, _ceil(mean * (1.0 - mean) / var - 3.0))


def _rho(x):
    return x.mean() * (1.0 - x.mean()) / x.var(ddof=1)


def _rho_jackknife(x):
    n = x.size
    if n < 3:
        raise DomainError("jackknife lower bound needs at least 3 observations")
    d = x - x.mean()
    ss = d @ d
    loo_mean = x.mean() - d / (n - 1)
    loo_var = (ss - d * d * n / (n - 1)) / (n - 2)
    if np.any(loo_var <= 0):
        raise DomainError("leave-one-out sample with zero variance")
    loo_rho = loo_mean * (1.0 - loo_mean) / loo_var
    return n * _rho(x) - (n - 1) / n * loo_rho.sum()


def lower_bound_mb(data, jackknife=True):
    """Estimate the degree lower bound from unit-interval data.

    Uses ``rho = xbar (1 - xbar) / s^2`` (``s^2`` the unbiased sample
    variance), or its leave-one-out jackknife version when ``jackknife`` is
    set, and returns ``max(ceil(rho - 3), 1)``.
    """
    x = np.asarray(data, dtype=float).ravel()
    if x.size < 2:
        raise DomainError("lower bound needs at least 2 observations")
    if not x.var(ddof=1) > 0:
        raise DomainError("lower bound undefined for zero-variance data")
    rho = _rho_jackknife(x) if jackknife else _rho(x)
    return max(1, _ceil(rho - 3.0))


def default_grid(m_b):
    """Grid used when none is supplied, built around the lower bound.

    The grid starts below ``m_b`` so that a change point at the lower bound
    itself is detectable, and extends far enough past it that both segments
    of increments are long.
    """
    m0 = max(1, m_b // 2)
    k = min(max(20, 2 * m_b), 100)
    return DegreeGrid(m0, k)


def _sweep(x, grid, cfg, warm_start):
    fits = []
    prev = None
    for m in grid.degrees:
        init = None
        if warm_start and prev is not None:
            init = elevate_degree(prev.weights, m - prev.weights.size + 1)
        try:
            res = em_fit(x, m, cfg, init=init)
        except InfeasibleModelError:
            if init is None:
                raise
            res = em_fit(x, m, cfg)
        fits.append(res)
        prev = res
    return fits


def profile_loglik(data, grid, cfg=None, warm_start=True):
    """Maximized log-likelihood at every degree in ``grid``.

    With ``warm_start`` each degree starts EM from the previous optimum
    elevated by one degree, which has the same likelihood; the sweep is then
    sequential and the profile cannot decrease. Cold starts use
    ``cfg.init`` independently at each degree.
    """
    fits = _sweep(np.asarray(data, dtype=float).ravel(), grid, cfg or FitConfig(), warm_start)
    return np.array([f.loglik for f in fits])


def _increments(profile):
    ell = np.asarray(profile, dtype=float)
    return np.diff(ell)


def changepoint_select(profile):
    """Locate the change point in the increments of a profile log-likelihood.

    For ``tau = 1..k-1`` computes

        R(tau) = k log(S_k / k) - tau log(S_tau / tau)
                 - (k - tau) log((S_k - S_tau) / (k - tau)),

    with ``S_tau = l_tau - l_0`` built from increments floored at 1e-12.
    ``tau = k`` is excluded because the second segment is then empty.

    Returns
    -------
    tau_hat : int
        Smallest maximizer of ``R`` (values within a relative 1e-11 of the
        maximum count as ties).
    R : ndarray, shape (k - 1,)
    flat : bool
        True when the profile does not increase; ``tau_hat`` is then 1.
    """
    y = _increments(profile)
    k = y.size
    if k < 2:
        raise DomainError(f"change-point search needs k >= 2 increments, got {k}")
    flat = not np.any(y > INCREMENT_FLOOR)
    y = np.maximum(y, INCREMENT_FLOOR)
    s = np.cumsum(y)
    tau = np.arange(1, k)
    st = s[:-1]
    sk = s[-1]
    r = (k * np.log(sk / k) - tau * np.log(st / tau)
         - (k - tau) * np.log((sk - st) / (k - tau)))
    if flat:
        return 1, r, True
    best = r.max()
    tau_hat = int(np.flatnonzero(r >= best - _TIE_RTOL * (1.0 + abs(best)))[0]) + 1
    return tau_hat, r, False


def select_degree(data, cfg=None, grid=None, warm_start=True, jackknife=True):
    """Select the degree by change-point detection on the profile likelihood.

    Parameters
    ----------
    data : array_like
        Observations in [0, 1].
    cfg : FitConfig, optional
    grid : DegreeGrid, optional
        Candidate degrees; built with :func:`default_grid` from the
        jackknifed lower bound when omitted.

    Returns
    -------
    DegreeSelection
    """
    x = np.asarray(data, dtype=float).ravel()
    if x.size < 2:
        raise DomainError("degree selection needs at least 2 observations")
    cfg = cfg or FitConfig()
    m_b = None
    if grid is None or x.var(ddof=1) > 0:
        try:
            m_b = lower_bound_mb(x, jackknife=jackknife and x.size >= 3)
        except DomainError:
            if grid is None:
                raise
    if grid is None:
        grid = default_grid(m_b)
    fits = _sweep(x, grid, cfg, warm_start)
    profile = np.array([f.loglik for f in fits])
    tau_hat, r, flat = changepoint_select(profile)
    return DegreeSelection(
        grid=grid,
        profile=profile,
        increments=_increments(profile),
        R=r,
        tau_hat=tau_hat,
        m_hat=int(grid.degrees[tau_hat]),
        m_b=m_b,
        flat=flat,
        fits=fits,
    )
