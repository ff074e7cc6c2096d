"""Maximum Bernstein-likelihood fitting of the mixture weights by EM."""
import warnings
from dataclasses import dataclass

import numpy as np

from .basis import eval_basis
from .baselines import vitale_cdf
from .exceptions import DomainError, InfeasibleModelError

__all__ = ["FitConfig", "FitResult", "em_fit", "init_weights", "apply_symmetry"]

INIT_SCHEMES = ("uniform", "binomial", "empirical")
# relative floor for initial weights; EM is multiplicative so an exact or
# subnormal zero would pin a component for good
_INIT_FLOOR = 1e-10
_MONOTONE_SLACK = 1e-9


@dataclass(frozen=True)
class FitConfig:
    """Settings for :func:`em_fit`.

    Attributes
    ----------
    max_iter : int
        Iteration cap.
    tol : float
        Stop once ``(l_new - l_old) / (|l_old| + 1) < tol``.
    init : {"uniform", "binomial", "empirical"}
        Starting weights.
    zero_mask : tuple of int, optional
        Component indices whose weight is fixed at zero.
    boundary_f0, boundary_f1 : float, optional
        Known density values at 0 and 1 on the unit scale; they pin
        ``w[0] = f0 / (m + 1)`` and ``w[m] = f1 / (m + 1)``.
    symmetric : bool
        Constrain ``w[i] == w[m - i]``.
    """

    max_iter: int = 500
    tol: float = 1e-7
    init: str = "uniform"
    zero_mask: tuple = ()
    boundary_f0: float = None
    boundary_f1: float = None
    symmetric: bool = False

    def __post_init__(self):
        if int(self.max_iter) != self.max_iter or self.max_iter < 1:
            raise DomainError(f"max_iter must be a positive integer, got {self.max_iter}")
        if not self.tol > 0:
            raise DomainError(f"tol must be positive, got {self.tol}")
        if self.init not in INIT_SCHEMES:
            raise DomainError(f"init must be one of {INIT_SCHEMES}, got {self.init!r}")
        for name in ("boundary_f0", "boundary_f1"):
            v = getattr(self, name)
            if v is not None and not (np.isfinite(v) and v >= 0):
                raise DomainError(f"{name} must be a non-negative number, got {v}")
        object.__setattr__(self, "zero_mask", tuple(sorted({int(i) for i in self.zero_mask})))
        if any(i < 0 for i in self.zero_mask):
            raise DomainError("zero_mask indices must be non-negative")


@dataclass(frozen=True, eq=False)
class FitResult:
    weights: np.ndarray
    loglik: float
    n_iter: int
    converged: bool
    loglik_path: np.ndarray


def _unit_data(data):
    x = np.asarray(data, dtype=float).ravel()
    if x.size == 0:
        raise DomainError("cannot fit empty data")
    if np.any(~((x >= 0) & (x <= 1))):
        raise DomainError("data must lie in [0, 1]; transform them first")
    return x


def apply_symmetry(w):
    """Project weights onto the symmetric set ``w[i] == w[m - i]``."""
    w = np.asarray(w, dtype=float)
    return 0.5 * (w + w[::-1])


def init_weights(data, m, scheme="uniform"):
    """Starting weights for EM at degree ``m``.

    ``uniform`` puts ``1/(m+1)`` on every component, ``binomial`` uses the
    binomial(m, mean) pmf, and ``empirical`` uses the increments of the
    Bernstein-smoothed empirical CDF over the grid ``i/(m+1)``. Entries are
    floored at a small positive value and renormalized. A binomial request
    with a sample mean outside (0, 1) warns and falls back to uniform.
    """
    m = int(m)
    if m < 0:
        raise DomainError(f"degree must be non-negative, got {m}")
    if scheme not in INIT_SCHEMES:
        raise DomainError(f"init must be one of {INIT_SCHEMES}, got {scheme!r}")
    if scheme == "binomial":
        xbar = float(np.mean(data))
        if not 0.0 < xbar < 1.0:
            warnings.warn(f"binomial init needs 0 < mean < 1 (got {xbar}); using uniform",
                          RuntimeWarning, stacklevel=2)
            scheme = "uniform"
        else:
            p = eval_basis(m, xbar) / (m + 1.0)
    if scheme == "uniform":
        return np.full(m + 1, 1.0 / (m + 1))
    if scheme == "empirical":
        grid = np.arange(m + 2) / (m + 1.0)
        p = np.diff(vitale_cdf(_unit_data(data), m, grid))
    p = np.maximum(p, _INIT_FLOOR / (m + 1))
    return p / p.sum()


def _constraints(m, cfg):
    """Return (fixed index -> value, free index mask) for degree m."""
    fixed = {i: 0.0 for i in cfg.zero_mask if i <= m}
    f0, f1 = cfg.boundary_f0, cfg.boundary_f1
    if cfg.symmetric:
        if f0 is not None and f1 is not None and f0 != f1:
            raise DomainError("symmetric fit needs equal boundary values f(0) and f(1)")
        f0 = f1 = f0 if f0 is not None else f1
        fixed.update({m - i: 0.0 for i in list(fixed)})
    for idx, val in ((0, f0), (m, f1)):
        if val is None:
            continue
        pin = val / (m + 1.0)
        if idx in fixed and fixed[idx] != pin:
            raise DomainError(f"conflicting constraints on component {idx}")
        fixed[idx] = pin
    free = np.ones(m + 1, dtype=bool)
    free[list(fixed)] = False
    total = sum(fixed.values())
    if total > 1.0 + 1e-12 or (not free.any() and abs(total - 1.0) > 1e-12):
        raise DomainError(f"constraints pin a total weight of {total}, incompatible with a density")
    return fixed, free


def _impose(p, fixed, free):
    out = np.where(free, p, 0.0)
    for i, v in fixed.items():
        out[i] = v
    mass = 1.0 - sum(fixed.values())
    s = out[free].sum()
    if free.any():
        if s <= 0:
            raise InfeasibleModelError("no free weight left to distribute")
        out[free] *= max(mass, 0.0) / s
    return out


def em_fit(data, m, cfg=None, init=None):
    """Fit the degree-``m`` Bernstein mixture to unit-interval data by EM.

    Each step replaces ``p_i`` with the average posterior membership
    ``(1/n) sum_j p_i beta_mi(x_j) / f(x_j)``. Weights fixed by the
    configuration stay put and the free weights share the remaining mass.

    Parameters
    ----------
    data : array_like
        Observations in [0, 1].
    m : int
        Degree.
    cfg : FitConfig, optional
    init : array_like, optional
        Explicit starting weights (overrides ``cfg.init``); used for warm
        starts along a degree sweep.

    Returns
    -------
    FitResult

    Raises
    ------
    InfeasibleModelError
        If the constrained starting model has zero density at an observation.
    """
    cfg = cfg or FitConfig()
    x = _unit_data(data)
    m = int(m)
    if m < 0:
        raise DomainError(f"degree must be non-negative, got {m}")
    n = x.size
    fixed, free = _constraints(m, cfg)
    p = init_weights(x, m, cfg.init) if init is None else np.asarray(init, dtype=float)
    if p.size != m + 1:
        raise DomainError(f"initial weights have length {p.size}, expected {m + 1}")
    p = _impose(p, fixed, free)
    if cfg.symmetric:
        p = apply_symmetry(p)

    basis = eval_basis(m, x)
    dens = basis @ p
    if np.any(dens <= 0):
        bad = np.flatnonzero(dens <= 0)
        raise InfeasibleModelError(
            f"model has zero density at {bad.size} observation(s), e.g. x={x[bad[0]]!r}")
    ll = float(np.sum(np.log(dens)))
    path = [ll]
    mass = 1.0 - sum(fixed.values())
    converged = False
    n_iter = 0
    for n_iter in range(1, cfg.max_iter + 1):
        new = p * (basis.T @ (1.0 / dens)) / n
        if fixed:
            new = np.where(free, new, 0.0)
            for i, v in fixed.items():
                new[i] = v
        s = new[free].sum()
        if s > 0:
            new[free] *= mass / s
        if cfg.symmetric:
            new = apply_symmetry(new)
        dens = basis @ new
        ll_new = float(np.sum(np.log(dens)))
        assert ll_new >= ll - _MONOTONE_SLACK - 1e-12 * abs(ll), (
            f"EM log-likelihood decreased from {ll!r} to {ll_new!r}")
        rel = (ll_new - ll) / (abs(ll) + 1.0)
        p, ll = new, ll_new
        path.append(ll)
        if rel < cfg.tol:
            converged = True
            break
    return FitResult(weights=p, loglik=ll, n_iter=n_iter, converged=converged,
                     loglik_path=np.asarray(path))
