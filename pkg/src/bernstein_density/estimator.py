"""Scikit-learn compatible front end for the Bernstein density estimator."""
import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .degree import DegreeGrid, select_degree
from .exceptions import DomainError
from .fit import FitConfig, em_fit
from .model import BernsteinModel, loglik
from .transform import SUPPORT_KINDS, choose_support

__all__ = ["BernsteinDensity"]


def _column(X, name="X"):
    X = check_array(X, ensure_2d=False, dtype=np.float64, input_name=name)
    if X.ndim == 2:
        if X.shape[1] != 1:
            raise ValueError(f"expected a single feature, got {X.shape[1]} columns")
        X = X[:, 0]
    return X


class BernsteinDensity(TransformerMixin, BaseEstimator):
    """Maximum likelihood density estimate by a Bernstein polynomial model.

    The data are mapped affinely onto [0, 1], a mixture of the beta
    densities beta(i+1, m-i+1) is fitted by EM and mapped back.

    Parameters
    ----------
    degree : int or "auto", default="auto"
        Model degree. ``"auto"`` selects it by change-point detection on the
        profile log-likelihood.
    support : str or (float, float), default="data_range"
        Either a pair ``(a, b)`` of known endpoints or one of
        ``"data_range"``, ``"unbounded"``. Use ``lower``/``upper`` with
        ``"left_bounded"``/``"right_bounded"``.
    lower, upper : float, optional
        Known endpoint for the semi-bounded support kinds.
    m0, k : int, optional
        Grid ``m0, ..., m0 + k`` for automatic selection; both must be
        given to override the default grid.
    init : {"uniform", "binomial", "empirical"}, default="uniform"
    tol : float, default=1e-7
    max_iter : int, default=500
    f0, f1 : float, optional
        Known density values at the support endpoints on the raw scale.
    symmetric : bool, default=False
        Constrain the density to be symmetric about the support midpoint.
    warm_start : bool, default=True
        Warm-start each degree of the selection sweep from the previous one.

    Attributes
    ----------
    model_ : BernsteinModel
    weights_ : ndarray of shape (degree_ + 1,)
    degree_ : int
    support_ : SupportMap
    loglik_ : float
        Log-likelihood on the unit scale.
    n_iter_ : int
    converged_ : bool
    selection_ : DegreeSelection or None
        Diagnostics of the automatic degree search.

    Examples
    --------
    >>> import numpy as np
    >>> x = np.random.default_rng(0).beta(5, 7, 200)
    >>> est = BernsteinDensity(support=(0, 1)).fit(x)
    >>> float(est.model_.cdf(1.0))
    1.0
    """

    def __init__(self, degree="auto", support="data_range", lower=None, upper=None,
                 m0=None, k=None, init="uniform", tol=1e-7, max_iter=500,
                 f0=None, f1=None, symmetric=False, warm_start=True):
        self.degree = degree
        self.support = support
        self.lower = lower
        self.upper = upper
        self.m0 = m0
        self.k = k
        self.init = init
        self.tol = tol
        self.max_iter = max_iter
        self.f0 = f0
        self.f1 = f1
        self.symmetric = symmetric
        self.warm_start = warm_start

    def _support_for(self, x):
        if isinstance(self.support, str):
            if self.support not in SUPPORT_KINDS or self.support == "known":
                raise ValueError(f"support must be a pair (a, b) or one of "
                                 f"{[s for s in SUPPORT_KINDS if s != 'known']}")
            return choose_support(x, self.support, a=self.lower, b=self.upper)
        a, b = self.support
        return choose_support(x, "known", a=a, b=b)

    def fit(self, X, y=None):
        x = _column(X)
        support = self._support_for(x)
        scale = support.width
        cfg = FitConfig(
            max_iter=self.max_iter, tol=self.tol, init=self.init,
            boundary_f0=None if self.f0 is None else self.f0 * scale,
            boundary_f1=None if self.f1 is None else self.f1 * scale,
            symmetric=self.symmetric,
        )
        t = support.to_unit(x)
        self.selection_ = None
        if isinstance(self.degree, str):
            if self.degree != "auto":
                raise ValueError(f"degree must be an integer or 'auto', got {self.degree!r}")
            grid = None
            if self.m0 is not None and self.k is not None:
                grid = DegreeGrid(int(self.m0), int(self.k))
            sel = select_degree(t, cfg, grid=grid, warm_start=self.warm_start)
            m = sel.m_hat
            res = sel.fit_at(m)
            self.selection_ = sel
        else:
            m = int(self.degree)
            if m != self.degree or m < 0:
                raise ValueError(f"degree must be a non-negative integer, got {self.degree!r}")
            res = em_fit(t, m, cfg)
        self.model_ = BernsteinModel(res.weights, support, res.loglik, res.n_iter, res.converged)
        self.weights_ = self.model_.weights
        self.degree_ = m
        self.support_ = support
        self.loglik_ = res.loglik
        self.n_iter_ = res.n_iter
        self.converged_ = res.converged
        self.n_features_in_ = 1
        return self

    def pdf(self, X):
        check_is_fitted(self)
        return self.model_.pdf(_column(X))

    def cdf(self, X):
        check_is_fitted(self)
        return self.model_.cdf(_column(X))

    def score_samples(self, X):
        """Log-density of each sample (``-inf`` outside the support)."""
        with np.errstate(divide="ignore"):
            return np.log(self.pdf(X))

    def score(self, X, y=None):
        """Total log-likelihood of ``X`` on the raw scale."""
        return float(np.sum(self.score_samples(X)))

    def transform(self, X):
        """Probability integral transform: fitted CDF values as a column."""
        return self.cdf(X).reshape(-1, 1)

    def mean(self):
        check_is_fitted(self)
        return self.model_.mean()

    def moment(self, k):
        check_is_fitted(self)
        return self.model_.moment(k)

    def unit_loglik(self, X):
        """Bernstein log-likelihood of raw data after mapping to [0, 1]."""
        check_is_fitted(self)
        x = _column(X)
        try:
            t = self.support_.to_unit(x)
        except DomainError:
            return -np.inf
        return loglik(self.weights_, t)
