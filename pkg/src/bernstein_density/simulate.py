"""Test distributions and the Monte Carlo study comparing density estimators.

Eight presets are provided. Every run draws a sample, fits the Bernstein
model at the change-point degree, a Gaussian KDE and a parametric maximum
likelihood competitor, and records squared errors on a 200-cell midpoint
grid over the (truncated) support.
"""
import csv
import math
from dataclasses import asdict, dataclass, field
from functools import lru_cache

import numpy as np
from scipy import integrate, special, stats

from .baselines import KernelConfig, bandwidth, ecdf, kde
from .degree import select_degree
from .exceptions import DomainError
from .fit import FitConfig
from .model import BernsteinModel
from .transform import SupportMap

__all__ = [
    "TestDistribution",
    "PRESETS",
    "get_preset",
    "run_rng",
    "sample",
    "true_pdf",
    "true_cdf",
    "true_mean",
    "ParametricFit",
    "parametric_fit",
    "SimReport",
    "run_study",
    "write_pointwise_csv",
]

KINDS = ("beta", "truncated_gamma", "truncated_normal", "normal_mixture",
         "nearly_normal", "nearly_normal_mixture")


@dataclass(frozen=True)
class TestDistribution:
    """A named law with finite (possibly truncated) support [lo, hi].

    ``params`` by kind:

    * ``beta``: (a, b)
    * ``truncated_gamma``: (shape, scale); support [0, hi]
    * ``truncated_normal``: (mu, sigma)
    * ``normal_mixture``: (w1, mu1, sigma1, mu2, sigma2)
    * ``nearly_normal``: (k,) -- mean of k uniforms on [0, 1]
    * ``nearly_normal_mixture``: (k,) -- 0.5 psi_k(x/1.5)/1.5 + 0.5 psi_k((x-1)/2)/2
    """

    __test__ = False  # not a pytest class

    name: str
    kind: str
    params: tuple
    lo: float
    hi: float
    family: str

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown distribution kind {self.kind!r}")
        if not self.hi > self.lo:
            raise DomainError(f"{self.name}: need hi > lo")
        p = self.params
        if self.kind == "beta" and not (p[0] > 0 and p[1] > 0):
            raise DomainError("beta shape parameters must be positive")
        if self.kind in ("truncated_gamma",) and not (p[0] > 0 and p[1] > 0 and self.lo == 0):
            raise DomainError("gamma needs positive shape/scale and lower bound 0")
        if self.kind == "truncated_normal" and not p[1] > 0:
            raise DomainError("normal sigma must be positive")
        if self.kind == "normal_mixture" and not (0 < p[0] < 1 and p[2] > 0 and p[4] > 0):
            raise DomainError("normal mixture needs 0 < w1 < 1 and positive sigmas")
        if self.kind.startswith("nearly") and not (int(p[0]) == p[0] and p[0] >= 1):
            raise DomainError("nearly-normal k must be a positive integer")

    @property
    def support(self):
        return SupportMap(self.lo, self.hi)


_G_HI = 4.0 + 5.0 * math.sqrt(8.0)

PRESETS = {
    d.name: d
    for d in (
        TestDistribution("U(0,1)", "beta", (1.0, 1.0), 0.0, 1.0, "beta"),
        TestDistribution("B(5,7)", "beta", (5.0, 7.0), 0.0, 1.0, "beta"),
        TestDistribution("B(2.5,10)", "beta", (2.5, 10.0), 0.0, 1.0, "beta"),
        TestDistribution("G(2,2)", "truncated_gamma", (2.0, 2.0), 0.0, _G_HI, "gamma"),
        TestDistribution("N(0,1)", "truncated_normal", (0.0, 1.0), -5.0, 5.0, "normal"),
        TestDistribution("NM", "normal_mixture", (0.5, -1.0, 0.5, 1.0, 0.3), -3.5, 3.5,
                         "normal_mixture"),
        TestDistribution("NN(4)", "nearly_normal", (4,), 0.0, 1.0, "normal"),
        TestDistribution("NNM", "nearly_normal_mixture", (4,), 0.0, 3.0, "normal_mixture"),
    )
}


def get_preset(name):
    try:
        return PRESETS[name]
    except KeyError:
        raise DomainError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None


def run_rng(seed, run):
    """Independent generator for Monte Carlo run ``run`` under ``seed``."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(seed), int(run)])))


# -- Irwin-Hall ------------------------------------------------------------

def _irwin_hall_pdf(s, k):
    s = np.asarray(s, dtype=float)
    out = np.zeros(s.shape)
    for j in range(k + 1):
        out += (-1) ** j * math.comb(k, j) * np.where(s > j, (s - j), 0.0) ** (k - 1)
    out /= math.factorial(k - 1)
    return np.where((s >= 0) & (s <= k), np.maximum(out, 0.0), 0.0)


def _irwin_hall_cdf(s, k):
    s = np.asarray(s, dtype=float)
    out = np.zeros(s.shape)
    for j in range(k + 1):
        out += (-1) ** j * math.comb(k, j) * np.where(s > j, (s - j), 0.0) ** k
    out /= math.factorial(k)
    return np.clip(np.where(s >= k, 1.0, out), 0.0, 1.0)


def _psi(t, k):
    """Density of the mean of k independent uniforms."""
    if k == 1:
        t = np.asarray(t, dtype=float)
        return np.where((t >= 0) & (t <= 1), 1.0, 0.0)
    return k * _irwin_hall_pdf(k * np.asarray(t, dtype=float), k)


def _psi_cdf(t, k):
    return _irwin_hall_cdf(k * np.asarray(t, dtype=float), k)


# -- normal pieces ---------------------------------------------------------

def _mixture_parts(dist):
    """Component weights renormalized to the truncation window."""
    w1, m1, s1, m2, s2 = dist.params
    comps = [(w1, m1, s1), (1.0 - w1, m2, s2)]
    masses = [w * (special.ndtr((dist.hi - m) / s) - special.ndtr((dist.lo - m) / s))
              for w, m, s in comps]
    total = sum(masses)
    return [(ms / total, m, s) for ms, (_, m, s) in zip(masses, comps)]


def _trunc_normal_ppf(u, mu, sigma, lo, hi):
    a = special.ndtr((lo - mu) / sigma)
    b = special.ndtr((hi - mu) / sigma)
    x = mu + sigma * special.ndtri(a + u * (b - a))
    return np.clip(x, lo, hi)


def sample(dist, n, seed=None, rng=None):
    """Draw ``n`` i.i.d. observations from ``dist``.

    Truncated laws are sampled by inverting the truncated CDF, so each
    observation consumes exactly one uniform. Pass either an integer ``seed``
    or a numpy ``Generator``.
    """
    if int(n) != n or n < 1:
        raise DomainError(f"sample size must be a positive integer, got {n}")
    n = int(n)
    if rng is None:
        rng = np.random.Generator(np.random.PCG64(seed))
    p = dist.params
    if dist.kind == "beta":
        return stats.beta.ppf(rng.random(n), p[0], p[1])
    if dist.kind == "truncated_gamma":
        shape, scale = p
        top = special.gammainc(shape, dist.hi / scale)
        x = scale * special.gammaincinv(shape, rng.random(n) * top)
        return np.clip(x, dist.lo, dist.hi)
    if dist.kind == "truncated_normal":
        return _trunc_normal_ppf(rng.random(n), p[0], p[1], dist.lo, dist.hi)
    if dist.kind == "normal_mixture":
        (w1, m1, s1), (_, m2, s2) = _mixture_parts(dist)
        first = rng.random(n) < w1
        u = rng.random(n)
        return np.where(first, _trunc_normal_ppf(u, m1, s1, dist.lo, dist.hi),
                        _trunc_normal_ppf(u, m2, s2, dist.lo, dist.hi))
    k = int(p[0])
    if dist.kind == "nearly_normal":
        return rng.random((n, k)).mean(axis=1)
    first = rng.random(n) < 0.5
    base = rng.random((n, k)).mean(axis=1)
    return np.where(first, 1.5 * base, 1.0 + 2.0 * base)


def true_pdf(dist, x):
    x = np.asarray(x, dtype=float)
    inside = (x >= dist.lo) & (x <= dist.hi)
    p = dist.params
    if dist.kind == "beta":
        out = stats.beta.pdf(np.clip(x, 0, 1), p[0], p[1])
    elif dist.kind == "truncated_gamma":
        shape, scale = p
        out = stats.gamma.pdf(x, shape, scale=scale) / special.gammainc(shape, dist.hi / scale)
    elif dist.kind == "truncated_normal":
        mass = special.ndtr((dist.hi - p[0]) / p[1]) - special.ndtr((dist.lo - p[0]) / p[1])
        out = stats.norm.pdf(x, p[0], p[1]) / mass
    elif dist.kind == "normal_mixture":
        out = sum(w * stats.norm.pdf(x, m, s)
                  / (special.ndtr((dist.hi - m) / s) - special.ndtr((dist.lo - m) / s))
                  for w, m, s in _mixture_parts(dist))
    elif dist.kind == "nearly_normal":
        out = _psi(x, int(p[0]))
    else:
        k = int(p[0])
        out = 0.5 * _psi(x / 1.5, k) / 1.5 + 0.5 * _psi((x - 1.0) / 2.0, k) / 2.0
    out = np.where(inside, out, 0.0)
    return out if out.ndim else float(out)


def true_cdf(dist, x):
    x = np.asarray(x, dtype=float)
    p = dist.params
    if dist.kind == "beta":
        out = stats.beta.cdf(x, p[0], p[1])
    elif dist.kind == "truncated_gamma":
        shape, scale = p
        xc = np.clip(x, dist.lo, dist.hi)
        out = special.gammainc(shape, xc / scale) / special.gammainc(shape, dist.hi / scale)
    elif dist.kind == "truncated_normal":
        a = special.ndtr((dist.lo - p[0]) / p[1])
        b = special.ndtr((dist.hi - p[0]) / p[1])
        out = (special.ndtr((np.clip(x, dist.lo, dist.hi) - p[0]) / p[1]) - a) / (b - a)
    elif dist.kind == "normal_mixture":
        xc = np.clip(x, dist.lo, dist.hi)
        out = 0.0
        for w, m, s in _mixture_parts(dist):
            a = special.ndtr((dist.lo - m) / s)
            b = special.ndtr((dist.hi - m) / s)
            out = out + w * (special.ndtr((xc - m) / s) - a) / (b - a)
    elif dist.kind == "nearly_normal":
        out = _psi_cdf(x, int(p[0]))
    else:
        k = int(p[0])
        out = 0.5 * _psi_cdf(x / 1.5, k) + 0.5 * _psi_cdf((x - 1.0) / 2.0, k)
    out = np.clip(np.where(x >= dist.hi, 1.0, np.where(x <= dist.lo, 0.0, out)), 0.0, 1.0)
    return out if out.ndim else float(out)


def _breakpoints(dist):
    if dist.kind == "nearly_normal":
        k = int(dist.params[0])
        return [i / k for i in range(1, k)]
    if dist.kind == "nearly_normal_mixture":
        k = int(dist.params[0])
        pts = {1.5 * i / k for i in range(1, k + 1)} | {1.0 + 2.0 * i / k for i in range(k)}
        return sorted(p for p in pts if dist.lo < p < dist.hi)
    return None


@lru_cache(maxsize=64)
def true_mean(dist):
    """Mean of ``dist`` on its truncated support (adaptive quadrature)."""
    val, _ = integrate.quad(lambda x: x * true_pdf(dist, x), dist.lo, dist.hi,
                            points=_breakpoints(dist), limit=200, epsabs=1e-13)
    return val


# -- parametric competitors ------------------------------------------------

@dataclass(frozen=True)
class ParametricFit:
    """A fitted parametric density restricted and renormalized to [lo, hi].

    ``mean`` is the mean of the fitted, untruncated law.
    """

    family: str
    params: tuple
    lo: float
    hi: float
    converged: bool = True

    def _raw_pdf(self, x):
        p = self.params
        if self.family == "beta":
            return stats.beta.pdf(x, p[0], p[1])
        if self.family == "gamma":
            return stats.gamma.pdf(x, p[0], scale=p[1])
        if self.family == "normal":
            return stats.norm.pdf(x, p[0], p[1])
        return p[0] * stats.norm.pdf(x, p[1], p[2]) + (1 - p[0]) * stats.norm.pdf(x, p[3], p[4])

    def _raw_cdf(self, x):
        p = self.params
        if self.family == "beta":
            return stats.beta.cdf(x, p[0], p[1])
        if self.family == "gamma":
            return stats.gamma.cdf(x, p[0], scale=p[1])
        if self.family == "normal":
            return stats.norm.cdf(x, p[0], p[1])
        return p[0] * stats.norm.cdf(x, p[1], p[2]) + (1 - p[0]) * stats.norm.cdf(x, p[3], p[4])

    @property
    def mass(self):
        return float(self._raw_cdf(self.hi) - self._raw_cdf(self.lo))

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        inside = (x >= self.lo) & (x <= self.hi)
        return np.where(inside, self._raw_pdf(x), 0.0) / self.mass

    def cdf(self, x):
        x = np.clip(np.asarray(x, dtype=float), self.lo, self.hi)
        return np.clip((self._raw_cdf(x) - self._raw_cdf(self.lo)) / self.mass, 0.0, 1.0)

    @property
    def mean(self):
        p = self.params
        if self.family == "beta":
            return p[0] / (p[0] + p[1])
        if self.family == "gamma":
            return p[0] * p[1]
        if self.family == "normal":
            return p[0]
        return p[0] * p[1] + (1 - p[0]) * p[3]


def _fit_beta(x, max_iter=100, tol=1e-12):
    x = np.clip(x, 1e-300, 1.0 - 1e-16)
    la, lb = np.mean(np.log(x)), np.mean(np.log1p(-x))
    m, v = x.mean(), x.var()
    common = m * (1 - m) / v - 1.0
    theta = np.array([m * common, (1 - m) * common])
    if not np.all(theta > 0):
        theta = np.array([1.0, 1.0])
    for _ in range(max_iter):
        a, b = theta
        ab = special.polygamma(1, a + b)
        grad = np.array([la - special.digamma(a) + special.digamma(a + b),
                         lb - special.digamma(b) + special.digamma(a + b)])
        hess = np.array([[-special.polygamma(1, a) + ab, ab],
                         [ab, -special.polygamma(1, b) + ab]])
        step = np.linalg.solve(hess, -grad)
        # halve until both shapes stay positive
        while np.any(theta + step <= 0):
            step = step / 2.0
        theta = theta + step
        if np.max(np.abs(step) / theta) < tol:
            return tuple(theta), True
    return tuple(theta), False


def _fit_gamma(x, max_iter=100, tol=1e-14):
    if np.any(x <= 0):
        raise DomainError("gamma fit needs positive data")
    s = math.log(x.mean()) - np.mean(np.log(x))
    alpha = (3.0 - s + math.sqrt((s - 3.0) ** 2 + 24.0 * s)) / (12.0 * s)
    for _ in range(max_iter):
        g = math.log(alpha) - special.digamma(alpha) - s
        dg = 1.0 / alpha - special.polygamma(1, alpha)
        new = alpha - g / dg
        if new <= 0:
            new = alpha / 2.0
        done = abs(new - alpha) <= tol * alpha
        alpha = new
        if done:
            return (alpha, x.mean() / alpha), True
    return (alpha, x.mean() / alpha), False


def _fit_normal_mixture(x, max_iter=2000, tol=1e-10):
    q1, q3 = np.percentile(x, [25, 75])
    sd = x.std()
    w, m1, s1, m2, s2 = 0.5, q1, sd / 2.0, q3, sd / 2.0
    floor = 1e-6 * sd
    ll_old = -np.inf
    for _ in range(max_iter):
        d1 = w * stats.norm.pdf(x, m1, s1)
        d2 = (1 - w) * stats.norm.pdf(x, m2, s2)
        tot = d1 + d2
        ll = np.sum(np.log(tot))
        r = d1 / tot
        w = r.mean()
        m1 = np.sum(r * x) / np.sum(r)
        m2 = np.sum((1 - r) * x) / np.sum(1 - r)
        s1 = max(math.sqrt(np.sum(r * (x - m1) ** 2) / np.sum(r)), floor)
        s2 = max(math.sqrt(np.sum((1 - r) * (x - m2) ** 2) / np.sum(1 - r)), floor)
        if abs(ll - ll_old) <= tol * (abs(ll) + 1.0):
            return (w, m1, s1, m2, s2), True
        ll_old = ll
    return (w, m1, s1, m2, s2), False


def parametric_fit(family, data, lo=-np.inf, hi=np.inf):
    """Maximum likelihood fit of a parametric family.

    ``family`` is ``"beta"`` (Newton from moment estimates), ``"normal"``
    (closed form), ``"gamma"`` (Newton on the shape) or ``"normal_mixture"``
    (two-component EM). The returned density is renormalized to [lo, hi].
    """
    x = np.asarray(data, dtype=float).ravel()
    if x.size < 2:
        raise DomainError("parametric fit needs at least 2 observations")
    if family == "beta":
        params, ok = _fit_beta(x)
        lo, hi = max(lo, 0.0), min(hi, 1.0)
    elif family == "normal":
        params, ok = (x.mean(), x.std()), True
    elif family == "gamma":
        params, ok = _fit_gamma(x)
        lo = max(lo, 0.0)
    elif family == "normal_mixture":
        params, ok = _fit_normal_mixture(x)
    else:
        raise DomainError(f"unknown parametric family {family!r}")
    return ParametricFit(family, tuple(float(v) for v in params), float(lo), float(hi), ok)


# -- the study -------------------------------------------------------------

@dataclass(eq=False)
class SimReport:
    """Aggregated Monte Carlo results.

    Error metrics are multiplied by 100. ``pointwise`` maps estimator names
    (``pdf_B``, ``pdf_P``, ``pdf_K``, ``cdf_B``, ``cdf_P``, ``cdf_E``) to
    per-grid-point mean squared errors (not scaled).
    """

    distribution: str
    n: int
    runs: int
    seed: int
    n_failed: int
    mean_mhat: float
    var_mhat: float
    mise_fP: float
    mise_fB: float
    mise_fK: float
    mse_muP: float
    mse_muB: float
    mse_xbar: float
    m_hat: list = field(default_factory=list)
    grid: list = field(default_factory=list)
    pointwise: dict = field(default_factory=dict)

    def to_dict(self):
        return asdict(self)


def _one_run(dist, n, rng, grid, cell, fit_cfg, kernel_cfg):
    x = sample(dist, n, rng=rng)
    support = dist.support
    sel = select_degree(support.to_unit(x), fit_cfg)
    if sel.profile[sel.tau_hat] < sel.profile[0]:
        raise DomainError("selected degree fits worse than the grid start")
    model = BernsteinModel(sel.weights_at(sel.m_hat), support)
    h = bandwidth(x, kernel_cfg)
    par = parametric_fit(dist.family, x, dist.lo, dist.hi)
    if not par.converged:
        raise DomainError(f"{dist.family} fit did not converge")
    f_true = true_pdf(dist, grid)
    F_true = true_cdf(dist, grid)
    sq = {
        "pdf_B": (model.pdf(grid) - f_true) ** 2,
        "pdf_P": (par.pdf(grid) - f_true) ** 2,
        "pdf_K": (kde(x, x=grid, h=h) - f_true) ** 2,
        "cdf_B": (model.cdf(grid) - F_true) ** 2,
        "cdf_P": (par.cdf(grid) - F_true) ** 2,
        "cdf_E": (ecdf(x, grid) - F_true) ** 2,
    }
    mu = true_mean(dist)
    mean_sq = {
        "muP": (par.mean - mu) ** 2,
        "muB": (model.mean() - mu) ** 2,
        "xbar": (x.mean() - mu) ** 2,
    }
    return sel.m_hat, sq, mean_sq


def run_study(dist, n, runs, seed=0, grid_points=200, fit_cfg=None, kernel_cfg=None,
              progress=None):
    """Monte Carlo comparison of the Bernstein, parametric and kernel estimators.

    Run ``r`` draws from :func:`run_rng` ``(seed, r)``, so the report depends
    only on the arguments. Integrated squared errors use the midpoint rule on
    ``grid_points`` equal cells of [lo, hi]. Runs that raise a numerical
    error are counted in ``n_failed`` and excluded from the averages.
    """
    if runs < 1:
        raise DomainError(f"runs must be >= 1, got {runs}")
    if isinstance(dist, str):
        dist = get_preset(dist)
    fit_cfg = fit_cfg or FitConfig()
    kernel_cfg = kernel_cfg or KernelConfig()
    cell = (dist.hi - dist.lo) / grid_points
    grid = dist.lo + cell * (np.arange(grid_points) + 0.5)

    m_hats, failed = [], 0
    sums = {}
    ise = {"pdf_B": [], "pdf_P": [], "pdf_K": []}
    msq = {"muP": [], "muB": [], "xbar": []}
    for r in range(runs):
        try:
            m_hat, sq, mean_sq = _one_run(dist, n, run_rng(seed, r), grid, cell,
                                          fit_cfg, kernel_cfg)
        except (DomainError, FloatingPointError, np.linalg.LinAlgError):
            failed += 1
            continue
        m_hats.append(m_hat)
        for key, v in sq.items():
            sums[key] = sums.get(key, 0.0) + v
        for key in ise:
            ise[key].append(float(np.sum(sq[key]) * cell))
        for key in msq:
            msq[key].append(mean_sq[key])
        if progress is not None:
            progress(r)
    ok = len(m_hats)
    if ok == 0:
        raise DomainError(f"all {runs} runs failed")
    mh = np.array(m_hats, dtype=float)
    return SimReport(
        distribution=dist.name,
        n=int(n),
        runs=int(runs),
        seed=int(seed),
        n_failed=failed,
        mean_mhat=float(mh.mean()),
        var_mhat=float(mh.var(ddof=1)) if ok > 1 else 0.0,
        mise_fP=100.0 * float(np.mean(ise["pdf_P"])),
        mise_fB=100.0 * float(np.mean(ise["pdf_B"])),
        mise_fK=100.0 * float(np.mean(ise["pdf_K"])),
        mse_muP=100.0 * float(np.mean(msq["muP"])),
        mse_muB=100.0 * float(np.mean(msq["muB"])),
        mse_xbar=100.0 * float(np.mean(msq["xbar"])),
        m_hat=[int(v) for v in m_hats],
        grid=[float(v) for v in grid],
        pointwise={k: [float(v) for v in s / ok] for k, s in sums.items()},
    )


def write_pointwise_csv(report, path):
    """Write the per-grid-point MSE curves of ``report`` for plotting."""
    keys = sorted(report.pointwise)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", *keys])
        for i, x in enumerate(report.grid):
            w.writerow([repr(x), *(repr(report.pointwise[k][i]) for k in keys)])
