"""Affine maps between a finite data support [a, b] and the unit interval."""
from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError

__all__ = ["SupportMap", "choose_support", "to_unit", "from_unit", "SUPPORT_KINDS"]

SUPPORT_KINDS = ("known", "left_bounded", "right_bounded", "unbounded", "data_range")

IQR_MARGIN = 1.5
RANGE_EPS = 1e-9


@dataclass(frozen=True)
class SupportMap:
    """The interval [a, b] on which a density model lives."""

    a: float
    b: float

    def __post_init__(self):
        if not (np.isfinite(self.a) and np.isfinite(self.b)):
            raise DomainError(f"support endpoints must be finite, got [{self.a}, {self.b}]")
        if not self.b > self.a:
            raise DomainError(f"support needs b > a, got [{self.a}, {self.b}]")

    @property
    def width(self):
        return self.b - self.a

    def to_unit(self, x):
        return to_unit(self, x)

    def from_unit(self, t):
        return from_unit(self, t)


def to_unit(support, x):
    """Map raw values in [a, b] to (x - a) / (b - a).

    Raises
    ------
    DomainError
        If any value falls outside [a, b]; the message lists the offending
        indices.
    """
    x = np.asarray(x, dtype=float)
    outside = ~((x >= support.a) & (x <= support.b))
    if np.any(outside):
        idx = np.flatnonzero(outside.ravel())
        shown = ", ".join(str(k) for k in idx[:10])
        more = "" if idx.size <= 10 else f" (+{idx.size - 10} more)"
        raise DomainError(
            f"{idx.size} value(s) outside support [{support.a}, {support.b}] "
            f"at indices {shown}{more}")
    return np.clip((x - support.a) / support.width, 0.0, 1.0)


def from_unit(support, t):
    return support.a + support.width * np.asarray(t, dtype=float)


def choose_support(data, kind="data_range", a=None, b=None):
    """Pick a finite support interval for ``data``.

    Parameters
    ----------
    data : array_like
        Raw one-dimensional sample.
    kind : {"known", "left_bounded", "right_bounded", "unbounded", "data_range"}
        ``known`` uses ``(a, b)`` as given. The semi-bounded and unbounded
        kinds extend each open side by ``1.5 * IQR`` beyond the extreme order
        statistic. ``data_range`` uses the sample range widened by
        ``1e-9 * range`` so no observation lands exactly on an endpoint.
    a, b : float, optional
        Known endpoint(s), required by the bounded kinds.

    Returns
    -------
    SupportMap
    """
    x = np.asarray(data, dtype=float).ravel()
    if x.size == 0:
        raise DomainError("cannot choose a support for empty data")
    lo, hi = float(x.min()), float(x.max())

    if kind == "known":
        if a is None or b is None:
            raise DomainError("known support needs both a and b")
        support = SupportMap(float(a), float(b))
        if lo < support.a or hi > support.b:
            raise DomainError(f"data range [{lo}, {hi}] not inside [{a}, {b}]")
        return support

    if hi == lo:
        raise DomainError("degenerate sample: all observations are equal")
    eps = RANGE_EPS * (hi - lo)
    q1, q3 = np.percentile(x, [25, 75])
    margin = IQR_MARGIN * (q3 - q1)
    upper = max(hi + margin, hi + eps)
    lower = min(lo - margin, lo - eps)

    if kind == "data_range":
        return SupportMap(lo - eps, hi + eps)
    if kind == "unbounded":
        return SupportMap(lower, upper)
    if kind == "left_bounded":
        if a is None:
            raise DomainError("left_bounded support needs a")
        if lo < a:
            raise DomainError(f"data minimum {lo} below the lower bound {a}")
        return SupportMap(float(a), upper)
    if kind == "right_bounded":
        if b is None:
            raise DomainError("right_bounded support needs b")
        if hi > b:
            raise DomainError(f"data maximum {hi} above the upper bound {b}")
        return SupportMap(lower, float(b))
    raise DomainError(f"unknown support kind {kind!r}; expected one of {SUPPORT_KINDS}")
