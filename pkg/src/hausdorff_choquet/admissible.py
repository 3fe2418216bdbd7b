"""Exact validation of parameter intervals.

Floats are read through their shortest decimal repr so that e.g. ``p = 0.8``
with ``delta / n = 1.6 / 2`` compares as the rational 4/5 on both sides.
"""
from __future__ import annotations

from fractions import Fraction

from .content import ParameterError

INF = None  # upper bound marker for delta / 0 := infinity


def frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    return Fraction(repr(float(x)))


def ratio(a, b):
    """``a / b`` with the convention ``a / 0 = infinity`` (returned as None)."""
    b = frac(b)
    return INF if b == 0 else frac(a) / b


def require(name: str, x, lo=None, hi=None, *, lo_closed=False, hi_closed=False):
    """Raise ParameterError unless ``x`` lies in the interval (None = unbounded)."""
    v = frac(x)
    ok = True
    if lo is not None:
        lo = frac(lo)
        ok &= v >= lo if lo_closed else v > lo
    if hi is not None:
        hi = frac(hi)
        ok &= v <= hi if hi_closed else v < hi
    if not ok:
        lb = "[" if lo_closed else "("
        rb = "]" if hi_closed else ")"
        los = "-inf" if lo is None else f"{float(lo):g}"
        his = "inf" if hi is None else f"{float(hi):g}"
        raise ParameterError(f"{name}={float(v):g} outside {lb}{los}, {his}{rb}")
    return float(x)


def sobolev_exponent(n: int, delta, kappa, p, s) -> Fraction:
    """``q = (delta - kappa p) p / (delta - p (n + s (1 - n)))`` in exact arithmetic."""
    d, k, p, s = frac(delta), frac(kappa), frac(p), frac(s)
    return (d - k * p) * p / (d - p * (n + s * (1 - n)))
