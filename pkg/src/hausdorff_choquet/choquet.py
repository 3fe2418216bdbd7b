"""Choquet integrals of grid functions against dyadic Hausdorff content.

For a step function with distinct positive levels ``0 = t0 < t1 < ... < tm``
the map ``t -> content({f > t})`` is constant on each ``[t_{i-1}, t_i)``,
where it equals ``content({f >= t_i})``, so the layer-cake integral is the
finite sum ``sum_i (t_i - t_{i-1}) * content({f >= t_i})``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .content import (AxiomReport, ParameterError, check_delta, content_value,
                      superlevel_contents)
from .grid import GridFunction, GridSet, distinct_levels


@dataclass(frozen=True)
class IntegralValue:
    value: float
    delta: float
    levels_used: int
    residual: float | None = None      # |direct - substituted| for power integrals
    error_bound: float | None = None   # half-width of the bracket in quantized mode

    def __float__(self):
        return self.value


def _check_function(f: GridFunction, delta: float) -> float:
    return check_delta(delta, f.geometry.n)


def level_contents(f: GridFunction, delta: float):
    """Distinct levels of ``f`` and the contents of ``{f >= t_i}``."""
    delta = _check_function(f, delta)
    t = distinct_levels(f)
    if len(t) == 0:
        return t, np.zeros(0)
    below = np.concatenate(([0.0], t[:-1]))
    # {f > t_{i-1}} == {f >= t_i}
    return t, superlevel_contents(f.geometry, f.flat, below, delta)


def choquet_integral(f: GridFunction, delta: float, quantized: int | None = None) -> IntegralValue:
    """Layer-cake integral of ``f`` with respect to dyadic content.

    With ``quantized=k`` the content function is only sampled at ``k + 1``
    equispaced thresholds; the result is the midpoint of the resulting lower
    and upper Riemann sums and ``error_bound`` their half-gap.
    """
    delta = _check_function(f, delta)
    if quantized is not None:
        return _quantized(f, delta, int(quantized))
    t, c = level_contents(f, delta)
    if len(t) == 0:
        return IntegralValue(0.0, delta, 0)
    steps = np.diff(np.concatenate(([0.0], t)))
    return IntegralValue(math.fsum(steps * c), delta, len(t))


def _quantized(f: GridFunction, delta: float, k: int) -> IntegralValue:
    if k < 1:
        raise ParameterError("quantized mode needs at least one level")
    top = f.max()
    if top == 0.0:
        return IntegralValue(0.0, delta, 0, error_bound=0.0)
    tau = np.linspace(0.0, top, k + 1)
    c = superlevel_contents(f.geometry, f.flat, tau, delta)
    dt = np.diff(tau)
    lower = math.fsum(dt * c[1:])
    upper = math.fsum(dt * c[:-1])
    return IntegralValue(0.5 * (lower + upper), delta, k, error_bound=0.5 * (upper - lower))


def choquet_integral_power(f: GridFunction, p: float, delta: float) -> IntegralValue:
    """Integral of ``f**p``, evaluated directly and through ``t**(1/p) = lambda``.

    The substituted form ``int_0^inf p lambda**(p-1) content({f > lambda}) dlambda``
    is exact on the step content function: ``sum_i C_i (t_i**p - t_{i-1}**p)``.
    """
    if not p > 0:
        raise ParameterError(f"p must be positive, got {p}")
    delta = _check_function(f, delta)
    direct = choquet_integral(f.power(p), delta)
    t, c = level_contents(f, delta)
    tp = np.concatenate(([0.0], t)) ** p
    substituted = math.fsum(c * np.diff(tp)) if len(t) else 0.0
    return IntegralValue(direct.value, delta, direct.levels_used,
                         residual=abs(direct.value - substituted))


def integrate(f: GridFunction, delta: float, p: float = 1.0) -> float:
    """Shorthand for the value of ``int f**p dH^delta``."""
    if p == 1.0:
        return choquet_integral(f, delta).value
    return choquet_integral_power(f, p, delta).value


def check_choquet_axioms(f: GridFunction, g: GridFunction, delta: float, p: float = 2.0,
                         a: float = 1.7) -> AxiomReport:
    if f.geometry != g.geometry:
        raise ValueError("f and g must share a geometry")
    if not p > 1:
        raise ParameterError("Hölder exponent p must exceed 1")
    delta = _check_function(f, delta)
    q = p / (p - 1.0)
    I = lambda u: choquet_integral(u, delta).value  # noqa: E731
    geo = f.geometry
    full = GridSet.full(geo)
    F = GridFunction(geo, full, f.values)
    G = GridFunction(geo, full, g.values)
    If, Ig = I(F), I(G)
    rep = AxiomReport()

    rep.record("C1 homogeneity", I(F.scaled(a)), a * If, equal=True)
    rep.record("C1 homogeneity", I(F.scaled(0.0)), 0.0, equal=True)

    for u, iu in ((F, If), (G, Ig)):
        zero = not np.any(u.values > 0)
        ok = (iu == 0.0) == zero
        rep.record("C2 null functions", 0.0 if ok else 1.0, 0.0)

    e = GridSet(geo, g.values > np.median(g.values))
    rep.record("C3 indicator", I(GridFunction.indicator(e)), content_value(e, delta), equal=True)

    a_set = GridSet(geo, g.values > 0)
    rep.record("C4 set monotone", I(F.restrict(a_set)), If)

    lo = F.with_values(np.minimum(f.values, g.values))
    hi = F.with_values(np.maximum(f.values, g.values))
    ilo, ihi = I(lo), I(hi)
    rep.record("C5 integrand monotone", ilo, min(If, Ig))
    rep.record("C5 integrand monotone", max(If, Ig), ihi)

    rep.record("C6 quasi-additivity", I(F.with_values(f.values + g.values)), 2.0 * (If + Ig))

    ifg = I(F.with_values(f.values * g.values))
    rhs = 2.0 * I(F.power(p)) ** (1.0 / p) * I(G.power(q)) ** (1.0 / q)
    rep.record("C7 Hölder", ifg, rhs)
    return rep


@dataclass(frozen=True)
class EmbeddingReport:
    delta1: float
    delta2: float
    lhs: float
    rhs: float
    passed: bool

    def to_record(self, p: float = 1.0, residual: float = 0.0) -> str:
        return (f"{self.delta2!r} {p!r} {self.lhs!r} {self.rhs!r} {residual!r} "
                f"{'pass' if self.passed else 'fail'}")


def check_content_embedding(f: GridFunction, delta1: float, delta2: float) -> EmbeddingReport:
    """``int |f| dH^d2 <= (d2/d1) (int |f|**(d1/d2) dH^d1)**(d2/d1)`` for ``d1 < d2``."""
    n = f.geometry.n
    check_delta(delta1, n)
    check_delta(delta2, n)
    if not delta1 < delta2:
        raise ParameterError("need delta1 < delta2")
    lhs = choquet_integral(f, delta2).value
    inner = choquet_integral(f.power(delta1 / delta2), delta1).value
    rhs = (delta2 / delta1) * inner ** (delta2 / delta1)
    return EmbeddingReport(delta1, delta2, lhs, rhs, lhs <= rhs * (1 + 1e-12))
