"""Checkers for Hardy, pointwise, Poincaré-type and weak-type inequalities.

Each checker samples an analytic test function on a rasterized domain,
evaluates both sides with Choquet integrals or the discrete operators and
returns an :class:`InequalityReport`.  The ratio ``lhs / rhs`` is an
empirical lower bound for the theorem's constant; refinement pairs compare
it across two grid levels.
"""
from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable

import numpy as np

from .admissible import frac, ratio as exact_ratio, require, sobolev_exponent
from .choquet import choquet_integral
from .content import ParameterError, superlevel_contents
from .domains import RasterizedDomain, john_ball, rasterize
from .functions import TestFunction, sample_function, signed_values, validate_support
from .grid import GridFunction
from .operators import GUARD, OperatorParams, fractional_maximal, riesz_sum, safe_ratio

GOLDEN = (math.sqrt(5) - 1) / 2
MAX_B_CANDIDATES = 512
GROWTH_LIMIT = 2.0


class TheoremId(str, enum.Enum):
    HardyPointwise = "hardy-pointwise"
    Hardy = "hardy"
    HardyEpsilon = "hardy-epsilon"
    SJohnPointwise = "sjohn-pointwise"
    Poincare = "poincare"
    PoincareSobolev = "poincare-sobolev"
    WeakType = "weak-type"


PARAM_COLUMNS = ("delta", "kappa", "p", "q", "s", "epsilon", "k", "t", "r")
CSV_HEADER = ("theorem,domain,family," + ",".join(PARAM_COLUMNS)
              + ",b,level,lhs,rhs,ratio,stable")


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def csv_row(theorem: str, domain: str, family: str, params: dict, b, level: int,
            lhs: float, rhs: float, ratio: float, stable) -> str:
    cols = [theorem, domain, family] + [_fmt(params.get(k)) for k in PARAM_COLUMNS]
    cols += [_fmt(b), str(level), _fmt(lhs), _fmt(rhs), _fmt(ratio), _fmt(stable)]
    return ",".join(cols)


@dataclass
class InequalityReport:
    theorem_id: TheoremId
    params: dict
    lhs: float
    rhs: float
    ratio: float
    b_used: float | str | None
    level: int
    domain: str = ""
    family: str = ""
    extra: dict = field(default_factory=dict)
    curve: list = field(default_factory=list)    # (x, ratio) pairs, e.g. c(t)
    stable: bool | None = None

    @property
    def finite(self) -> bool:
        return math.isfinite(self.ratio)

    def csv_row(self) -> str:
        return csv_row(self.theorem_id.value, self.domain, self.family, self.params, self.b_used,
                       self.level, self.lhs, self.rhs, self.ratio, self.stable)

    def to_json(self) -> dict:
        def clean(v):
            if isinstance(v, Fraction):
                return f"{v.numerator}/{v.denominator}"
            if isinstance(v, (float, np.floating)):
                return float(v) if math.isfinite(v) else repr(float(v))
            if isinstance(v, (list, tuple)):
                return [clean(x) for x in v]
            if isinstance(v, dict):
                return {k: clean(x) for k, x in v.items()}
            if isinstance(v, (np.floating, np.integer)):
                return v.item()
            return v
        return clean({
            "theorem": self.theorem_id.value, "domain": self.domain, "family": self.family,
            "params": self.params, "level": self.level, "lhs": self.lhs, "rhs": self.rhs,
            "ratio": self.ratio, "b": self.b_used, "stable": self.stable,
            "extra": self.extra, "curve": self.curve,
        })


# -- parameter validation -----------------------------------------------------

def _delta(delta, n):
    return require("delta", delta, 0, n, hi_closed=True)


def _s(s, n):
    return require("s", s, 1, Fraction(n, n - 1), lo_closed=True)


def _kappa_hardy(kappa):
    return require("kappa", kappa, 0, 1, lo_closed=True)


def _require_john(dom: RasterizedDomain, s=None):
    s0 = dom.spec.john_exponent
    if s0 is None:
        raise ParameterError(f"{type(dom.spec).__name__} is not an s-John preset")
    if s is not None and frac(s) < frac(s0):
        raise ParameterError(f"domain is {s0}-John; s={s} is below its exponent")
    return s0


def _labels(dom, u):
    return type(dom.spec).__name__, type(u).__name__


def validate_params(theorem, n: int, params: dict, spec=None) -> None:
    """Check a parameter record against the theorem's intervals without computing anything."""
    theorem = TheoremId(theorem)
    P = dict(params)
    if theorem in (TheoremId.Hardy, TheoremId.HardyEpsilon):
        d = _delta(P["delta"], n)
        _kappa_hardy(P["kappa"])
        require("p", P["p"], Fraction(frac(d), n), exact_ratio(d, P["kappa"]))
        if P.get("epsilon") is not None:
            require("epsilon", P["epsilon"], 0, d)
    elif theorem is TheoremId.HardyPointwise:
        _kappa_hardy(P["kappa"])
    elif theorem is TheoremId.SJohnPointwise:
        _s(P["s"], n)
    elif theorem is TheoremId.Poincare:
        d = _delta(P["delta"], n)
        require("p", P["p"], Fraction(frac(d), n))
    elif theorem is TheoremId.PoincareSobolev:
        d = _delta(P["delta"], n)
        s = _s(P["s"], n)
        m = n + frac(s) * (1 - n)
        require("kappa", P.get("kappa", 0.0), 0, m, lo_closed=True)
        require("p", P["p"], Fraction(frac(d), n), frac(d) / m)
    elif theorem is TheoremId.WeakType:
        _delta(P["delta"], n)
        _s(P["s"], n)
        t = P.get("t_grid", DEFAULT_T_GRID)
        if len(t) == 0 or any(float(x) <= 0 for x in t):
            raise ParameterError("t_grid must be nonempty and positive")
    if P.get("b_mode", "infimum") not in ("infimum", "john_average"):
        raise ParameterError(f"unknown b_mode {P['b_mode']!r}")
    if "k" in P:
        require("k", P["k"], 0, 1)
    if spec is not None:
        if theorem in (TheoremId.Poincare, TheoremId.PoincareSobolev, TheoremId.WeakType,
                       TheoremId.SJohnPointwise):
            s0 = spec.john_exponent
            if s0 is None:
                raise ParameterError(f"{type(spec).__name__} is not an s-John preset")
            if "s" in P and frac(P["s"]) < frac(s0):
                raise ParameterError(f"domain is {s0}-John; s={P['s']} is below its exponent")


# -- shared pieces --------------------------------------------------------------

def john_average(dom: RasterizedDomain, u_signed: np.ndarray, k: float = 0.5) -> float:
    """Cell-count average of ``u`` over the John ball (exact for constants)."""
    ball = john_ball(dom, k)
    vals = u_signed[ball.flat]
    lo = vals.min()
    return float(lo + np.mean(vals - lo))


def _abs_dev(dom: RasterizedDomain, u_signed: np.ndarray, b: float) -> GridFunction:
    g = dom.geometry
    v = np.where(dom.set.flat, np.abs(u_signed - b), 0.0)
    return GridFunction(g, dom.set, v.reshape(g.shape))


def _deviation_integral(dom, u_signed, b, p, delta) -> float:
    dev = _abs_dev(dom, u_signed, b)
    return choquet_integral(dev.power(p) if p != 1 else dev, delta).value


def _candidates(u_inside: np.ndarray, extra: float, cap: int | None) -> np.ndarray:
    vals = np.unique(u_inside)
    if cap is not None and len(vals) > cap:
        vals = vals[np.linspace(0, len(vals) - 1, cap).round().astype(int)]
    return np.unique(np.append(vals, extra))


def infimum_over_b(objective: Callable[[float], float], candidates: np.ndarray,
                   golden_steps: int = 40) -> tuple[float, float]:
    """Global pass over ``candidates``, then golden section between the best one's neighbours."""
    vals = np.array([objective(b) for b in candidates])
    j = int(np.argmin(vals))
    best_b, best = float(candidates[j]), float(vals[j])
    if len(candidates) < 2 or golden_steps <= 0:
        return best_b, best
    lo = float(candidates[max(j - 1, 0)])
    hi = float(candidates[min(j + 1, len(candidates) - 1)])
    c, d = hi - GOLDEN * (hi - lo), lo + GOLDEN * (hi - lo)
    fc, fd = objective(c), objective(d)
    for _ in range(golden_steps):
        if fc < fd:
            hi, d, fd = d, c, fc
            c = hi - GOLDEN * (hi - lo)
            fc = objective(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + GOLDEN * (hi - lo)
            fd = objective(d)
    for b, v in ((c, fc), (d, fd)):
        if v < best:
            best_b, best = b, v
    return best_b, best


def _poincare_lhs(dom, u_signed, p, delta, b_mode, k, cap):
    """Return (lhs used, b used, lhs at u_B, lhs at the infimum or None)."""
    ub = john_average(dom, u_signed, k)
    at_ub = _deviation_integral(dom, u_signed, ub, p, delta)
    if b_mode == "john_average":
        return at_ub, ub, at_ub, None
    if b_mode != "infimum":
        raise ParameterError(f"unknown b_mode {b_mode!r}")
    cand = _candidates(u_signed[dom.set.flat], ub, cap)
    b, val = infimum_over_b(lambda b: _deviation_integral(dom, u_signed, b, p, delta), cand)
    if val > at_ub:  # cannot happen: u_B is a candidate
        b, val = ub, at_ub
    return val, b, at_ub, val


# -- pointwise checks -----------------------------------------------------------

def _pointwise_max(lhs: np.ndarray, rhs: np.ndarray):
    best = (0.0, 0.0, 0.0)
    for a, b in zip(lhs, rhs):
        if a < GUARD and b < GUARD:
            continue
        r = 0.0 if a == 0.0 else float(safe_ratio(a, b))
        if r > best[0]:
            best = (r, float(a), float(b))
    return best


def hardy_pointwise_check(dom: RasterizedDomain, u: TestFunction, kappa: float) -> InequalityReport:
    """``|u(x)| <= c dist(x)^(1-kappa) M_kappa|grad u|(x)`` over occupied cells."""
    kappa = _kappa_hardy(kappa)
    f = sample_function(u, dom, compact=True)
    g = dom.geometry
    vals = f.flat
    live = np.flatnonzero(vals >= GUARD)
    if len(live):
        grad = f.gradient_field()
        M = fractional_maximal(grad, OperatorParams(kappa=kappa), cells=live).flat[live]
        d = dom.dist.reshape(-1)[live]
        r, a, b = _pointwise_max(vals[live], d ** (1.0 - kappa) * M)
    else:
        r = a = b = 0.0
    dn, fn = _labels(dom, u)
    return InequalityReport(TheoremId.HardyPointwise, {"kappa": kappa}, a, b, r, None,
                            g.L, dn, fn, extra={"cells": int(len(live))})


def sjohn_pointwise_check(dom: RasterizedDomain, u: TestFunction, s: float, k: float = 0.5) -> InequalityReport:
    """``|u(x) - u_B| <= c * sum |grad u(y)| |x-y|^(-s(n-1)) h^n``."""
    g = dom.geometry
    s = _s(s, g.n)
    _require_john(dom, s)
    f = sample_function(u, dom)
    us = signed_values(u, dom)
    ub = john_average(dom, us, k)
    idx = dom.set.indices()
    lhs = np.abs(us[idx] - ub)
    R = riesz_sum(f.gradient_field(), s * (g.n - 1), cells=idx).flat[idx]
    r, a, b = _pointwise_max(lhs, R)
    dn, fn = _labels(dom, u)
    return InequalityReport(TheoremId.SJohnPointwise, {"s": s, "k": k}, a, b, r, ub, g.L, dn, fn)


# -- integral checks ------------------------------------------------------------

def hardy_check(dom: RasterizedDomain, u: TestFunction, delta: float, kappa: float, p: float,
                epsilon: float | None = None) -> InequalityReport:
    """Hardy inequality; with ``epsilon`` the right side is the lower-dimensional norm form.

    Without epsilon: ``int |u|^p dist^(-p(1-kappa)) dH^(delta-kappa p) <= c int |grad u|^p dH^delta``.
    With epsilon: right side ``(int |grad u|^(p(delta-eps)/delta) dH^(delta-eps))^(delta/(delta-eps))``.
    """
    g = dom.geometry
    delta = _delta(delta, g.n)
    kappa = _kappa_hardy(kappa)
    p = require("p", p, Fraction(frac(delta), g.n), exact_ratio(delta, kappa))
    if epsilon is not None:
        epsilon = require("epsilon", epsilon, 0, delta)
    f = sample_function(u, dom, compact=True)
    dist = np.where(dom.set.flat, dom.dist.reshape(-1), 1.0)
    weighted = f.with_values(f.flat * dist ** (-(1.0 - kappa)))
    lhs = choquet_integral(weighted.power(p), delta - kappa * p).value
    grad = f.gradient_field()
    params = {"delta": delta, "kappa": kappa, "p": p}
    if epsilon is None:
        rhs = choquet_integral(grad.power(p), delta).value
        tid = TheoremId.Hardy
    else:
        de = delta - epsilon
        rhs = choquet_integral(grad.power(p * de / delta), de).value ** (delta / de)
        params["epsilon"] = epsilon
        tid = TheoremId.HardyEpsilon
    dn, fn = _labels(dom, u)
    return InequalityReport(tid, params, lhs, rhs, safe_ratio(lhs, rhs), None, g.L, dn, fn)


def poincare_check(dom: RasterizedDomain, u: TestFunction, delta: float, p: float,
                   b_mode: str = "infimum", k: float = 0.5,
                   max_candidates: int | None = MAX_B_CANDIDATES) -> InequalityReport:
    """``inf_b int |u-b|^p dH^delta <= c int |grad u|^p dH^delta`` (or b = u_B)."""
    g = dom.geometry
    delta = _delta(delta, g.n)
    p = require("p", p, Fraction(frac(delta), g.n))
    s0 = _require_john(dom)
    f = sample_function(u, dom)
    us = signed_values(u, dom)
    lhs, b, at_ub, at_inf = _poincare_lhs(dom, us, p, delta, b_mode, k, max_candidates)
    rhs = choquet_integral(f.gradient_field().power(p), delta).value
    dn, fn = _labels(dom, u)
    return InequalityReport(TheoremId.Poincare, {"delta": delta, "p": p, "s": s0, "k": k}, lhs, rhs,
                            safe_ratio(lhs, rhs), b, g.L, dn, fn,
                            extra={"b_mode": b_mode, "lhs_ub": at_ub, "lhs_inf": at_inf})


def poincare_sobolev_check(dom: RasterizedDomain, u: TestFunction, delta: float, kappa: float,
                           p: float, s: float, b_mode: str = "infimum", k: float = 0.5,
                           max_candidates: int | None = MAX_B_CANDIDATES) -> InequalityReport:
    """``(inf_b int |u-b|^q dH^(delta-kappa p))^(1/q) <= c (int |grad u|^p dH^delta)^(1/p)``."""
    g = dom.geometry
    n = g.n
    delta = _delta(delta, n)
    s = _s(s, n)
    _require_john(dom, s)
    m = n + frac(s) * (1 - n)
    kappa = require("kappa", kappa, 0, m, lo_closed=True)
    p = require("p", p, Fraction(frac(delta), n), frac(delta) / m)
    q_exact = sobolev_exponent(n, delta, kappa, p, s)
    q = float(q_exact)
    f = sample_function(u, dom)
    us = signed_values(u, dom)
    dk = delta - kappa * p
    lhs_q, b, at_ub, at_inf = _poincare_lhs(dom, us, q, dk, b_mode, k, max_candidates)
    rhs_p = choquet_integral(f.gradient_field().power(p), delta).value
    lhs, rhs = lhs_q ** (1.0 / q), rhs_p ** (1.0 / p)
    dn, fn = _labels(dom, u)
    params = {"delta": delta, "kappa": kappa, "p": p, "q": q_exact, "s": s, "k": k}
    extra = {"b_mode": b_mode, "q_float": q,
             "lhs_ub": at_ub ** (1.0 / q),
             "lhs_inf": None if at_inf is None else at_inf ** (1.0 / q)}
    return InequalityReport(TheoremId.PoincareSobolev, params, lhs, rhs, safe_ratio(lhs, rhs), b,
                            g.L, dn, fn, extra=extra)


DEFAULT_T_GRID = tuple(2.0 ** -j for j in range(6, -1, -1))


def weak_type_check(dom: RasterizedDomain, u: TestFunction, delta: float, s: float,
                    t_grid=DEFAULT_T_GRID, b_mode: str = "john_average", k: float = 0.5,
                    max_candidates: int | None = MAX_B_CANDIDATES) -> InequalityReport:
    """``H^delta({|u-b| > t}) <= c t^(-delta/(s(n-1))) (int |grad u|^(delta/n) dH^delta)^(n/(s(n-1)))``.

    ``c(t)`` is reported for each ``t``; the ratio is its supremum.  In
    ``infimum`` mode every ``t`` gets its own best ``b`` from the candidates.
    """
    g = dom.geometry
    n = g.n
    delta = _delta(delta, n)
    s = _s(s, n)
    _require_john(dom, s)
    t = np.asarray(sorted(float(x) for x in t_grid), dtype=float)
    if len(t) == 0:
        raise ParameterError("t_grid must not be empty")
    if np.any(t <= 0):
        raise ParameterError("t values must be positive")
    f = sample_function(u, dom)
    us = signed_values(u, dom)
    ub = john_average(dom, us, k)
    e = delta / (s * (n - 1))
    rhs = choquet_integral(f.gradient_field().power(delta / n), delta).value ** (n / (s * (n - 1)))

    def contents(b):
        return superlevel_contents(g, _abs_dev(dom, us, b).flat, t, delta)

    at_ub = contents(ub)
    if b_mode == "john_average":
        lhs_t, b_used = at_ub, ub
    elif b_mode == "infimum":
        lhs_t = at_ub.copy()
        for b in _candidates(us[dom.set.flat], ub, max_candidates):
            lhs_t = np.minimum(lhs_t, contents(b))
        b_used = "infimum"
    else:
        raise ParameterError(f"unknown b_mode {b_mode!r}")
    c = np.array([safe_ratio(lt * ti ** e, rhs) for lt, ti in zip(lhs_t, t)])
    j = int(np.argmax(c))
    dn, fn = _labels(dom, u)
    rep = InequalityReport(TheoremId.WeakType, {"delta": delta, "s": s, "k": k, "t": float(t[j])},
                           float(lhs_t[j]), rhs / t[j] ** e if rhs > 0 else 0.0, float(c[j]), b_used,
                           g.L, dn, fn,
                           extra={"b_mode": b_mode, "lhs_ub": [float(x) for x in at_ub],
                                  "lhs_inf": [float(x) for x in lhs_t] if b_mode == "infimum" else None,
                                  "rhs_power": rhs},
                           curve=[(float(a), float(b)) for a, b in zip(t, c)])
    return rep


CHECKERS: dict[TheoremId, Callable[..., InequalityReport]] = {
    TheoremId.HardyPointwise: hardy_pointwise_check,
    TheoremId.Hardy: hardy_check,
    TheoremId.HardyEpsilon: hardy_check,
    TheoremId.SJohnPointwise: sjohn_pointwise_check,
    TheoremId.Poincare: poincare_check,
    TheoremId.PoincareSobolev: poincare_sobolev_check,
    TheoremId.WeakType: weak_type_check,
}


def run_check(theorem: TheoremId, dom: RasterizedDomain, u: TestFunction, **params) -> InequalityReport:
    theorem = TheoremId(theorem)
    if theorem is TheoremId.HardyEpsilon and params.get("epsilon") is None:
        params["epsilon"] = params["delta"] / 4.0
    if theorem is TheoremId.Hardy:
        params.pop("epsilon", None)
    return CHECKERS[theorem](dom, u, **params)


# -- refinement and sweeps ------------------------------------------------------

def growth_factor(r0: float, r1: float) -> float:
    if r0 == 0.0 and r1 == 0.0:
        return 1.0
    if r0 == 0.0:
        return math.inf
    return r1 / r0


def refinement_pair(theorem: TheoremId, spec, u: TestFunction, L: int, **params):
    """Run a check at ``L`` and ``L + 1``; both reports get the shared stability flag."""
    r0 = run_check(theorem, rasterize(spec, L), u, **params)
    r1 = run_check(theorem, rasterize(spec, L + 1), u, **params)
    stable = bool(r0.finite and r1.finite and growth_factor(r0.ratio, r1.ratio) < GROWTH_LIMIT)
    r0.stable = r1.stable = stable
    return r0, r1


@dataclass
class SweepReport:
    theorem_id: TheoremId
    sup: float
    argmax: dict
    sup_refined: float
    stable: bool
    reports: list           # level-L reports, in sweep order
    refined: list           # level-(L+1) reports (empty when not refined)

    @property
    def growth(self) -> float:
        return growth_factor(self.sup, self.sup_refined)

    @property
    def finite(self) -> bool:
        return all(r.finite for r in self.reports + self.refined)


def estimate_constant(theorem: TheoremId, spec, factory: Callable[..., TestFunction],
                      sweep: dict, params: dict, L: int, refine: bool = True,
                      golden_steps: int = 0) -> SweepReport:
    """Supremum of the ratio over a product grid of family parameters.

    ``factory(**point)`` builds the test function for one grid point.  With
    ``golden_steps`` the best point is refined by golden-section search
    along each numeric coordinate between its grid neighbours.  With
    ``refine`` every point is rerun at ``L + 1``.
    """
    if not sweep:
        raise ParameterError("sweep must not be empty")
    theorem = TheoremId(theorem)
    keys = list(sweep)
    points = [dict(zip(keys, vals)) for vals in itertools.product(*(sweep[k] for k in keys))]
    if not points:
        raise ParameterError("sweep must not be empty")
    dom = rasterize(spec, L)

    def ratio_at(pt, d=dom):
        rep = run_check(theorem, d, factory(**pt), **dict(params))
        rep.extra["point"] = dict(pt)
        return rep

    reports = [ratio_at(pt) for pt in points]
    j = int(np.argmax([r.ratio for r in reports]))
    best_pt = dict(points[j])
    for key in keys if golden_steps > 0 else []:
        grid = sorted(v for v in set(sweep[key]) if isinstance(v, (int, float)))
        if len(grid) < 2 or not isinstance(best_pt[key], (int, float)):
            continue
        i = grid.index(best_pt[key])
        lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, len(grid) - 1)]

        def neg(x):
            return -ratio_at({**best_pt, key: x}).ratio

        x, v = infimum_over_b(neg, np.array([lo, best_pt[key], hi]), golden_steps)
        if -v > reports[j].ratio:
            best_pt[key] = x
            extra_rep = ratio_at(best_pt)
            reports.append(extra_rep)
            points.append(dict(best_pt))
            j = len(reports) - 1
    refined = []
    if refine:
        dom1 = rasterize(spec, L + 1)
        refined = [ratio_at(pt, dom1) for pt in points]
    sup = reports[j].ratio
    sup1 = max((r.ratio for r in refined), default=sup)
    stable = bool(all(r.finite for r in reports + refined) and growth_factor(sup, sup1) < GROWTH_LIMIT)
    for r in reports + refined:
        r.stable = stable
    return SweepReport(theorem, float(sup), best_pt, float(sup1), stable, reports, refined)
