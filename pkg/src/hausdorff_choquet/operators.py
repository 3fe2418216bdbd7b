"""Discrete fractional maximal function and Riesz-type kernel sums.

Fields are treated as cell-center samples that vanish off their support.
Balls are open and membership is decided on cell centers.  Both operators are
direct O(targets x sources) sums; pairwise squared distances are integers in
units of ``h**2``, so radius buckets and kernel weights come from lookup
tables.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

import numba
import numpy as np

from .admissible import frac, ratio, require
from .choquet import integrate
from .content import ParameterError, check_delta
from .grid import GridFunction, GridGeometry, GridSet


def _configure_threads():
    cap = os.environ.get("CHOQUET_THREADS")
    if cap:
        numba.set_num_threads(max(1, min(int(cap), numba.config.NUMBA_NUM_THREADS)))


_configure_threads()


def unit_ball_volume(n: int) -> float:
    return math.pi ** (n / 2) / math.gamma(n / 2 + 1)


def sphere_area(n: int) -> float:
    """Surface measure of the unit sphere in R^n (the constant omega_{n-1})."""
    return 2 * math.pi ** (n / 2) / math.gamma(n / 2)


def default_radii(geometry: GridGeometry) -> np.ndarray:
    kmax = math.ceil(math.sqrt(geometry.n) * geometry.side)
    return np.arange(1, kmax + 1) * geometry.h


@dataclass(frozen=True)
class OperatorParams:
    kappa: float = 0.0
    beta: float = 0.0
    radii: tuple | None = None

    def radii_for(self, geometry: GridGeometry) -> np.ndarray:
        if self.radii is None:
            return default_radii(geometry)
        r = np.asarray(self.radii, dtype=float)
        if len(r) == 0:
            raise ParameterError("radius list is empty")
        if np.any(r <= 0) or np.any(np.diff(r) <= 0):
            raise ParameterError("radii must be positive and strictly increasing")
        return r


@numba.njit(parallel=True, cache=True)
def _maximal_kernel(tc, sc, sv, bucket, scale):
    T = tc.shape[0]
    S = sc.shape[0]
    n = tc.shape[1]
    K = scale.shape[0]
    nb = bucket.shape[0]
    out = np.zeros(T)
    for t in numba.prange(T):
        shell = np.zeros(K)
        for s in range(S):
            d2 = 0
            for d in range(n):
                e = tc[t, d] - sc[s, d]
                d2 += e * e
            k = bucket[d2] if d2 < nb else K
            if k < K:
                shell[k] += sv[s]
        acc = 0.0
        best = 0.0
        for k in range(K):
            acc += shell[k]
            v = acc * scale[k]
            if v > best:
                best = v
        out[t] = best
    return out


@numba.njit(parallel=True, cache=True)
def _kernel_sum(tc, sc, sv, table):
    T = tc.shape[0]
    S = sc.shape[0]
    n = tc.shape[1]
    out = np.zeros(T)
    for t in numba.prange(T):
        acc = 0.0
        for s in range(S):
            d2 = 0
            for d in range(n):
                e = tc[t, d] - sc[s, d]
                d2 += e * e
            acc += sv[s] * table[d2]
        out[t] = acc
    return out


def _targets(geometry: GridGeometry, cells) -> np.ndarray:
    if cells is None:
        return np.arange(geometry.size)
    if isinstance(cells, GridSet):
        return cells.indices()
    return np.asarray(cells, dtype=np.int64).reshape(-1)


def _sources(f: GridFunction):
    idx = np.flatnonzero(f.flat > 0)
    return f.geometry.all_coords[idx], f.flat[idx]


def _as_output(geometry: GridGeometry, idx: np.ndarray, vals: np.ndarray) -> GridFunction:
    v = np.zeros(geometry.size)
    v[idx] = vals
    occ = np.zeros(geometry.size, dtype=bool)
    occ[idx] = True
    return GridFunction(geometry, GridSet(geometry, occ), v)


def fractional_maximal(f: GridFunction, params: OperatorParams = OperatorParams(), cells=None) -> GridFunction:
    """``max_r r**(kappa-n) * h**n * sum_{|y-x| < r} f(y)`` over the radius list.

    ``cells`` (flat indices or a GridSet) restricts the evaluation points;
    the output is supported there.
    """
    g = f.geometry
    n = g.n
    kappa = float(params.kappa)
    if not 0.0 <= kappa < n:
        raise ParameterError(f"kappa must lie in [0, {n}), got {kappa}")
    radii = params.radii_for(g)
    idx = _targets(g, cells)
    sc, sv = _sources(f)
    if len(sc) == 0 or len(idx) == 0:
        return _as_output(g, idx, np.zeros(len(idx)))
    max_d2 = n * (g.side - 1) ** 2
    rr = (radii / g.h) ** 2
    bucket = np.searchsorted(rr, np.arange(max_d2 + 1), side="right").astype(np.int64)
    scale = radii ** (kappa - n) * g.h ** n
    vals = _maximal_kernel(g.all_coords[idx], sc, sv, bucket, scale)
    return _as_output(g, idx, vals)


def self_cell_weight(geometry: GridGeometry, beta: float) -> float:
    """``int_{B(0, rho)} |z|**-beta dz`` for the ball with the volume of one cell."""
    n = geometry.n
    rho = (geometry.h ** n / unit_ball_volume(n)) ** (1.0 / n)
    return sphere_area(n) * rho ** (n - beta) / (n - beta)


def riesz_sum(f: GridFunction, beta: float, cells=None) -> GridFunction:
    """``h**n sum_{y != x} f(y) |x-y|**-beta`` plus the singular self-cell term."""
    g = f.geometry
    n = g.n
    beta = float(beta)
    if not beta < n:
        raise ParameterError(f"kernel exponent beta={beta} >= n={n} is not integrable")
    if not beta > 0:
        raise ParameterError("kernel exponent must be positive")
    idx = _targets(g, cells)
    sc, sv = _sources(f)
    if len(sc) == 0 or len(idx) == 0:
        return _as_output(g, idx, np.zeros(len(idx)))
    max_d2 = n * (g.side - 1) ** 2
    d2 = np.arange(max_d2 + 1, dtype=float)
    table = np.empty(max_d2 + 1)
    table[1:] = g.h ** n * (g.h * np.sqrt(d2[1:])) ** (-beta)
    table[0] = self_cell_weight(g, beta)
    vals = _kernel_sum(g.all_coords[idx], sc, sv, table)
    return _as_output(g, idx, vals)


def geometric_series_constant(n: int, s: float, kappa: float) -> float:
    """Constant C with ``int_{B(x,r)} f/|x-y|**(s(n-1)) <= C r**(n-kappa+s(1-n)) M_kappa f(x)``.

    Summing the dyadic annuli ``2**-j r <= |x-y| < 2**(1-j) r`` gives
    ``C = 2**(n-kappa) / (2**(n-kappa-s(n-1)) - 1)``.
    """
    beta = s * (n - 1)
    gap = n - kappa - beta
    if gap <= 0:
        raise ParameterError("need kappa < n + s(1 - n) for the geometric series to converge")
    return 2.0 ** (n - kappa) / (2.0 ** gap - 1.0)


@dataclass(frozen=True)
class DominationResult:
    lhs: float
    rhs: float
    constant: float
    radius: float

    @property
    def passed(self) -> bool:
        return self.lhs <= self.rhs * (1 + 1e-12)


def kernel_domination(f: GridFunction, cell: int, r: float, s: float, kappa: float) -> DominationResult:
    """Compare the kernel sum at ``cell`` with the geometric-series bound.

    ``f`` must vanish at centers outside ``B(x, r)``.  The maximal function is
    evaluated with the default radii plus the dyadic radii ``2**(1-j) r``
    that are at least ``h``; enlarging the list only increases it.
    """
    g = f.geometry
    x = g.centers[cell]
    inside = np.linalg.norm(g.centers - x, axis=1) < r
    if np.any(f.flat[~inside] > 0):
        raise ParameterError("f is not supported in B(x, r)")
    beta = s * (g.n - 1)
    C = geometric_series_constant(g.n, s, kappa)
    dyadic = [r * 2.0 ** (1 - j) for j in range(1, 64) if r * 2.0 ** (1 - j) >= g.h]
    radii = np.unique(np.concatenate((default_radii(g), dyadic)))
    m = fractional_maximal(f, OperatorParams(kappa=kappa, radii=tuple(radii)), cells=[cell]).flat[cell]
    lhs = riesz_sum(f, beta, cells=[cell]).flat[cell]
    return DominationResult(float(lhs), float(C * r ** (g.n - kappa - beta) * m), C, r)


@dataclass
class RatioReport:
    """Per-function (or per-cell) ratios ``lhs / rhs`` and their supremum."""

    delta: float
    kappa: float
    p: float
    s: float | None
    level: int
    lhs: list = field(default_factory=list)
    rhs: list = field(default_factory=list)
    ratios: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    def add(self, lhs: float, rhs: float):
        self.lhs.append(float(lhs))
        self.rhs.append(float(rhs))
        self.ratios.append(safe_ratio(lhs, rhs))

    @property
    def sup(self) -> float:
        return max(self.ratios, default=0.0)

    @property
    def argmax(self) -> int:
        return int(np.argmax(self.ratios)) if self.ratios else -1

    @property
    def finite(self) -> bool:
        return all(math.isfinite(r) for r in self.ratios)

    def to_records(self) -> list[str]:
        s = "nan" if self.s is None else repr(self.s)
        return [f"{self.delta!r} {self.kappa!r} {self.p!r} {s} {a!r} {b!r} {c!r} {self.level}"
                for a, b, c in zip(self.lhs, self.rhs, self.ratios)]


GUARD = 1e-14


def safe_ratio(lhs: float, rhs: float) -> float:
    """``lhs / rhs`` with 0/0 := 0 (both below the guard) and x/0 := inf."""
    if lhs < GUARD and rhs < GUARD:
        return 0.0
    if rhs <= 0:
        return math.inf
    return lhs / rhs


def check_adams_bound(family: list[GridFunction], delta: float, kappa: float, p: float,
                      params: OperatorParams | None = None) -> RatioReport:
    """Ratios ``int (M_kappa f)**p dH^(delta-kappa p) / int f**p dH^delta``.

    The left side is integrated over the root cube only, so each ratio is a
    lower bound for the whole-space ratio.
    """
    if not family:
        raise ParameterError("empty function family")
    g = family[0].geometry
    n = g.n
    delta = check_delta(delta, n)
    require("kappa", kappa, 0, n, lo_closed=True)
    require("p", p, ratio(delta, n), ratio(delta, kappa))
    params = params or OperatorParams(kappa=kappa)
    if params.kappa != kappa:
        params = OperatorParams(kappa=kappa, beta=params.beta, radii=params.radii)
    target = float(frac(delta) - frac(kappa) * frac(p))
    rep = RatioReport(delta, kappa, p, None, g.L)
    for f in family:
        if f.max() == 0.0:
            rep.add(0.0, 0.0)
            continue
        m = fractional_maximal(f, params)
        rep.add(integrate(m, target, p), integrate(f, delta, p))
    return rep


def hedberg_exponents(n: int, delta: float, s: float, p: float, kappa: float) -> tuple[float, float]:
    """Exponents ``(a, b)`` in ``M_kappa f(x)**a * (int f**p dH^delta)**b``."""
    gap = frac(n) - frac(kappa) + frac(s) * (1 - n)
    denom = frac(delta) - frac(kappa) * frac(p)
    return float(1 - frac(p) * gap / denom), float(gap / denom)


def check_hedberg_split(f: GridFunction, delta: float, s: float, p: float, kappa: float,
                        cells=None) -> RatioReport:
    """Empirical constant of the Riesz/maximal/Choquet split, maximized over cells."""
    g = f.geometry
    n = g.n
    delta = check_delta(delta, n)
    require("s", s, 1, ratio(n, n - 1), lo_closed=True)
    gap = frac(n) + frac(s) * (1 - n)
    require("p", p, ratio(delta, n), frac(delta) / gap, lo_closed=True)
    require("kappa", kappa, 0, gap, lo_closed=True)
    a, b = hedberg_exponents(n, delta, s, p, kappa)
    idx = _targets(g, cells)
    rep = RatioReport(delta, kappa, p, s, g.L, extra={"max_exponent": a, "norm_exponent": b})
    if f.max() == 0.0:
        rep.add(0.0, 0.0)
        return rep
    lhs = riesz_sum(f, s * (n - 1), cells=idx).flat[idx]
    m = fractional_maximal(f, OperatorParams(kappa=kappa), cells=idx).flat[idx]
    norm = integrate(f, delta, p)
    rhs = m ** a * norm ** b
    for x, y in zip(lhs, rhs):
        rep.add(x, y)
    return rep
