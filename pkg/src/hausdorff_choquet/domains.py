"""Analytic domains in the unit cube and their rasterization.

Every domain knows its closest boundary point for interior points, from
which the boundary distance follows.  Curved boundary pieces that have no
closed-form projection (spire walls, cusp walls) are handled by dense
sampling followed by golden-section refinement of the curve parameter.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .content import ParameterError
from .grid import GridGeometry, GridSet

CURVE_TOL = 1e-10
_GOLDEN = (math.sqrt(5) - 1) / 2


def _radial(v: np.ndarray):
    """Norms and unit directions of rows of ``v`` (e1 for zero rows)."""
    r = np.linalg.norm(v, axis=1)
    u = np.zeros_like(v)
    u[:, 0] = 1.0
    nz = r > 0
    u[nz] = v[nz] / r[nz, None]
    return r, u


def closest_on_curve(P: np.ndarray, curve, t0: float, t1: float, samples: int = 1025,
                     chunk: int = 4096) -> tuple[np.ndarray, np.ndarray]:
    """Closest points of a planar curve ``t -> (x(t), y(t))`` on ``[t0, t1]``.

    Returns (parameters, squared distances).  Coarse sampling picks the
    bracket; golden section shrinks it below ``CURVE_TOL``.
    """
    P = np.asarray(P, dtype=float).reshape(-1, 2)
    ts = np.linspace(t0, t1, samples)
    cx, cy = curve(ts)
    best_t = np.empty(len(P))
    for a in range(0, len(P), chunk):
        p = P[a:a + chunk]
        d2 = (p[:, 0, None] - cx[None]) ** 2 + (p[:, 1, None] - cy[None]) ** 2
        best_t[a:a + chunk] = np.argmin(d2, axis=1)
    k = best_t.astype(np.int64)
    lo = ts[np.maximum(k - 1, 0)]
    hi = ts[np.minimum(k + 1, samples - 1)]

    def f(t):
        x, y = curve(t)
        return (P[:, 0] - x) ** 2 + (P[:, 1] - y) ** 2

    c = hi - _GOLDEN * (hi - lo)
    d = lo + _GOLDEN * (hi - lo)
    fc, fd = f(c), f(d)
    while np.max(hi - lo) > CURVE_TOL:
        left = fc < fd
        hi = np.where(left, d, hi)
        lo = np.where(left, lo, c)
        d_new = np.where(left, c, lo + _GOLDEN * (hi - lo))
        c_new = np.where(left, hi - _GOLDEN * (hi - lo), d)
        fd_new = np.where(left, fc, np.nan)
        fc_new = np.where(left, np.nan, fd)
        c, d = c_new, d_new
        need_c, need_d = np.isnan(fc_new), np.isnan(fd_new)
        fc_new[need_c] = f(c)[need_c]
        fd_new[need_d] = f(d)[need_d]
        fc, fd = fc_new, fd_new
    t = 0.5 * (lo + hi)
    cand = np.stack([t, np.full_like(t, t0), np.full_like(t, t1)], axis=1)
    vals = np.stack([f(cand[:, j]) for j in range(3)], axis=1)
    j = np.argmin(vals, axis=1)
    return cand[np.arange(len(P)), j], vals[np.arange(len(P)), j]


def _closest_on_segment(P, a, b):
    a, b = np.asarray(a, float), np.asarray(b, float)
    ab = b - a
    t = np.clip(((P - a) @ ab) / (ab @ ab), 0.0, 1.0)
    Q = a + t[:, None] * ab
    return Q, np.sum((P - Q) ** 2, axis=1)


@dataclass(frozen=True)
class DomainSpec:
    """Base class; subclasses are the analytic domain variants."""

    n: int = field(default=2, kw_only=True)

    outer_regular = None  # metadata: True / False / None (unknown)
    john_exponent = None  # s for which the domain is s-John by construction

    def contains(self, X: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def project(self, X: np.ndarray) -> np.ndarray:
        """Closest boundary point of each (interior) point."""
        raise NotImplementedError

    def distance(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return np.linalg.norm(X - self.project(X), axis=1)

    def john_point(self):
        return None

    axis_origin = 0.0  # x1 where power profiles start

    def feature_points(self) -> np.ndarray:
        """Boundary points worth always probing (corners, tips)."""
        return np.zeros((0, self.n))

    def to_local(self, X):
        return np.asarray(X, dtype=float)

    @property
    def local_scale(self) -> float:
        """Length of one local unit in cube coordinates."""
        return 1.0

    def describe(self) -> dict:
        d = {"variant": type(self).__name__}
        for k, v in self.__dict__.items():
            d[k] = list(v) if isinstance(v, tuple) else v
        return d


def _vec(v, n):
    a = np.asarray(v, dtype=float).reshape(-1)
    if a.size == 1:
        a = np.full(n, float(a[0]))
    if a.size != n:
        raise ParameterError(f"expected {n} coordinates, got {a.size}")
    return tuple(float(x) for x in a)


@dataclass(frozen=True)
class Ball(DomainSpec):
    center: tuple = (0.5, 0.5)
    radius: float = 0.25

    outer_regular = True
    john_exponent = 1.0

    def __post_init__(self):
        object.__setattr__(self, "center", _vec(self.center, self.n))
        if not self.radius > 0:
            raise ParameterError("ball radius must be positive")

    def contains(self, X):
        return np.linalg.norm(np.atleast_2d(X) - self.center, axis=1) < self.radius

    def project(self, X):
        X = np.atleast_2d(np.asarray(X, float))
        _, u = _radial(X - self.center)
        return np.asarray(self.center) + self.radius * u

    def john_point(self):
        return np.asarray(self.center)


@dataclass(frozen=True)
class Box(DomainSpec):
    lo: tuple = (0.25, 0.25)
    hi: tuple = (0.75, 0.75)

    outer_regular = True
    john_exponent = 1.0

    def __post_init__(self):
        object.__setattr__(self, "lo", _vec(self.lo, self.n))
        object.__setattr__(self, "hi", _vec(self.hi, self.n))
        if any(a >= b for a, b in zip(self.lo, self.hi)):
            raise ParameterError("box corners must satisfy lo < hi")

    def contains(self, X):
        X = np.atleast_2d(X)
        return np.all((X > self.lo) & (X < self.hi), axis=1)

    def project(self, X):
        X = np.atleast_2d(np.asarray(X, float)).copy()
        lo, hi = np.asarray(self.lo), np.asarray(self.hi)
        gaps = np.concatenate([X - lo, hi - X], axis=1)
        j = np.argmin(gaps, axis=1)
        rows = np.arange(len(X))
        d = j % self.n
        X[rows, d] = np.where(j < self.n, lo[d], hi[d])
        return X

    def john_point(self):
        return 0.5 * (np.asarray(self.lo) + np.asarray(self.hi))

    def feature_points(self):
        lo, hi = np.asarray(self.lo), np.asarray(self.hi)
        corners = np.array(np.meshgrid(*[[a, b] for a, b in zip(lo, hi)], indexing="ij"))
        return corners.reshape(self.n, -1).T


@dataclass(frozen=True)
class Annulus(DomainSpec):
    r: float = 0.25
    R: float = 0.45
    center: tuple = (0.5, 0.5)

    outer_regular = True
    john_exponent = 1.0

    def __post_init__(self):
        object.__setattr__(self, "center", _vec(self.center, self.n))
        if not 0 < self.r < self.R:
            raise ParameterError(f"annulus needs 0 < r < R, got r={self.r}, R={self.R}")

    def contains(self, X):
        rho = np.linalg.norm(np.atleast_2d(X) - self.center, axis=1)
        return (rho > self.r) & (rho < self.R)

    def project(self, X):
        X = np.atleast_2d(np.asarray(X, float))
        rho, u = _radial(X - self.center)
        target = np.where(rho - self.r < self.R - rho, self.r, self.R)
        return np.asarray(self.center) + target[:, None] * u

    def john_point(self):
        p = np.asarray(self.center).copy()
        p[0] += 0.5 * (self.r + self.R)
        return p


@dataclass(frozen=True)
class Spire(DomainSpec):
    """``{x in (0,1) x R^(n-1) : |(x2..xn)| < x1**s}`` scaled by 1/2 into the cube.

    Local coordinates ``x`` map to cube coordinates ``0.5 * x + (0.25, 0.5, ..., 0.5)``.
    """

    s: float = 1.5

    outer_regular = True

    def __post_init__(self):
        if not 1.0 <= self.s < self.n / (self.n - 1):
            raise ParameterError(f"spire exponent must lie in [1, {self.n / (self.n - 1):g}), got {self.s}")

    @property
    def john_exponent(self):
        return self.s

    axis_origin = 0.25

    @property
    def local_scale(self):
        return 0.5

    @property
    def _offset(self):
        return np.array([0.25] + [0.5] * (self.n - 1))

    def to_local(self, X):
        return (np.asarray(X, float) - self._offset) / 0.5

    def from_local(self, x):
        return 0.5 * np.asarray(x, float) + self._offset

    def contains(self, X):
        x = np.atleast_2d(self.to_local(X))
        a = x[:, 0]
        rho = np.linalg.norm(x[:, 1:], axis=1)
        inside = (a > 0) & (a < 1)
        return inside & (rho < np.where(inside, np.abs(a), 0.0) ** self.s)

    def project(self, X):
        x = np.atleast_2d(self.to_local(X))
        a = x[:, 0]
        rho, u = _radial(x[:, 1:]) if self.n > 1 else (np.zeros(len(x)), None)
        s = self.s
        t, d2_curve = closest_on_curve(np.stack([a, rho], axis=1), lambda t: (t, t ** s), 0.0, 1.0)
        base_rho = np.minimum(rho, 1.0)
        d2_base = (a - 1.0) ** 2 + (rho - base_rho) ** 2
        use_base = d2_base < d2_curve
        m_a = np.where(use_base, 1.0, t)
        m_rho = np.where(use_base, base_rho, t ** s)
        out = np.empty_like(x)
        out[:, 0] = m_a
        out[:, 1:] = m_rho[:, None] * u
        return self.from_local(out)

    def john_point(self):
        p = np.zeros(self.n)
        p[0] = 0.75
        return self.from_local(p)

    def feature_points(self):
        tip = np.zeros(self.n)
        rim = np.zeros(self.n)
        rim[0] = 1.0
        rim[1] = 1.0
        return self.from_local(np.stack([tip, rim]))


@dataclass(frozen=True)
class RoomWithCusp(DomainSpec):
    """Square room ``(0,2)**2`` with a cusp of half-width ``((x - base)/len)**e`` on its right wall.

    ``cusp_position`` is the x-coordinate of the cusp tip.  A tip beyond the
    wall (> 2) makes an outward spike of the domain; a tip inside the room
    (< 2) cuts an inward cusp of the complement into the room.  The room is
    scaled by ``0.8 / max(2, cusp_position)`` into the cube.
    """

    cusp_exponent: float = 4.0
    cusp_position: float = 1.0

    def __post_init__(self):
        if self.n != 2:
            raise ParameterError("RoomWithCusp is planar")
        if not self.cusp_exponent > 1:
            raise ParameterError("cusp exponent must exceed 1")
        if self.cusp_position == 2.0 or not 0 < self.cusp_position:
            raise ParameterError("cusp tip must differ from the wall position 2")

    @property
    def outward(self) -> bool:
        return self.cusp_position > 2.0

    @property
    def outer_regular(self):
        return self.outward

    @property
    def local_scale(self):
        return 0.8 / max(2.0, self.cusp_position)

    @property
    def _offset(self):
        return np.array([0.1, 0.5 - self.local_scale])

    def to_local(self, X):
        return (np.asarray(X, float) - self._offset) / self.local_scale

    def from_local(self, x):
        return self.local_scale * np.asarray(x, float) + self._offset

    def _halfwidth(self, x):
        tip, e = self.cusp_position, self.cusp_exponent
        return np.clip((x - tip) / (2.0 - tip), 0.0, None) ** e

    def contains(self, X):
        x = np.atleast_2d(self.to_local(X))
        a, b = x[:, 0], x[:, 1]
        room = (a > 0) & (a < 2) & (b > 0) & (b < 2)
        tip = self.cusp_position
        if self.outward:
            spike = (a >= 2) & (a < tip) & (np.abs(b - 1) < self._halfwidth(a))
            return room | spike
        notch = (a >= tip) & (np.abs(b - 1) <= self._halfwidth(a))
        return room & ~notch

    def project(self, X):
        x = np.atleast_2d(self.to_local(X))
        lo, hi = sorted((2.0, self.cusp_position))
        best = np.full(len(x), np.inf)
        out = np.zeros_like(x)
        for a, b in (((0, 2), (2, 2)), ((0, 0), (2, 0)), ((0, 0), (0, 2))):
            Q, d2 = _closest_on_segment(x, a, b)
            better = d2 < best
            out[better], best[better] = Q[better], d2[better]
        for sign in (1.0, -1.0):
            t, d2 = closest_on_curve(x, lambda t, sg=sign: (t, 1 + sg * self._halfwidth(t)), lo, hi)
            better = d2 < best
            out[better, 0] = t[better]
            out[better, 1] = 1 + sign * self._halfwidth(t[better])
            best[better] = d2[better]
        return self.from_local(out)

    def john_point(self):
        return self.from_local(np.array([1.0, 0.5]))

    def feature_points(self):
        return self.from_local(np.array([[self.cusp_position, 1.0], [0, 0], [0, 2], [2, 0], [2, 2]]))


@dataclass(frozen=True, eq=False)
class RasterizedDomain:
    spec: DomainSpec
    set: GridSet
    dist: np.ndarray            # per cell, 0 outside the domain
    john_center: int | None     # flat cell index

    @property
    def geometry(self) -> GridGeometry:
        return self.set.geometry

    @property
    def level(self) -> int:
        return self.geometry.L

    def john_center_point(self) -> np.ndarray:
        if self.john_center is None:
            raise ParameterError("domain has no John center")
        return self.geometry.centers[self.john_center]


def rasterize(spec: DomainSpec, L: int) -> RasterizedDomain:
    if L < 3:
        raise ParameterError("rasterization needs L >= 3")
    g = GridGeometry(spec.n, L)
    inside = spec.contains(g.centers)
    dist = np.zeros(g.size)
    if inside.any():
        dist[inside] = spec.distance(g.centers[inside])
    jc = None
    jp = spec.john_point()
    if jp is not None:
        jc = int(g.index(g.cell_of(jp)))
        if not inside[jc]:
            raise ParameterError("John center cell lies outside the rasterized domain")
    occ = GridSet(g, inside)
    dist.setflags(write=False)
    return RasterizedDomain(spec, occ, dist.reshape(g.shape), jc)


@dataclass(frozen=True)
class OuterRegularity:
    b: float
    radii: np.ndarray
    per_radius: np.ndarray      # min ratio at each radius
    worst_point: np.ndarray
    samples: int


def outer_regularity_estimate(dom: RasterizedDomain, radii, boundary_samples: int = 10**9) -> OuterRegularity:
    """Smallest grid ratio ``|B(y,r) \\ Omega| / |B(y,r)|`` over sampled boundary points.

    Boundary points are the closest-point projections of occupied cells whose
    closed cell meets the complement (center within ``h sqrt(n)/2`` of the
    boundary), plus the domain's feature points.  Grid measures count cell
    centers of the infinite lattice; centers outside the root cube belong to
    the complement.
    """
    if boundary_samples < 1:
        raise ParameterError("boundary_samples must be >= 1")
    g = dom.geometry
    h, n = g.h, g.n
    radii = np.sort(np.asarray(radii, dtype=float))
    near = dom.set.flat & (dom.dist.reshape(-1) <= 0.5 * math.sqrt(n) * h + 1e-12)
    idx = np.flatnonzero(near)
    if len(idx) == 0:
        raise ParameterError("no boundary cells found")
    if len(idx) > boundary_samples:
        idx = idx[np.linspace(0, len(idx) - 1, boundary_samples).round().astype(int)]
    Y = np.concatenate([dom.spec.project(g.centers[idx]), dom.spec.feature_points()])
    occ = dom.set.occupied
    rmax = radii[-1]
    span = int(math.ceil(rmax / h)) + 1
    offs = np.stack(np.meshgrid(*[np.arange(-span, span + 1)] * n, indexing="ij"), axis=-1).reshape(-1, n)
    per = np.full(len(radii), np.inf)
    worst = (np.inf, None)
    for y in Y:
        base = np.floor(y / h).astype(np.int64)
        cells = base + offs
        d = np.linalg.norm((cells + 0.5) * h - y, axis=1)
        inside_grid = np.all((cells >= 0) & (cells < g.side), axis=1)
        in_dom = np.zeros(len(cells), dtype=bool)
        ci = cells[inside_grid]
        in_dom[inside_grid] = occ[tuple(ci.T)]
        for j, r in enumerate(radii):
            ball = d < r
            tot = np.count_nonzero(ball)
            if tot == 0:
                continue
            ratio = np.count_nonzero(ball & ~in_dom) / tot
            if ratio < per[j]:
                per[j] = ratio
            if ratio < worst[0]:
                worst = (ratio, y)
    return OuterRegularity(float(per.min()), radii, per, np.asarray(worst[1]), len(Y))


def john_ball(dom: RasterizedDomain, k: float = 0.5) -> GridSet:
    """Cells of ``B(x0, k dist(x0, boundary))`` inside the domain (x0 = John center cell)."""
    if not 0 < k < 1:
        raise ParameterError("k must lie in (0, 1)")
    if dom.john_center is None:
        raise ParameterError("domain has no John center")
    g = dom.geometry
    x0 = g.centers[dom.john_center]
    rad = k * dom.dist.reshape(-1)[dom.john_center]
    inside = np.linalg.norm(g.centers - x0, axis=1) < rad
    return GridSet(g, inside) & dom.set


PRESET_DOMAINS = {
    "ball": lambda: Ball(),
    "box": lambda: Box(),
    "annulus": lambda: Annulus(0.25, 0.45),
    "spire-1.5": lambda: Spire(1.5),
    "spire-1.2": lambda: Spire(1.2),
    "spire-1.25": lambda: Spire(1.25),
    "room-outward-cusp": lambda: RoomWithCusp(4.0, 3.0),
    "room-inward-cusp": lambda: RoomWithCusp(4.0, 1.0),
}


def domain_from_record(rec: dict) -> DomainSpec:
    """Build a DomainSpec from a flat record such as ``{'variant': 'Annulus', 'r': 0.25, 'R': 0.45}``."""
    rec = dict(rec)
    variant = rec.pop("variant", None) or rec.pop("domain", None)
    if variant is None:
        raise ParameterError("domain record needs a 'variant' field")
    if variant in PRESET_DOMAINS and not rec:
        return PRESET_DOMAINS[variant]()
    classes = {c.__name__.lower(): c for c in (Ball, Box, Annulus, Spire, RoomWithCusp)}
    cls = classes.get(str(variant).lower())
    if cls is None:
        raise ParameterError(f"unknown domain variant {variant!r}")
    kwargs = {}
    for k, v in rec.items():
        if isinstance(v, str) and "," in v:
            v = tuple(float(x) for x in v.split(","))
        elif isinstance(v, str):
            v = int(v) if k == "n" else float(v)
        elif isinstance(v, list):
            v = tuple(v)
        kwargs[k] = v
    try:
        return cls(**kwargs)
    except TypeError as exc:
        raise ParameterError(f"bad field for {cls.__name__}: {exc}") from None
