"""Analytic test functions with exact gradients, and their grid sampling."""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .content import ParameterError
from .domains import RasterizedDomain
from .grid import GridFunction


class SupportError(ParameterError):
    """A compactly supported family does not fit inside the domain."""


@dataclass(frozen=True)
class TestFunction:
    __test__ = False  # keep pytest from collecting this class

    def value(self, X: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def gradient(self, X: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def kink_distance(self, X: np.ndarray) -> np.ndarray:
        """Distance to the set where ``u`` fails to be C^2 (inf when smooth)."""
        return np.full(len(X), np.inf)

    def bind(self, spec) -> "TestFunction":
        """Resolve domain-dependent parameters."""
        return self

    compact = False

    def support_fits(self, spec) -> bool:
        return False

    def scaled(self, a: float) -> "TestFunction":
        return Affine(self, float(a), 0.0)

    def shifted(self, c: float) -> "TestFunction":
        return Affine(self, 1.0, float(c))

    def __rmul__(self, a):
        return self.scaled(a)

    def describe(self) -> dict:
        d = {"family": type(self).__name__}
        for k, v in self.__dict__.items():
            if k.startswith("_") or k == "spec":
                continue
            d[k] = list(v) if isinstance(v, tuple) else v
        return d


@dataclass(frozen=True)
class Affine(TestFunction):
    base: TestFunction = None
    a: float = 1.0
    c: float = 0.0

    @property
    def compact(self):
        return self.base.compact and self.c == 0.0

    def support_fits(self, spec):
        return self.c == 0.0 and self.base.support_fits(spec)

    def value(self, X):
        return self.a * self.base.value(X) + self.c

    def gradient(self, X):
        return self.a * self.base.gradient(X)

    def kink_distance(self, X):
        return self.base.kink_distance(X)

    def bind(self, spec):
        return replace(self, base=self.base.bind(spec))

    def describe(self):
        d = self.base.describe()
        d.update(scale=self.a, shift=self.c)
        return d


@dataclass(frozen=True)
class RadialBump(TestFunction):
    """``1`` on ``|x-c| < inner``, ``(1 - tau**2)**2`` with ``tau = (t - inner)/(outer - inner)`` up to ``outer``."""

    center: tuple = (0.5, 0.5)
    inner: float = 0.0
    outer: float = 0.1

    compact = True

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(c) for c in np.ravel(self.center)))
        if not 0 <= self.inner < self.outer:
            raise ParameterError(f"bump radii need 0 <= inner < outer, got {self.inner}, {self.outer}")

    def _tau(self, X):
        X = np.atleast_2d(np.asarray(X, float))
        v = X - np.asarray(self.center)
        t = np.linalg.norm(v, axis=1)
        return v, t, (t - self.inner) / (self.outer - self.inner)

    def value(self, X):
        _, t, tau = self._tau(X)
        u = (1.0 - tau ** 2) ** 2
        return np.where(t <= self.inner, 1.0, np.where(t < self.outer, u, 0.0))

    def gradient(self, X):
        v, t, tau = self._tau(X)
        du = -4.0 * tau * (1.0 - tau ** 2) / (self.outer - self.inner)
        du = np.where((t > self.inner) & (t < self.outer), du, 0.0)
        safe = np.where(t > 0, t, 1.0)
        return (du / safe)[:, None] * v

    def kink_distance(self, X):
        _, t, _ = self._tau(X)
        d = np.abs(t - self.outer)
        if self.inner > 0:
            d = np.minimum(d, np.abs(t - self.inner))
        return d

    def support_fits(self, spec):
        c = np.asarray(self.center)[None]
        return bool(spec.contains(c)[0]) and self.outer < float(spec.distance(c)[0])


@dataclass(frozen=True)
class PowerProfile(TestFunction):
    """``u = (x1 - origin)**alpha`` for ``x1 > origin``; origin defaults to the domain's axis origin."""

    alpha: float = 1.0
    origin: float | None = None

    def __post_init__(self):
        if not self.alpha > 0:
            raise ParameterError("alpha must be positive")

    def bind(self, spec):
        if self.origin is None:
            return replace(self, origin=float(getattr(spec, "axis_origin", 0.0)))
        return self

    def _x(self, X):
        X = np.atleast_2d(np.asarray(X, float))
        return X, np.clip(X[:, 0] - (self.origin or 0.0), 0.0, None)

    def value(self, X):
        _, x = self._x(X)
        return x ** self.alpha

    def gradient(self, X):
        X, x = self._x(X)
        g = np.zeros_like(X)
        with np.errstate(divide="ignore", invalid="ignore"):
            g[:, 0] = np.where(x > 0, self.alpha * x ** (self.alpha - 1.0), 0.0)
        return g

    def kink_distance(self, X):
        _, x = self._x(X)
        if float(self.alpha).is_integer():
            return np.full(len(x), np.inf)
        return x


@dataclass(frozen=True)
class FourierField(TestFunction):
    """Sum of ``modes`` random cosines with integer wave vectors up to ``max_frequency``."""

    seed: int = 0
    modes: int = 3
    amplitude: float = 1.0
    n: int = 2
    max_frequency: int = 3
    _k: np.ndarray = field(default=None, repr=False, compare=False)
    _a: np.ndarray = field(default=None, repr=False, compare=False)
    _phi: np.ndarray = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.modes < 1:
            raise ParameterError("FourierField needs at least one mode")
        rng = np.random.default_rng(self.seed)
        m, kmax = self.modes, self.max_frequency
        k = np.zeros((m, self.n), dtype=np.int64)
        for j in range(m):
            while not k[j].any():
                k[j] = rng.integers(-kmax, kmax + 1, size=self.n)
        object.__setattr__(self, "_k", 2 * math.pi * k.astype(float))
        object.__setattr__(self, "_a", rng.uniform(-1.0, 1.0, size=m))
        object.__setattr__(self, "_phi", rng.uniform(0.0, 2 * math.pi, size=m))

    def _arg(self, X):
        # elementwise sums rather than matmul: BLAS blocking would make the
        # last bits depend on the batch size
        X = np.atleast_2d(np.asarray(X, float))
        arg = np.broadcast_to(self._phi, (len(X), self.modes)).copy()
        for d in range(X.shape[1]):
            arg += X[:, d:d + 1] * self._k[:, d]
        return arg

    def value(self, X):
        c = np.cos(self._arg(X)) * self._a
        out = c[:, 0].copy()
        for j in range(1, self.modes):
            out += c[:, j]
        return self.amplitude * out

    def gradient(self, X):
        s = -np.sin(self._arg(X)) * self._a
        out = np.zeros((len(s), self.n))
        for j in range(self.modes):
            out += s[:, j:j + 1] * self._k[j]
        return self.amplitude * out

    def gradient_bound(self) -> float:
        return self.amplitude * float(np.sum(np.abs(self._a) * np.linalg.norm(self._k, axis=1)))


@dataclass(frozen=True)
class DistancePower(TestFunction):
    """``u = dist(x, boundary)**gamma`` inside the bound domain, 0 outside."""

    gamma: float = 2.0
    spec: object = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if not self.gamma > 1:
            raise ParameterError("DistancePower needs gamma > 1")

    def bind(self, spec):
        return replace(self, spec=spec)

    def _parts(self, X):
        if self.spec is None:
            raise ParameterError("DistancePower must be bound to a domain")
        X = np.atleast_2d(np.asarray(X, float))
        inside = self.spec.contains(X)
        d = np.zeros(len(X))
        P = X.copy()
        if inside.any():
            P[inside] = self.spec.project(X[inside])
            d[inside] = np.linalg.norm(X[inside] - P[inside], axis=1)
        return X, P, d, inside

    def value(self, X):
        _, _, d, _ = self._parts(X)
        return d ** self.gamma

    def gradient(self, X):
        X, P, d, inside = self._parts(X)
        g = np.zeros_like(X)
        ok = inside & (d > 0)
        g[ok] = (self.gamma * d[ok] ** (self.gamma - 2.0))[:, None] * (X[ok] - P[ok])
        return g


def signed_values(fn: TestFunction, dom: RasterizedDomain) -> np.ndarray:
    """Signed ``u`` at the occupied cell centers, zero elsewhere (flat array)."""
    fn = fn.bind(dom.spec)
    g = dom.geometry
    occ = dom.set.flat
    out = np.zeros(g.size)
    out[occ] = fn.value(g.centers[occ])
    return out


def validate_support(fn: TestFunction, dom: RasterizedDomain) -> None:
    """Certify membership in C^1_0: analytic support inside the domain and zero data near its edge."""
    fn = fn.bind(dom.spec)
    if not fn.compact:
        raise SupportError(f"{type(fn).__name__} is not compactly supported")
    if not fn.support_fits(dom.spec):
        raise SupportError("bump support leaves the domain")
    g = dom.geometry
    near = dom.set.flat & (dom.dist.reshape(-1) <= g.h)
    if near.any():
        X = g.centers[near]
        if np.any(fn.value(X) != 0) or np.any(np.linalg.norm(fn.gradient(X), axis=1) != 0):
            raise SupportError("nonzero values within one cell of the boundary")


def sample_function(fn: TestFunction, dom: RasterizedDomain, L: int | None = None,
                    compact: bool = False) -> GridFunction:
    """``|u|`` and ``|grad u|`` at occupied cell centers.

    ``L`` re-rasterizes the domain at another level when it differs from
    ``dom.level``.  With ``compact=True`` the C^1_0 certificate is enforced.
    """
    from .domains import rasterize

    if L is not None and L != dom.level:
        dom = rasterize(dom.spec, L)
    fn = fn.bind(dom.spec)
    if compact:
        validate_support(fn, dom)
    g = dom.geometry
    occ = dom.set.flat
    X = g.centers[occ]
    vals = np.zeros(g.size)
    grads = np.zeros(g.size)
    vals[occ] = np.abs(fn.value(X))
    grads[occ] = np.linalg.norm(fn.gradient(X), axis=1)
    return GridFunction(g, dom.set, vals.reshape(g.shape), gradient_magnitude=grads.reshape(g.shape))


_STENCILS = {
    2: (np.array([1]), np.array([0.5])),
    4: (np.array([1, 2]), np.array([2.0 / 3.0, -1.0 / 12.0])),
}


def finite_difference_check(fn: TestFunction, dom: RasterizedDomain, L: int | None = None,
                            order: int = 2) -> float:
    """Largest deviation of central-difference gradients from the analytic ``|grad u|``.

    Errors are relative to ``max |grad u|`` over the checked cells (pointwise
    relative error is meaningless where a C^1 gradient tends to zero).  Cells
    are checked when their whole stencil lies in the domain, stays clear of
    the function's kinks, and ``|grad u| > 1e-6``.
    """
    from .domains import rasterize

    if order not in _STENCILS:
        raise ParameterError("order must be 2 or 4")
    if L is None:
        L = dom.level
    if L < 5:
        raise ParameterError("finite-difference check needs L >= 5")
    if L != dom.level:
        dom = rasterize(dom.spec, L)
    fn = fn.bind(dom.spec)
    g = dom.geometry
    h, n = g.h, g.n
    offs, w = _STENCILS[order]
    reach = int(offs.max())
    u = np.zeros(g.shape)
    u.reshape(-1)[dom.set.flat] = fn.value(g.centers[dom.set.flat])
    occ = dom.set.occupied
    ok = occ.copy()
    grad = np.zeros(g.shape + (n,))
    for d in range(n):
        for o, c in zip(offs, w):
            fwd = np.roll(u, -o, axis=d)
            bwd = np.roll(u, o, axis=d)
            grad[..., d] += c * (fwd - bwd) / h
            for sh in (o, -o):
                moved = np.roll(occ, sh, axis=d)
                ok &= moved
        # forbid wrap-around
        edge = [slice(None)] * n
        edge[d] = slice(0, reach)
        ok[tuple(edge)] = False
        edge[d] = slice(g.side - reach, None)
        ok[tuple(edge)] = False
    okf = ok.reshape(-1)
    X = g.centers[okf]
    exact = np.linalg.norm(fn.gradient(X), axis=1)
    kink = fn.kink_distance(X)
    sel = (exact > 1e-6) & (kink > reach * h * math.sqrt(n))
    if not sel.any():
        return 0.0
    approx = np.linalg.norm(grad.reshape(-1, n)[okf][sel], axis=1)
    return float(np.max(np.abs(approx - exact[sel])) / np.max(exact[sel]))
