"""Dyadic Hausdorff content of grid sets.

The content of a set ``E`` is the least total ``sum l(Q)**delta`` over covers
of ``E`` by dyadic subcubes of the root cube.  On a grid the optimum obeys

    cost(Q) = 0                                   if Q misses E
    cost(Q) = l(Q)**delta                         if Q is a leaf meeting E
    cost(Q) = min(l(Q)**delta, sum cost(child))   otherwise

which is evaluated bottom-up over the Morton-ordered tree.  Ties go to the
parent cube.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numba
import numpy as np

from .grid import GridGeometry, GridSet, morton_decode

REL_TOL = 1e-12
BRUTE_FORCE_MAX_CELLS = 4096
BRUTE_FORCE_MAX_COVERS = 2_000_000


class ParameterError(ValueError):
    """Parameter outside the admissible range of an operation."""


def check_delta(delta: float, n: int) -> float:
    delta = float(delta)
    if not (0.0 < delta <= n):
        raise ParameterError(f"delta must lie in (0, {n}], got {delta}")
    return delta


def level_weights(L: int, delta: float) -> np.ndarray:
    """``l(Q)**delta`` for a cube at each tree level 0..L."""
    return np.array([2.0 ** (-lvl * delta) for lvl in range(L + 1)])


def level_offsets(n: int, L: int) -> np.ndarray:
    off = np.zeros(L + 2, dtype=np.int64)
    for lvl in range(L + 1):
        off[lvl + 1] = off[lvl] + (1 << (n * lvl))
    return off


@numba.njit(cache=True)
def _dp_full(occ_m, n, L, w, off):
    cost = np.zeros(off[L + 1])
    take = np.zeros(off[L + 1], dtype=np.bool_)
    base = off[L]
    for k in range(occ_m.shape[0]):
        if occ_m[k]:
            cost[base + k] = w[L]
            take[base + k] = True
    c = 1 << n
    for lvl in range(L - 1, -1, -1):
        for k in range(1 << (n * lvl)):
            first = off[lvl + 1] + k * c
            s = 0.0
            for j in range(c):
                s += cost[first + j]
            if s > 0.0 and w[lvl] <= s:
                cost[off[lvl] + k] = w[lvl]
                take[off[lvl] + k] = True
            else:
                cost[off[lvl] + k] = s
    return cost, take


@numba.njit(cache=True)
def _add_leaf(cost, off, n, L, w, code):
    idx = off[L] + code
    if cost[idx] > 0.0:
        return
    cost[idx] = w[L]
    c = 1 << n
    for lvl in range(L - 1, -1, -1):
        node = code >> (n * (L - lvl))
        first = off[lvl + 1] + node * c
        s = 0.0
        for j in range(c):
            s += cost[first + j]
        new = w[lvl] if (s > 0.0 and w[lvl] <= s) else s
        if new == cost[off[lvl] + node]:
            break
        cost[off[lvl] + node] = new


@numba.njit(cache=True)
def _superlevel_contents(codes_desc, vals_desc, thr_desc, n, L, w, off):
    cost = np.zeros(off[L + 1])
    out = np.empty(thr_desc.shape[0])
    i = 0
    m = codes_desc.shape[0]
    for q in range(thr_desc.shape[0]):
        while i < m and vals_desc[i] > thr_desc[q]:
            _add_leaf(cost, off, n, L, w, codes_desc[i])
            i += 1
        out[q] = cost[0]
    return out


def superlevel_contents(geometry: GridGeometry, values: np.ndarray, thresholds, delta: float) -> np.ndarray:
    """Content of ``{values > t}`` for every ``t`` in ``thresholds``.

    One incremental sweep: cells enter the tree in decreasing value order and
    only the path to the root is updated.  The result for each threshold is
    identical to a fresh :func:`dyadic_content` evaluation.
    """
    delta = check_delta(delta, geometry.n)
    vals = np.asarray(values, dtype=float).reshape(-1)
    thr = np.asarray(thresholds, dtype=float).reshape(-1)
    pos = np.flatnonzero(vals > 0)
    order = pos[np.argsort(-vals[pos], kind="stable")]
    codes = geometry.morton[order]
    t_order = np.argsort(-thr, kind="stable")
    res = _superlevel_contents(codes, vals[order], thr[t_order], geometry.n, geometry.L,
                               level_weights(geometry.L, delta), level_offsets(geometry.n, geometry.L))
    out = np.empty_like(res)
    out[t_order] = res
    return out


@dataclass(frozen=True)
class ContentResult:
    value: float
    cover: tuple  # ((level, (i1, ..., in)), ...)
    delta: float

    def cover_cost(self) -> float:
        return math.fsum(2.0 ** (-lvl * self.delta) for lvl, _ in self.cover)

    def to_record(self) -> str:
        lines = [f"{self.delta!r} {self.value!r} {len(self.cover)}"]
        for lvl, c in self.cover:
            lines.append(" ".join(str(x) for x in (lvl, *c)))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_record(cls, text: str) -> ContentResult:
        rows = [ln.split() for ln in text.splitlines() if ln.strip()]
        delta, value, size = float(rows[0][0]), float(rows[0][1]), int(rows[0][2])
        cover = tuple((int(r[0]), tuple(int(x) for x in r[1:])) for r in rows[1:1 + size])
        return cls(value, cover, delta)


def _cover_from_dp(cost, take, off, n, L):
    cover = []
    stack = [(0, 0)]
    while stack:
        lvl, k = stack.pop()
        i = off[lvl] + k
        if cost[i] == 0.0:
            continue
        if take[i]:
            cover.append((lvl, k))
        else:
            base = k << n
            stack.extend((lvl + 1, base + j) for j in range((1 << n) - 1, -1, -1))
    cover.sort()
    return tuple((lvl, tuple(int(x) for x in morton_decode(k, n, lvl))) for lvl, k in cover)


def dyadic_content(e: GridSet, delta: float) -> ContentResult:
    g = e.geometry
    delta = check_delta(delta, g.n)
    off = level_offsets(g.n, g.L)
    occ_m = e.flat[g.morton_order]
    cost, take = _dp_full(occ_m, g.n, g.L, level_weights(g.L, delta), off)
    cover = _cover_from_dp(cost, take, off, g.n, g.L)
    return ContentResult(float(cost[0]), cover, delta)


def content_value(e: GridSet, delta: float) -> float:
    g = e.geometry
    delta = check_delta(delta, g.n)
    off = level_offsets(g.n, g.L)
    cost, _ = _dp_full(e.flat[g.morton_order], g.n, g.L, level_weights(g.L, delta), off)
    return float(cost[0])


def brute_force_content(e: GridSet, delta: float) -> float:
    """Minimum cover cost by explicit enumeration of every antichain cover.

    Only cubes meeting the set are enumerated (a cube missing it can be
    dropped from any cover without losing coverage).  Each candidate cover is
    checked for coverage leaf by leaf and priced with ``math.fsum``.
    """
    g = e.geometry
    if g.size > BRUTE_FORCE_MAX_CELLS:
        raise ParameterError(f"brute force limited to {BRUTE_FORCE_MAX_CELLS} cells, got {g.size}")
    delta = check_delta(delta, g.n)
    n, L = g.n, g.L
    leaves = {int(c) for c in g.morton[e.flat]}
    if not leaves:
        return 0.0
    meets = [set() for _ in range(L + 1)]
    for c in leaves:
        for lvl in range(L + 1):
            meets[lvl].add(c >> (n * (L - lvl)))

    def count(lvl, k):
        if lvl == L:
            return 1
        prod = 1
        for j in range(1 << n):
            ch = (k << n) + j
            if ch in meets[lvl + 1]:
                prod *= count(lvl + 1, ch)
        return 1 + prod

    total = count(0, 0)
    if total > BRUTE_FORCE_MAX_COVERS:
        raise ParameterError(f"{total} candidate covers exceed the brute-force guard")

    def covers(lvl, k):
        yield ((lvl, k),)
        if lvl == L:
            return
        kids = [(lvl + 1, (k << n) + j) for j in range(1 << n) if (k << n) + j in meets[lvl + 1]]
        for combo in itertools.product(*[list(covers(*kid)) for kid in kids]):
            yield tuple(itertools.chain.from_iterable(combo))

    best = math.inf
    for cover in covers(0, 0):
        covered = set()
        for lvl, k in cover:
            span = n * (L - lvl)
            covered.update(range(k << span, (k + 1) << span))
        if not leaves <= covered:
            raise AssertionError("enumerated cover misses an occupied cell")
        best = min(best, math.fsum(2.0 ** (-lvl * delta) for lvl, _ in cover))
    return best


def ball_content_upper(e: GridSet, delta: float, candidate_budget: int = 16) -> float:
    """Upper bound for the ball content of the occupied cells.

    Candidates, tried in order until the budget runs out: one ball around the
    bounding box of the set, the optimal dyadic cover with every cube replaced
    by its circumscribed ball, then the uniform covers by circumscribed balls
    of all level-k cubes meeting the set (k = 0..L).  Returns the cheapest.
    """
    if candidate_budget < 1:
        raise ParameterError("candidate_budget must be >= 1")
    g = e.geometry
    delta = check_delta(delta, g.n)
    if e.is_empty():
        return 0.0
    h = g.h
    root_n = math.sqrt(g.n)
    cells = e.cells()
    candidates = []
    lo = cells.min(axis=0) * h
    hi = (cells.max(axis=0) + 1) * h
    candidates.append(lambda: (0.5 * float(np.linalg.norm(hi - lo))) ** delta)
    candidates.append(lambda: (root_n / 2) ** delta * dyadic_content(e, delta).value)
    for k in range(g.L + 1):
        def uniform(k=k):
            m = len(np.unique(cells >> (g.L - k), axis=0))
            return m * (root_n / 2 * 2.0 ** -k) ** delta
        candidates.append(uniform)
    return min(c() for c in candidates[:candidate_budget])


@dataclass
class AxiomReport:
    results: dict = field(default_factory=dict)   # name -> True / False / None (not applicable)
    worst: dict = field(default_factory=dict)     # name -> largest relative violation seen
    cases: dict = field(default_factory=dict)     # name -> number of comparisons

    def record(self, name: str, lhs: float, rhs: float, *, equal: bool = False):
        scale = max(abs(lhs), abs(rhs), 1e-300)
        gap = abs(lhs - rhs) if equal else lhs - rhs
        excess = gap / scale
        ok = excess <= REL_TOL
        self.results[name] = self.results.get(name, True) and ok
        self.worst[name] = max(self.worst.get(name, -math.inf), excess)
        self.cases[name] = self.cases.get(name, 0) + 1

    def not_applicable(self, name: str):
        self.results[name] = None

    @property
    def passed(self) -> bool:
        return all(v is not False for v in self.results.values())

    def merge(self, other: AxiomReport) -> AxiomReport:
        for k, v in other.results.items():
            if v is None:
                self.results.setdefault(k, None)
                continue
            prev = self.results.get(k, True)
            self.results[k] = (True if prev is None else prev) and v
            self.worst[k] = max(self.worst.get(k, -math.inf), other.worst[k])
            self.cases[k] = self.cases.get(k, 0) + other.cases[k]
        return self

    def lines(self) -> list[str]:
        out = []
        for k, v in self.results.items():
            status = "n/a" if v is None else ("pass" if v else "FAIL")
            extra = "" if v is None else f" cases={self.cases[k]} worst={self.worst[k]:.3e}"
            out.append(f"{k}: {status}{extra}")
        return out


def check_content_axioms(sets: list[GridSet], delta: float) -> AxiomReport:
    if not sets:
        raise ParameterError("need at least one set")
    g = sets[0].geometry
    for s in sets:
        if s.geometry != g:
            raise ValueError("all sets must share a geometry")
    delta = check_delta(delta, g.n)
    H = lambda s: content_value(s, delta)  # noqa: E731
    rep = AxiomReport()
    rep.record("H1 empty set", H(GridSet.empty(g)), 0.0, equal=True)
    rep.not_applicable("H3 outer regularity")
    rep.not_applicable("H4 decreasing compact sets")
    values = [H(s) for s in sets]
    for a, b, ha, hb in zip(sets[:-1], sets[1:], values[:-1], values[1:]):
        u, i = a | b, a & b
        hu, hi = H(u), H(i)
        rep.record("H2 monotone", hi, min(ha, hb))
        rep.record("H2 monotone", max(ha, hb), hu)
        rep.record("H5 subadditive", hu, ha + hb)
        rep.record("strong subadditivity", hu + hi, ha + hb)
    union = sets[0]
    for s in sets[1:]:
        union = union | s
    rep.record("H5 subadditive", H(union), math.fsum(values))
    # H6: exhaust each set cell by cell; contents must increase to the content of the set
    rng = np.random.default_rng(len(sets))
    for s, hs in zip(sets, values):
        idx = s.indices()
        if len(idx) == 0:
            continue
        rank = np.zeros(g.size)
        rank[idx] = rng.permutation(len(idx)) + 1.0
        seq = superlevel_contents(g, rank, np.arange(len(idx), 0, -1) - 1.0, delta)
        rep.record("H6 increasing limits", -float(np.min(np.diff(seq), initial=0.0)), 0.0)
        rep.record("H6 increasing limits", float(seq[-1]), hs, equal=True)
    return rep
