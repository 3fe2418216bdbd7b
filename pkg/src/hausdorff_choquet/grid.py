"""Dyadic grids on the unit cube, cell sets and cell-wise fields.

Cells are the dyadic cubes of side ``h = 2**-L`` in ``[0, 1]**n``.  A cell is
identified by its integer coordinates; arrays are stored in C order with shape
``(2**L,) * n``.  The Morton (Z-order) code of a cell is used by the dyadic
tree algorithms: the children of a node with code ``k`` one level down are
``k * 2**n + j`` for ``j < 2**n``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable

import numpy as np


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class GridGeometry:
    n: int
    L: int

    def __post_init__(self):
        if self.n < 1 or self.L < 0:
            raise ValueError(f"invalid grid geometry n={self.n}, L={self.L}")
        if self.n * self.L > 30:
            raise ValueError("grid too large for 63-bit Morton codes")

    @property
    def h(self) -> float:
        return 2.0 ** -self.L

    @property
    def side(self) -> int:
        return 1 << self.L

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.side,) * self.n

    @property
    def size(self) -> int:
        return 1 << (self.n * self.L)

    def coords(self, index) -> np.ndarray:
        """Integer coordinates of flat C-order cell indices."""
        index = np.asarray(index, dtype=np.int64)
        return np.stack(np.unravel_index(index, self.shape), axis=-1).astype(np.int64)

    def index(self, coords) -> np.ndarray:
        coords = np.asarray(coords, dtype=np.int64)
        if np.any(coords < 0) or np.any(coords >= self.side):
            raise IndexError("cell coordinates outside the grid")
        return np.ravel_multi_index(tuple(np.moveaxis(coords, -1, 0)), self.shape)

    @cached_property
    def all_coords(self) -> np.ndarray:
        return _frozen(self.coords(np.arange(self.size)))

    @cached_property
    def centers(self) -> np.ndarray:
        """Cell centers, shape ``(size, n)``, in C order."""
        return _frozen((self.all_coords + 0.5) * self.h)

    @cached_property
    def morton(self) -> np.ndarray:
        """Morton code of each C-order cell."""
        return _frozen(morton_encode(self.all_coords, self.L))

    @cached_property
    def morton_order(self) -> np.ndarray:
        """Permutation taking C order to Morton order."""
        return _frozen(np.argsort(self.morton, kind="stable"))

    def cell_of(self, point) -> np.ndarray:
        """Coordinates of the cell containing ``point`` (clipped to the grid)."""
        c = np.floor(np.asarray(point, dtype=float) / self.h).astype(np.int64)
        return np.clip(c, 0, self.side - 1)


def morton_encode(coords: np.ndarray, L: int) -> np.ndarray:
    coords = np.asarray(coords, dtype=np.int64)
    n = coords.shape[-1]
    code = np.zeros(coords.shape[:-1], dtype=np.int64)
    for b in range(L):
        for d in range(n):
            code |= ((coords[..., d] >> b) & 1) << (b * n + d)
    return code


def morton_decode(code, n: int, L: int) -> np.ndarray:
    code = np.asarray(code, dtype=np.int64)
    coords = np.zeros(code.shape + (n,), dtype=np.int64)
    for b in range(L):
        for d in range(n):
            coords[..., d] |= ((code >> (b * n + d)) & 1) << b
    return coords


def _check_same(a: GridGeometry, b: GridGeometry):
    if a != b:
        raise ValueError(f"geometry mismatch: {a} vs {b}")


@dataclass(frozen=True, eq=False)
class GridSet:
    geometry: GridGeometry
    occupied: np.ndarray

    def __post_init__(self):
        occ = np.asarray(self.occupied, dtype=bool)
        if occ.size != self.geometry.size:
            raise ValueError("occupancy size does not match the geometry")
        object.__setattr__(self, "occupied", _frozen(occ.reshape(self.geometry.shape)))

    @classmethod
    def empty(cls, geometry: GridGeometry) -> GridSet:
        return cls(geometry, np.zeros(geometry.shape, dtype=bool))

    @classmethod
    def full(cls, geometry: GridGeometry) -> GridSet:
        return cls(geometry, np.ones(geometry.shape, dtype=bool))

    @classmethod
    def from_cells(cls, geometry: GridGeometry, coords: Iterable) -> GridSet:
        occ = np.zeros(geometry.size, dtype=bool)
        coords = np.asarray(list(coords), dtype=np.int64).reshape(-1, geometry.n)
        if len(coords):
            occ[geometry.index(coords)] = True
        return cls(geometry, occ)

    @classmethod
    def dyadic_cube(cls, geometry: GridGeometry, level: int, coords) -> GridSet:
        """All cells of the dyadic cube at ``level`` with integer coordinates ``coords``."""
        if not 0 <= level <= geometry.L:
            raise ValueError("cube level outside [0, L]")
        k = geometry.L - level
        occ = np.zeros(geometry.shape, dtype=bool)
        sl = tuple(slice(c << k, (c + 1) << k) for c in coords)
        occ[sl] = True
        return cls(geometry, occ)

    @property
    def count(self) -> int:
        return int(self.occupied.sum())

    @property
    def flat(self) -> np.ndarray:
        return self.occupied.reshape(-1)

    def indices(self) -> np.ndarray:
        return np.flatnonzero(self.flat)

    def cells(self) -> np.ndarray:
        return self.geometry.coords(self.indices())

    def is_empty(self) -> bool:
        return not self.occupied.any()

    def union(self, other: GridSet) -> GridSet:
        _check_same(self.geometry, other.geometry)
        return GridSet(self.geometry, self.occupied | other.occupied)

    def intersection(self, other: GridSet) -> GridSet:
        _check_same(self.geometry, other.geometry)
        return GridSet(self.geometry, self.occupied & other.occupied)

    def difference(self, other: GridSet) -> GridSet:
        _check_same(self.geometry, other.geometry)
        return GridSet(self.geometry, self.occupied & ~other.occupied)

    def complement(self) -> GridSet:
        return GridSet(self.geometry, ~self.occupied)

    __or__ = union
    __and__ = intersection
    __sub__ = difference

    def __invert__(self):
        return self.complement()

    def issubset(self, other: GridSet) -> bool:
        _check_same(self.geometry, other.geometry)
        return not np.any(self.occupied & ~other.occupied)

    def __le__(self, other):
        return self.issubset(other)

    def __eq__(self, other):
        if not isinstance(other, GridSet):
            return NotImplemented
        return self.geometry == other.geometry and np.array_equal(self.occupied, other.occupied)

    def __hash__(self):
        return hash((self.geometry, self.occupied.tobytes()))

    def __repr__(self):
        return f"GridSet(n={self.geometry.n}, L={self.geometry.L}, count={self.count})"

    def to_text(self) -> str:
        return _records_to_text(self.geometry, self.indices(), np.ones(self.count))

    @classmethod
    def from_text(cls, text: str) -> GridSet:
        geometry, idx, _ = _records_from_text(text)
        occ = np.zeros(geometry.size, dtype=bool)
        occ[idx] = True
        return cls(geometry, occ)


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Nonnegative cell-wise field, zero outside ``support``."""

    geometry: GridGeometry
    support: GridSet
    values: np.ndarray
    gradient_magnitude: np.ndarray | None = field(default=None)

    def __post_init__(self):
        _check_same(self.geometry, self.support.geometry)
        v = np.array(self.values, dtype=float).reshape(self.geometry.shape)
        if not np.all(np.isfinite(v)) or np.any(v < 0):
            raise ValueError("values must be finite and nonnegative")
        v[~self.support.occupied] = 0.0
        object.__setattr__(self, "values", _frozen(v))
        if self.gradient_magnitude is not None:
            g = np.array(self.gradient_magnitude, dtype=float).reshape(self.geometry.shape)
            if not np.all(np.isfinite(g)) or np.any(g < 0):
                raise ValueError("gradient magnitudes must be finite and nonnegative")
            g[~self.support.occupied] = 0.0
            object.__setattr__(self, "gradient_magnitude", _frozen(g))

    @classmethod
    def on(cls, support: GridSet, values, gradient_magnitude=None) -> GridFunction:
        return cls(support.geometry, support, values, gradient_magnitude)

    @classmethod
    def zeros(cls, geometry: GridGeometry) -> GridFunction:
        return cls(geometry, GridSet.full(geometry), np.zeros(geometry.shape))

    @classmethod
    def indicator(cls, e: GridSet, height: float = 1.0) -> GridFunction:
        return cls(e.geometry, e, np.where(e.occupied, float(height), 0.0))

    @property
    def flat(self) -> np.ndarray:
        return self.values.reshape(-1)

    def max(self) -> float:
        return float(self.values.max(initial=0.0))

    def with_values(self, values) -> GridFunction:
        """Same support, new values (gradient dropped)."""
        return GridFunction(self.geometry, self.support, values)

    def gradient_field(self) -> GridFunction:
        if self.gradient_magnitude is None:
            raise ValueError("no gradient magnitude attached")
        return GridFunction(self.geometry, self.support, self.gradient_magnitude)

    def scaled(self, a: float) -> GridFunction:
        if a < 0:
            raise ValueError("scale factor must be nonnegative")
        g = None if self.gradient_magnitude is None else a * self.gradient_magnitude
        return GridFunction(self.geometry, self.support, a * self.values, g)

    def power(self, p: float) -> GridFunction:
        return self.with_values(self.values ** p)

    def restrict(self, e: GridSet) -> GridFunction:
        s = self.support & e
        g = None if self.gradient_magnitude is None else self.gradient_magnitude
        return GridFunction(self.geometry, s, self.values, g)

    def __repr__(self):
        return (f"GridFunction(n={self.geometry.n}, L={self.geometry.L}, "
                f"support={self.support.count}, max={self.max():.6g})")

    def to_text(self) -> str:
        idx = self.support.indices()
        return _records_to_text(self.geometry, idx, self.flat[idx])

    @classmethod
    def from_text(cls, text: str) -> GridFunction:
        geometry, idx, vals = _records_from_text(text)
        occ = np.zeros(geometry.size, dtype=bool)
        occ[idx] = True
        v = np.zeros(geometry.size)
        v[idx] = vals
        return cls(geometry, GridSet(geometry, occ), v)


def superlevel_set(f: GridFunction, t: float) -> GridSet:
    """Cells where ``f > t`` (strict)."""
    if t < 0:
        raise ValueError("threshold must be nonnegative")
    return GridSet(f.geometry, f.values > t)


def distinct_levels(f: GridFunction) -> np.ndarray:
    """Strictly increasing array of the distinct positive values of ``f``."""
    v = f.flat
    return np.unique(v[v > 0])


def _records_to_text(geometry: GridGeometry, idx, vals) -> str:
    lines = [f"{geometry.n} {geometry.L}"]
    coords = geometry.coords(idx)
    for c, v in zip(coords, vals):
        lines.append(" ".join(str(int(i)) for i in c) + " " + repr(float(v)))
    return "\n".join(lines) + "\n"


def _records_from_text(text: str):
    rows = [ln.split() for ln in text.splitlines() if ln.strip()]
    if not rows or len(rows[0]) != 2:
        raise ValueError("grid text must start with a header line 'n L'")
    geometry = GridGeometry(int(rows[0][0]), int(rows[0][1]))
    body = rows[1:]
    for r in body:
        if len(r) != geometry.n + 1:
            raise ValueError(f"malformed record {' '.join(r)!r}")
    coords = np.array([[int(x) for x in r[:-1]] for r in body], dtype=np.int64).reshape(-1, geometry.n)
    vals = np.array([float(r[-1]) for r in body])
    idx = geometry.index(coords) if len(coords) else np.zeros(0, dtype=np.int64)
    return geometry, idx, vals
