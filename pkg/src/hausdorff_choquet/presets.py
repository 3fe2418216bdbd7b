"""Named experiment presets: one per inequality family, with default sweeps."""
from __future__ import annotations

from dataclasses import dataclass, field

from .functions import DistancePower, FourierField, PowerProfile, RadialBump

# case kinds beyond the inequality checkers
ADAMS = "adams"
HEDBERG = "hedberg"
OUTER = "outer-regularity"


def _bump(cx=0.5, cy=0.5, inner=0.0, outer=0.1, center=None):
    return RadialBump(tuple(center) if center is not None else (cx, cy), inner, outer)


def _fourier(seed=0, modes=3, amplitude=1.0, n=2, max_frequency=3):
    return FourierField(int(seed), int(modes), float(amplitude), int(n), int(max_frequency))


FAMILIES = {
    "bump": _bump,
    "power": lambda alpha=1.0: PowerProfile(float(alpha)),
    "fourier": _fourier,
    "distance": lambda gamma=2.0: DistancePower(float(gamma)),
    "constant": lambda value=1.0: PowerProfile(1.0, origin=0.0).scaled(0.0).shifted(float(value)),
}


@dataclass(frozen=True)
class Case:
    kind: str                 # a TheoremId value or ADAMS / HEDBERG / OUTER
    domain: str | dict        # preset domain name or a domain record
    family: str = "fourier"
    sweep: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)
    label: str = ""
    refine_step: int = 1


@dataclass(frozen=True)
class Preset:
    name: str
    statement: str
    cases: tuple
    level: int = 6


ANNULUS_BUMPS = {"cx": [0.85], "cy": [0.5],
                 "outer": [0.05, 0.06, 0.07, 0.08, 0.09],
                 "inner": [0.0, 0.01, 0.02, 0.03]}
BOX_BUMPS = {"cx": [0.5, 0.55], "cy": [0.5], "outer": [0.08, 0.12, 0.16], "inner": [0.0, 0.04]}
SEEDS = {"seed": list(range(8))}
ALPHAS = {"alpha": [0.5, 1.0, 1.5, 2.0, 3.0]}

_HARDY_GRID = [(2.0, 0.0, 2.0), (2.0, 0.25, 2.0), (1.5, 0.0, 1.0), (1.5, 0.25, 1.0)]

PRESETS = {p.name: p for p in [
    Preset("corollary-1.1",
           "Hardy inequality for C^1_0 functions on an annulus (outer regular domain)",
           tuple(Case("hardy", "annulus", "bump", ANNULUS_BUMPS,
                      {"delta": d, "kappa": k, "p": p}, f"annulus d={d} k={k} p={p}")
                 for d, k, p in _HARDY_GRID)),
    Preset("hardy-theorem",
           "Hardy inequality with the fractional weight dist^(1-kappa) on outer regular domains",
           (Case("hardy", "box", "bump", BOX_BUMPS, {"delta": 1.5, "kappa": 0.25, "p": 1.0}, "box"),
            Case("hardy", "ball", "bump", {"cx": [0.5], "cy": [0.5], "outer": [0.1, 0.2], "inner": [0.0, 0.05]},
                 {"delta": 2.0, "kappa": 0.5, "p": 2.0}, "ball"),
            Case("hardy", "room-outward-cusp", "bump",
                 {"cx": [0.3], "cy": [0.5], "outer": [0.1, 0.15], "inner": [0.0]},
                 {"delta": 2.0, "kappa": 0.0, "p": 1.5}, "room with outward cusp"))),
    Preset("hardy-epsilon",
           "Hardy inequality with a lower-dimensional content on the gradient side",
           tuple(Case("hardy-epsilon", "annulus", "bump", ANNULUS_BUMPS,
                      {"delta": 2.0, "kappa": 0.0, "p": 2.0, "epsilon": e}, f"annulus eps={e}")
                 for e in (0.25, 0.5, 1.0))),
    Preset("adams-7a",
           "Boundedness of the fractional maximal operator between Choquet spaces",
           (Case(ADAMS, "cube", "fourier", {"seed": list(range(50))},
                 {"delta": 1.5, "kappa": 0.25, "p": 1.0}, "unit square", refine_step=2),),
           level=5),
    Preset("hedberg",
           "Riesz-type kernel bounded by a maximal-function power times a Choquet norm power",
           (Case(HEDBERG, "cube", "fourier", {"seed": [0, 1, 2]},
                 {"delta": 2.0, "s": 1.5, "p": 1.0, "kappa": 0.25}, "s=1.5"),
            Case(HEDBERG, "cube", "fourier", {"seed": [0, 1, 2]},
                 {"delta": 1.5, "s": 1.0, "p": 1.0, "kappa": 0.5}, "s=1"))),
    Preset("hardy-pointwise",
           "Pointwise Hardy bound |u| <= c dist^(1-kappa) M_kappa|grad u|",
           tuple(Case("hardy-pointwise", "box", "bump", BOX_BUMPS, {"kappa": k}, f"box kappa={k}")
                 for k in (0.0, 0.5))),
    Preset("sjohn-pointwise",
           "Pointwise bound of |u - u_B| by a Riesz-type potential of |grad u| on s-John domains",
           (Case("sjohn-pointwise", "spire-1.5", "power", {"alpha": [1.0, 2.0, 3.0]}, {"s": 1.5}, "spire s=1.5"),
            Case("sjohn-pointwise", "ball", "fourier", SEEDS, {"s": 1.0}, "ball s=1"))),
    Preset("poincare",
           "Poincare inequality with Choquet integrals on s-John domains",
           (Case("poincare", "spire-1.5", "power", ALPHAS, {"delta": 2.0, "p": 1.5}, "spire-1.5 d=2"),
            Case("poincare", "spire-1.5", "power", ALPHAS, {"delta": 1.5, "p": 1.0}, "spire-1.5 d=1.5"),
            Case("poincare", "spire-1.2", "fourier", SEEDS, {"delta": 1.2, "p": 0.8}, "spire-1.2 d=1.2"))),
    Preset("poincare-sobolev",
           "Poincare-Sobolev inequality with exponent q = (d - k p) p / (d - p (n + s (1 - n)))",
           (Case("poincare-sobolev", "spire-1.25", "fourier", SEEDS,
                 {"delta": 2.0, "kappa": 0.0, "p": 1.1, "s": 1.25}, "spire-1.25"),
            Case("poincare-sobolev", "spire-1.5", "fourier", SEEDS,
                 {"delta": 2.0, "kappa": 0.25, "p": 1.5, "s": 1.5}, "spire-1.5"),
            Case("poincare-sobolev", "spire-1.2", "power", ALPHAS,
                 {"delta": 1.5, "kappa": 0.0, "p": 1.0, "s": 1.2}, "spire-1.2"),
            Case("poincare-sobolev", "ball", "fourier", SEEDS,
                 {"delta": 2.0, "kappa": 0.0, "p": 1.5, "s": 1.0}, "ball, classical q=6"))),
    Preset("weak-type",
           "Weak-type estimate for the content of {|u - u_B| > t} at the endpoint p = delta/n",
           (Case("weak-type", "spire-1.5", "fourier", SEEDS, {"delta": 2.0, "s": 1.5}, "spire-1.5"),
            Case("weak-type", "spire-1.2", "fourier", SEEDS, {"delta": 1.5, "s": 1.2}, "spire-1.2"))),
    Preset("corollary-spire-poincare",
           "Poincare inequality and weak-type estimate on power-cusp spires (inf over b)",
           (Case("poincare", "spire-1.5", "fourier", SEEDS, {"delta": 2.0, "p": 1.5}, "(a) spire-1.5"),
            Case("poincare", "spire-1.2", "fourier", SEEDS, {"delta": 1.2, "p": 0.8}, "(a) spire-1.2"),
            Case("weak-type", "spire-1.5", "fourier", SEEDS,
                 {"delta": 2.0, "s": 1.5, "b_mode": "infimum"}, "(b) spire-1.5"),
            Case("weak-type", "spire-1.2", "fourier", SEEDS,
                 {"delta": 2.0, "s": 1.2, "b_mode": "infimum"}, "(b) spire-1.2"))),
    Preset("remark-ub-forms",
           "The John-ball average u_B in place of the infimum over b",
           (Case("poincare", "spire-1.5", "fourier", SEEDS,
                 {"delta": 2.0, "p": 1.5, "b_mode": "john_average"}, "poincare u_B"),
            Case("poincare-sobolev", "spire-1.5", "fourier", SEEDS,
                 {"delta": 2.0, "kappa": 0.0, "p": 1.2, "s": 1.5, "b_mode": "john_average"},
                 "poincare-sobolev u_B"),
            Case("weak-type", "spire-1.5", "fourier", SEEDS,
                 {"delta": 2.0, "s": 1.5, "b_mode": "john_average"}, "weak-type u_B"))),
    Preset("outer-regularity",
           "Outer regularity constant: complement fraction of boundary-centred balls",
           tuple(Case(OUTER, d, "", {}, {"radii_h": [4, 8, 16]}, d)
                 for d in ("box", "ball", "annulus", "spire-1.5", "room-outward-cusp", "room-inward-cusp")),
           level=7),
]}


def preset_catalog() -> list[Preset]:
    return list(PRESETS.values())
