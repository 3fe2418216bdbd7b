# %% [markdown]
# Empirical constants for Hardy and Poincare type inequalities
#
# Each check returns lhs, rhs and their ratio.  A bounded ratio that stays
# put when the grid is refined is what the inequalities predict.

# %%
from hausdorff_choquet import (Annulus, FourierField, RadialBump, RoomWithCusp, Spire, Box,
                               estimate_constant, outer_regularity_estimate, rasterize)
from hausdorff_choquet.presets import FAMILIES

bumps = {"cx": [0.85], "cy": [0.5], "outer": [0.05, 0.07, 0.09], "inner": [0.0, 0.02]}
rep = estimate_constant("hardy", Annulus(0.25, 0.45), FAMILIES["bump"], bumps,
                        {"delta": 2.0, "kappa": 0.0, "p": 2.0}, L=6)
print(f"Hardy on the annulus: sup {rep.sup:.4f} -> {rep.sup_refined:.4f} (growth {rep.growth:.3f})")
print("  worst bump:", rep.argmax)

# %%
for s in (1.5, 1.2):
    rep = estimate_constant("poincare", Spire(s), FAMILIES["fourier"], {"seed": range(6)},
                            {"delta": 2.0, "p": 1.5}, L=6)
    r0 = rep.reports[0]
    print(f"Poincare on Spire({s}): sup {rep.sup:.4f}, growth {rep.growth:.3f}; "
          f"first field inf_b lhs {r0.extra['lhs_inf']:.4f} <= u_B lhs {r0.extra['lhs_ub']:.4f}")

# %%
rep = estimate_constant("poincare-sobolev", Spire(1.25), FAMILIES["fourier"], {"seed": range(4)},
                        {"delta": 2.0, "kappa": 0.0, "p": 1.1, "s": 1.25}, L=6)
print("Poincare-Sobolev exponent q =", rep.reports[0].params["q"], " sup", round(rep.sup, 4))

# %% [markdown]
# Outer regularity: the share of the complement in small balls centred on the
# boundary.  The inward cusp squeezes it to nothing near the tip.

# %%
L = 7
radii = [k * 2.0 ** -L for k in (4, 8, 16)]
for name, spec in [("box", Box()), ("annulus", Annulus(0.25, 0.45)),
                   ("outward cusp", RoomWithCusp(4.0, 3.0)), ("inward cusp", RoomWithCusp(4.0, 1.0))]:
    est = outer_regularity_estimate(rasterize(spec, L), radii)
    print(f"{name:13s} b = {est.b:.3f}  per radius {[round(float(x), 3) for x in est.per_radius]}")
