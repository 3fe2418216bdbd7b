# %% [markdown]
# Fractional maximal function and Riesz-type sums
#
# M_kappa f(x) = sup_r r^(kappa - n) * (integral of f over B(x, r)), with the
# supremum over a list of radii; the Riesz sum discretizes
# integral f(y) |x - y|^-beta dy with an exact self-cell term.

# %%
import math

import numpy as np

from hausdorff_choquet import (GridFunction, GridGeometry, GridSet, OperatorParams,
                               check_hedberg_split, fractional_maximal, riesz_sum)

geo = GridGeometry(2, 7)
rho = 0.25
ball = GridSet(geo, np.linalg.norm(geo.centers - 0.5, axis=1) < rho)
chi = GridFunction.indicator(ball)
centre = geo.index(geo.cell_of([0.5 - geo.h / 2, 0.5 - geo.h / 2]))
for kappa in (0.0, 0.5, 1.0):
    m = fractional_maximal(chi, OperatorParams(kappa), cells=[centre]).flat[centre]
    print(f"M_{kappa} chi_B at the centre: {m:.4f}   pi rho^kappa = {math.pi * rho ** kappa:.4f}")

# %%
for L in (5, 6, 7, 8):
    g = GridGeometry(2, L)
    one = GridFunction.on(GridSet.full(g), np.ones(g.shape))
    x = g.index(g.cell_of([0.5, 0.5]))
    print(f"L={L}: Riesz sum of 1 at the centre, beta=1: {riesz_sum(one, 1.0, cells=[x]).flat[x]:.5f}")
print("closed form 4 asinh(1) =", 4 * math.asinh(1))

# %% [markdown]
# The split |I f(x)| <= C M f(x)^a (int f^p dH^delta)^b over random fields.

# %%
rng = np.random.default_rng(3)
g = GridGeometry(2, 5)
for trial in range(3):
    f = GridFunction.on(GridSet.full(g), rng.random(g.shape))
    rep = check_hedberg_split(f, delta=2.0, s=1.5, p=1.0, kappa=0.25)
    print(f"trial {trial}: sup ratio {rep.sup:.3f}, exponents {rep.extra}")
