"""Dyadic Hausdorff content, Choquet integrals and inequality checkers on dyadic grids."""
import os

# numba's default TBB layer warns when the TBB runtime is too old; the
# workqueue layer has no such dependency.
os.environ.setdefault("NUMBA_THREADING_LAYER", "workqueue")

from .choquet import (IntegralValue, check_choquet_axioms, check_content_embedding,  # noqa: E402
                      choquet_integral, choquet_integral_power, integrate)
from .content import (ContentResult, ParameterError, brute_force_content, check_content_axioms,  # noqa: E402
                      content_value, dyadic_content, superlevel_contents)
from .domains import (Annulus, Ball, Box, RoomWithCusp, Spire, john_ball,  # noqa: E402
                      outer_regularity_estimate, rasterize)
from .functions import (DistancePower, FourierField, PowerProfile, RadialBump,  # noqa: E402
                        finite_difference_check, sample_function)
from .grid import GridFunction, GridGeometry, GridSet  # noqa: E402
from .inequalities import (InequalityReport, TheoremId, estimate_constant, hardy_check,  # noqa: E402
                           hardy_pointwise_check, poincare_check, poincare_sobolev_check,
                           sjohn_pointwise_check, weak_type_check)
from .operators import (OperatorParams, check_adams_bound, check_hedberg_split,  # noqa: E402
                        fractional_maximal, kernel_domination, riesz_sum)

__version__ = "0.1.0"
