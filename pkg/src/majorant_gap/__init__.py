"""Distribution of the maximal gap between a Brownian path and its least
concave majorant on [0,1]: series, analytic-inversion and Monte Carlo routes,
plus a simulation laboratory that cross-checks them.
"""

__version__ = "0.1.0"

from ._kernels import backend_name
from . import (  # noqa: F401  (re-exported module namespace)
    analytic,
    excursion_max,
    identities,
    laplace_inv,
    mc_sampler,
    path_lab,
    special_fns,
    stick_breaking,
)

__all__ = [
    "backend_name",
    "__version__",
    "analytic",
    "excursion_max",
    "identities",
    "laplace_inv",
    "mc_sampler",
    "path_lab",
    "special_fns",
    "stick_breaking",
]
