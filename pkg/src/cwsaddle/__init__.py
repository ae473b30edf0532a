"""cwsaddle: an anomalous saddle whose stable set is not locally connected,
its insertion into a DA map of the torus, and the resulting genus-two surface
map that is continuum-wise expansive only after a generic perturbation.

Hot kernels are compiled with numba unless ``CWSADDLE_DISABLE_NUMBA=1``.
"""
from ._jit import NUMBA_AVAILABLE, USE_NUMBA
from .eset import ESet, brute_force_rho, e_membership, rho, rho_many
from .flow import IntegrationBudgetError, IntegratorConfig, closed_form_oracle, flow
from .plmap import PLMap, PLMapError, Region, apply_pl, classify_region
from .saddle import (R1, Rectangle, SaddleMap, Verdict, lemma_residuals, orbit, saddle_step,
                     saddle_step_many,
                     stable_verdict, verdict_grid)
from .surface import (PerturbationConfig, Side, Surface, SurfaceError, SurfacePoint,
                      canonicalize, glued_step, psi_invert, surface_distance)
from .torus_da import (DAConfig, DAError, SaddleInsertion, TorusPoint, anomalous_da_step,
                       chart_transport, da_step)

__version__ = "0.1.0"

__all__ = [
    "ESet", "rho", "rho_many", "e_membership", "brute_force_rho",
    "IntegratorConfig", "IntegrationBudgetError", "flow", "closed_form_oracle",
    "PLMap", "PLMapError", "Region", "apply_pl", "classify_region",
    "SaddleMap", "Verdict", "Rectangle", "R1", "saddle_step", "saddle_step_many", "orbit",
    "stable_verdict",
    "verdict_grid", "lemma_residuals",
    "DAConfig", "DAError", "SaddleInsertion", "TorusPoint", "da_step", "anomalous_da_step",
    "chart_transport",
    "Surface", "SurfacePoint", "Side", "SurfaceError", "PerturbationConfig", "glued_step",
    "canonicalize", "psi_invert", "surface_distance",
    "NUMBA_AVAILABLE", "USE_NUMBA", "__version__",
]
