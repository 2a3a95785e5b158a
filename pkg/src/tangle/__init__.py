"""tangle: a numerical laboratory for curve tangency geometry.

Polynomial curve families, curvilinear tangency rectangles and their
prisms, incidence counting with richness/broadness certificates, maximal
averages over thickened curves, discretized Furstenberg instances, and
verifiers for the quantitative lemmas behind them.
"""

from .poly import JetPoint, PolyCurve, ck_norm, eval_jet
from .family import (CinematicSpec, CurveFamily, build_family, cinematic_check,
                     forbid_constant, moment_spec, circle_spec, ellipse_spec,
                     poly_approximate, transversality_rank)
from .rectangles import TangencyRect, canonical_rect_grid, comparable, is_tangent, taylor_model
from .prisms import RescaleMap, TangencyPrism, covers, prism_of, rescale_fn, rescale_rect
from .incidence import IncidenceGraph, build_incidences, graph_refine, select_incomparable, two_ends_interval
from .broadness import BroadnessCertificate, broadness_check, random_refine, verify_rect_bound
from .raster import GridFunction, Raster, Shading, lp_count_norm, rasterize, union_area, weighted_dual_norm
from .maximal import (MaximalProfile, cinematic_maximal, kakeya_maximal, knapp_experiment,
                      sharpness_log_experiment, wolff_maximal)
from .coverings import DeltaAlphaSet, cantor_generator, covering_number, is_delta_alpha, make_striped_shading
from .furstenberg import FurstenbergInstance, furstenberg_check, quasi_product_bound, random_instance
from .lemmas import (LemmaReport, PreconditionError, cinematic_norm_check,
                     derivative_bound_check, long_rect_check, pigeonhole_rect_check,
                     polya_check, remez_check)
from .gronwall import gronwall_closeness, solve_jet_ivp
from .wongkew import MultiPoly, wongkew_volume

__version__ = "0.1.0"
