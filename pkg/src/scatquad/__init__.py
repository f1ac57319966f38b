"""Cubature on 2-D scattered data by resampling adaptive interpolants at
the nodes of positive-interior algebraic rules."""

from . import errors
from .engine import (CubatureResult, LsCfWeights, approximate_cubature,
                     cubature_gap_bound, lscf_default_degree, lscf_integrate,
                     lscf_weights)
from .geometry import (Disk, DiskDifference, Domain, PointSet, Rectangle, bbox,
                       boundary_distance, contains, contains_many,
                       filter_to_domain, halton, map_to_bbox, parse_domain)
from .moving import (MovingEvaluation, MovingInterpConfig, MovingInterpolant,
                     evaluate_moving, interpolate_fixed_ball, pointwise_bound)
from .mshep import (MsInterpolant, ShepardCover, build_ms_cover, eval_ms,
                    fit_ms, ms_weights, mu_threshold)
from .poly import (LejaSequence, lebesgue_at_center, leja_select, multi_indices,
                   nested_center_values, poly_space_dim, vandermonde)
from .pum import (PumCover, PumInterpolant, bloocv_select, build_cover,
                  eval_pum, fit_pum, pu_weights)
from .rbf import (KernelSpec, RbfInterpolant, default_epsilon_grid, fit_global,
                  kernel_eval, loocv_cost, rippa_errors, select_epsilon)
from .rules import (CubatureRule, MomentVector, RuleReport,
                    gauss_legendre_product, load_rule, moments_from_rule,
                    monomial_moments, save_rule, validate_rule)
from .testfuncs import DOMAINS, FUNCTION_IDS, eval_test, reference_integral

__version__ = "0.1.0"
