"""dyadlab: exact computations on finite dyadic grids -- sparse operators,
weight characteristics, Calderon-Zygmund decomposition, Lorentz norms -- plus
a harness that stress-tests the associated weighted weak-type bounds."""

from ._kernels import get_backend
from .czd import CZDecomposition, RootExceedsThreshold, decompose
from .exponents import INF, ExponentError, ExponentTuple, alpha_for, conjugate
from .functions import (GridFunction, LorentzNorms, Weight, constant_function,
                        cube_average, distribution, indicator_function,
                        lebesgue, level_sets, local_average,
                        lorentz_l1_rearrangement, lorentz_norms, pairing,
                        parse_function_spec, parse_weight_spec, power_function,
                        random_function, synthesize, weak_dual_estimate)
from .grids import (Cube, Grid, GridError, GridMismatchError, NoParentError,
                    Relation, relation)
from .constants import (ConstantReport, ap_constant, ar_pq_constant,
                        ar_pq_prime, doubling_constant, fujii_wilson,
                        reevaluate, rh_constant, self_improvement_probe)
from .harness import (RatioReport, SearchReport, SlopeReport, TheoremBound,
                      extremal_search, lognormal_trials, multiplier_weak_ratio,
                      random_dyadic_union, random_weight, restricted_weak_ratio,
                      scaling_slope, spawn_rngs, strong_ratio, theorem_theta,
                      theoretical_bound)
from .maximal import dyadic_maximal
from .sparse import (SparseFamily, SparseMember, ValidationResult,
                     bilinear_form, build_stopping_family, family_to_csv,
                     member, multiplier_eval, sparse_family, sparse_operator,
                     validate)

__version__ = "0.1.0"
