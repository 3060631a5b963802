"""Exact exponent calculus and numerical evaluators for cubic forms that
split off one or two smaller forms.

The package has two halves that check each other:

- an exact side (Fraction arithmetic throughout): the augmented-exponent
  order, the stage-parameter and arc-family bound evaluators, the quartic
  moment optimizer, p-adic descent certificates, and end-to-end minor-arc
  certificates with machine verification;
- a numerical side: cubic exponential sums over boxes, complete sums to
  prime-power moduli, singular series and singular integral estimators,
  moment ladders, and zero counting/search for split forms, with a compiled
  kernel and a pure-Python fallback selected at import time.
"""

from .augmented import (AugmentedExponent, DELTA_CAP, DELTA_LOW, EPS,
                        as_exponent, max_exponent, min_exponent,
                        parse_rational)
from .bounds import (StageParams, check_conditions, holder_combine,
                     hua_factor_exponent, lemma4_bound, lemma6_swap_error,
                     lemma7_bound, lemma7_terms, lemma8_params,
                     remark14_bound, remark14_terms, sstar_factor_exponent,
                     wooley_factor_exponent)
from .certify import certify_case, verify_certificate
from .errors import (Budget, BudgetExceededError, CubearcError,
                     InfeasibleRegionError, PreconditionError,
                     UnboundedObjectiveError, VerificationError)
from .expsums import (BoxRegion, MomentResult, RationalArcPoint,
                      arc_classify, beta_integral, complete_sum, density_mc,
                      find_real_center, moment_by_counting,
                      oscillatory_profile, series_block, singular_integral,
                      singular_series, sstar, weighted_sum, weyl_sum)
from .forms import (CubicForm, NumberFieldSpec, SplitStructure,
                    hessian_rank_profile, is_degenerate, make_mordell_form,
                    make_norm_form, split_components)
from .kernels import HAVE_CORE, backend_name
from .local import (DescentCertificate, LocalWitness,
                    build_descent_certificate, count_zeros_mod, hensel_lift,
                    make_witness)
from .polytope import (ExponentPolytope, LinearInequality, arc_region,
                       lemma9_details, lemma9_exponent, parse_region)
from .search import CountReport, count_zeros_box, find_point

__version__ = "0.1.0"

__all__ = [
    "AugmentedExponent", "DELTA_CAP", "DELTA_LOW", "EPS", "as_exponent",
    "max_exponent", "min_exponent", "parse_rational",
    "StageParams", "check_conditions", "holder_combine",
    "hua_factor_exponent", "lemma4_bound", "lemma6_swap_error",
    "lemma7_bound", "lemma7_terms", "lemma8_params", "remark14_bound",
    "remark14_terms", "sstar_factor_exponent", "wooley_factor_exponent",
    "certify_case", "verify_certificate",
    "Budget", "BudgetExceededError", "CubearcError", "InfeasibleRegionError",
    "PreconditionError", "UnboundedObjectiveError", "VerificationError",
    "BoxRegion", "MomentResult", "RationalArcPoint", "arc_classify",
    "beta_integral", "complete_sum", "density_mc", "find_real_center",
    "moment_by_counting", "oscillatory_profile", "series_block",
    "singular_integral", "singular_series", "sstar", "weighted_sum",
    "weyl_sum",
    "CubicForm", "NumberFieldSpec", "SplitStructure", "hessian_rank_profile",
    "is_degenerate", "make_mordell_form", "make_norm_form",
    "split_components",
    "HAVE_CORE", "backend_name",
    "DescentCertificate", "LocalWitness", "build_descent_certificate",
    "count_zeros_mod", "hensel_lift", "make_witness",
    "ExponentPolytope", "LinearInequality", "arc_region", "lemma9_details",
    "lemma9_exponent", "parse_region",
    "CountReport", "count_zeros_box", "find_point",
    "__version__",
]
