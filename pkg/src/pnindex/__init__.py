"""Numerical ranges and polynomial numerical indices of homogeneous maps on planar normed spaces."""

from .convexity import (
    beta_classify,
    eps_counterexample,
    hessian_grid,
    log_convexity_profile,
    midpoint_test,
)
from .homopoly import (
    ScalarHomoPoly,
    VectorHomoPoly,
    asym_zero_poly,
    embed_lp,
    interp_zero_poly,
    lp_zero_poly,
    polarize,
    q_definite,
    q_poly,
    quartic_generator,
    sup_norm,
    tangent_poly,
)
from .index_search import (
    Budget,
    estimate_index,
    min_zero_degree,
    monotonicity_report,
    uniqueness_check,
)
from .norms import (
    AsymA,
    BetaQuartic,
    DualPair,
    EpsGeomMean,
    GeomMean,
    InterpSym,
    Lp,
    Norm,
    Polyhedral,
    classify,
    dual_eval,
    norm_from_json,
    norming_set,
    sphere_point,
)
from .numrange import radius, range_samples, thm_norming, verify_zero

__all__ = [name for name in dir() if not name.startswith("_")]
