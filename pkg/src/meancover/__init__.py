"""Covering-area growth, circle lifting, and modulus bounds on the unit disk."""

from ._kernels import BACKEND
from .errors import (
    BadParameter,
    BudgetExceeded,
    ConfigError,
    CoverageGap,
    DomainError,
    IncompleteLift,
    MeancoverError,
    NonIntegerResult,
    NotUnivalent,
    ParseError,
    PoleAtPoint,
    ResolutionTooCoarse,
    SandwichViolation,
    SolverFailure,
    StartOffCurve,
    ToleranceNotMet,
    ValueOnContour,
    ZeroLength,
)
from .funcmodel import (
    Blaschke,
    Compose,
    Dilate,
    ExpAffine,
    FunctionSpec,
    Mobius,
    Monomial,
    Polynomial,
    Product,
    Scale,
    Sum,
    derivative,
    evaluate,
    make_family,
    max_modulus_on_circle,
    parse_spec,
    serialize_spec,
)
from .coverage import (
    AreaEstimate,
    InnerRadiusResult,
    OmittedPointResult,
    area_by_counting,
    find_omitted_point,
    growth_function,
    inner_radius,
    koebe_univalent_check,
    monte_carlo_area,
    preimage_count,
    sublevel_area,
)
from .lifting import (
    CaseLabel,
    CoareaRecord,
    LiftedPath,
    MonotoneInterval,
    ReferenceCurve,
    beta_length,
    classify_case,
    coarea_check,
    lift_circle,
    lift_family,
    monotone_intervals,
    reference_curve,
    schlicht_start_check,
    sheet_contains,
    simplicity_check,
    start_parameter,
)
from .modulus import (
    AdmissibleMetric,
    BeurlingVerdict,
    GridDomain,
    ModulusReport,
    annulus_domain,
    annulus_upper,
    beurling_criterion_check,
    beurling_mass,
    build_report,
    certified_radius,
    certified_radius_symbolic,
    chain_lower_s2,
    discrete_modulus,
    extremal_metric,
    generic_lower_s3,
    poletskii_instance_check,
    rectangle_domain,
    standard_test_suite,
    sup_metric,
)
from .harness import (
    RunConfig,
    RunReport,
    cmd_area,
    cmd_counterexample,
    cmd_growth,
    cmd_search_constant,
    cmd_verify,
    load_config,
    write_report,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "__version__",
    "MeancoverError",
    "BadParameter",
    "PoleAtPoint",
    "ParseError",
    "ToleranceNotMet",
    "BudgetExceeded",
    "ValueOnContour",
    "NonIntegerResult",
    "ResolutionTooCoarse",
    "NotUnivalent",
    "StartOffCurve",
    "CoverageGap",
    "IncompleteLift",
    "ZeroLength",
    "DomainError",
    "SolverFailure",
    "SandwichViolation",
    "ConfigError",
    "FunctionSpec",
    "Monomial",
    "Polynomial",
    "Mobius",
    "ExpAffine",
    "Blaschke",
    "Sum",
    "Product",
    "Compose",
    "Scale",
    "Dilate",
    "evaluate",
    "derivative",
    "max_modulus_on_circle",
    "make_family",
    "parse_spec",
    "serialize_spec",
    "AreaEstimate",
    "OmittedPointResult",
    "InnerRadiusResult",
    "sublevel_area",
    "area_by_counting",
    "monte_carlo_area",
    "preimage_count",
    "growth_function",
    "find_omitted_point",
    "inner_radius",
    "koebe_univalent_check",
    "ReferenceCurve",
    "CaseLabel",
    "MonotoneInterval",
    "LiftedPath",
    "CoareaRecord",
    "reference_curve",
    "classify_case",
    "monotone_intervals",
    "start_parameter",
    "lift_circle",
    "lift_family",
    "beta_length",
    "schlicht_start_check",
    "sheet_contains",
    "simplicity_check",
    "coarea_check",
    "AdmissibleMetric",
    "BeurlingVerdict",
    "GridDomain",
    "ModulusReport",
    "annulus_upper",
    "annulus_domain",
    "rectangle_domain",
    "discrete_modulus",
    "chain_lower_s2",
    "generic_lower_s3",
    "beurling_mass",
    "extremal_metric",
    "standard_test_suite",
    "sup_metric",
    "beurling_criterion_check",
    "poletskii_instance_check",
    "certified_radius",
    "certified_radius_symbolic",
    "build_report",
    "RunConfig",
    "RunReport",
    "load_config",
    "write_report",
    "cmd_area",
    "cmd_growth",
    "cmd_verify",
    "cmd_search_constant",
    "cmd_counterexample",
]
