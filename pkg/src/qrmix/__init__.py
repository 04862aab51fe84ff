"""Exact and Monte Carlo verification of mixing and triple-recurrence bounds
on concrete finite quasirandom groups."""

from .groups import (
    GroupTable,
    ConjugacyData,
    GroupConstructionError,
    build_group,
    parse_descriptor,
    conjugacy_classes,
    verify_group_axioms,
)
from .characters import (
    ClassConstants,
    DegreeMultiset,
    CharacterError,
    class_constants,
    character_degrees,
    group_exponent,
    quasirandom_degree,
)
from .actions import (
    ProbabilitySpace,
    Observable,
    ActionTable,
    ActionValidationError,
    SpaceMismatchError,
    build_action,
    cached_action,
    inner,
    invariant_projection,
    koopman_apply,
    random_observable,
    trivial_action,
)
from .mixing import (
    MixingReport,
    mixing_error,
    mixing_bound_check,
    monte_carlo_mixing_error,
    reduction_identity_check,
)
from .recurrence import (
    RecurrenceReport,
    VectorFamily,
    GramCheck,
    VdcResult,
    BesselResult,
    PreconditionError,
    triple_product_average,
    triple_recurrence_error,
    case_decomposition,
    correlation_family,
    gram_identity_check,
    vdc_check,
    bessel_check,
)
from .seeding import derive_seed
from .sweep import ExperimentConfig, ConfigError, run_sweep, emit_plot_data
from .verify import run_verify

__all__ = [
    "GroupTable",
    "ConjugacyData",
    "GroupConstructionError",
    "build_group",
    "parse_descriptor",
    "conjugacy_classes",
    "verify_group_axioms",
    "ClassConstants",
    "DegreeMultiset",
    "CharacterError",
    "class_constants",
    "character_degrees",
    "group_exponent",
    "quasirandom_degree",
    "ProbabilitySpace",
    "Observable",
    "ActionTable",
    "ActionValidationError",
    "SpaceMismatchError",
    "build_action",
    "cached_action",
    "inner",
    "invariant_projection",
    "koopman_apply",
    "random_observable",
    "trivial_action",
    "MixingReport",
    "mixing_error",
    "mixing_bound_check",
    "monte_carlo_mixing_error",
    "reduction_identity_check",
    "RecurrenceReport",
    "VectorFamily",
    "GramCheck",
    "VdcResult",
    "BesselResult",
    "PreconditionError",
    "triple_product_average",
    "triple_recurrence_error",
    "case_decomposition",
    "correlation_family",
    "gram_identity_check",
    "vdc_check",
    "bessel_check",
    "derive_seed",
    "ExperimentConfig",
    "ConfigError",
    "run_sweep",
    "emit_plot_data",
    "run_verify",
]
