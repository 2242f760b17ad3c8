"""Multi-group learning over finite domains: group-realizable concept classes,
their combinatorics and bounds, an improper learner, the SAT hardness
reduction and an experiment harness."""

from .bounds import (
    BoundParams,
    alpha_n,
    foreach_bound,
    forall_bound,
    sample_size_cardinality,
    sample_size_vc,
)
from .combinatorics import BinaryClassView, sauer_bound, shattering_coefficient, vc_dimension
from .concepts import ErmResult, contains, enumerate_concepts, find_consistent, verify_witness
from .errors import (
    CapExceededError,
    InconsistentSample,
    InsufficientPositive,
    NoConsistentHypothesis,
    NonRealizableFixture,
    ValidationError,
)
from .estimators import GroupRealizableERM, ImproperMultiGroupClassifier
from .harness import (
    GeneratorSpec,
    LearningCurveTable,
    RateFit,
    best_constant_per_group,
    fit_rate_exponent,
    generate,
    learning_curve,
    lemma1_coverage,
    worst_group_error,
)
from .improper import EnsembleClassifier, improper_learn
from .instance import (
    FiniteDomain,
    FiniteInstance,
    Group,
    GroupFamily,
    Hypothesis,
    HypothesisClass,
    LabeledSample,
    is_group_realizable,
    restrict_class,
)
from .reduction import CnfFormula, build_reduction, parse_cnf, verify_reduction

__version__ = "0.1.0"

__all__ = [
    "alpha_n",
    "best_constant_per_group",
    "BinaryClassView",
    "BoundParams",
    "build_reduction",
    "CapExceededError",
    "CnfFormula",
    "contains",
    "EnsembleClassifier",
    "enumerate_concepts",
    "ErmResult",
    "find_consistent",
    "FiniteDomain",
    "FiniteInstance",
    "fit_rate_exponent",
    "forall_bound",
    "foreach_bound",
    "generate",
    "GeneratorSpec",
    "Group",
    "GroupFamily",
    "GroupRealizableERM",
    "Hypothesis",
    "HypothesisClass",
    "improper_learn",
    "ImproperMultiGroupClassifier",
    "InconsistentSample",
    "InsufficientPositive",
    "is_group_realizable",
    "LabeledSample",
    "learning_curve",
    "LearningCurveTable",
    "lemma1_coverage",
    "NoConsistentHypothesis",
    "NonRealizableFixture",
    "parse_cnf",
    "RateFit",
    "restrict_class",
    "sample_size_cardinality",
    "sample_size_vc",
    "sauer_bound",
    "shattering_coefficient",
    "ValidationError",
    "vc_dimension",
    "verify_reduction",
    "verify_witness",
    "worst_group_error",
]
