"""Radial solver and growth classifier for coupled semilinear systems.

The package splits into grids/quadrature (:mod:`ko_radial.grids`), the
problem model (:mod:`ko_radial.model`), the growth functionals and tail
classification (:mod:`ko_radial.transforms`), the monotone iteration
(:mod:`ko_radial.solver`), a direct-integration oracle
(:mod:`ko_radial.oracle`), the theorem-based verdicts
(:mod:`ko_radial.classifier`) and the config/CLI layer
(:mod:`ko_radial.config`, :mod:`ko_radial.cli`).
"""

from .classifier import (
    ClassificationReport,
    SandwichReport,
    Theorem,
    Verdict,
    classify,
    verify_sandwich,
)
from .config import RunConfig, emit_config, parse_config
from .errors import (
    BeyondKORange,
    BeyondRange,
    BeyondZRange,
    DimensionTooSmall,
    EmptyLattice,
    GridMismatch,
    MonotoneRadiusNotFound,
    NegativeWeightValue,
    NonPositiveExponent,
    NonPositiveRadius,
    NotStrictlyMonotone,
    Overflow,
    ParseError,
    TooFewNodes,
    ValidationError,
    ZeroDenominator,
    ZeroInnerIntegral,
    ZRangeExhausted,
)
from .grids import (
    DEFAULT_GRID_POINTS,
    Geometric,
    RadialGrid,
    SampledFn,
    Uniform,
    cumulative_integral,
    make_grid,
    nested_radial_integral,
    running_max,
)
from .model import (
    C1Report,
    Constant,
    EnvelopeReport,
    NonlinearityPair,
    Power,
    PowerDecay,
    ProblemSpec,
    Tabulated,
    check_c1,
    check_c2_envelope,
    default_lattice,
    eval_weight_on_grid,
    power_pair,
)
from .oracle import ComparisonReport, compare_solutions, direct_integrate
from .solver import (
    AprioriReport,
    BoundCheck,
    IterationConfig,
    SolutionPair,
    audit_apriori_bounds,
    audit_monotone_iterates,
    picard_solve,
)
from .transforms import (
    AutoRangeTable,
    FunctionTable,
    IntegralProfile,
    LimitClass,
    PartialFn,
    TailPolicy,
    build_profile,
    classify_limit,
    compute_KO,
    compute_P,
    compute_Pbar,
    compute_Pbar_eps,
    compute_Z,
    compute_lower_bounds,
    detect_monotone_radius,
    eps_tail_integral,
    invert_table,
    ko_auto,
    z_auto,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # classifier
    "ClassificationReport",
    "SandwichReport",
    "Theorem",
    "Verdict",
    "classify",
    "verify_sandwich",
    # config
    "RunConfig",
    "emit_config",
    "parse_config",
    # errors
    "BeyondKORange",
    "BeyondRange",
    "BeyondZRange",
    "DimensionTooSmall",
    "EmptyLattice",
    "GridMismatch",
    "MonotoneRadiusNotFound",
    "NegativeWeightValue",
    "NonPositiveExponent",
    "NonPositiveRadius",
    "NotStrictlyMonotone",
    "Overflow",
    "ParseError",
    "TooFewNodes",
    "ValidationError",
    "ZeroDenominator",
    "ZeroInnerIntegral",
    "ZRangeExhausted",
    # grids
    "DEFAULT_GRID_POINTS",
    "Geometric",
    "RadialGrid",
    "SampledFn",
    "Uniform",
    "cumulative_integral",
    "make_grid",
    "nested_radial_integral",
    "running_max",
    # model
    "C1Report",
    "Constant",
    "EnvelopeReport",
    "NonlinearityPair",
    "Power",
    "PowerDecay",
    "ProblemSpec",
    "Tabulated",
    "check_c1",
    "check_c2_envelope",
    "default_lattice",
    "eval_weight_on_grid",
    "power_pair",
    # oracle
    "ComparisonReport",
    "compare_solutions",
    "direct_integrate",
    # solver
    "AprioriReport",
    "BoundCheck",
    "IterationConfig",
    "SolutionPair",
    "audit_apriori_bounds",
    "audit_monotone_iterates",
    "picard_solve",
    # transforms
    "AutoRangeTable",
    "FunctionTable",
    "IntegralProfile",
    "LimitClass",
    "PartialFn",
    "TailPolicy",
    "build_profile",
    "classify_limit",
    "compute_KO",
    "compute_P",
    "compute_Pbar",
    "compute_Pbar_eps",
    "compute_Z",
    "compute_lower_bounds",
    "detect_monotone_radius",
    "eps_tail_integral",
    "invert_table",
    "ko_auto",
    "z_auto",
]
