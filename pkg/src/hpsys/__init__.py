"""Hermite-Pade m-systems of algebraic germs at infinity.

Modules: ``series`` (truncated series and germs), ``polynomial`` and
``continuation`` (curves, fibers, critical values, path tracking), ``hp``
(the k-th polynomials), ``monodromy`` (k-subset surfaces) and
``reconstruction`` (ratio limits, rates, zeros).
"""

from .continuation import (
    ContinuationError,
    critical_values,
    continue_branch,
    fiber_roots,
    germ_branch_at,
    track_permutation,
    Path,
)
from .gaussian import GaussianParseError, GaussianRational, parse_gaussian
from .hp import (
    GermTuple,
    HPSolution,
    TruncationTooShort,
    assemble_system,
    hp_polynomials,
    solve_hp,
    verify_homogeneous_conditions,
    verify_order_conditions,
)
from .linalg import EmptyNullspace
from .monodromy import (
    connected_components,
    cyclic_disconnection_expected,
    ksubset_action,
    monodromy_generators,
    simple_branching_check,
)
from .polynomial import AlgebraicCurve, CurveError, NotSquareFree, RationalExpression
from .reconstruction import (
    CandidateTable,
    ReconReport,
    export_zeros,
    infer_limit_and_rate,
    minor_ratio_candidates,
    ratio_eval,
    subset_sum_oracle,
)
from .series import GermSpec, TruncatedSeries, germ_of_expression, newton_germ

__version__ = "0.1.0"

__all__ = [
    "AlgebraicCurve",
    "CandidateTable",
    "ContinuationError",
    "CurveError",
    "EmptyNullspace",
    "GaussianParseError",
    "GaussianRational",
    "GermSpec",
    "GermTuple",
    "HPSolution",
    "NotSquareFree",
    "Path",
    "RationalExpression",
    "ReconReport",
    "TruncatedSeries",
    "TruncationTooShort",
    "assemble_system",
    "connected_components",
    "continue_branch",
    "critical_values",
    "cyclic_disconnection_expected",
    "export_zeros",
    "fiber_roots",
    "germ_branch_at",
    "germ_of_expression",
    "hp_polynomials",
    "infer_limit_and_rate",
    "ksubset_action",
    "minor_ratio_candidates",
    "monodromy_generators",
    "newton_germ",
    "parse_gaussian",
    "ratio_eval",
    "simple_branching_check",
    "solve_hp",
    "subset_sum_oracle",
    "track_permutation",
    "verify_homogeneous_conditions",
    "verify_order_conditions",
]
