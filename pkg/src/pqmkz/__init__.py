"""Two-parameter (p,q) Meyer-Konig-Zeller operators.

Evaluation with certified truncation, moment diagnostics, modulus-based
error bounds, statistical-convergence experiments, and an exact-rational
reference oracle.
"""

from .engine import (
    EvalOutcome,
    Function,
    PQParams,
    TruncationPolicy,
    evaluate,
    evaluate_grid,
    evaluate_many,
    node,
    normalization_defect,
    weight,
    weight_stream,
)
from .pqcore import (
    PQPair,
    expand_one_minus_x,
    one_minus_x_power,
    pascal_residuals,
    pq_binomial,
    pq_factorial,
    pq_int,
)

__version__ = "0.1.0"

__all__ = [
    "PQPair",
    "PQParams",
    "TruncationPolicy",
    "EvalOutcome",
    "Function",
    "pq_int",
    "pq_factorial",
    "pq_binomial",
    "one_minus_x_power",
    "expand_one_minus_x",
    "pascal_residuals",
    "node",
    "weight",
    "weight_stream",
    "evaluate",
    "evaluate_many",
    "evaluate_grid",
    "normalization_defect",
    "__version__",
]
