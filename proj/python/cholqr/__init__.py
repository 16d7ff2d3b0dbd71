"""CholeskyQR family of tall-and-skinny QR factorizations."""

from ._cholqr import (
    Breakdown,
    CostEstimate,
    FactorResult,
    PanelBoundReport,
    cost,
    factorize,
    generate,
    load_tsm,
    orthogonality_error,
    panel_bound_check,
    predicted_allreduce_calls,
    residual_error,
    save_tsm,
)

__all__ = [
    "Breakdown",
    "CostEstimate",
    "FactorResult",
    "PanelBoundReport",
    "cost",
    "factorize",
    "generate",
    "load_tsm",
    "orthogonality_error",
    "panel_bound_check",
    "predicted_allreduce_calls",
    "residual_error",
    "save_tsm",
]
