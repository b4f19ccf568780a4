"""MADRS 结局模型"""

from platsim.outcome.model import (
    DEFAULT_DELTA_MAP,
    OutcomeCalibration,
    OutcomeModel,
    TimeTrend,
    TrendScale,
    derive_sd_delta,
    derive_sigma,
    generate_outcome,
    solve_baseline_sd,
    standardized_effect,
)

__all__ = [
    "DEFAULT_DELTA_MAP",
    "OutcomeCalibration",
    "OutcomeModel",
    "TimeTrend",
    "TrendScale",
    "derive_sd_delta",
    "derive_sigma",
    "generate_outcome",
    "solve_baseline_sd",
    "standardized_effect",
]
