"""试验领域模型：试验组、患者、时间段"""

from platsim.trial.periods import PeriodTracker, TimePeriod, advance_period
from platsim.trial.state import (
    CONTROL,
    EFFECT_GRID,
    WEEKS_PER_MONTH,
    Arm,
    ArmStatus,
    ComparisonResult,
    Decision,
    EffectDistribution,
    PatientLog,
    PatientRecord,
    draw_effect,
    effect_key,
    is_month_start,
)

__all__ = [
    "CONTROL",
    "EFFECT_GRID",
    "WEEKS_PER_MONTH",
    "Arm",
    "ArmStatus",
    "ComparisonResult",
    "Decision",
    "EffectDistribution",
    "PatientLog",
    "PatientRecord",
    "draw_effect",
    "effect_key",
    "is_month_start",
    "PeriodTracker",
    "TimePeriod",
    "advance_period",
]
