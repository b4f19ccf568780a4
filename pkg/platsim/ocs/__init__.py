"""工作特征汇总"""

from platsim.ocs.aggregate import (
    EffectStratum,
    OcsAccumulator,
    OperatingCharacteristics,
    aggregate,
    mc_error,
)

__all__ = [
    "EffectStratum",
    "OcsAccumulator",
    "OperatingCharacteristics",
    "aggregate",
    "mc_error",
]
