"""ANCOVA 分析与决策规则"""

from platsim.analysis.ancova import (
    AnalysisDataset,
    AnalysisKind,
    AncovaFit,
    CovariateSet,
    fit_ancova,
)
from platsim.analysis.decisions import (
    FinalDecision,
    InterimDecision,
    final_decision,
    interim_decision,
)

__all__ = [
    "AnalysisDataset",
    "AnalysisKind",
    "AncovaFit",
    "CovariateSet",
    "fit_ancova",
    "FinalDecision",
    "InterimDecision",
    "final_decision",
    "interim_decision",
]
