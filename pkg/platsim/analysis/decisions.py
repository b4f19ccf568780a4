"""
决策规则

期中：p > 无效性边界时停止（边界视为有约束力，严格大于）。
最终：p <= α 时成功，不做多重性校正。
"""

from enum import Enum

from platsim.analysis.ancova import AncovaFit


class InterimDecision(str, Enum):
    CONTINUE = "continue"
    STOP_FUTILITY = "stop_futility"


class FinalDecision(str, Enum):
    SUCCESS = "success"
    FAILURE = "failure"


def interim_decision(fit: AncovaFit, futility_boundary: float) -> InterimDecision:
    """期中分析决策"""
    if fit.p_one_sided > futility_boundary:
        return InterimDecision.STOP_FUTILITY
    return InterimDecision.CONTINUE


def final_decision(fit: AncovaFit, alpha: float = 0.05) -> FinalDecision:
    """最终分析决策"""
    if fit.p_one_sided <= alpha:
        return FinalDecision.SUCCESS
    return FinalDecision.FAILURE
