"""
重复结果

ReplicateResult 是引擎的输出，也是 OC 汇总和逐重复 CSV 的输入。
"""

from typing import List, Optional

from pydantic import BaseModel, Field, model_validator

from platsim.engine.events import Event
from platsim.trial.state import ComparisonResult


class ArmTrajectory(BaseModel):
    arm_id: int
    entry_week: int
    exit_week: int


class ReplicateResult(BaseModel):
    """单次重复的结果"""

    replicate: int = Field(..., ge=0, description="重复编号")
    comparisons: List[ComparisonResult] = Field(default_factory=list)
    total_platform_n: int = Field(..., ge=0, description="平台总样本量")
    total_control_n: int = Field(..., ge=0, description="对照组总样本量")
    n_arms_tested: int = Field(..., ge=0, description="完成比较的试验组数")
    platform_duration_weeks: int = Field(..., ge=0, description="平台持续周数")
    periods: int = Field(..., ge=0, description="时间段数")
    events: List[Event] = Field(default_factory=list, exclude=True)

    @model_validator(mode="after")
    def check_totals(self) -> "ReplicateResult":
        treated = sum(c.n_treatment for c in self.comparisons)
        if self.total_platform_n != self.total_control_n + treated:
            raise ValueError(
                f"样本量不守恒: total={self.total_platform_n}, "
                f"control={self.total_control_n}, treatment={treated}"
            )
        if self.n_arms_tested != len(self.comparisons):
            raise ValueError("n_arms_tested 与比较数不一致")
        return self

    @property
    def arms_per_1000(self) -> Optional[float]:
        """每 1000 名患者检验的试验组数"""
        if self.total_platform_n == 0:
            return None
        return 1000.0 * self.n_arms_tested / self.total_platform_n

    @property
    def n_rejections(self) -> int:
        return sum(1 for c in self.comparisons if c.rejected)

    @property
    def trajectories(self) -> List[ArmTrajectory]:
        return [
            ArmTrajectory(arm_id=c.arm_id, entry_week=c.entry_week, exit_week=c.exit_week)
            for c in self.comparisons
        ]


class ReplicateFailure(BaseModel):
    """分析退化导致失败的重复"""

    replicate: int
    message: str
    arm_id: Optional[int] = None
    kind: Optional[str] = None
