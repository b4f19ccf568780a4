"""
场景配置

一个 ScenarioConfig 完整描述一个被模拟的设计。默认值即基础设计：
每组 80 例、6 个初始试验组、√k 分配且对照下限 35%、等概率效应量、
单侧 α = 0.05、10,000 次重复。
"""

import math
from enum import Enum
from typing import Any, Dict, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationInfo, field_validator

from platsim.allocation.policy import AllocationKind, AllocationPolicy
from platsim.analysis.ancova import CovariateSet
from platsim.outcome.model import OutcomeCalibration, TimeTrend, TrendScale
from platsim.stats.rng import SEED_MAX
from platsim.trial.state import WEEKS_PER_MONTH, EffectDistribution


class Randomization(str, Enum):
    SIMPLE = "simple"
    MODIFIED_BLOCK = "modified_block"


class SimulationMode(str, Enum):
    PLATFORM = "platform"
    TWO_ARM_SERIES = "two_arm_series"


DEFAULT_RECRUITMENT_LAW: Dict[int, float] = {6: 0.05, 7: 0.90, 8: 0.05}


class ScenarioConfig(BaseModel):
    """单个模拟场景"""

    model_config = ConfigDict(extra="forbid", frozen=True)

    mode: SimulationMode = Field(default=SimulationMode.PLATFORM, description="平台或连续双臂试验")
    randomization: Randomization = Field(
        default=Randomization.MODIFIED_BLOCK, description="随机化方式"
    )
    allocation: AllocationKind = Field(default=AllocationKind.SQRT_K_CAPPED, description="分配方式")
    control_cap: float = Field(default=0.35, ge=0.0, lt=1.0, description="对照比例下限")
    analysis_covariates: CovariateSet = Field(
        default=CovariateSet.BASELINE_ONLY, description="ANCOVA 协变量"
    )
    interim_fraction: Optional[float] = Field(
        default=None, gt=0.0, lt=1.0, description="期中分析时的入组比例"
    )
    futility_boundary: Optional[float] = Field(
        default=None, ge=0.0, le=1.0, validate_default=True, description="期中单侧 p 值的无效性边界"
    )
    target_n_per_arm: int = Field(default=80, ge=2, description="每组目标样本量")
    initial_arms: int = Field(default=6, ge=1, description="初始试验组数")
    entry_probability_per_month: float = Field(
        default=1.0, ge=0.0, le=1.0, description="每月新试验组进入的概率"
    )
    max_concurrent_arms: int = Field(
        default=6, ge=1, validate_default=True, description="同时活跃的试验组上限"
    )
    entry_horizon_months: int = Field(default=60, ge=1, description="允许新试验组进入的月数")
    min_expected_accrual_fraction: float = Field(
        default=0.2, ge=0.0, le=1.0, description="进入门槛：预期可入组比例，0 表示不设门槛"
    )
    max_entries_per_month: Optional[int] = Field(
        default=None, ge=1, description="每月进入尝试次数，默认见 entry_attempts"
    )
    effect_distribution: EffectDistribution = Field(
        default_factory=EffectDistribution.equal, description="效应量分布"
    )
    time_trend: float = Field(default=0.0, ge=0.0, description="每个时间段的趋势步长，0 表示无趋势")
    trend_scale: TrendScale = Field(default=TrendScale.VARIANCE, description="步长的解释方式")
    recruitment_law: Dict[int, float] = Field(
        default_factory=lambda: dict(DEFAULT_RECRUITMENT_LAW), description="每周到达人数的分布"
    )
    alpha: float = Field(default=0.05, gt=0.0, lt=1.0, description="单侧显著性水平")
    replicates: int = Field(default=10000, ge=1, description="重复次数")
    master_seed: int = Field(default=20240601, ge=0, le=SEED_MAX, description="主种子")
    calibration: OutcomeCalibration = Field(
        default_factory=OutcomeCalibration, validate_default=True, description="MADRS 校准"
    )

    @field_validator("effect_distribution", mode="before")
    @classmethod
    def parse_effect_distribution(cls, v: Any) -> Any:
        """允许使用预设名称，或 {d: θ} 映射"""
        if isinstance(v, str):
            return EffectDistribution.preset(v)
        if isinstance(v, dict) and v and "effects" not in v and "probabilities" not in v:
            items = sorted((float(d), float(p)) for d, p in v.items())
            return {
                "effects": tuple(d for d, _ in items),
                "probabilities": tuple(p for _, p in items),
            }
        return v

    @field_validator("time_trend", mode="before")
    @classmethod
    def none_means_no_trend(cls, v: Any) -> Any:
        return 0.0 if v is None else v

    @field_validator("futility_boundary")
    @classmethod
    def futility_requires_interim(cls, v: Optional[float], info: ValidationInfo) -> Optional[float]:
        # interim_fraction 自身校验失败时不在 info.data 中
        missing = "interim_fraction" in info.data and info.data["interim_fraction"] is None
        if v is not None and missing:
            raise ValueError("设置 futility_boundary 时必须同时设置 interim_fraction")
        return v

    @field_validator("max_concurrent_arms")
    @classmethod
    def capacity_covers_initial(cls, v: int, info: ValidationInfo) -> int:
        initial = info.data.get("initial_arms")
        if initial is not None and v < initial:
            raise ValueError(f"max_concurrent_arms ({v}) 不能小于 initial_arms ({initial})")
        return v

    @field_validator("recruitment_law")
    @classmethod
    def check_recruitment_law(cls, v: Dict[int, float]) -> Dict[int, float]:
        if not v:
            raise ValueError("recruitment_law 不能为空")
        if any(count < 0 for count in v):
            raise ValueError("每周到达人数不能为负")
        if any(not 0.0 <= p <= 1.0 for p in v.values()):
            raise ValueError("概率必须在 [0, 1] 内")
        if abs(math.fsum(v.values()) - 1.0) > 1e-9:
            raise ValueError(f"概率之和必须为 1: {math.fsum(v.values())}")
        if all(count == 0 for count, p in v.items() if p > 0):
            raise ValueError("每周到达人数不能恒为 0")
        return dict(sorted(v.items()))

    @field_validator("calibration")
    @classmethod
    def check_effect_grid_calibrated(
        cls, v: OutcomeCalibration, info: ValidationInfo
    ) -> OutcomeCalibration:
        dist = info.data.get("effect_distribution")
        if dist is not None:
            missing = [d for d in dist.effects if float(d) not in v.delta_map]
            if missing:
                raise ValueError(f"delta_map 缺少效应量 {missing}")
        return v

    # 派生量

    @property
    def allocation_policy(self) -> AllocationPolicy:
        return AllocationPolicy(kind=self.allocation, cap=self.control_cap)

    @property
    def time_trend_model(self) -> TimeTrend:
        return TimeTrend(step_fraction=self.time_trend, scale=self.trend_scale)

    @property
    def horizon_week(self) -> int:
        """最后一个允许进入的周"""
        return self.entry_horizon_months * WEEKS_PER_MONTH

    @property
    def interim_n(self) -> Optional[int]:
        """触发期中分析的试验组入组数 ⌈f·n⌉"""
        if self.interim_fraction is None:
            return None
        return math.ceil(self.interim_fraction * self.target_n_per_arm - 1e-9)

    @property
    def recruitment_arrays(self) -> Tuple[np.ndarray, np.ndarray]:
        counts = np.array(list(self.recruitment_law.keys()), dtype=np.int64)
        probs = np.array(list(self.recruitment_law.values()), dtype=float)
        return counts, probs / probs.sum()

    @property
    def mean_weekly_arrivals(self) -> float:
        return math.fsum(count * p for count, p in self.recruitment_law.items())

    def entry_attempts(self, free_slots: int) -> int:
        """月初的进入尝试次数"""
        if self.max_entries_per_month is not None:
            return min(self.max_entries_per_month, free_slots)
        if self.entry_probability_per_month >= 1.0:
            return free_slots
        return min(1, free_slots)

    @classmethod
    def max_capacity(cls, **overrides: Any) -> "ScenarioConfig":
        """满负荷预设：6 个初始组，空位每月必补"""
        data: Dict[str, Any] = {"initial_arms": 6, "entry_probability_per_month": 1.0}
        data.update(overrides)
        return cls(**data)

    @classmethod
    def realistic(cls, **overrides: Any) -> "ScenarioConfig":
        """现实负荷预设：3 个初始组，每月以 0.2 的概率进入新组"""
        data: Dict[str, Any] = {"initial_arms": 3, "entry_probability_per_month": 0.2}
        data.update(overrides)
        return cls(**data)
