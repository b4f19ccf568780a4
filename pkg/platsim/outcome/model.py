"""
结局模型

基线和第 6 周 MADRS 分数服从二元正态分布：
- 基线均值 32，对照组第 6 周均值 20，试验组第 6 周均值 20 - Δ(d)；
- 相关系数 ρ = 0.214；
- 标准差由 d ↦ Δ(d) 的换算关系反推：SD_Δ = mean(Δ(d)/d)，σ = SD_Δ / √(2(1-ρ))。
  指定 sd_week6 时第 6 周标准差固定，基线标准差按变化值标准差保持 SD_Δ 求解。

时间趋势是时间段的阶梯函数，只加在第 6 周分数上，所有组相同。
"""

import math
from enum import Enum
from typing import Dict, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from platsim.errors import ParameterError
from platsim.stats.rng import RngStream, sample_normal_pairs
from platsim.utils.logging import get_logger

logger = get_logger(__name__)

DEFAULT_DELTA_MAP: Dict[float, float] = {0.0: 0.0, 0.2: 2.25, 0.35: 4.0, 0.5: 5.7}


class TrendScale(str, Enum):
    """时间趋势步长的解释方式"""

    VARIANCE = "variance"  # 步长 = step_fraction · σ6²
    SD = "sd"  # 步长 = step_fraction · σ6


class OutcomeCalibration(BaseModel):
    """MADRS 校准参数"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    mu_baseline: float = Field(default=32.0, description="基线均值")
    mu_week6_control: float = Field(default=20.0, description="对照组第 6 周均值")
    rho: float = Field(default=0.214, gt=-1.0, lt=1.0, description="基线与第 6 周的相关系数")
    delta_map: Dict[float, float] = Field(
        default_factory=lambda: dict(DEFAULT_DELTA_MAP),
        description="效应量 d 到第 6 周绝对降幅（MADRS 分）的换算",
    )
    sd_week6: Optional[float] = Field(
        default=None, gt=0.0, description="第 6 周标准差；为空时与基线相同，由换算关系反推"
    )

    @field_validator("delta_map")
    @classmethod
    def check_delta_map(cls, v: Dict[float, float]) -> Dict[float, float]:
        if not any(d > 0 for d in v):
            raise ValueError("delta_map 至少需要一个正效应量")
        ordered = sorted(v.items())
        for (d1, delta1), (d2, delta2) in zip(ordered, ordered[1:]):
            if delta2 < delta1:
                raise ValueError(f"delta_map 必须随 d 单调: Δ({d1})={delta1} > Δ({d2})={delta2}")
        if 0.0 in v and v[0.0] != 0.0:
            raise ValueError("Δ(0) 必须为 0")
        return {float(d): float(delta) for d, delta in ordered}


class TimeTrend(BaseModel):
    """阶梯型时间趋势"""

    model_config = ConfigDict(frozen=True)

    step_fraction: float = Field(default=0.0, ge=0.0, description="每个时间段的步长（相对量）")
    scale: TrendScale = Field(default=TrendScale.VARIANCE, description="步长相对方差还是标准差")


def derive_sd_delta(delta_map: Dict[float, float]) -> float:
    """变化值标准差 SD_Δ = mean over d > 0 of Δ(d) / d"""
    ratios = [delta / d for d, delta in delta_map.items() if d > 0]
    return math.fsum(ratios) / len(ratios)


def derive_sigma(calibration: OutcomeCalibration) -> float:
    """
    两组标准差相等时的 MADRS 标准差

    Var(Y - X) = 2σ²(1 - ρ) = SD_Δ²，因此 σ = SD_Δ / √(2(1-ρ))。
    """
    sd_delta = derive_sd_delta(calibration.delta_map)
    return sd_delta / math.sqrt(2.0 * (1.0 - calibration.rho))


def solve_baseline_sd(sd_delta: float, sd_week6: float, rho: float) -> float:
    """
    给定第 6 周标准差，求使变化值标准差为 SD_Δ 的基线标准差

    σ0² - 2ρσ0σ6 + σ6² = SD_Δ²，取正根。

    Raises:
        ParameterError: 没有正根
    """
    if sd_delta <= 0 or sd_week6 <= 0:
        raise ParameterError("标准差必须为正", field="sd_week6")
    discriminant = sd_delta**2 - sd_week6**2 * (1.0 - rho**2)
    if discriminant < 0:
        raise ParameterError(
            f"sd_week6={sd_week6} 与 SD_Δ={sd_delta}、ρ={rho} 不相容", field="sd_week6"
        )
    root = rho * sd_week6 + math.sqrt(discriminant)
    if root <= 0:
        raise ParameterError(
            f"sd_week6={sd_week6} 时基线标准差无正解", field="sd_week6"
        )
    return root


def standardized_effect(delta_t_minus_delta_c: float, sd_delta: float) -> float:
    """
    标准化效应量 d = (Δ_T - Δ_C) / SD_Δ

    Raises:
        ParameterError: sd_delta <= 0
    """
    if not sd_delta > 0:
        raise ParameterError(f"SD_Δ 必须为正: {sd_delta}", field="sd_delta")
    return delta_t_minus_delta_c / sd_delta


class OutcomeModel:
    """
    解析后的结局模型

    构造时一次性求出 SD_Δ 和两个标准差，之后按批生成患者结局。
    """

    def __init__(
        self,
        calibration: Optional[OutcomeCalibration] = None,
        trend: Optional[TimeTrend] = None,
    ):
        self.calibration = calibration or OutcomeCalibration()
        self.trend = trend or TimeTrend()
        self.sd_delta = derive_sd_delta(self.calibration.delta_map)

        if self.calibration.sd_week6 is None:
            sigma = derive_sigma(self.calibration)
            self.sigma_baseline = sigma
            self.sigma_week6 = sigma
        else:
            self.sigma_week6 = self.calibration.sd_week6
            self.sigma_baseline = solve_baseline_sd(
                self.sd_delta, self.sigma_week6, self.calibration.rho
            )

        if self.trend.scale == TrendScale.VARIANCE:
            self.trend_step = self.trend.step_fraction * self.sigma_week6**2
        else:
            self.trend_step = self.trend.step_fraction * self.sigma_week6

    def describe(self) -> Dict[str, float]:
        """运行元数据中记录的推导量"""
        return {
            "sd_delta": self.sd_delta,
            "sigma_baseline": self.sigma_baseline,
            "sigma_week6": self.sigma_week6,
            "rho": self.calibration.rho,
            "trend_step": self.trend_step,
        }

    def log_derivation(self) -> None:
        logger.info("结局模型校准", **self.describe())

    def delta(self, true_effect: float) -> float:
        """效应量对应的第 6 周降幅"""
        try:
            return self.calibration.delta_map[float(true_effect)]
        except KeyError:
            raise ParameterError(
                f"未知的效应量 d={true_effect}（可选: {sorted(self.calibration.delta_map)}）",
                field="true_effect",
            ) from None

    def trend_offset(self, period_id: int | np.ndarray) -> float | np.ndarray:
        return period_id * self.trend_step

    def generate_outcomes(
        self,
        rng: RngStream,
        deltas: np.ndarray,
        period_id: int | np.ndarray,
    ) -> Tuple[np.ndarray, np.ndarray]:
        """
        批量生成 (基线, 第 6 周) 分数

        Args:
            rng: 随机数流
            deltas: 每名患者的第 6 周降幅（对照为 0）
            period_id: 时间段编号（标量或逐患者数组）
        """
        week6_means = self.calibration.mu_week6_control - deltas + self.trend_offset(period_id)
        return sample_normal_pairs(
            rng,
            len(deltas),
            self.calibration.mu_baseline,
            week6_means,
            self.sigma_baseline,
            self.sigma_week6,
            self.calibration.rho,
        )

    def generate_outcome(
        self,
        rng: RngStream,
        is_control: bool,
        true_effect: float,
        period_id: int,
    ) -> Tuple[float, float]:
        """生成单个患者的 (基线, 第 6 周) 分数"""
        delta = 0.0 if is_control else self.delta(true_effect)
        baseline, week6 = self.generate_outcomes(rng, np.array([delta]), period_id)
        return float(baseline[0]), float(week6[0])


def generate_outcome(
    rng: RngStream,
    assignment_is_control: bool,
    true_effect: float,
    period_id: int,
    calibration: OutcomeCalibration,
    trend: Optional[TimeTrend] = None,
) -> Tuple[float, float]:
    """
    生成单个患者的结局

    Raises:
        ParameterError: 效应量不在 delta_map 中
    """
    return OutcomeModel(calibration, trend).generate_outcome(
        rng, assignment_is_control, true_effect, period_id
    )
