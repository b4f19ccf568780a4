"""
试验领域模型

定义平台试验中共享的数据类型：效应量分布、试验组、患者记录、比较结果。
患者记录数量大，使用 slots dataclass 和列式存储（PatientLog）；
其余类型使用 Pydantic 模型。
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from platsim.errors import ArmStateError, ParameterError
from platsim.stats.rng import RngStream

# 对照组在分配结果中的编号；试验组编号从 1 开始
CONTROL = 0

WEEKS_PER_MONTH = 4

# 标准化效应量网格
EFFECT_GRID: Tuple[float, ...] = (0.0, 0.2, 0.35, 0.5)


def is_month_start(week: int) -> bool:
    """第 week 周是否为某个月的第一周（周编号从 1 开始）"""
    return week >= 1 and (week - 1) % WEEKS_PER_MONTH == 0


def effect_key(d: float) -> str:
    """效应量的文本键，用于输出列名（0, 0.2, 0.35, 0.5）"""
    return format(float(d), "g")


class ArmStatus(str, Enum):
    """试验组状态"""

    ENROLLING = "enrolling"
    STOPPED_FUTILITY = "stopped_futility"
    COMPLETED_SUCCESS = "completed_success"
    COMPLETED_FAILURE = "completed_failure"


class Decision(str, Enum):
    """比较的最终决策"""

    SUCCESS = "success"
    FAILURE = "failure"
    STOPPED_FUTILITY = "stopped_futility"


class EffectDistribution(BaseModel):
    """
    效应量分布

    每个新进入的试验组按概率 θ_d 被分配一个标准化效应量 d。
    """

    model_config = ConfigDict(frozen=True)

    effects: Tuple[float, ...] = Field(default=EFFECT_GRID, description="效应量取值")
    probabilities: Tuple[float, ...] = Field(
        default=(0.25, 0.25, 0.25, 0.25), description="各效应量的概率 θ_d"
    )

    @model_validator(mode="after")
    def check_probabilities(self) -> "EffectDistribution":
        if len(self.effects) != len(self.probabilities):
            raise ValueError("effects 与 probabilities 长度不一致")
        if len(self.effects) == 0:
            raise ValueError("效应量分布不能为空")
        if len(set(self.effects)) != len(self.effects):
            raise ValueError("效应量取值重复")
        if any(not 0.0 <= p <= 1.0 for p in self.probabilities):
            raise ValueError("θ_d 必须在 [0, 1] 内")
        if abs(math.fsum(self.probabilities) - 1.0) > 1e-12:
            raise ValueError(f"θ_d 之和必须为 1: {math.fsum(self.probabilities)}")
        return self

    @classmethod
    def equal(cls) -> "EffectDistribution":
        """等概率场景：四个效应量各 0.25"""
        return cls(effects=EFFECT_GRID, probabilities=(0.25, 0.25, 0.25, 0.25))

    @classmethod
    def pessimistic(cls) -> "EffectDistribution":
        """悲观场景：θ = (0.5, 0.3, 0.1, 0.1)"""
        return cls(effects=EFFECT_GRID, probabilities=(0.5, 0.3, 0.1, 0.1))

    @classmethod
    def preset(cls, name: str) -> "EffectDistribution":
        presets = {"equal": cls.equal, "pessimistic": cls.pessimistic}
        if name not in presets:
            raise ValueError(f"未知的效应量分布预设: {name}（可选: {', '.join(presets)}）")
        return presets[name]()

    @property
    def name(self) -> Optional[str]:
        """预设名称，非预设分布返回 None"""
        for preset_name in ("equal", "pessimistic"):
            if self == EffectDistribution.preset(preset_name):
                return preset_name
        return None


def draw_effect(rng: RngStream, dist: EffectDistribution) -> float:
    """
    按 θ_d 抽取一个效应量

    Args:
        rng: 随机数流
        dist: 效应量分布

    Returns:
        标准化效应量 d
    """
    index = rng.choice(len(dist.effects), p=np.asarray(dist.probabilities, dtype=float))
    return dist.effects[index]


class Arm(BaseModel):
    """试验组"""

    arm_id: int = Field(..., ge=1, description="试验组编号")
    entry_week: int = Field(..., ge=1, description="进入平台的周")
    true_effect: float = Field(..., description="真实标准化效应量 d")
    target_n: int = Field(..., ge=1, description="目标样本量 n_j")
    enrolled: int = Field(default=0, ge=0, description="已入组的患者数")
    status: ArmStatus = Field(default=ArmStatus.ENROLLING, description="状态")
    exit_week: Optional[int] = Field(default=None, description="离开平台的周")

    @property
    def is_enrolling(self) -> bool:
        return self.status == ArmStatus.ENROLLING

    @property
    def is_full(self) -> bool:
        return self.enrolled >= self.target_n

    @property
    def duration_weeks(self) -> Optional[int]:
        """试验组持续周数（进入周和离开周都计入）"""
        if self.exit_week is None:
            return None
        return self.exit_week - self.entry_week + 1

    def record_enrollment(self) -> None:
        """入组一名患者"""
        if not self.is_enrolling:
            raise ArmStateError(f"试验组 {self.arm_id} 已是 {self.status.value}，不能继续入组")
        if self.enrolled >= self.target_n:
            raise ArmStateError(f"试验组 {self.arm_id} 已达到目标样本量 {self.target_n}")
        self.enrolled += 1

    def close(self, status: ArmStatus, week: int) -> None:
        """
        结束试验组

        Args:
            status: 终止状态
            week: 离开平台的周

        Raises:
            ArmStateError: 非法状态转换
        """
        if not self.is_enrolling:
            raise ArmStateError(
                f"试验组 {self.arm_id} 已处于终止状态 {self.status.value}", field="status"
            )
        if status == ArmStatus.ENROLLING:
            raise ArmStateError("只能转换到终止状态", field="status")
        if week < self.entry_week:
            raise ArmStateError(
                f"离开周 {week} 早于进入周 {self.entry_week}", field="exit_week"
            )
        self.status = status
        self.exit_week = week


@dataclass(frozen=True, slots=True)
class PatientRecord:
    """单个患者的记录，MADRS 分数不取整"""

    patient_id: int
    week: int
    period_id: int
    assignment: int
    baseline: float
    week6: float

    @property
    def is_control(self) -> bool:
        return self.assignment == CONTROL


class PatientLog:
    """
    列式患者记录

    按列存放周、时间段、分配和两个 MADRS 分数，容量不足时加倍，
    总数超过 max_patients 时报错。
    """

    MAX_PATIENTS = 1_000_000

    def __init__(self, capacity: int = 1024, max_patients: int = MAX_PATIENTS):
        if capacity > max_patients:
            raise ParameterError(
                f"初始容量 {capacity} 超过上限 {max_patients}", field="capacity"
            )
        self._size = 0
        self.max_patients = max_patients
        self.week = np.zeros(capacity, dtype=np.int64)
        self.period_id = np.zeros(capacity, dtype=np.int64)
        self.assignment = np.zeros(capacity, dtype=np.int64)
        self.baseline = np.zeros(capacity, dtype=float)
        self.week6 = np.zeros(capacity, dtype=float)

    def __len__(self) -> int:
        return self._size

    def _grow(self, needed: int) -> None:
        capacity = len(self.week)
        if needed <= capacity:
            return
        if needed > self.max_patients:
            raise ParameterError(
                f"患者数 {needed} 超过上限 {self.max_patients}", field="max_patients"
            )
        capacity = max(capacity, 1)
        while capacity < needed:
            capacity *= 2
        capacity = min(capacity, self.max_patients)
        for name in ("week", "period_id", "assignment", "baseline", "week6"):
            old = getattr(self, name)
            new = np.zeros(capacity, dtype=old.dtype)
            new[: self._size] = old[: self._size]
            setattr(self, name, new)

    def append_batch(
        self,
        week: int,
        period_id: int,
        assignments: np.ndarray,
        baseline: np.ndarray,
        week6: np.ndarray,
    ) -> None:
        """追加同一周入组的一批患者"""
        count = len(assignments)
        if count == 0:
            return
        self._grow(self._size + count)
        end = self._size + count
        self.week[self._size : end] = week
        self.period_id[self._size : end] = period_id
        self.assignment[self._size : end] = assignments
        self.baseline[self._size : end] = baseline
        self.week6[self._size : end] = week6
        self._size = end

    def view(self, name: str) -> np.ndarray:
        """某一列的有效部分"""
        return getattr(self, name)[: self._size]

    def record(self, index: int) -> PatientRecord:
        return PatientRecord(
            patient_id=index,
            week=int(self.week[index]),
            period_id=int(self.period_id[index]),
            assignment=int(self.assignment[index]),
            baseline=float(self.baseline[index]),
            week6=float(self.week6[index]),
        )

    def records(self, indices: Optional[np.ndarray] = None) -> List[PatientRecord]:
        if indices is None:
            indices = np.arange(self._size)
        return [self.record(int(i)) for i in indices]

    def __iter__(self) -> Iterator[PatientRecord]:
        for i in range(self._size):
            yield self.record(i)

    @property
    def control_count(self) -> int:
        return int(np.count_nonzero(self.view("assignment") == CONTROL))


class ComparisonResult(BaseModel):
    """单个试验组与其同期对照的比较结果"""

    arm_id: int
    true_effect: float
    decision: Decision
    p_interim: Optional[float] = Field(default=None, ge=0.0, le=1.0)
    p_final: Optional[float] = Field(default=None, ge=0.0, le=1.0)
    n_treatment: int = Field(..., ge=0)
    n_concurrent_controls_interim: Optional[int] = None
    n_concurrent_controls_final: Optional[int] = None
    entry_week: int
    exit_week: int
    duration_weeks: int = Field(..., ge=1)

    @property
    def rejected(self) -> bool:
        """是否拒绝原假设（最终分析成功）"""
        return self.decision == Decision.SUCCESS


__all__ = [
    "CONTROL",
    "WEEKS_PER_MONTH",
    "EFFECT_GRID",
    "is_month_start",
    "effect_key",
    "ArmStatus",
    "Decision",
    "EffectDistribution",
    "draw_effect",
    "Arm",
    "PatientRecord",
    "PatientLog",
    "ComparisonResult",
]
