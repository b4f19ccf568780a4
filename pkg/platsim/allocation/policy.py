"""
分配比例

k 个活跃试验组时对照组的目标比例 r，以及每 k 个治疗位对应的对照位数 x。
两者满足 r = x / (k + x)。
"""

import math
from enum import Enum

from pydantic import BaseModel, ConfigDict, Field

from platsim.errors import NoArmsError


class AllocationKind(str, Enum):
    """分配方式"""

    BALANCED = "balanced"  # 1:...:1:1
    K_ALLOC = "k_alloc"  # 1:...:1:k
    SQRT_K = "sqrt_k"  # 1:...:1:√k
    SQRT_K_CAPPED = "sqrt_k_capped"  # √k，对照比例下限为 cap


class AllocationPolicy(BaseModel):
    """分配策略"""

    model_config = ConfigDict(frozen=True)

    kind: AllocationKind = Field(default=AllocationKind.SQRT_K_CAPPED, description="分配方式")
    cap: float = Field(default=0.35, ge=0.0, lt=1.0, description="对照比例下限（仅 sqrt_k_capped）")


def _check_k(k: int) -> None:
    if k < 1:
        raise NoArmsError(f"没有活跃的试验组 (k={k})，无法随机化", field="k")


def control_ratio(policy: AllocationPolicy, k: int) -> float:
    """
    对照组的目标分配比例 r

    Args:
        policy: 分配策略
        k: 活跃试验组数

    Returns:
        r ∈ (0, 1)，每个试验组得到 (1 - r) / k

    Raises:
        NoArmsError: k = 0
    """
    _check_k(k)
    if policy.kind == AllocationKind.BALANCED:
        return 1.0 / (k + 1)
    if policy.kind == AllocationKind.K_ALLOC:
        return 0.5
    sqrt_ratio = math.sqrt(k) / (k + math.sqrt(k))
    if policy.kind == AllocationKind.SQRT_K:
        return sqrt_ratio
    return max(sqrt_ratio, policy.cap)


def control_spots_x(policy: AllocationPolicy, k: int) -> float:
    """
    每 k 个治疗位对应的对照位数 x = r·k / (1 - r)

    balanced 为 1，sqrt_k 为 √k，k_alloc 为 k。
    """
    _check_k(k)
    if policy.kind == AllocationKind.BALANCED:
        return 1.0
    if policy.kind == AllocationKind.K_ALLOC:
        return float(k)
    if policy.kind == AllocationKind.SQRT_K or policy.cap <= math.sqrt(k) / (k + math.sqrt(k)):
        return math.sqrt(k)
    r = control_ratio(policy, k)
    return r * k / (1.0 - r)


def treatment_ratio(policy: AllocationPolicy, k: int) -> float:
    """单个试验组的目标分配比例 (1 - r) / k"""
    return (1.0 - control_ratio(policy, k)) / k
