"""
随机化

- 简单随机化：每个患者以概率 r 进入对照，否则在活跃试验组中均匀分配。
- 改良区组随机化：区组包含每个活跃试验组各一个位置、⌊x⌋ 个对照位置，
  再以概率 Frac(x) 加一个对照位置，随后整体随机排列。
  活跃集合变化时丢弃未用完的区组。
"""

import math
from abc import ABC, abstractmethod
from collections import deque
from dataclasses import dataclass, field
from typing import Deque, Dict, Sequence, Tuple, Type

from platsim.allocation.policy import (
    AllocationPolicy,
    control_ratio,
    control_spots_x,
)
from platsim.errors import NoArmsError, ParameterError
from platsim.stats.rng import RngStream
from platsim.trial.state import CONTROL


def generate_block(rng: RngStream, active_arms: Sequence[int], x: float) -> list[int]:
    """
    生成一个随机排列的区组

    Args:
        rng: 随机数流
        active_arms: 活跃试验组（排列前按编号升序）
        x: 对照位数

    Returns:
        分配列表，CONTROL 表示对照
    """
    if len(active_arms) == 0:
        raise NoArmsError("没有活跃的试验组，无法生成区组")
    if x < 0:
        raise ParameterError(f"对照位数不能为负: {x}", field="x")

    whole = math.floor(x)
    frac = x - whole
    n_control = whole
    # 整数 x 不消耗随机数
    if frac > 0 and rng.random() < frac:
        n_control += 1

    spots = sorted(active_arms) + [CONTROL] * n_control
    return rng.permutation(spots)


@dataclass
class BlockState:
    """区组随机化的状态"""

    arm_set_snapshot: Tuple[int, ...] = ()
    pending: Deque[int] = field(default_factory=deque)
    blocks_generated: int = 0


def next_assignment_block(
    state: BlockState,
    rng: RngStream,
    active_arms: Sequence[int],
    policy: AllocationPolicy,
) -> int:
    """
    从区组中取下一个分配

    区组用完或活跃集合与快照不同时，丢弃剩余位置并重新生成。

    Raises:
        NoArmsError: 没有活跃试验组
    """
    arms = tuple(sorted(active_arms))
    if not arms:
        raise NoArmsError("没有活跃的试验组，无法随机化")

    if not state.pending or arms != state.arm_set_snapshot:
        x = control_spots_x(policy, len(arms))
        state.pending = deque(generate_block(rng, arms, x))
        state.arm_set_snapshot = arms
        state.blocks_generated += 1

    return state.pending.popleft()


def next_assignment_simple(
    rng: RngStream,
    active_arms: Sequence[int],
    policy: AllocationPolicy,
) -> int:
    """
    简单随机化：以概率 r 分到对照，否则在活跃试验组中均匀抽取

    Raises:
        NoArmsError: 没有活跃试验组
    """
    arms = sorted(active_arms)
    if not arms:
        raise NoArmsError("没有活跃的试验组，无法随机化")

    r = control_ratio(policy, len(arms))
    if rng.random() < r:
        return CONTROL
    return arms[rng.integers(len(arms))]


class BaseRandomizer(ABC):
    """随机化器基类"""

    name: str = "base"

    def __init__(self, policy: AllocationPolicy):
        self.policy = policy

    @abstractmethod
    def assign(self, rng: RngStream, active_arms: Sequence[int]) -> int:
        """为一名患者生成分配"""
        pass

    def reset(self) -> None:
        """丢弃内部状态"""
        pass

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}(policy={self.policy.kind.value})"


class SimpleRandomizer(BaseRandomizer):
    name = "simple"

    def assign(self, rng: RngStream, active_arms: Sequence[int]) -> int:
        return next_assignment_simple(rng, active_arms, self.policy)


class BlockRandomizer(BaseRandomizer):
    name = "modified_block"

    def __init__(self, policy: AllocationPolicy):
        super().__init__(policy)
        self.state = BlockState()

    def assign(self, rng: RngStream, active_arms: Sequence[int]) -> int:
        return next_assignment_block(self.state, rng, active_arms, self.policy)

    def reset(self) -> None:
        self.state = BlockState()


_RANDOMIZERS: Dict[str, Type[BaseRandomizer]] = {
    SimpleRandomizer.name: SimpleRandomizer,
    BlockRandomizer.name: BlockRandomizer,
}


def create_randomizer(kind: str, policy: AllocationPolicy) -> BaseRandomizer:
    """
    按名称创建随机化器

    Args:
        kind: simple 或 modified_block
        policy: 分配策略

    Raises:
        ParameterError: 未知的随机化方式
    """
    key = getattr(kind, "value", kind)
    if key not in _RANDOMIZERS:
        raise ParameterError(
            f"未知的随机化方式: {key}（可选: {', '.join(_RANDOMIZERS)}）", field="randomization"
        )
    return _RANDOMIZERS[key](policy)
