"""
时间段簿记

时间段是活跃试验组集合保持不变的最长区间。集合每周只比较一次，
同一周内的进入和离开只产生一次时间段变更。
"""

import bisect
from dataclasses import dataclass
from typing import AbstractSet, FrozenSet, List

from platsim.errors import PeriodError


@dataclass(frozen=True, slots=True)
class TimePeriod:
    """时间段"""

    period_id: int
    start_week: int
    active_arm_ids: FrozenSet[int]


class PeriodTracker:
    """平台的时间段序列"""

    def __init__(self) -> None:
        self.periods: List[TimePeriod] = []
        self._starts: List[int] = []

    def __len__(self) -> int:
        return len(self.periods)

    @property
    def started(self) -> bool:
        return bool(self.periods)

    @property
    def current(self) -> TimePeriod:
        if not self.periods:
            raise PeriodError("尚未开始任何时间段")
        return self.periods[-1]

    def start(self, week: int, active_set: AbstractSet[int]) -> TimePeriod:
        """开启第 0 个时间段"""
        if self.periods:
            raise PeriodError("时间段已经开始，只能通过 advance_period 推进")
        return self._append(TimePeriod(0, week, frozenset(active_set)))

    def _append(self, period: TimePeriod) -> TimePeriod:
        self.periods.append(period)
        self._starts.append(period.start_week)
        return period

    def period_at(self, week: int) -> TimePeriod:
        """覆盖第 week 周的时间段"""
        index = bisect.bisect_right(self._starts, week) - 1
        if index < 0:
            raise PeriodError(f"第 {week} 周早于第一个时间段")
        return self.periods[index]


def advance_period(
    tracker: PeriodTracker, week: int, new_active_set: AbstractSet[int]
) -> TimePeriod:
    """
    活跃集合变化时开启新的时间段

    Args:
        tracker: 时间段簿记
        week: 新时间段的起始周
        new_active_set: 新的活跃试验组集合

    Returns:
        新的 TimePeriod，period_id 为上一个加 1

    Raises:
        PeriodError: 集合未变化，或起始周不晚于当前时间段
    """
    current = tracker.current
    new_set = frozenset(new_active_set)
    if new_set == current.active_arm_ids:
        raise PeriodError(f"第 {week} 周活跃集合未变化，不能推进时间段")
    if week <= current.start_week:
        raise PeriodError(
            f"第 {week} 周不晚于当前时间段起点 {current.start_week}，每周最多变更一次"
        )
    return tracker._append(TimePeriod(current.period_id + 1, week, new_set))
