"""
重复内的事件日志

--verbose-events 时记录每次进入、离开、时间段变更和分析，
分析事件附带调试字段 (arm_id, kind, n_t, n_c, beta, se, p)。
"""

from enum import Enum
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict


class EventKind(str, Enum):
    ENTRY = "entry"
    EXIT = "exit"
    PERIOD = "period"
    INTERIM = "interim"
    FINAL = "final"


class Event(BaseModel):
    """单个事件"""

    model_config = ConfigDict(frozen=True)

    week: int
    kind: str
    arm_id: Optional[int] = None
    period_id: Optional[int] = None
    detail: Optional[str] = None
    n_t: Optional[int] = None
    n_c: Optional[int] = None
    beta: Optional[float] = None
    se: Optional[float] = None
    p: Optional[float] = None

    def to_row(self) -> Dict[str, Any]:
        return self.model_dump()


class EventLog:
    """事件收集器，关闭时所有记录调用都是空操作"""

    def __init__(self, enabled: bool = False):
        self.enabled = enabled
        self.events: List[Event] = []

    def record(self, week: int, kind: EventKind, **fields: Any) -> None:
        if self.enabled:
            self.events.append(Event(week=week, kind=kind.value, **fields))

    def __len__(self) -> int:
        return len(self.events)
