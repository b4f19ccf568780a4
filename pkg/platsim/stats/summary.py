"""
汇总统计

中位数和四分位数使用线性插值分位数定义（即 R 的 type 7、numpy 的默认 "linear" 方法）：
对排序后的 n 个值，p 分位数位于位置 (n-1)*p，在相邻两个次序统计量之间线性插值。
"""

from typing import Iterable

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from platsim.errors import ParameterError


class SummaryStats(BaseModel):
    """中位数与四分位距"""

    model_config = ConfigDict(frozen=True)

    median: float = Field(..., description="中位数")
    q25: float = Field(..., description="下四分位数")
    q75: float = Field(..., description="上四分位数")
    n: int = Field(..., ge=1, description="样本量")

    @model_validator(mode="after")
    def check_order(self) -> "SummaryStats":
        if not self.q25 <= self.median <= self.q75:
            raise ValueError(f"分位数顺序错误: {self.q25}, {self.median}, {self.q75}")
        return self

    @property
    def iqr(self) -> float:
        """四分位距"""
        return self.q75 - self.q25


def summarize(values: Iterable[float]) -> SummaryStats:
    """
    计算中位数和四分位数

    Args:
        values: 非空的实数序列

    Returns:
        SummaryStats

    Raises:
        ParameterError: 输入为空
    """
    data = np.asarray(list(values), dtype=float)
    if data.size == 0:
        raise ParameterError("summarize 需要至少一个值", field="values")

    q25, median, q75 = np.percentile(data, [25.0, 50.0, 75.0], method="linear")
    return SummaryStats(median=float(median), q25=float(q25), q75=float(q75), n=int(data.size))
