"""
Student t 分布

累积分布函数通过正则化不完全 Beta 函数计算（scipy.special.betainc）：
P(T <= t) = 1 - I_x(df/2, 1/2) / 2，其中 x = df / (df + t^2)，t > 0 时。
"""

import math

from scipy.special import betainc

from platsim.errors import ParameterError


def student_t_cdf(t: float, df: float) -> float:
    """
    Student t 分布的累积分布函数 P(T_df <= t)

    Args:
        t: 统计量取值，允许 ±inf
        df: 自由度，>= 1

    Returns:
        概率值

    Raises:
        ParameterError: df < 1 或 t 为 NaN
    """
    if not df >= 1:
        raise ParameterError(f"自由度必须 >= 1: {df}", field="df")
    if math.isnan(t):
        raise ParameterError("t 统计量为 NaN", field="t")
    if math.isinf(t):
        return 1.0 if t > 0 else 0.0
    if t == 0.0:
        return 0.5

    x = df / (df + t * t)
    tail = 0.5 * float(betainc(0.5 * df, 0.5, x))
    return 1.0 - tail if t > 0 else tail
