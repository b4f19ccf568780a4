"""
ANCOVA 分析

模型 Y = α + βG + γX (+ 时间段指示列) + e，用 QR 分解求最小二乘解。
G = 1 表示试验组。单侧 p 值为 P(T_df <= t)：试验组降低 Y 时 p 值小。
"""

from dataclasses import dataclass
from enum import Enum
from typing import FrozenSet, List, Optional

import numpy as np
from scipy.linalg import solve_triangular

from platsim.errors import AnalysisError
from platsim.stats.tdist import student_t_cdf
from platsim.utils.logging import get_logger

logger = get_logger(__name__)

# 列主元秩判断的相对容差
RANK_TOL = 1e-10


class AnalysisKind(str, Enum):
    INTERIM = "interim"
    FINAL = "final"


class CovariateSet(str, Enum):
    """ANCOVA 协变量集合"""

    BASELINE_ONLY = "baseline_only"
    BASELINE_PLUS_PERIOD = "baseline_plus_period"


@dataclass(frozen=True)
class AnalysisDataset:
    """
    单次分析的数据：试验组患者和同期对照

    Attributes:
        week6: 第 6 周分数 Y
        baseline: 基线分数 X
        group: 0 对照 / 1 试验组
        period_id: 随机化时的时间段
        arm_id: 试验组编号
        kind: interim 或 final
    """

    week6: np.ndarray
    baseline: np.ndarray
    group: np.ndarray
    period_id: np.ndarray
    arm_id: int = 0
    kind: AnalysisKind = AnalysisKind.FINAL

    def __post_init__(self) -> None:
        n = len(self.week6)
        if not (len(self.baseline) == len(self.group) == len(self.period_id) == n):
            raise AnalysisError("数据列长度不一致", arm_id=self.arm_id, kind=self.kind.value)
        labels = set(np.unique(self.group).tolist())
        if labels != {0, 1}:
            raise AnalysisError(
                f"需要同时包含对照和试验组，实际分组: {sorted(labels)}",
                arm_id=self.arm_id,
                kind=self.kind.value,
            )

    @property
    def n_treatment(self) -> int:
        return int(np.count_nonzero(self.group == 1))

    @property
    def n_control(self) -> int:
        return int(np.count_nonzero(self.group == 0))


@dataclass(frozen=True)
class AncovaFit:
    """ANCOVA 拟合结果（只关心治疗系数 β）"""

    beta_hat: float
    se_beta: float
    t_stat: float
    df: int
    p_one_sided: float
    dropped_period_levels: FrozenSet[int] = frozenset()
    n_rows: int = 0
    n_params: int = 0


def _keep_if_independent(basis: np.ndarray, column: np.ndarray) -> Optional[np.ndarray]:
    """column 相对已有正交基的残差足够大时返回单位化残差，否则返回 None"""
    norm = np.linalg.norm(column)
    if norm == 0.0:
        return None
    residual = column - basis @ (basis.T @ column)
    # 再正交化一次，减少舍入误差
    residual = residual - basis @ (basis.T @ residual)
    res_norm = np.linalg.norm(residual)
    if res_norm <= RANK_TOL * norm:
        return None
    return residual / res_norm


def _build_design(data: AnalysisDataset, covariates: CovariateSet):
    n = len(data.week6)
    core = np.column_stack(
        [np.ones(n), data.group.astype(float), data.baseline.astype(float)]
    )

    q_core, r_core = np.linalg.qr(core)
    norms = np.linalg.norm(core, axis=0)
    if np.any(np.abs(np.diag(r_core)) <= RANK_TOL * norms):
        raise AnalysisError(
            "截距、分组和基线列秩亏（基线方差为 0 或分组退化）",
            arm_id=data.arm_id,
            kind=data.kind.value,
        )

    columns: List[np.ndarray] = [core]
    dropped: List[int] = []
    if covariates == CovariateSet.BASELINE_PLUS_PERIOD:
        levels = np.unique(data.period_id)
        basis = q_core
        for level in levels[1:]:  # 最早的时间段为参照
            indicator = (data.period_id == level).astype(float)
            direction = _keep_if_independent(basis, indicator)
            if direction is None:
                dropped.append(int(level))
                continue
            basis = np.column_stack([basis, direction])
            columns.append(indicator[:, None])
        if dropped:
            logger.debug(
                "时间段水平共线被删除",
                arm_id=data.arm_id,
                kind=data.kind.value,
                dropped=dropped,
            )

    return np.hstack(columns), frozenset(dropped)


def fit_ancova(data: AnalysisDataset, covariates: CovariateSet) -> AncovaFit:
    """
    拟合 ANCOVA 并检验治疗系数

    Args:
        data: 分析数据集
        covariates: 协变量集合

    Returns:
        AncovaFit

    Raises:
        AnalysisError: 秩亏、自由度不足或结局无变异
    """
    y = np.asarray(data.week6, dtype=float)
    n = len(y)

    if np.ptp(y) == 0.0:
        raise AnalysisError("结局值全部相同，无法检验", arm_id=data.arm_id, kind=data.kind.value)

    design, dropped = _build_design(data, covariates)
    n_params = design.shape[1]
    df = n - n_params
    if df < 1:
        raise AnalysisError(
            f"自由度不足: n={n}, 参数数={n_params}", arm_id=data.arm_id, kind=data.kind.value
        )

    q, r = np.linalg.qr(design)
    coef = solve_triangular(r, q.T @ y)
    residuals = y - design @ coef
    rss = float(residuals @ residuals)
    tss = float(np.sum((y - y.mean()) ** 2))

    beta = float(coef[1])
    r_inv = solve_triangular(r, np.eye(n_params))
    var_factor = float(np.sum(r_inv[1, :] ** 2))  # (X'X)^{-1} 的 [1, 1] 元素

    if rss <= 1e-24 * tss:
        # 完全拟合
        if abs(beta) <= 1e-12 * max(1.0, float(np.max(np.abs(y)))):
            raise AnalysisError(
                "完全拟合且治疗效应为 0，t 统计量无定义",
                arm_id=data.arm_id,
                kind=data.kind.value,
            )
        se = 0.0
        t_stat = float(np.copysign(np.inf, beta))
    else:
        se = float(np.sqrt(rss / df * var_factor))
        t_stat = beta / se

    return AncovaFit(
        beta_hat=beta,
        se_beta=se,
        t_stat=t_stat,
        df=df,
        p_one_sided=student_t_cdf(t_stat, df),
        dropped_period_levels=dropped,
        n_rows=n,
        n_params=n_params,
    )
