"""
工作特征（operating characteristics）汇总

- 决策比例在所有重复的全部比较上合并计算，并按真实效应量分层；
- 分布型指标先逐重复（或逐比较）计算，再用 SummaryStats 汇总；
- 每 1000 名患者的试验组数取逐重复比值的中位数。

OcsAccumulator 支持分块累加和合并，结果与合并顺序无关。
"""

import math
from collections import defaultdict
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from pydantic import BaseModel, Field

from platsim.engine.results import ReplicateResult
from platsim.errors import ParameterError
from platsim.stats.summary import SummaryStats, summarize
from platsim.trial.state import Decision, effect_key


def mc_error(rate: float, n: int) -> float:
    """
    二项比例的蒙特卡洛标准误 √(p(1-p)/n)

    Raises:
        ParameterError: n < 1
    """
    if n < 1:
        raise ParameterError(f"n 必须 >= 1: {n}", field="n")
    return math.sqrt(max(rate * (1.0 - rate), 0.0) / n)


class EffectStratum(BaseModel):
    """单个效应量下的决策统计"""

    d: float
    n_comparisons: int = 0
    n_success: int = 0
    n_failure: int = 0
    n_stopped_futility: int = 0
    success_rate: Optional[float] = None
    failure_rate: Optional[float] = None
    futility_rate: Optional[float] = None
    success_mcse: Optional[float] = None
    failure_mcse: Optional[float] = None
    futility_mcse: Optional[float] = None


class OperatingCharacteristics(BaseModel):
    """一个场景的汇总工作特征"""

    replicates: int = Field(..., ge=1)
    n_comparisons: int
    n_rejections: int
    strata: Dict[str, EffectStratum]
    platform_n: SummaryStats
    control_n: SummaryStats
    control_fraction: Optional[SummaryStats] = None
    per_arm_n: Optional[SummaryStats] = None
    controls_interim: Optional[SummaryStats] = None
    controls_final: Optional[SummaryStats] = None
    n_arms: SummaryStats
    arms_per_1000: Optional[SummaryStats] = None
    platform_duration: SummaryStats
    arm_duration: Optional[SummaryStats] = None
    rejections_per_platform: SummaryStats
    rejections_by_effect: Dict[str, SummaryStats]
    arms_by_effect: Dict[str, SummaryStats]

    def to_record(self) -> Dict[str, Optional[float]]:
        """展平成一行记录（列顺序固定）"""
        record: Dict[str, Optional[float]] = {
            "replicates": self.replicates,
            "n_comparisons": self.n_comparisons,
            "n_rejections": self.n_rejections,
        }
        for key, stratum in self.strata.items():
            record[f"n_comparisons_d{key}"] = stratum.n_comparisons
            record[f"n_success_d{key}"] = stratum.n_success
            record[f"rate_success_d{key}"] = stratum.success_rate
            record[f"mcse_success_d{key}"] = stratum.success_mcse
            record[f"rate_failure_d{key}"] = stratum.failure_rate
            record[f"mcse_failure_d{key}"] = stratum.failure_mcse
            record[f"rate_futility_d{key}"] = stratum.futility_rate
            record[f"mcse_futility_d{key}"] = stratum.futility_mcse

        summaries: List[Tuple[str, Optional[SummaryStats]]] = [
            ("platform_n", self.platform_n),
            ("control_n", self.control_n),
            ("control_fraction", self.control_fraction),
            ("per_arm_n", self.per_arm_n),
            ("controls_interim", self.controls_interim),
            ("controls_final", self.controls_final),
            ("n_arms", self.n_arms),
            ("arms_per_1000", self.arms_per_1000),
            ("platform_duration", self.platform_duration),
            ("arm_duration", self.arm_duration),
            ("rejections_per_platform", self.rejections_per_platform),
        ]
        summaries += [(f"rejections_d{k}", s) for k, s in self.rejections_by_effect.items()]
        summaries += [(f"arms_d{k}", s) for k, s in self.arms_by_effect.items()]
        for name, stats in summaries:
            record[f"{name}_median"] = stats.median if stats else None
            record[f"{name}_q25"] = stats.q25 if stats else None
            record[f"{name}_q75"] = stats.q75 if stats else None
        return record


class OcsAccumulator:
    """
    工作特征累加器

    Args:
        effect_grid: 分层使用的效应量（通常取自场景的效应量分布）
    """

    def __init__(self, effect_grid: Sequence[float]):
        self.effect_keys = [effect_key(d) for d in effect_grid]
        self.effect_values = {effect_key(d): float(d) for d in effect_grid}
        self.decision_counts: Dict[Tuple[str, Decision], int] = defaultdict(int)
        # 逐重复指标，按重复编号存放
        self.per_replicate: Dict[int, Dict[str, object]] = {}

    def add(self, result: ReplicateResult) -> None:
        if result.replicate in self.per_replicate:
            raise ParameterError(f"重复 {result.replicate} 已被汇总", field="replicate")

        rejections = {key: 0 for key in self.effect_keys}
        arms = {key: 0 for key in self.effect_keys}
        for comparison in result.comparisons:
            key = effect_key(comparison.true_effect)
            if key not in arms:
                raise ParameterError(f"效应量 {key} 不在分层网格中", field="true_effect")
            self.decision_counts[(key, comparison.decision)] += 1
            arms[key] += 1
            if comparison.rejected:
                rejections[key] += 1

        self.per_replicate[result.replicate] = {
            "total_n": result.total_platform_n,
            "control_n": result.total_control_n,
            "n_arms": result.n_arms_tested,
            "arms_per_1000": result.arms_per_1000,
            "duration": result.platform_duration_weeks,
            "rejections": result.n_rejections,
            "rejections_by_effect": rejections,
            "arms_by_effect": arms,
            "per_arm_n": [c.n_treatment for c in result.comparisons],
            "controls_interim": [
                c.n_concurrent_controls_interim
                for c in result.comparisons
                if c.n_concurrent_controls_interim is not None
            ],
            "controls_final": [
                c.n_concurrent_controls_final
                for c in result.comparisons
                if c.n_concurrent_controls_final is not None
            ],
            "arm_duration": [c.duration_weeks for c in result.comparisons],
        }

    def merge(self, other: "OcsAccumulator") -> "OcsAccumulator":
        """合并另一个累加器（结合律、交换律成立）"""
        if other.effect_keys != self.effect_keys:
            raise ParameterError("效应量网格不一致，无法合并", field="effect_grid")
        overlap = self.per_replicate.keys() & other.per_replicate.keys()
        if overlap:
            raise ParameterError(f"重复编号重叠: {sorted(overlap)[:5]}", field="replicate")
        for key, count in other.decision_counts.items():
            self.decision_counts[key] += count
        self.per_replicate.update(other.per_replicate)
        return self

    def __len__(self) -> int:
        return len(self.per_replicate)

    def _stratum(self, key: str) -> EffectStratum:
        n_success = self.decision_counts[(key, Decision.SUCCESS)]
        n_failure = self.decision_counts[(key, Decision.FAILURE)]
        n_futility = self.decision_counts[(key, Decision.STOPPED_FUTILITY)]
        n = n_success + n_failure + n_futility
        stratum = EffectStratum(
            d=self.effect_values[key],
            n_comparisons=n,
            n_success=n_success,
            n_failure=n_failure,
            n_stopped_futility=n_futility,
        )
        if n > 0:
            rates = {
                "success": n_success / n,
                "failure": n_failure / n,
                "futility": n_futility / n,
            }
            stratum = stratum.model_copy(
                update={
                    **{f"{name}_rate": rate for name, rate in rates.items()},
                    **{f"{name}_mcse": mc_error(rate, n) for name, rate in rates.items()},
                }
            )
        return stratum

    def finalize(self) -> OperatingCharacteristics:
        """
        计算工作特征

        Raises:
            ParameterError: 没有任何重复
        """
        if not self.per_replicate:
            raise ParameterError("没有可汇总的重复结果", field="results")

        rows = [self.per_replicate[i] for i in sorted(self.per_replicate)]

        def column(name: str) -> List[float]:
            return [row[name] for row in rows]

        def pooled(name: str) -> List[float]:
            return [value for row in rows for value in row[name]]

        def maybe_summary(values: Iterable[Optional[float]]) -> Optional[SummaryStats]:
            present = [v for v in values if v is not None]
            return summarize(present) if present else None

        strata = {key: self._stratum(key) for key in self.effect_keys}
        n_comparisons = sum(s.n_comparisons for s in strata.values())
        fractions = [
            row["control_n"] / row["total_n"] if row["total_n"] else None for row in rows
        ]

        return OperatingCharacteristics(
            replicates=len(rows),
            n_comparisons=n_comparisons,
            n_rejections=sum(s.n_success for s in strata.values()),
            strata=strata,
            platform_n=summarize(column("total_n")),
            control_n=summarize(column("control_n")),
            control_fraction=maybe_summary(fractions),
            per_arm_n=maybe_summary(pooled("per_arm_n")),
            controls_interim=maybe_summary(pooled("controls_interim")),
            controls_final=maybe_summary(pooled("controls_final")),
            n_arms=summarize(column("n_arms")),
            arms_per_1000=maybe_summary(column("arms_per_1000")),
            platform_duration=summarize(column("duration")),
            arm_duration=maybe_summary(pooled("arm_duration")),
            rejections_per_platform=summarize(column("rejections")),
            rejections_by_effect={
                key: summarize([row["rejections_by_effect"][key] for row in rows])
                for key in self.effect_keys
            },
            arms_by_effect={
                key: summarize([row["arms_by_effect"][key] for row in rows])
                for key in self.effect_keys
            },
        )


def aggregate(
    results: Iterable[ReplicateResult],
    effect_grid: Optional[Sequence[float]] = None,
) -> OperatingCharacteristics:
    """
    把重复结果汇总成工作特征

    Args:
        results: 重复结果（顺序无关）
        effect_grid: 分层效应量，默认取结果中出现过的效应量

    Raises:
        ParameterError: 输入为空
    """
    results = list(results)
    if not results:
        raise ParameterError("没有可汇总的重复结果", field="results")
    if effect_grid is None:
        effect_grid = sorted({c.true_effect for r in results for c in r.comparisons})
    accumulator = OcsAccumulator(effect_grid)
    for result in results:
        accumulator.add(result)
    return accumulator.finalize()
