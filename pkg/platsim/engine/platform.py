"""
平台试验引擎

离散时间（周）的单次重复循环。每周 w 依次执行：
1. 月初（w ≡ 1 mod 4）且 w <= 进入期限时尝试新试验组进入；
2. 重新计算活跃集合，变化时推进时间段；
3. 抽取本周到达人数，逐个随机化到当前入组中的试验组或对照，并立即生成结局；
4. 首次达到 ⌈f·n⌉ 例的试验组做期中分析（本组全部患者 + 已入组的同期对照）；
5. 达到 n 例的试验组做最终分析（本组 n 例 + [进入周, w] 内的全部对照）。

所有试验组都有决策且不再可能进入新组时结束。
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from platsim.allocation.policy import control_ratio
from platsim.allocation.randomizer import BaseRandomizer, create_randomizer
from platsim.analysis.ancova import AnalysisDataset, AnalysisKind, AncovaFit, fit_ancova
from platsim.analysis.decisions import (
    FinalDecision,
    InterimDecision,
    final_decision,
    interim_decision,
)
from platsim.config.scenario import ScenarioConfig, SimulationMode
from platsim.engine.events import EventKind, EventLog
from platsim.engine.results import ReplicateResult
from platsim.errors import ConfigError, ParameterError
from platsim.outcome.model import OutcomeModel
from platsim.stats.rng import RngStream
from platsim.trial.periods import PeriodTracker, advance_period
from platsim.trial.state import (
    CONTROL,
    Arm,
    ArmStatus,
    ComparisonResult,
    Decision,
    PatientLog,
    PatientRecord,
    draw_effect,
    is_month_start,
)
from platsim.utils.logging import get_logger

logger = get_logger(__name__)


@dataclass
class ArmProgress:
    """试验组的分析进度"""

    interim_done: bool = False
    p_interim: Optional[float] = None
    n_controls_interim: Optional[int] = None


@dataclass
class PlatformState:
    """单次重复的平台状态"""

    arms: Dict[int, Arm] = field(default_factory=dict)
    progress: Dict[int, ArmProgress] = field(default_factory=dict)
    patients: PatientLog = field(default_factory=PatientLog)
    periods: PeriodTracker = field(default_factory=PeriodTracker)
    comparisons: List[ComparisonResult] = field(default_factory=list)
    week: int = 0
    next_arm_id: int = 1

    def enrolling_ids(self) -> List[int]:
        """状态为 enrolling 的试验组（按编号升序）"""
        return sorted(arm_id for arm_id, arm in self.arms.items() if arm.is_enrolling)

    def open_ids(self) -> List[int]:
        """仍可随机化的试验组：enrolling 且未满"""
        return sorted(
            arm_id for arm_id, arm in self.arms.items() if arm.is_enrolling and not arm.is_full
        )

    def add_arm(self, week: int, true_effect: float, target_n: int) -> Arm:
        arm = Arm(
            arm_id=self.next_arm_id,
            entry_week=week,
            true_effect=true_effect,
            target_n=target_n,
        )
        self.arms[arm.arm_id] = arm
        self.progress[arm.arm_id] = ArmProgress()
        self.next_arm_id += 1
        return arm


def concurrent_control_mask(log: PatientLog, arm: Arm, through_week: int) -> np.ndarray:
    """同期对照的布尔掩码：entry_week <= week <= min(through_week, exit_week)"""
    last_week = through_week if arm.exit_week is None else min(through_week, arm.exit_week)
    weeks = log.view("week")
    return (log.view("assignment") == CONTROL) & (weeks >= arm.entry_week) & (weeks <= last_week)


def concurrent_controls(log: PatientLog, arm: Arm, through_week: int) -> List[PatientRecord]:
    """
    试验组的同期对照患者

    Args:
        log: 患者记录
        arm: 试验组
        through_week: 截止周（含）

    Returns:
        在试验组入组窗口内随机化的对照患者
    """
    mask = concurrent_control_mask(log, arm, through_week)
    return log.records(np.flatnonzero(mask))


def try_enter_arm(
    state: PlatformState,
    rng: RngStream,
    config: ScenarioConfig,
    week: int,
    events: Optional[EventLog] = None,
) -> Optional[Arm]:
    """
    月初尝试让一个新试验组进入

    进入需同时满足：有空位；Bernoulli(进入概率) 成功（概率为 1 时不抽随机数）；
    预计到进入期限可入组 (剩余周数 × 平均每周到达 × (1-r')/k') 不少于门槛 × n。

    Returns:
        新进入的 Arm，未进入时为 None

    Raises:
        ParameterError: week 不是月初
    """
    if not is_month_start(week):
        raise ParameterError(f"第 {week} 周不是月初", field="week")
    if week > config.horizon_week:
        return None

    active = len(state.enrolling_ids())
    if active >= config.max_concurrent_arms:
        return None

    p_entry = config.entry_probability_per_month
    if p_entry < 1.0 and not rng.random() < p_entry:
        return None

    if config.min_expected_accrual_fraction > 0:
        k_new = active + 1
        r_new = control_ratio(config.allocation_policy, k_new)
        remaining_weeks = config.horizon_week - week + 1
        projected = remaining_weeks * config.mean_weekly_arrivals * (1.0 - r_new) / k_new
        required = config.min_expected_accrual_fraction * config.target_n_per_arm
        if projected < required:
            logger.debug("进入门槛未满足", week=week, projected=projected, required=required)
            return None

    arm = state.add_arm(week, draw_effect(rng, config.effect_distribution), config.target_n_per_arm)
    if events is not None:
        events.record(week, EventKind.ENTRY, arm_id=arm.arm_id, detail=f"d={arm.true_effect:g}")
    return arm


class PlatformEngine:
    """单次重复的平台试验模拟"""

    def __init__(
        self,
        config: ScenarioConfig,
        rng: RngStream,
        record_events: bool = False,
        outcome_model: Optional[OutcomeModel] = None,
    ):
        if config.mode != SimulationMode.PLATFORM:
            raise ConfigError(f"PlatformEngine 不支持模式 {config.mode.value}", field="mode")
        self.config = config
        self.rng = rng
        self.model = outcome_model or OutcomeModel(config.calibration, config.time_trend_model)
        self.randomizer: BaseRandomizer = create_randomizer(
            config.randomization, config.allocation_policy
        )
        self.state = PlatformState()
        self.events = EventLog(enabled=record_events)
        self._arrival_counts, self._arrival_probs = config.recruitment_arrays

    # 每周步骤

    def _enter_arms(self, week: int) -> None:
        if week == 1:
            for _ in range(self.config.initial_arms):
                arm = self.state.add_arm(
                    week,
                    draw_effect(self.rng, self.config.effect_distribution),
                    self.config.target_n_per_arm,
                )
                self.events.record(
                    week, EventKind.ENTRY, arm_id=arm.arm_id, detail=f"d={arm.true_effect:g}"
                )
            return

        if not is_month_start(week) or week > self.config.horizon_week:
            return
        free_slots = self.config.max_concurrent_arms - len(self.state.enrolling_ids())
        for _ in range(self.config.entry_attempts(max(free_slots, 0))):
            if try_enter_arm(self.state, self.rng, self.config, week, self.events) is None:
                break

    def _update_period(self, week: int) -> None:
        active = frozenset(self.state.enrolling_ids())
        tracker = self.state.periods
        if not tracker.started:
            period = tracker.start(week, active)
        elif active != tracker.current.active_arm_ids:
            period = advance_period(tracker, week, active)
        else:
            return
        self.events.record(
            week, EventKind.PERIOD, period_id=period.period_id, detail=str(sorted(active))
        )

    def _enroll_week(self, week: int) -> None:
        arrivals = int(self.rng.generator.choice(self._arrival_counts, p=self._arrival_probs))
        open_ids = self.state.open_ids()
        assignments: List[int] = []
        for _ in range(arrivals):
            if not open_ids:
                break
            assignment = self.randomizer.assign(self.rng, open_ids)
            if assignment != CONTROL:
                arm = self.state.arms[assignment]
                arm.record_enrollment()
                if arm.is_full:
                    open_ids = [arm_id for arm_id in open_ids if arm_id != assignment]
            assignments.append(assignment)

        if not assignments:
            return

        assigned = np.asarray(assignments, dtype=np.int64)
        deltas = np.array(
            [
                0.0 if a == CONTROL else self.model.delta(self.state.arms[a].true_effect)
                for a in assignments
            ]
        )
        period_id = self.state.periods.current.period_id
        baseline, week6 = self.model.generate_outcomes(self.rng, deltas, period_id)
        self.state.patients.append_batch(week, period_id, assigned, baseline, week6)

    def _dataset(self, arm: Arm, week: int, kind: AnalysisKind) -> AnalysisDataset:
        log = self.state.patients
        treated = log.view("assignment") == arm.arm_id
        controls = concurrent_control_mask(log, arm, week)
        rows = treated | controls
        return AnalysisDataset(
            week6=log.view("week6")[rows],
            baseline=log.view("baseline")[rows],
            group=treated[rows].astype(np.int64),
            period_id=log.view("period_id")[rows],
            arm_id=arm.arm_id,
            kind=kind,
        )

    def _record_analysis(
        self, week: int, kind: EventKind, data: AnalysisDataset, fit: AncovaFit
    ) -> None:
        self.events.record(
            week,
            kind,
            arm_id=data.arm_id,
            n_t=data.n_treatment,
            n_c=data.n_control,
            beta=fit.beta_hat,
            se=fit.se_beta,
            p=fit.p_one_sided,
        )

    def _close_arm(
        self,
        arm: Arm,
        week: int,
        status: ArmStatus,
        decision: Decision,
        p_final: Optional[float],
        n_controls_final: Optional[int],
    ) -> None:
        arm.close(status, week)
        progress = self.state.progress[arm.arm_id]
        self.state.comparisons.append(
            ComparisonResult(
                arm_id=arm.arm_id,
                true_effect=arm.true_effect,
                decision=decision,
                p_interim=progress.p_interim,
                p_final=p_final,
                n_treatment=arm.enrolled,
                n_concurrent_controls_interim=progress.n_controls_interim,
                n_concurrent_controls_final=n_controls_final,
                entry_week=arm.entry_week,
                exit_week=week,
                duration_weeks=arm.duration_weeks,
            )
        )
        self.events.record(week, EventKind.EXIT, arm_id=arm.arm_id, detail=decision.value)

    def _run_interims(self, week: int) -> None:
        interim_n = self.config.interim_n
        if interim_n is None:
            return
        for arm_id in self.state.enrolling_ids():
            arm = self.state.arms[arm_id]
            progress = self.state.progress[arm_id]
            if progress.interim_done or arm.enrolled < interim_n:
                continue

            data = self._dataset(arm, week, AnalysisKind.INTERIM)
            fit = fit_ancova(data, self.config.analysis_covariates)
            progress.interim_done = True
            progress.p_interim = fit.p_one_sided
            progress.n_controls_interim = data.n_control
            self._record_analysis(week, EventKind.INTERIM, data, fit)

            boundary = self.config.futility_boundary
            if (
                boundary is not None
                and interim_decision(fit, boundary) == InterimDecision.STOP_FUTILITY
            ):
                self._close_arm(
                    arm, week, ArmStatus.STOPPED_FUTILITY, Decision.STOPPED_FUTILITY, None, None
                )

    def _run_finals(self, week: int) -> None:
        for arm_id in self.state.enrolling_ids():
            arm = self.state.arms[arm_id]
            if not arm.is_full:
                continue
            data = self._dataset(arm, week, AnalysisKind.FINAL)
            fit = fit_ancova(data, self.config.analysis_covariates)
            self._record_analysis(week, EventKind.FINAL, data, fit)
            if final_decision(fit, self.config.alpha) == FinalDecision.SUCCESS:
                status, decision = ArmStatus.COMPLETED_SUCCESS, Decision.SUCCESS
            else:
                status, decision = ArmStatus.COMPLETED_FAILURE, Decision.FAILURE
            self._close_arm(arm, week, status, decision, fit.p_one_sided, data.n_control)

    # 主循环

    def step(self, week: int) -> None:
        """执行第 week 周"""
        self.state.week = week
        self._enter_arms(week)
        self._update_period(week)
        self._enroll_week(week)
        self._run_interims(week)
        self._run_finals(week)

    def run(self) -> ReplicateResult:
        """
        运行到所有试验组都有决策且不再可能进入新组

        Raises:
            AnalysisError: 任何一次分析退化时整个重复失败
        """
        week = 1
        while week <= self.config.horizon_week or self.state.enrolling_ids():
            self.step(week)
            week += 1
        return self.result()

    def result(self) -> ReplicateResult:
        state = self.state
        comparisons = sorted(state.comparisons, key=lambda c: c.arm_id)
        return ReplicateResult(
            replicate=self.rng.stream_id,
            comparisons=comparisons,
            total_platform_n=len(state.patients),
            total_control_n=state.patients.control_count,
            n_arms_tested=len(comparisons),
            platform_duration_weeks=max((c.exit_week for c in comparisons), default=0),
            periods=len(state.periods),
            events=self.events.events,
        )


def run_replicate(
    config: ScenarioConfig,
    rng: RngStream,
    record_events: bool = False,
    outcome_model: Optional[OutcomeModel] = None,
) -> ReplicateResult:
    """
    运行一次平台试验重复

    Args:
        config: 场景配置（mode=platform）
        rng: 本重复的随机数流
        record_events: 是否记录事件日志
        outcome_model: 预先解析的结局模型，默认由 config 构造

    Returns:
        ReplicateResult
    """
    return PlatformEngine(config, rng, record_events, outcome_model).run()
