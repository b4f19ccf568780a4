"""
连续双臂试验（对照设计）

一个接一个地进行独立的 1:1 双臂试验，使用相同的招募规律、结局模型和期中/无效性规则。
每个试验恰好入组 2n 例（最后一周多余的到达者不入组）；前一个试验结束后，
下一个试验在之后的第一个月初开始，受进入期限和进入门槛（r = 0.5, k' = 1）约束。
患者的时间段编号即试验序号。
"""

from typing import List, Optional

import numpy as np

from platsim.allocation.policy import AllocationKind, AllocationPolicy
from platsim.allocation.randomizer import BlockRandomizer
from platsim.analysis.ancova import AnalysisDataset, AnalysisKind, fit_ancova
from platsim.analysis.decisions import (
    FinalDecision,
    InterimDecision,
    final_decision,
    interim_decision,
)
from platsim.config.scenario import ScenarioConfig, SimulationMode
from platsim.engine.events import EventKind, EventLog
from platsim.engine.results import ReplicateResult
from platsim.errors import ConfigError
from platsim.outcome.model import OutcomeModel
from platsim.stats.rng import RngStream
from platsim.trial.state import (
    CONTROL,
    Arm,
    ArmStatus,
    ComparisonResult,
    Decision,
    PatientLog,
    draw_effect,
    is_month_start,
)

ONE_TO_ONE = AllocationPolicy(kind=AllocationKind.BALANCED)


class TwoArmSeriesEngine:
    """连续双臂试验的单次重复"""

    def __init__(
        self,
        config: ScenarioConfig,
        rng: RngStream,
        record_events: bool = False,
        outcome_model: Optional[OutcomeModel] = None,
    ):
        if config.mode != SimulationMode.TWO_ARM_SERIES:
            raise ConfigError(f"TwoArmSeriesEngine 不支持模式 {config.mode.value}", field="mode")
        self.config = config
        self.rng = rng
        self.model = outcome_model or OutcomeModel(config.calibration, config.time_trend_model)
        self.randomizer = BlockRandomizer(ONE_TO_ONE)
        self.patients = PatientLog()
        self.events = EventLog(enabled=record_events)
        self.comparisons: List[ComparisonResult] = []
        self._arrival_counts, self._arrival_probs = config.recruitment_arrays

        self.current: Optional[Arm] = None
        self.trial_index = -1
        self.last_exit_week = 0
        self.n_trial = 0
        self.p_interim: Optional[float] = None
        self.n_controls_interim: Optional[int] = None

    def _gate_open(self, week: int) -> bool:
        if self.config.min_expected_accrual_fraction <= 0:
            return True
        remaining_weeks = self.config.horizon_week - week + 1
        projected = remaining_weeks * self.config.mean_weekly_arrivals * 0.5
        return projected >= self.config.min_expected_accrual_fraction * self.config.target_n_per_arm

    def _maybe_start_trial(self, week: int) -> None:
        if self.current is not None:
            return
        if week != 1:
            if not is_month_start(week) or week > self.config.horizon_week:
                return
            if week <= self.last_exit_week or not self._gate_open(week):
                return

        self.trial_index += 1
        self.current = Arm(
            arm_id=self.trial_index + 1,
            entry_week=week,
            true_effect=draw_effect(self.rng, self.config.effect_distribution),
            target_n=self.config.target_n_per_arm,
        )
        self.randomizer.reset()
        self.n_trial = 0
        self.p_interim = None
        self.n_controls_interim = None
        self.events.record(
            week,
            EventKind.ENTRY,
            arm_id=self.current.arm_id,
            period_id=self.trial_index,
            detail=f"d={self.current.true_effect:g}",
        )

    def _enroll_week(self, week: int) -> None:
        arm = self.current
        if arm is None:
            return
        arrivals = int(self.rng.generator.choice(self._arrival_counts, p=self._arrival_probs))
        room = 2 * arm.target_n - self.n_trial
        assignments = [
            self.randomizer.assign(self.rng, [arm.arm_id]) for _ in range(min(arrivals, room))
        ]
        if not assignments:
            return
        for a in assignments:
            if a != CONTROL:
                arm.record_enrollment()
        self.n_trial += len(assignments)

        assigned = np.asarray(assignments, dtype=np.int64)
        delta = self.model.delta(arm.true_effect)
        deltas = np.where(assigned == CONTROL, 0.0, delta)
        baseline, week6 = self.model.generate_outcomes(self.rng, deltas, self.trial_index)
        self.patients.append_batch(week, self.trial_index, assigned, baseline, week6)

    def _dataset(self, arm: Arm, kind: AnalysisKind) -> AnalysisDataset:
        log = self.patients
        rows = log.view("period_id") == self.trial_index
        return AnalysisDataset(
            week6=log.view("week6")[rows],
            baseline=log.view("baseline")[rows],
            group=(log.view("assignment")[rows] == arm.arm_id).astype(np.int64),
            period_id=log.view("period_id")[rows],
            arm_id=arm.arm_id,
            kind=kind,
        )

    def _finish(
        self,
        week: int,
        status: ArmStatus,
        decision: Decision,
        p_final: Optional[float],
        n_controls_final: Optional[int],
    ) -> None:
        arm = self.current
        arm.close(status, week)
        self.comparisons.append(
            ComparisonResult(
                arm_id=arm.arm_id,
                true_effect=arm.true_effect,
                decision=decision,
                p_interim=self.p_interim,
                p_final=p_final,
                n_treatment=arm.enrolled,
                n_concurrent_controls_interim=self.n_controls_interim,
                n_concurrent_controls_final=n_controls_final,
                entry_week=arm.entry_week,
                exit_week=week,
                duration_weeks=arm.duration_weeks,
            )
        )
        self.events.record(week, EventKind.EXIT, arm_id=arm.arm_id, detail=decision.value)
        self.last_exit_week = week
        self.current = None

    def _analyse(self, week: int) -> None:
        arm = self.current
        if arm is None:
            return

        interim_n = self.config.interim_n
        if interim_n is not None and self.p_interim is None and self.n_trial >= 2 * interim_n:
            data = self._dataset(arm, AnalysisKind.INTERIM)
            fit = fit_ancova(data, self.config.analysis_covariates)
            self.p_interim = fit.p_one_sided
            self.n_controls_interim = data.n_control
            self.events.record(
                week, EventKind.INTERIM, arm_id=arm.arm_id, n_t=data.n_treatment,
                n_c=data.n_control, beta=fit.beta_hat, se=fit.se_beta, p=fit.p_one_sided,
            )
            boundary = self.config.futility_boundary
            if (
                boundary is not None
                and interim_decision(fit, boundary) == InterimDecision.STOP_FUTILITY
            ):
                self._finish(
                    week, ArmStatus.STOPPED_FUTILITY, Decision.STOPPED_FUTILITY, None, None
                )
                return

        if self.n_trial >= 2 * arm.target_n:
            data = self._dataset(arm, AnalysisKind.FINAL)
            fit = fit_ancova(data, self.config.analysis_covariates)
            self.events.record(
                week, EventKind.FINAL, arm_id=arm.arm_id, n_t=data.n_treatment,
                n_c=data.n_control, beta=fit.beta_hat, se=fit.se_beta, p=fit.p_one_sided,
            )
            if final_decision(fit, self.config.alpha) == FinalDecision.SUCCESS:
                self._finish(
                    week,
                    ArmStatus.COMPLETED_SUCCESS,
                    Decision.SUCCESS,
                    fit.p_one_sided,
                    data.n_control,
                )
            else:
                self._finish(
                    week,
                    ArmStatus.COMPLETED_FAILURE,
                    Decision.FAILURE,
                    fit.p_one_sided,
                    data.n_control,
                )

    def run(self) -> ReplicateResult:
        week = 1
        while week <= self.config.horizon_week or self.current is not None:
            self._maybe_start_trial(week)
            self._enroll_week(week)
            self._analyse(week)
            week += 1

        comparisons = sorted(self.comparisons, key=lambda c: c.arm_id)
        return ReplicateResult(
            replicate=self.rng.stream_id,
            comparisons=comparisons,
            total_platform_n=len(self.patients),
            total_control_n=self.patients.control_count,
            n_arms_tested=len(comparisons),
            platform_duration_weeks=max((c.exit_week for c in comparisons), default=0),
            periods=self.trial_index + 1,
            events=self.events.events,
        )


def run_two_arm_series(
    config: ScenarioConfig,
    rng: RngStream,
    record_events: bool = False,
    outcome_model: Optional[OutcomeModel] = None,
) -> ReplicateResult:
    """运行一次连续双臂试验重复"""
    return TwoArmSeriesEngine(config, rng, record_events, outcome_model).run()
