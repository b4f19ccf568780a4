"""
试验领域模型单元测试：效应量分布、试验组状态、患者记录、时间段
"""

from collections import Counter

import numpy as np
import pytest
from pydantic import ValidationError

from platsim.errors import ArmStateError, ParameterError, PeriodError
from platsim.trial import (
    CONTROL,
    Arm,
    ArmStatus,
    ComparisonResult,
    Decision,
    EffectDistribution,
    PatientLog,
    PeriodTracker,
    advance_period,
    draw_effect,
    effect_key,
    is_month_start,
)


class TestCalendar:
    """测试周/月换算"""

    def test_month_starts(self):
        """每月第一周为 1, 5, 9, ..."""
        assert [w for w in range(1, 14) if is_month_start(w)] == [1, 5, 9, 13]
        assert is_month_start(237)
        assert not is_month_start(240)
        assert not is_month_start(0)

    def test_effect_key(self):
        """效应量文本键"""
        assert [effect_key(d) for d in (0.0, 0.2, 0.35, 0.5)] == ["0", "0.2", "0.35", "0.5"]


class TestEffectDistribution:
    """测试效应量分布"""

    def test_presets(self):
        """预设分布"""
        assert EffectDistribution.equal().probabilities == (0.25, 0.25, 0.25, 0.25)
        assert EffectDistribution.pessimistic().probabilities == (0.5, 0.3, 0.1, 0.1)
        assert EffectDistribution.preset("pessimistic").name == "pessimistic"
        assert EffectDistribution(effects=(0.0, 0.5), probabilities=(0.5, 0.5)).name is None

    def test_unknown_preset(self):
        """未知预设"""
        with pytest.raises(ValueError):
            EffectDistribution.preset("optimistic")

    @pytest.mark.parametrize(
        "effects,probabilities",
        [
            ((0.0, 0.2), (0.5, 0.6)),
            ((0.0, 0.2), (1.0,)),
            ((0.2, 0.2), (0.5, 0.5)),
            ((0.0, 0.2), (1.5, -0.5)),
        ],
    )
    def test_invalid(self, effects, probabilities):
        """概率之和、长度、重复值、范围"""
        with pytest.raises(ValidationError):
            EffectDistribution(effects=effects, probabilities=probabilities)

    def test_degenerate_draw(self, rng):
        """θ = (1, 0, 0, 0) 时总是抽到 0"""
        dist = EffectDistribution(effects=(0.0, 0.2, 0.35, 0.5), probabilities=(1.0, 0.0, 0.0, 0.0))
        assert {draw_effect(rng, dist) for _ in range(200)} == {0.0}

    @pytest.mark.parametrize("preset", ["equal", "pessimistic"])
    def test_draw_frequencies(self, rng, preset):
        """10^5 次抽样的频率与 θ 相差不超过 0.01"""
        dist = EffectDistribution.preset(preset)
        counts = Counter(draw_effect(rng, dist) for _ in range(100_000))
        for d, theta in zip(dist.effects, dist.probabilities):
            assert counts[d] / 100_000 == pytest.approx(theta, abs=0.01)


class TestArm:
    """测试试验组状态机"""

    def test_enrollment_until_full(self):
        """入组到目标样本量后不能再入组"""
        arm = Arm(arm_id=1, entry_week=1, true_effect=0.2, target_n=3)
        for _ in range(3):
            arm.record_enrollment()
        assert arm.is_full
        with pytest.raises(ArmStateError):
            arm.record_enrollment()

    def test_close(self):
        """结束后记录离开周和持续时间"""
        arm = Arm(arm_id=2, entry_week=5, true_effect=0.0, target_n=10)
        arm.close(ArmStatus.STOPPED_FUTILITY, 12)
        assert not arm.is_enrolling
        assert arm.exit_week == 12
        assert arm.duration_weeks == 8

    def test_terminal_state_is_final(self):
        """终止状态不能再转换"""
        arm = Arm(arm_id=1, entry_week=1, true_effect=0.0, target_n=10)
        arm.close(ArmStatus.COMPLETED_FAILURE, 20)
        with pytest.raises(ArmStateError):
            arm.close(ArmStatus.COMPLETED_SUCCESS, 21)
        with pytest.raises(ArmStateError):
            arm.record_enrollment()

    def test_illegal_transitions(self):
        """不能回到 enrolling，离开周不能早于进入周"""
        arm = Arm(arm_id=1, entry_week=9, true_effect=0.0, target_n=10)
        with pytest.raises(ArmStateError):
            arm.close(ArmStatus.ENROLLING, 10)
        with pytest.raises(ArmStateError):
            arm.close(ArmStatus.COMPLETED_FAILURE, 8)


class TestPatientLog:
    """测试列式患者记录"""

    def _fill(self, log: PatientLog, weeks: int) -> None:
        for week in range(1, weeks + 1):
            assignments = np.array([CONTROL, 1, 2])
            log.append_batch(
                week, week // 2, assignments, np.full(3, 30.0 + week), np.full(3, 20.0)
            )

    def test_growth_keeps_data(self):
        """超过初始容量后数据不丢失"""
        log = PatientLog(capacity=2)
        self._fill(log, 10)
        assert len(log) == 30
        assert log.view("week")[0] == 1
        assert log.view("week")[-1] == 10
        assert log.view("baseline")[-1] == pytest.approx(40.0)

    def test_zero_capacity(self):
        """容量为 0 也能增长"""
        log = PatientLog(capacity=0)
        self._fill(log, 1)
        assert len(log) == 3

    def test_max_patients(self):
        """超过患者上限时报错，已有记录不变"""
        log = PatientLog(capacity=2, max_patients=6)
        self._fill(log, 2)
        assert len(log) == 6
        with pytest.raises(ParameterError) as exc_info:
            self._fill(log, 1)
        assert exc_info.value.field == "max_patients"
        assert len(log) == 6
        assert len(log.week) == 6

    def test_capacity_above_max(self):
        """初始容量不能超过上限"""
        with pytest.raises(ParameterError):
            PatientLog(capacity=10, max_patients=5)

    def test_records(self):
        """行视图"""
        log = PatientLog()
        self._fill(log, 2)
        record = log.record(3)
        assert record.patient_id == 3
        assert record.week == 2
        assert record.period_id == 1
        assert record.is_control
        assert len(list(log)) == 6
        assert [r.assignment for r in log.records(np.array([1, 2]))] == [1, 2]

    def test_control_count(self):
        """对照计数"""
        log = PatientLog()
        self._fill(log, 4)
        assert log.control_count == 4

    def test_empty_batch(self):
        """空批次不改变记录"""
        log = PatientLog()
        log.append_batch(1, 0, np.array([], dtype=np.int64), np.array([]), np.array([]))
        assert len(log) == 0


class TestComparisonResult:
    """测试比较结果"""

    def test_rejected(self):
        """success 即拒绝原假设"""
        common = dict(
            arm_id=1, true_effect=0.2, n_treatment=80, entry_week=1, exit_week=30, duration_weeks=30
        )
        assert ComparisonResult(decision=Decision.SUCCESS, p_final=0.01, **common).rejected
        assert not ComparisonResult(decision=Decision.FAILURE, p_final=0.3, **common).rejected

    def test_p_value_range(self):
        """p 值必须在 [0, 1]"""
        with pytest.raises(ValidationError):
            ComparisonResult(
                arm_id=1,
                true_effect=0.0,
                decision=Decision.FAILURE,
                p_final=1.2,
                n_treatment=1,
                entry_week=1,
                exit_week=1,
                duration_weeks=1,
            )


class TestPeriods:
    """测试时间段簿记"""

    def test_entry_starts_new_period(self):
        """组 4 在第 12 周进入，时间段 1 从第 12 周开始"""
        tracker = PeriodTracker()
        tracker.start(1, {1, 2, 3})
        period = advance_period(tracker, 12, {1, 2, 3, 4})
        assert period.period_id == 1
        assert period.start_week == 12
        assert tracker.period_at(11).period_id == 0
        assert tracker.period_at(12).period_id == 1
        assert tracker.period_at(500).period_id == 1

    def test_unchanged_set_rejected(self):
        """集合未变化时不能推进"""
        tracker = PeriodTracker()
        tracker.start(1, {1, 2})
        with pytest.raises(PeriodError):
            advance_period(tracker, 5, {2, 1})

    def test_one_change_per_week(self):
        """同一周只能推进一次"""
        tracker = PeriodTracker()
        tracker.start(1, {1})
        advance_period(tracker, 5, {1, 2})
        with pytest.raises(PeriodError):
            advance_period(tracker, 5, {2})

    def test_simultaneous_entry_and_exit(self):
        """同一周一组离开、一组进入只增加一次"""
        tracker = PeriodTracker()
        tracker.start(1, {1, 2, 3})
        advance_period(tracker, 9, {1, 3, 5})
        assert len(tracker) == 2

    def test_misuse(self):
        """未开始时访问当前时间段、重复开始、早于起点的查询"""
        tracker = PeriodTracker()
        with pytest.raises(PeriodError):
            _ = tracker.current
        tracker.start(3, {1})
        with pytest.raises(PeriodError):
            tracker.start(4, {1, 2})
        with pytest.raises(PeriodError):
            tracker.period_at(2)
