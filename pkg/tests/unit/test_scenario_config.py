"""
场景配置单元测试
"""

import pytest
from pydantic import ValidationError

from platsim.allocation import AllocationKind
from platsim.config import ScenarioConfig
from platsim.trial import EffectDistribution


class TestDefaults:
    """测试基础设计的默认值"""

    def test_base_design(self):
        """每组 80 例、6 个初始组、√k 下限 35%"""
        config = ScenarioConfig()
        assert config.target_n_per_arm == 80
        assert config.initial_arms == 6
        assert config.allocation == AllocationKind.SQRT_K_CAPPED
        assert config.control_cap == 0.35
        assert config.effect_distribution == EffectDistribution.equal()
        assert config.interim_n is None
        assert config.horizon_week == 240
        assert config.mean_weekly_arrivals == pytest.approx(7.0)

    def test_presets(self):
        """满负荷和现实负荷预设"""
        assert ScenarioConfig.max_capacity().initial_arms == 6
        realistic = ScenarioConfig.realistic(target_n_per_arm=60)
        assert realistic.initial_arms == 3
        assert realistic.entry_probability_per_month == 0.2
        assert realistic.target_n_per_arm == 60

    def test_allocation_policy(self):
        """派生的分配策略"""
        policy = ScenarioConfig(allocation="sqrt_k", control_cap=0.4).allocation_policy
        assert policy.kind == AllocationKind.SQRT_K
        assert policy.cap == 0.4

    def test_frozen(self):
        """配置不可修改"""
        config = ScenarioConfig()
        with pytest.raises(ValidationError):
            config.target_n_per_arm = 10


class TestDerived:
    """测试派生量"""

    @pytest.mark.parametrize("fraction,n,expected", [(0.5, 80, 40), (0.33, 80, 27), (0.5, 75, 38)])
    def test_interim_n(self, fraction, n, expected):
        """⌈f·n⌉"""
        config = ScenarioConfig(interim_fraction=fraction, target_n_per_arm=n)
        assert config.interim_n == expected

    def test_entry_attempts(self):
        """满负荷补满空位，现实负荷每月最多一次"""
        assert ScenarioConfig.max_capacity().entry_attempts(3) == 3
        assert ScenarioConfig.realistic().entry_attempts(3) == 1
        assert ScenarioConfig.realistic().entry_attempts(0) == 0
        assert ScenarioConfig(max_entries_per_month=2).entry_attempts(5) == 2

    def test_recruitment_arrays(self):
        """招募规律的数组形式"""
        counts, probs = ScenarioConfig().recruitment_arrays
        assert counts.tolist() == [6, 7, 8]
        assert probs.tolist() == pytest.approx([0.05, 0.9, 0.05])

    def test_trend_model(self):
        """时间趋势参数"""
        assert ScenarioConfig(time_trend=None).time_trend == 0.0
        assert ScenarioConfig(time_trend=0.1).time_trend_model.step_fraction == 0.1


class TestValidation:
    """测试配置校验"""

    def test_futility_requires_interim(self):
        """无效性边界需要期中分析"""
        with pytest.raises(ValidationError):
            ScenarioConfig(futility_boundary=0.3)
        ScenarioConfig(futility_boundary=0.3, interim_fraction=0.5)

    def test_capacity_covers_initial(self):
        """并发上限不能小于初始组数"""
        with pytest.raises(ValidationError):
            ScenarioConfig(initial_arms=6, max_concurrent_arms=4)

    def test_capacity_default_checked(self):
        """并发上限取默认值 6 时同样校验"""
        with pytest.raises(ValidationError) as exc_info:
            ScenarioConfig(initial_arms=8)
        assert exc_info.value.errors()[0]["loc"] == ("max_concurrent_arms",)
        assert ScenarioConfig(initial_arms=8, max_concurrent_arms=8).initial_arms == 8

    @pytest.mark.parametrize(
        "law",
        [{}, {7: 0.5}, {-1: 1.0}, {0: 1.0}, {7: 1.5, 8: -0.5}],
    )
    def test_recruitment_law(self, law):
        """空、概率和不为 1、负人数、恒为 0、概率越界"""
        with pytest.raises(ValidationError):
            ScenarioConfig(recruitment_law=law)

    def test_effect_distribution_forms(self):
        """预设名称或 {d: θ} 映射"""
        pessimistic = ScenarioConfig(effect_distribution="pessimistic").effect_distribution
        assert pessimistic.probabilities == (0.5, 0.3, 0.1, 0.1)
        config = ScenarioConfig(effect_distribution={0.5: 0.5, 0.0: 0.5})
        assert config.effect_distribution.effects == (0.0, 0.5)

    def test_effect_needs_calibration(self):
        """效应量必须在 delta_map 中"""
        with pytest.raises(ValidationError) as exc_info:
            ScenarioConfig(effect_distribution={0.0: 0.5, 0.3: 0.5})
        assert exc_info.value.errors()[0]["loc"] == ("calibration",)

    def test_custom_delta_map(self):
        """自定义 delta_map 后可以使用新的效应量"""
        config = ScenarioConfig(
            effect_distribution={0.0: 0.5, 0.3: 0.5},
            calibration={"delta_map": {0.0: 0.0, 0.3: 3.4}},
        )
        assert config.effect_distribution.effects == (0.0, 0.3)

    @pytest.mark.parametrize(
        "field,value",
        [
            ("target_n_per_arm", 1),
            ("initial_arms", 0),
            ("entry_horizon_months", 0),
            ("control_cap", 1.0),
            ("interim_fraction", 1.0),
            ("alpha", 0.0),
            ("replicates", 0),
            ("master_seed", -1),
            ("entry_probability_per_month", 1.5),
        ],
    )
    def test_ranges(self, field, value):
        """取值范围"""
        with pytest.raises(ValidationError):
            ScenarioConfig(**{field: value})

    def test_unknown_field(self):
        """未知字段"""
        with pytest.raises(ValidationError):
            ScenarioConfig(arms=3)
