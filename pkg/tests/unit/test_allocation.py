"""
分配比例与随机化单元测试
"""

import math
from collections import Counter

import numpy as np
import pytest
from pydantic import ValidationError

from platsim.allocation import (
    AllocationKind,
    AllocationPolicy,
    BlockRandomizer,
    BlockState,
    SimpleRandomizer,
    control_ratio,
    control_spots_x,
    create_randomizer,
    generate_block,
    next_assignment_block,
    next_assignment_simple,
    treatment_ratio,
)
from platsim.errors import NoArmsError, ParameterError
from platsim.trial import CONTROL

BALANCED = AllocationPolicy(kind=AllocationKind.BALANCED)
K_ALLOC = AllocationPolicy(kind=AllocationKind.K_ALLOC)
SQRT_K = AllocationPolicy(kind=AllocationKind.SQRT_K)
CAPPED = AllocationPolicy(kind=AllocationKind.SQRT_K_CAPPED, cap=0.35)


class TestControlRatio:
    """测试对照比例"""

    def test_examples(self):
        """k = 6 时四种分配方式"""
        assert control_ratio(BALANCED, 6) == pytest.approx(1 / 7)
        assert control_ratio(SQRT_K, 6) == pytest.approx(0.2899, abs=1e-4)
        assert control_ratio(CAPPED, 6) == pytest.approx(0.35)
        for k in (1, 3, 6):
            assert control_ratio(K_ALLOC, k) == 0.5

    def test_cap_is_floor_only(self):
        """下限不会降低 √k 比例"""
        # k = 1 时 √k 比例为 0.5，高于下限
        assert control_ratio(CAPPED, 1) == pytest.approx(0.5)
        assert control_ratio(CAPPED, 6) >= control_ratio(SQRT_K, 6)

    def test_treatment_share(self):
        """每个试验组 (1 - r) / k，总和为 1"""
        for policy in (BALANCED, K_ALLOC, SQRT_K, CAPPED):
            for k in range(1, 8):
                total = control_ratio(policy, k) + k * treatment_ratio(policy, k)
                assert total == pytest.approx(1.0, abs=1e-12)

    def test_no_arms(self):
        """k = 0"""
        with pytest.raises(NoArmsError):
            control_ratio(CAPPED, 0)
        with pytest.raises(NoArmsError):
            control_spots_x(BALANCED, 0)

    def test_cap_range(self):
        """cap ∈ [0, 1)"""
        with pytest.raises(ValidationError):
            AllocationPolicy(kind=AllocationKind.SQRT_K_CAPPED, cap=1.0)


class TestControlSpots:
    """测试对照位数 x"""

    def test_examples(self):
        """x 的典型取值"""
        assert control_spots_x(SQRT_K, 3) == pytest.approx(1.73, abs=0.005)
        assert control_spots_x(CAPPED, 6) == pytest.approx(3.2308, abs=1e-4)
        assert control_spots_x(BALANCED, 4) == 1.0
        assert control_spots_x(K_ALLOC, 5) == 5.0

    @pytest.mark.parametrize("policy", [BALANCED, K_ALLOC, SQRT_K, CAPPED])
    def test_round_trip(self, policy):
        """r = x / (k + x)"""
        for k in range(1, 11):
            x = control_spots_x(policy, k)
            assert x / (k + x) == pytest.approx(control_ratio(policy, k), abs=1e-12)


class TestGenerateBlock:
    """测试区组生成"""

    def test_fractional_block_lengths(self, rng):
        """k = 3, x = √3：长度 4 的概率约 0.27，长度 5 约 0.73"""
        lengths = Counter(len(generate_block(rng, [1, 2, 3], math.sqrt(3))) for _ in range(10_000))
        assert set(lengths) == {4, 5}
        assert lengths[4] / 10_000 == pytest.approx(0.27, abs=0.02)

    def test_integer_x(self, rng):
        """k = 3, x = 3：总是 6 个位置、3 个对照"""
        for _ in range(100):
            block = generate_block(rng, [3, 1, 2], 3.0)
            assert len(block) == 6
            assert block.count(CONTROL) == 3
            assert sorted(a for a in block if a != CONTROL) == [1, 2, 3]

    def test_composition(self, rng):
        """每个活跃组恰好一次，对照 ⌊x⌋ 或 ⌊x⌋ + 1 个"""
        for _ in range(500):
            block = generate_block(rng, [2, 5, 7, 8, 9, 11], 3.2308)
            arms = [a for a in block if a != CONTROL]
            assert sorted(arms) == [2, 5, 7, 8, 9, 11]
            assert block.count(CONTROL) in (3, 4)

    def test_permutation_uniform(self, rng):
        """k = 1, x = 1：两种顺序各约一半"""
        orders = Counter(tuple(generate_block(rng, [1], 1.0)) for _ in range(10_000))
        assert set(orders) == {(1, CONTROL), (CONTROL, 1)}
        assert orders[(1, CONTROL)] / 10_000 == pytest.approx(0.5, abs=0.02)

    def test_integer_x_uses_no_extra_draw(self, rng_factory):
        """整数 x 不额外消耗随机数：与直接排列的结果一致"""
        a, b = rng_factory(5), rng_factory(5)
        block = generate_block(a, [1, 2], 2.0)
        assert block == b.permutation([1, 2, CONTROL, CONTROL])

    def test_invalid(self, rng):
        """没有活跃组或 x 为负"""
        with pytest.raises(NoArmsError):
            generate_block(rng, [], 1.0)
        with pytest.raises(ParameterError):
            generate_block(rng, [1], -0.5)


class TestBlockRandomization:
    """测试区组随机化"""

    def test_each_block_contains_each_arm_once(self, rng):
        """按区组切分后，每个区组各组恰好一次"""
        state = BlockState()
        blocks = []
        current = -1
        for _ in range(4 + 5 + 4 + 500):
            assignment = next_assignment_block(state, rng, [1, 2, 3], SQRT_K)
            if state.blocks_generated != current:
                blocks.append([])
                current = state.blocks_generated
            blocks[-1].append(assignment)
        # 最后一个区组可能没有取完
        for block in blocks[:-1]:
            assert sorted(a for a in block if a != CONTROL) == [1, 2, 3]
            assert block.count(CONTROL) in (1, 2)

    def test_arm_set_change_discards_block(self, rng):
        """活跃集合变化时丢弃剩余位置"""
        state = BlockState()
        next_assignment_block(state, rng, [1, 2, 3], K_ALLOC)
        assert state.blocks_generated == 1
        next_assignment_block(state, rng, [1, 3], K_ALLOC)
        assert state.blocks_generated == 2
        assert state.arm_set_snapshot == (1, 3)
        assert 2 not in state.pending

    def test_long_run_control_fraction(self, rng):
        """√k 下限 35%，k = 6，10^5 次分配后对照比例 0.35 ± 0.005"""
        randomizer = BlockRandomizer(CAPPED)
        arms = [1, 2, 3, 4, 5, 6]
        controls = sum(randomizer.assign(rng, arms) == CONTROL for _ in range(100_000))
        assert controls / 100_000 == pytest.approx(0.35, abs=0.005)

    @pytest.mark.parametrize("policy,arms", [(K_ALLOC, [1, 2, 3]), (BALANCED, [4, 7])])
    def test_bounded_discrepancy_integer_x(self, rng, policy, arms):
        """整数 x 时对照数与目标的偏差不超过 ⌊x⌋ + 1 + k"""
        k = len(arms)
        x = control_spots_x(policy, k)
        r = control_ratio(policy, k)
        bound = math.floor(x) + 1 + k
        state = BlockState()
        controls = 0
        for n in range(1, 3001):
            controls += next_assignment_block(state, rng, arms, policy) == CONTROL
            assert abs(controls - r * n) <= bound

    def test_no_arms(self, rng):
        """没有活跃组"""
        with pytest.raises(NoArmsError):
            next_assignment_block(BlockState(), rng, [], CAPPED)

    def test_reset(self, rng):
        """reset 丢弃状态"""
        randomizer = BlockRandomizer(CAPPED)
        randomizer.assign(rng, [1, 2])
        randomizer.reset()
        assert randomizer.state.blocks_generated == 0
        assert not randomizer.state.pending


class TestSimpleRandomization:
    """测试简单随机化"""

    def test_control_frequency(self, rng):
        """k = 6，10^5 次分配后对照频率 0.35 ± 0.005"""
        arms = [1, 2, 3, 4, 5, 6]
        draws = [next_assignment_simple(rng, arms, CAPPED) for _ in range(100_000)]
        assert draws.count(CONTROL) / 100_000 == pytest.approx(0.35, abs=0.005)
        assert set(draws) == {CONTROL, *arms}

    def test_two_options(self, rng):
        """k = 1 平衡分配，两个选项各约一半"""
        draws = [next_assignment_simple(rng, [9], BALANCED) for _ in range(10_000)]
        assert draws.count(9) / 10_000 == pytest.approx(0.5, abs=0.02)

    def test_more_variable_than_blocks(self, rng_factory):
        """每 100 名患者的对照数，简单随机化的方差大于区组随机化"""
        arms = [1, 2, 3, 4, 5, 6]

        def control_counts(randomizer, rng):
            counts = []
            for _ in range(300):
                counts.append(sum(randomizer.assign(rng, arms) == CONTROL for _ in range(100)))
            return np.var(counts)

        simple = control_counts(SimpleRandomizer(CAPPED), rng_factory(1))
        block = control_counts(BlockRandomizer(CAPPED), rng_factory(2))
        assert simple > block

    def test_no_arms(self, rng):
        """没有活跃组"""
        with pytest.raises(NoArmsError):
            next_assignment_simple(rng, [], BALANCED)


class TestCreateRandomizer:
    """测试随机化器工厂"""

    def test_by_name(self):
        """按名称创建"""
        assert isinstance(create_randomizer("simple", CAPPED), SimpleRandomizer)
        assert isinstance(create_randomizer("modified_block", CAPPED), BlockRandomizer)

    def test_unknown(self):
        """未知名称"""
        with pytest.raises(ParameterError):
            create_randomizer("urn", CAPPED)
