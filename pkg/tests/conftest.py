"""
Pytest 配置和共享 fixtures
"""

import os
from pathlib import Path

import pytest

from platsim.config.scenario import ScenarioConfig
from platsim.config.settings import get_settings
from platsim.stats.rng import derive_stream

REPO_ROOT = Path(__file__).parent.parent
SCENARIO_DIR = REPO_ROOT / "scenarios"


@pytest.fixture(autouse=True)
def isolated_settings(monkeypatch):
    """每个测试使用干净的应用设置（不受外部 PLATSIM_ 环境变量影响）"""
    for key in list(os.environ):
        if key.startswith("PLATSIM_"):
            monkeypatch.delenv(key, raising=False)
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def scenario_dir():
    """随包提供的场景文件目录"""
    return SCENARIO_DIR


@pytest.fixture
def rng():
    """固定种子的随机数流"""
    return derive_stream(20240601, 0)


@pytest.fixture
def rng_factory():
    """按 (index, seed) 创建随机数流"""

    def make(index: int = 0, seed: int = 20240601):
        return derive_stream(seed, index)

    return make


@pytest.fixture
def small_config():
    """运行很快的平台场景：3 个组、每组 20 例、6 个月进入期限"""
    return ScenarioConfig(
        target_n_per_arm=20,
        initial_arms=3,
        max_concurrent_arms=3,
        entry_horizon_months=6,
        replicates=6,
        master_seed=7,
    )
