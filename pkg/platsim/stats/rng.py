"""
随机数流

每个重复（replicate）拥有独立的随机数流，由 (master_seed, replicate_index) 唯一确定，
与线程数和执行顺序无关。底层使用 numpy 的 SeedSequence + PCG64。
"""

from dataclasses import dataclass, field
from typing import Tuple

import numpy as np

from platsim.errors import ParameterError

SEED_MAX = 2**64 - 1


@dataclass
class RngStream:
    """单个重复独占的随机数流（不可跨线程共享）"""

    generator: np.random.Generator = field(repr=False)
    stream_id: int = 0

    def random(self) -> float:
        """[0, 1) 上的均匀分布"""
        return float(self.generator.random())

    def integers(self, n: int) -> int:
        """{0, ..., n-1} 上的均匀整数"""
        return int(self.generator.integers(n))

    def choice(self, n: int, p: np.ndarray) -> int:
        """按概率 p 抽取 {0, ..., n-1} 中的一个"""
        return int(self.generator.choice(n, p=p))

    def permutation(self, items: list) -> list:
        """返回随机排列后的新列表"""
        order = self.generator.permutation(len(items))
        return [items[i] for i in order]

    def standard_normal(self, size: int) -> np.ndarray:
        return self.generator.standard_normal(size)


def derive_stream(master_seed: int, replicate_index: int) -> RngStream:
    """
    从主种子派生某个重复的随机数流

    Args:
        master_seed: 64 位非负主种子
        replicate_index: 重复编号

    Returns:
        RngStream，stream_id = replicate_index

    Raises:
        ParameterError: 种子或编号越界
    """
    if not 0 <= master_seed <= SEED_MAX:
        raise ParameterError(
            f"master_seed 必须在 [0, 2^64) 内: {master_seed}", field="master_seed"
        )
    if replicate_index < 0:
        raise ParameterError(
            f"replicate_index 不能为负: {replicate_index}", field="replicate_index"
        )

    seed_seq = np.random.SeedSequence(master_seed, spawn_key=(replicate_index,))
    generator = np.random.Generator(np.random.PCG64(seed_seq))
    return RngStream(generator=generator, stream_id=replicate_index)


def _check_pair_params(sd1: float, sd2: float, rho: float) -> None:
    if not (sd1 > 0 and sd2 > 0):
        raise ParameterError(f"标准差必须为正: sd1={sd1}, sd2={sd2}", field="sd")
    if not -1.0 <= rho <= 1.0:
        raise ParameterError(f"相关系数必须在 [-1, 1] 内: {rho}", field="rho")


def sample_normal_pairs(
    rng: RngStream,
    size: int,
    mean1: np.ndarray | float,
    mean2: np.ndarray | float,
    sd1: float,
    sd2: float,
    rho: float,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    批量抽取二元正态样本

    协方差矩阵的 Cholesky 分解按 2x2 闭式写出：
    L = [[sd1, 0], [rho*sd2, sd2*sqrt(1-rho^2)]]，|rho| = 1 时仍然有效。

    Args:
        rng: 随机数流
        size: 样本数
        mean1: 第一分量均值（标量或长度为 size 的数组）
        mean2: 第二分量均值（标量或长度为 size 的数组）
        sd1: 第一分量标准差
        sd2: 第二分量标准差
        rho: 相关系数

    Returns:
        (x1, x2) 两个长度为 size 的数组
    """
    _check_pair_params(sd1, sd2, rho)
    z = rng.generator.standard_normal((size, 2))
    x1 = mean1 + sd1 * z[:, 0]
    x2 = mean2 + sd2 * (rho * z[:, 0] + np.sqrt(1.0 - rho * rho) * z[:, 1])
    return x1, x2


def sample_normal_pair(
    rng: RngStream,
    mean1: float,
    mean2: float,
    sd1: float,
    sd2: float,
    rho: float,
) -> Tuple[float, float]:
    """
    抽取一个二元正态样本

    Raises:
        ParameterError: 标准差非正或 rho 不在 [-1, 1]
    """
    x1, x2 = sample_normal_pairs(rng, 1, mean1, mean2, sd1, sd2, rho)
    return float(x1[0]), float(x2[0])
