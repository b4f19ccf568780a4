"""随机数、分布和汇总统计"""

from platsim.stats.rng import (
    SEED_MAX,
    RngStream,
    derive_stream,
    sample_normal_pair,
    sample_normal_pairs,
)
from platsim.stats.summary import SummaryStats, summarize
from platsim.stats.tdist import student_t_cdf

__all__ = [
    "SEED_MAX",
    "RngStream",
    "derive_stream",
    "sample_normal_pair",
    "sample_normal_pairs",
    "student_t_cdf",
    "SummaryStats",
    "summarize",
]
