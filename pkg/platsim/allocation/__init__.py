"""分配比例与随机化"""

from platsim.allocation.policy import (
    AllocationKind,
    AllocationPolicy,
    control_ratio,
    control_spots_x,
    treatment_ratio,
)
from platsim.allocation.randomizer import (
    BaseRandomizer,
    BlockRandomizer,
    BlockState,
    SimpleRandomizer,
    create_randomizer,
    generate_block,
    next_assignment_block,
    next_assignment_simple,
)

__all__ = [
    "AllocationKind",
    "AllocationPolicy",
    "control_ratio",
    "control_spots_x",
    "treatment_ratio",
    "BaseRandomizer",
    "BlockRandomizer",
    "BlockState",
    "SimpleRandomizer",
    "create_randomizer",
    "generate_block",
    "next_assignment_block",
    "next_assignment_simple",
]
