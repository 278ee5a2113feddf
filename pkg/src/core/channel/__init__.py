"""Channel allocation rules and the alternating driver."""

from src.core.channel.allocation import (
    ALLOCATION_RULES,
    AllocationRule,
    bsc_allocation,
    bsc_selections,
    get_allocation_rule,
    max_weight_matching,
    msrm_allocation,
    uc_allocation,
)
from src.core.channel.alternating import AlternatingResult, alternating_solve

__all__ = [
    "ALLOCATION_RULES",
    "AllocationRule",
    "bsc_allocation",
    "bsc_selections",
    "get_allocation_rule",
    "max_weight_matching",
    "msrm_allocation",
    "uc_allocation",
    "AlternatingResult",
    "alternating_solve",
]
