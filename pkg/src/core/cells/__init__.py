"""Virtual cell formation."""

from src.core.cells.partition import (
    PartitionCheck,
    VirtualCell,
    VirtualCellPartition,
    build_partition,
    validate_partition,
)
from src.core.cells.affiliation import (
    affiliate_best_channel,
    affiliate_closest,
    channel_quality,
)

__all__ = [
    "PartitionCheck",
    "VirtualCell",
    "VirtualCellPartition",
    "build_partition",
    "validate_partition",
    "affiliate_best_channel",
    "affiliate_closest",
    "channel_quality",
]
