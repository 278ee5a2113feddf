"""Virtual cells: a virtual BS plus the users affiliated with it."""

import json
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from src.models.experiment import AffiliationRule


@dataclass(frozen=True)
class VirtualCell:
    """BS and user indices (global, ascending) of one virtual cell."""

    bs: Tuple[int, ...]
    users: Tuple[int, ...]


@dataclass(frozen=True)
class VirtualCellPartition:
    """Proper clustering of BSs and users into virtual cells."""

    cells: Tuple[VirtualCell, ...]
    rule: AffiliationRule
    m: int

    def to_dict(self) -> dict:
        return {
            "rule": self.rule.value,
            "m": self.m,
            "cells": [{"bs": list(c.bs), "users": list(c.users)} for c in self.cells],
        }

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)


@dataclass(frozen=True)
class PartitionCheck:
    """Outcome of :func:`validate_partition`."""

    ok: bool
    violation: Optional[str] = None

    def __bool__(self) -> bool:
        return self.ok


def _check_cover(
    groups: Sequence[Sequence[int]], total: int, kind: str
) -> Optional[str]:
    seen = {}
    for v, group in enumerate(groups):
        for item in group:
            if not 0 <= item < total:
                return f"{kind} {item} in cell {v} is out of range [0, {total})"
            if item in seen:
                return f"{kind} {item} appears in cells {seen[item]} and {v}"
            seen[item] = v
    for item in range(total):
        if item not in seen:
            return f"{kind} {item} is not in any cell"
    return None


def validate_partition(
    p: VirtualCellPartition, num_bs: int, num_users: int
) -> PartitionCheck:
    """Check that BS sets and user sets both partition the network.

    Returns the first violation found; never raises.
    """
    for v, cell in enumerate(p.cells):
        if not cell.bs:
            return PartitionCheck(False, f"cell {v} has no BS")
    violation = _check_cover([c.bs for c in p.cells], num_bs, "BS")
    if violation is None:
        violation = _check_cover([c.users for c in p.cells], num_users, "user")
    if violation is None:
        return PartitionCheck(True)
    return PartitionCheck(False, violation)


def build_partition(
    bs_groups: List[List[int]],
    serving_bs: np.ndarray,
    rule: AffiliationRule,
) -> VirtualCellPartition:
    """Assemble cells from BS groups and each user's affiliated BS."""
    cell_of_bs = {}
    for v, group in enumerate(bs_groups):
        for b in group:
            cell_of_bs[b] = v
    users: List[List[int]] = [[] for _ in bs_groups]
    for u, b in enumerate(serving_bs):
        users[cell_of_bs[int(b)]].append(u)
    cells = tuple(
        VirtualCell(bs=tuple(sorted(group)), users=tuple(members))
        for group, members in zip(bs_groups, users)
    )
    return VirtualCellPartition(cells=cells, rule=rule, m=len(cells))
