"""Utility functions and helpers."""

import math
from typing import List, Sequence

import numpy as np

# Independent random streams inside one trial
STREAM_SCENARIO = 0
STREAM_KMEANS = 1
STREAM_SPECTRAL = 2


def derive_seed_sequence(master_seed: int, *keys: int) -> np.random.SeedSequence:
    """Derive a child seed sequence from a master seed and integer keys.

    The child depends only on ``(master_seed, keys)``, so a trial's streams
    are the same whichever worker runs it and in whatever order.
    """
    return np.random.SeedSequence(entropy=master_seed, spawn_key=tuple(int(k) for k in keys))


def derive_rng(master_seed: int, *keys: int) -> np.random.Generator:
    """Create a generator for the stream identified by ``keys``."""
    return np.random.default_rng(derive_seed_sequence(master_seed, *keys))


def sklearn_seed(rng: np.random.Generator) -> int:
    """Draw an integer seed usable as scikit-learn ``random_state``."""
    return int(rng.integers(0, 2**31 - 1))


def parse_int_list(text: str) -> List[int]:
    """Parse ``"1,2,5-7"`` into ``[1, 2, 5, 6, 7]``."""
    values: List[int] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "-" in part:
            lo, hi = part.split("-", 1)
            values.extend(range(int(lo), int(hi) + 1))
        else:
            values.append(int(part))
    return values


def parse_str_list(text: str) -> List[str]:
    """Parse a comma separated list, dropping blanks."""
    return [part.strip() for part in text.split(",") if part.strip()]


def parse_float_list(text: str) -> List[float]:
    """Parse a comma separated list of floats."""
    return [float(part) for part in parse_str_list(text)]


def format_float(value: float) -> str:
    """Format a float for CSV output so that parsing it back is exact."""
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return ""
    return repr(float(value))


def format_duration(seconds: float) -> str:
    """Format duration in human-readable format."""
    if seconds < 60:
        return f"{seconds:.1f}s"
    elif seconds < 3600:
        return f"{int(seconds // 60)}m{int(seconds % 60):02d}s"
    return f"{int(seconds // 3600)}h{int(seconds % 3600 // 60):02d}m"


def relabel_by_smallest_member(labels: Sequence[int]) -> np.ndarray:
    """Relabel an arbitrary label vector to ``1..m`` ordered by smallest member index."""
    mapping = {}
    out = np.empty(len(labels), dtype=int)
    for i, label in enumerate(labels):
        if label not in mapping:
            mapping[label] = len(mapping) + 1
        out[i] = mapping[label]
    return out
