"""Pytest configuration and fixtures."""

import os
import sys
from pathlib import Path

import numpy as np
import pytest

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent.parent))

# Set test environment
os.environ["ENVIRONMENT"] = "testing"
os.environ["LOG_TO_FILE"] = "false"

PRESETS_DIR = Path(__file__).parent.parent / "config" / "presets"


@pytest.fixture
def rng() -> np.random.Generator:
    """Deterministic generator for test data."""
    return np.random.default_rng(12345)


@pytest.fixture
def small_system():
    """Small network that solves in well under a second."""
    from src.models.system import SystemConfig

    return SystemConfig(num_bs=4, num_users=12, num_bands=2)


@pytest.fixture
def fast_solver():
    """Solver settings with short iteration limits."""
    from src.models.allocation import SolverSettings

    return SolverSettings(outer_max=5, inner_max=50)


@pytest.fixture
def reduced_config(small_system, fast_solver):
    """Reduced experiment: two trials over every clustering, rule and scheme."""
    from src.models.allocation import AlternatingSettings
    from src.models.experiment import ExperimentConfig

    return ExperimentConfig(
        system=small_system,
        trials=2,
        master_seed=7,
        cell_counts=[1, 2, 4],
        clusterings=["hierarchical", "kmeans", "spectral"],
        sigmas=[1000.0],
        solver=fast_solver,
        alternating=AlternatingSettings(n_max=5),
    )


@pytest.fixture
def make_view():
    """Factory for standalone cell views.

    Usage: ``make_view(gain, noise=1.0, width=1.0, budget=1.0)`` where scalar
    noise, width and budget are broadcast to the gain tensor's shape.
    """
    from src.core.rates import CellView

    def _make(gain, noise=1.0, width=1.0, budget=1.0):
        gain = np.asarray(gain, dtype=float)
        num_users, num_bs, num_bands = gain.shape
        return CellView.from_arrays(
            gain=gain,
            noise=np.broadcast_to(np.asarray(noise, dtype=float), (num_bs, num_bands)).copy(),
            band_widths=np.broadcast_to(np.asarray(width, dtype=float), (num_bands,)).copy(),
            budgets=np.broadcast_to(np.asarray(budget, dtype=float), (num_users,)).copy(),
        )

    return _make


@pytest.fixture
def diagonal_view(make_view, rng):
    """Two users, two BSs, two bands; user i hears BS i far better than the other.

    Strong direct links and weak cross links keep the instance in the high
    SINR regime, where the surrogate is tight.
    """
    direct = rng.uniform(0.5, 1.5, size=(2, 2))
    gain = np.empty((2, 2, 2))
    for u in range(2):
        for b in range(2):
            scale = 1.0 if u == b else 0.01
            gain[u, b, :] = scale * direct[u, :]
    return make_view(gain * 100.0, noise=1.0, width=1.0, budget=1.0)
