"""Scenario generation: deployments, channels and unit conversions."""

from src.core.scenario.units import db_to_linear, linear_to_db, path_loss_db
from src.core.scenario.generator import (
    generate_channels,
    generate_deployment,
    link_distances,
)

__all__ = [
    "db_to_linear",
    "linear_to_db",
    "path_loss_db",
    "generate_channels",
    "generate_deployment",
    "link_distances",
]
