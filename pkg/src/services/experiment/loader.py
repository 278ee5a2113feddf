"""Experiment configuration files."""

import json
from pathlib import Path
from typing import Any, Dict, Union

import yaml
from loguru import logger
from pydantic import ValidationError as PydanticValidationError

from src.models.experiment import ExperimentConfig
from src.utils.exceptions import ConfigurationError


def _read_mapping(path: Path) -> Dict[str, Any]:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigurationError(f"Cannot read config file {path}: {e}", path=str(path))

    try:
        if path.suffix.lower() in (".yaml", ".yml"):
            data = yaml.safe_load(text)
        else:
            data = json.loads(text)
    except (json.JSONDecodeError, yaml.YAMLError) as e:
        raise ConfigurationError(f"Cannot parse config file {path}: {e}", path=str(path))

    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigurationError(f"Config file {path} must contain an object", path=str(path))
    return data


def build_experiment_config(data: Dict[str, Any]) -> ExperimentConfig:
    """Validate a config mapping.

    A mapping without any experiment-level key is read as the system
    parameters alone.
    """
    if not data.keys() & ExperimentConfig.model_fields.keys():
        data = {"system": data}
    try:
        return ExperimentConfig.model_validate(data)
    except PydanticValidationError as e:
        raise ConfigurationError(f"Invalid experiment config: {e}", error_count=e.error_count())


def load_experiment_config(path: Union[str, Path]) -> ExperimentConfig:
    """Load an experiment from a JSON or YAML file.

    Raises:
        ConfigurationError: Missing, unparsable or invalid file
    """
    path = Path(path)
    cfg = build_experiment_config(_read_mapping(path))
    logger.debug(f"Loaded experiment config from {path}")
    return cfg


def apply_overrides(cfg: ExperimentConfig, **overrides: Any) -> ExperimentConfig:
    """Return a revalidated copy with the non-``None`` overrides applied."""
    data = cfg.model_dump(mode="json")
    for key, value in overrides.items():
        if value is not None:
            data[key] = value
    return build_experiment_config(data)
