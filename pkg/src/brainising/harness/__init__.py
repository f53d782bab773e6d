"""Config-driven experiment runner."""

from .config import EXPERIMENTS, ExperimentConfig, load_config, parse_config, validate_config
from .experiments import run_experiment
