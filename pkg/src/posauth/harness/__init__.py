"""Configuration, Monte Carlo experiments and the command line interface."""
from .config import ConfigError, ExperimentConfig, dump_config, load_config, parse_config
from .experiments import ResultTable, run_error_sweep, run_ml_benchmark, run_roc, tracker_for

__all__ = ["ConfigError", "ExperimentConfig", "dump_config", "load_config", "parse_config",
           "ResultTable", "run_error_sweep", "run_ml_benchmark", "run_roc", "tracker_for"]
