from .config import ConfigError, AlgorithmSpec, ExperimentConfig, parse_config, config_from_dict
from .presets import PRESETS, DEFAULTS, preset_names, get_preset, deep_merge
from .runner import (
    FederationData,
    ExperimentSummary,
    build_data,
    rounds_to_target,
    write_round_log,
    run_experiment,
)
from .report import compare_report, format_table, write_report_csv

__all__ = [
    "ConfigError",
    "AlgorithmSpec",
    "ExperimentConfig",
    "parse_config",
    "config_from_dict",
    "PRESETS",
    "DEFAULTS",
    "preset_names",
    "get_preset",
    "deep_merge",
    "FederationData",
    "ExperimentSummary",
    "build_data",
    "rounds_to_target",
    "write_round_log",
    "run_experiment",
    "compare_report",
    "format_table",
    "write_report_csv",
]
