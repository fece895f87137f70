"""Configuration loading, built-in examples, report rendering and the CLI."""

from __future__ import annotations

from .config import ConfigError, Problem, RunConfig, dump_config, load_config
from .registry import EXAMPLE_IDS, example_config, list_examples, load_example

__all__ = [
    "ConfigError",
    "EXAMPLE_IDS",
    "Problem",
    "RunConfig",
    "dump_config",
    "example_config",
    "list_examples",
    "load_config",
    "load_example",
]
