"""Command-line driver: catalogs, suite execution and report emission."""

from .config import SUITES, TOLERANCES, ConfigError, SuiteConfig, build_config, read_config_file
from .suites import Record, execute, plan, run_task

__all__ = ["ConfigError", "Record", "SUITES", "SuiteConfig", "TOLERANCES", "build_config", "execute", "plan",
           "read_config_file", "run_task"]
