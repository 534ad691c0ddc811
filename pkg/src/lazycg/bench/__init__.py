"""Benchmark harness: experiment configs, CSV traces, auditing and the CLI."""

from .config import ConfigError, ExperimentConfig, parse_config
from .trace_io import TraceData, dumps_trace, loads_trace, read_trace, write_trace
from .verify import Report, verify_trace
