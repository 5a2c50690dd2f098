"""Experiment catalog, runner, reports and CLI."""

from .catalog import CATALOG, Experiment, parse_alpha
from .report import ExperimentReport, emit, parse, read_csv, read_json, to_csv, to_json
from .runner import run
from .spec import ExperimentSpec, expand_grid

__all__ = ["CATALOG", "Experiment", "ExperimentReport", "ExperimentSpec", "emit", "expand_grid",
           "parse", "parse_alpha", "read_csv", "read_json", "run", "to_csv", "to_json"]
