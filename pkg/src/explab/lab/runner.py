"""Grid execution over a thread pool."""

from __future__ import annotations

import logging
import time
from concurrent.futures import ThreadPoolExecutor

from ..errors import DomainError
from .catalog import CATALOG
from .report import ExperimentReport, normalise
from .spec import ExperimentSpec, expand_grid

log = logging.getLogger(__name__)


class UnknownExperiment(DomainError):
    pass


def cells_for(spec: ExperimentSpec) -> list[dict]:
    if spec.experiment not in CATALOG:
        raise UnknownExperiment(f"unknown experiment {spec.experiment!r}")
    exp = CATALOG[spec.experiment]
    return expand_grid(exp.defaults, exp.grid, spec.params)


def _run_cell(fn, index: int, cell: dict) -> tuple[dict, float]:
    row = {"cell": index}
    row.update({k: normalise(v) for k, v in cell.items()})
    t0 = time.perf_counter()
    try:
        out = fn(cell)
    except Exception as exc:  # one failing cell must not stop the grid
        log.warning("cell %d failed: %s", index, exc)
        row["error"] = f"{type(exc).__name__}: {exc}"
    else:
        row.update({k: normalise(v) for k, v in out.items()})
    return row, time.perf_counter() - t0


def run(spec: ExperimentSpec, cells: list[dict] | None = None) -> ExperimentReport:
    """Evaluate every cell; rows come back in cell order whatever the scheduling."""
    if cells is None:
        cells = cells_for(spec)
    fn = CATALOG[spec.experiment].cell
    if spec.threads == 1 or len(cells) <= 1:
        results = [_run_cell(fn, i, c) for i, c in enumerate(cells)]
    else:
        with ThreadPoolExecutor(max_workers=spec.threads) as pool:
            futures = [pool.submit(_run_cell, fn, i, c) for i, c in enumerate(cells)]
            results = [f.result() for f in futures]
    results.sort(key=lambda r: r[0]["cell"])
    return ExperimentReport(spec.experiment, [r for r, _ in results], [t for _, t in results])
