"""Experiment specifications and grid expansion."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from ..errors import DomainError


@dataclass
class ExperimentSpec:
    """A named experiment with its parameter grid.

    Attributes:
        experiment: Catalog name.
        params: Parameter overrides. A list value on a grid key is swept; a
            scalar is used as a one-point grid.
        out: Output path, or None for the default.
        threads: Worker count.
        fmt: ``"csv"`` or ``"json"``.
    """

    experiment: str
    params: dict = field(default_factory=dict)
    out: str | None = None
    threads: int = 1
    fmt: str = "csv"

    def __post_init__(self) -> None:
        if self.threads < 1:
            raise DomainError("threads must be at least 1")
        if self.fmt not in ("csv", "json"):
            raise DomainError(f"unknown format {self.fmt!r}")


def expand_grid(defaults: dict, grid_keys: tuple[str, ...], overrides: dict) -> list[dict]:
    """Cartesian product over ``grid_keys`` in declared order.

    Non-grid keys are shared by every cell. Unknown override keys raise
    :class:`DomainError`.
    """
    unknown = set(overrides) - set(defaults)
    if unknown:
        raise DomainError(f"unknown parameter(s): {', '.join(sorted(unknown))}")
    merged = {**defaults, **overrides}
    fixed = {k: v for k, v in merged.items() if k not in grid_keys}
    axes = []
    for k in grid_keys:
        v = merged[k]
        axes.append(list(v) if isinstance(v, (list, tuple)) else [v])
    cells = []
    for combo in itertools.product(*axes):
        cell = dict(zip(grid_keys, combo))
        cell.update(fixed)
        cells.append(cell)
    return cells
