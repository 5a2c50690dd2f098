"""Experiment reports and their CSV / JSON forms.

Complex values occupy two CSV columns ``name.re`` and ``name.im``; floats
are written with ``repr`` so that reading back is exact.
"""

from __future__ import annotations

import csv
import io
import json
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

_INT = re.compile(r"^[+-]?\d+$")


def normalise(v):
    """Map numpy scalars and other values to plain CSV/JSON-friendly types."""
    if v is None or isinstance(v, (bool, str)):
        return v
    if isinstance(v, np.bool_):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return float(v)
    if isinstance(v, (complex, np.complexfloating)):
        return complex(v)
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    return str(v)


@dataclass
class ExperimentReport:
    """One row per grid cell, in cell order.

    ``runtimes`` is kept beside the rows and left out of emitted files so
    that reruns are byte-identical.
    """

    experiment: str = ""
    rows: list[dict] = field(default_factory=list)
    runtimes: list[float] = field(default_factory=list, compare=False)

    @property
    def columns(self) -> list[str]:
        cols: dict[str, None] = {}
        for row in self.rows:
            for k in row:
                if k != "error":
                    cols.setdefault(k)
        out = list(cols)
        if self.rows:
            out.append("error")
        return out or ["cell", "error"]

    @property
    def failures(self) -> int:
        return sum(1 for r in self.rows if r.get("error"))


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _parse(s: str):
    if s == "":
        return None
    if s in ("true", "false"):
        return s == "true"
    if _INT.match(s):
        return int(s)
    try:
        return float(s)
    except ValueError:
        return s


def to_csv(report: ExperimentReport) -> str:
    cols = report.columns
    complex_cols = {c for c in cols if any(isinstance(r.get(c), complex) for r in report.rows)}
    header = []
    for c in cols:
        header.extend([f"{c}.re", f"{c}.im"] if c in complex_cols else [c])
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(header)
    for row in report.rows:
        line = []
        for c in cols:
            v = row.get(c, "" if c != "error" else "")
            if c in complex_cols:
                line.extend(["", ""] if v is None or v == "" else [repr(v.real), repr(v.imag)])
            else:
                line.append(_fmt(v))
        w.writerow(line)
    return buf.getvalue()


def read_csv(text: str, experiment: str = "") -> ExperimentReport:
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None) or []
    rows = []
    for line in reader:
        row: dict = {}
        i = 0
        while i < len(header):
            h = header[i]
            if h.endswith(".re") and i + 1 < len(header) and header[i + 1] == h[:-3] + ".im":
                re_, im_ = line[i], line[i + 1]
                row[h[:-3]] = None if re_ == "" else complex(float(re_), float(im_))
                i += 2
                continue
            row[h] = _parse(line[i])
            i += 1
        if row.get("error") is None:
            row.pop("error", None)
        rows.append(row)
    return ExperimentReport(experiment, rows)


def _json_value(v):
    if isinstance(v, complex):
        return {"re": v.real, "im": v.imag}
    if isinstance(v, float) and not math.isfinite(v):
        return repr(v)
    return v


def _from_json(v):
    if isinstance(v, dict) and set(v) == {"re", "im"}:
        return complex(v["re"], v["im"])
    if v in ("inf", "-inf", "nan"):
        return float(v)
    return v


def to_json(report: ExperimentReport) -> str:
    rows = [{k: _json_value(v) for k, v in r.items()} for r in report.rows]
    return json.dumps(rows, indent=1) + "\n"


def read_json(text: str, experiment: str = "") -> ExperimentReport:
    rows = [{k: _from_json(v) for k, v in r.items()} for r in json.loads(text)]
    return ExperimentReport(experiment, rows)


def emit(report: ExperimentReport, fmt: str = "csv") -> bytes:
    """Serialise a report; the bytes depend only on its rows."""
    text = to_csv(report) if fmt == "csv" else to_json(report)
    return text.encode("utf-8")


def parse(data: bytes, fmt: str = "csv", experiment: str = "") -> ExperimentReport:
    text = data.decode("utf-8")
    return read_csv(text, experiment) if fmt == "csv" else read_json(text, experiment)
