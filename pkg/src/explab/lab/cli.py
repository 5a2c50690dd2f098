"""Command line entry point: ``explab run`` and ``explab list``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from datetime import datetime
from pathlib import Path

from ..errors import ExplabError
from .catalog import CATALOG
from .report import emit
from .runner import cells_for, run
from .spec import ExperimentSpec

EXIT_OK, EXIT_USAGE, EXIT_CELLS = 0, 1, 2

_RESERVED = ("params", "threads", "format", "out", "seed")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="explab", description="Exponential sums with multiplicative coefficients.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("list", help="print the experiment catalog")
    r = sub.add_parser("run", help="run one experiment")
    r.add_argument("experiment")
    r.add_argument("--config", help="JSON file with parameters")
    r.add_argument("--param", action="append", default=[], metavar="K=V",
                   help="override one parameter; V is read as JSON when possible")
    r.add_argument("--out", help="output path (default <experiment>.<format>)")
    r.add_argument("--format", choices=("csv", "json"))
    r.add_argument("--threads", type=int)
    r.add_argument("--seed", type=int, help="shorthand for --param seed=S")
    r.add_argument("--overwrite", action="store_true")
    r.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS)
    return parser


def _value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    if not isinstance(doc, dict):
        raise UsageError(f"config {path} must be a JSON object")
    return doc


def make_spec(args) -> ExperimentSpec:
    doc = load_config(args.config)
    params = dict(doc.get("params", {}))
    params.update({k: v for k, v in doc.items() if k not in _RESERVED})
    if "seed" in doc:
        params["seed"] = doc["seed"]
    for item in args.param:
        key, sep, val = item.partition("=")
        if not sep or not key:
            raise UsageError(f"--param expects K=V, got {item!r}")
        params[key.strip()] = _value(val)
    if args.seed is not None:
        params["seed"] = args.seed
    out = args.out or doc.get("out")
    fmt = args.format or doc.get("format") or (Path(out).suffix.lstrip(".") if out else "csv")
    if fmt not in ("csv", "json"):
        fmt = "csv"
    threads = args.threads or int(doc.get("threads", 1))
    return ExperimentSpec(args.experiment, params, out or f"{args.experiment}.{fmt}", threads, fmt)


def output_path(path: str, overwrite: bool) -> Path:
    """``path`` itself, or a fresh timestamped sibling if it exists."""
    p = Path(path)
    if overwrite or not p.exists():
        return p
    stamp = datetime.now().strftime("%Y%m%dT%H%M%S")
    cand = p.with_name(f"{p.stem}-{stamp}{p.suffix}")
    k = 1
    while cand.exists():
        cand = p.with_name(f"{p.stem}-{stamp}-{k}{p.suffix}")
        k += 1
    return cand


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"explab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "list":
        width = max(map(len, CATALOG))
        for name, exp in CATALOG.items():
            print(f"{name:<{width}}  {exp.summary}")
        return EXIT_OK
    try:
        spec = make_spec(args)
        cells = cells_for(spec)
    except (UsageError, ExplabError, ValueError) as exc:
        print(f"explab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    report = run(spec, cells)
    dest = output_path(spec.out, args.overwrite)
    try:
        dest.parent.mkdir(parents=True, exist_ok=True)
        with open(dest, "wb") as fh:
            fh.write(emit(report, spec.fmt))
    except OSError as exc:
        print(f"explab: cannot write {dest}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print(f"{len(report.rows)} rows, {report.failures} failed -> {dest}")
    return EXIT_CELLS if report.failures else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
