import json
import math

import pytest
from hypothesis import given, strategies as st

from explab.errors import DomainError
from explab.lab import CATALOG, ExperimentReport, ExperimentSpec, emit, expand_grid, parse, run
from explab.lab.catalog import parse_alpha
from explab.lab.cli import main
from explab.lab.runner import UnknownExperiment

NAMES = ["gauss-main-term", "thm1-decomposition", "logcut-decomposition", "char-identity",
         "example-2-3", "example-3-pretender", "example-4-hybrid", "mv-extremal", "example-1b",
         "smooth-minor", "smooth-major", "psi-vs-rho", "saddle-vs-approx", "ramanujan-identities",
         "witness-search", "steinhaus-moments"]


def test_catalog_names():
    assert sorted(CATALOG) == sorted(NAMES)


def test_expand_grid():
    cells = expand_grid({"a": [1, 2], "b": 3, "c": 0}, ("a", "b"), {"b": [4, 5]})
    assert cells == [{"a": 1, "b": 4, "c": 0}, {"a": 1, "b": 5, "c": 0},
                     {"a": 2, "b": 4, "c": 0}, {"a": 2, "b": 5, "c": 0}]
    assert expand_grid({"a": [1]}, ("a",), {"a": []}) == []
    with pytest.raises(DomainError):
        expand_grid({"a": 1}, ("a",), {"zz": 2})


def test_parse_alpha():
    assert parse_alpha("golden") == pytest.approx((math.sqrt(5) - 1) / 2)
    assert parse_alpha("3/7").denominator == 7
    assert parse_alpha("0.25") == 0.25
    with pytest.raises(DomainError):
        parse_alpha("pi-ish")


def test_emit_empty_and_single_row():
    empty = ExperimentReport("x")
    assert emit(empty).decode().splitlines() == ["cell,error"]
    one = ExperimentReport("x", [{"cell": 0, "v": 1.5, "z": 1 + 2j}])
    lines = emit(one).decode().splitlines()
    assert lines == ["cell,v,z.re,z.im,error", "0,1.5,1.0,2.0,"]


scalars = st.one_of(st.none(), st.booleans(), st.integers(-10**12, 10**12),
                    st.floats(allow_nan=False), st.text(alphabet="abc xyz,\"\n", min_size=1)
                    .filter(lambda s: s not in ("true", "false")).map(lambda s: "s" + s),
                    st.complex_numbers(allow_nan=False))


@given(st.lists(st.dictionaries(st.sampled_from(["a", "b", "c"]), scalars), max_size=5))
def test_round_trip(rows):
    # give every column one type so that CSV columns stay homogeneous
    kinds = {}
    clean = []
    for i, r in enumerate(rows):
        row = {"cell": i}
        for k, v in r.items():
            t = kinds.setdefault(k, type(v))
            if v is None or type(v) is t:
                row[k] = v
        clean.append(row)
    rep = ExperimentReport("t", clean)
    for fmt in ("csv", "json"):
        back = parse(emit(rep, fmt), fmt, "t")
        assert len(back.rows) == len(rep.rows)
        for a, b in zip(rep.rows, back.rows):
            for k in a:
                if a[k] is None:
                    assert b.get(k) is None
                elif isinstance(a[k], complex) and fmt == "csv":
                    assert b[k] == a[k]
                else:
                    assert b[k] == a[k] and type(b[k]) is type(a[k])


def test_run_gauss_main_term():
    rep = run(ExperimentSpec("gauss-main-term", {"q": 7, "x": [1e3, 1e4, 1e5]}))
    assert len(rep.rows) == 3 and all("max_residual" in r for r in rep.rows)
    assert [r["cell"] for r in rep.rows] == [0, 1, 2]
    assert all(r["ok"] for r in rep.rows)


def test_run_example_2_3_trend():
    rep = run(ExperimentSpec("example-2-3", {"ell": 5}))
    ratios = [r["ratio"] for r in rep.rows]
    assert ratios == sorted(ratios) and all(0.5 < v < 1.5 for v in ratios)


def test_run_empty_grid_and_unknown():
    rep = run(ExperimentSpec("psi-vs-rho", {"u": []}))
    assert rep.rows == [] and emit(rep) == b"cell,error\r\n"
    with pytest.raises(UnknownExperiment):
        run(ExperimentSpec("nope"))


def test_cap_violation_is_a_row_error():
    rep = run(ExperimentSpec("psi-vs-rho", {"x": 1e12, "u": [1.5]}))
    assert rep.failures == 1 and "ResourceError" in rep.rows[0]["error"]


def test_parallel_equals_serial():
    params = {"q": [6, 12, 15], "seed": [-1, 0, 1, 2]}
    a = run(ExperimentSpec("char-identity", params, threads=1))
    b = run(ExperimentSpec("char-identity", params, threads=4))
    assert emit(a) == emit(b)


def test_cli_list(capsys):
    assert main(["list"]) == 0
    out = capsys.readouterr().out
    assert all(n in out for n in NAMES)


def test_cli_usage_errors(tmp_path):
    assert main([]) == 1
    assert main(["run", "no-such-experiment", "--out", str(tmp_path / "a.csv")]) == 1
    assert main(["run", "psi-vs-rho", "--param", "bogus=1", "--out", str(tmp_path / "a.csv")]) == 1
    assert main(["run", "psi-vs-rho", "--param", "noequals", "--out", str(tmp_path / "a.csv")]) == 1
    assert main(["run", "psi-vs-rho", "--threads", "x"]) == 1
    assert main(["run", "psi-vs-rho", "--config", str(tmp_path / "missing.json")]) == 1


def test_cli_run_config_overrides_and_append_only(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"params": {"x": 1e5, "u": [1.5, 2.0, 3.0]}, "threads": 2}))
    out = tmp_path / "r.csv"
    assert main(["run", "psi-vs-rho", "--config", str(cfg), "--param", "u=[2.0]", "--out", str(out)]) == 0
    rows = parse(out.read_bytes()).rows
    assert len(rows) == 1 and rows[0]["u"] == 2.0 and rows[0]["x"] == 1e5
    first = out.read_bytes()
    assert main(["run", "psi-vs-rho", "--config", str(cfg), "--out", str(out)]) == 0
    assert out.read_bytes() == first
    siblings = sorted(p.name for p in tmp_path.glob("r-*.csv"))
    assert len(siblings) == 1
    assert main(["run", "psi-vs-rho", "--config", str(cfg), "--out", str(out), "--overwrite"]) == 0
    assert len(parse(out.read_bytes()).rows) == 3


def test_cli_json_and_failure_exit(tmp_path):
    out = tmp_path / "r.json"
    assert main(["run", "saddle-vs-approx", "--param", "x=[1e6]", "--param", "y=[100]",
                 "--out", str(out)]) == 0
    rows = json.loads(out.read_text())
    assert len(rows) == 1 and rows[0]["residual"] < 1e-9
    assert main(["run", "psi-vs-rho", "--param", "x=1e12", "--out", str(tmp_path / "f.csv")]) == 2


def test_cli_seed_flag(tmp_path):
    out = tmp_path / "s.csv"
    assert main(["run", "steinhaus-moments", "--seed", "5", "--param", "samples=10",
                 "--param", "power=2", "--out", str(out)]) == 0
    row = parse(out.read_bytes()).rows[0]
    assert row["seed"] == 5 and row["samples"] == 10
