"""The built-in experiments.

Each entry maps one grid cell (a dict of parameters) to a dict of output
columns. Cells are pure functions of their parameters and seeds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .. import baselines
from ..arith import factorize
from ..characters import (enumerate_characters, gauss_sum, gauss_sum_induced, primitive_characters,
                          ramanujan_double_sum, ramanujan_sum_closed, ramanujan_sum_divisor,
                          ramanujan_sum_exp)
from ..constructions import (character_pretender, example_1b, example_2_3, head_sum, hybrid_example,
                             l2_constant, montgomery_vaughan, smooth_minor_extremal,
                             steinhaus_moments)
from ..errors import DomainError
from ..expsum import (abel_check, char_identity_check, decompose_log, decompose_thm_unweighted,
                      exp_sum, gauss_main_term, gauss_residuals, prime_sum, smooth_character_sum,
                      smooth_character_sum_by_classes, witness_search)
from ..multfun import constant_one, from_character, steinhaus
from ..smooth import dickman_rho, psi, saddle_function, saddle_point, saddle_point_estimate

_NAMED_ALPHA = {
    "golden": (math.sqrt(5.0) - 1.0) / 2.0,
    "sqrt2": math.sqrt(2.0) - 1.0,
    "e": math.e - 2.0,
}


def parse_alpha(spec) -> float | Fraction:
    """``"golden"``, ``"sqrt2"``, ``"e"``, a fraction ``"a/q"`` or a number."""
    if isinstance(spec, (int, float, Fraction)):
        return spec
    s = str(spec).strip()
    if s in _NAMED_ALPHA:
        return _NAMED_ALPHA[s]
    try:
        return Fraction(s) if "/" in s else float(s)
    except ValueError:
        raise DomainError(f"cannot read alpha {spec!r}") from None


def _f_seed(seed: int):
    """Steinhaus for ``seed >= 0``, the constant 1 for ``seed < 0``."""
    return constant_one() if seed < 0 else steinhaus(int(seed))


@dataclass(frozen=True)
class Experiment:
    name: str
    summary: str
    defaults: dict
    grid: tuple[str, ...]
    cell: Callable[[dict], dict]


# --------------------------------------------------------------------------


def _gauss_main_term(p: dict) -> dict:
    q, x, a = int(p["q"]), float(p["x"]), int(p["a"])
    worst, chi_worst = 0.0, None
    for chi in primitive_characters(q):
        r = float(gauss_residuals(chi, a, x).max())
        if r > worst:
            worst, chi_worst = r, chi
    chi = primitive_characters(q)[0]
    S = exp_sum(from_character(chi), x, Fraction(a, q)).value
    bound = 3.0 * q
    return {"S": S, "main": gauss_main_term(chi, a, x), "max_residual": worst,
            "worst_chi": str(chi_worst.index) if chi_worst else "",
            "bound": bound, "ratio": worst / bound, "ok": worst <= bound}


def _thm1(p: dict) -> dict:
    x, M = float(p["x"]), int(p["M"])
    alpha = parse_alpha(p["alpha"])
    f = _f_seed(int(p["seed"]))
    d = decompose_thm_unweighted(f, x, alpha, M)
    direct, parts = abel_check(f, x, alpha)
    return {"q": d.params["q"], "lhs": d.lhs, "rhs": d.rhs, "residual": d.residual,
            "baseline": d.benchmark, "ratio": d.ratio, "in_range": d.in_range,
            "abel_gap": abs(direct - parts)}


def _logcut(p: dict) -> dict:
    x = float(p["x"])
    alpha = parse_alpha(p["alpha"])
    f = _f_seed(int(p["seed"]))
    q = alpha.denominator if isinstance(alpha, Fraction) else None
    d = decompose_log(f, x, alpha, q=q)
    direct, parts = abel_check(f, x, alpha)
    return {"q": d.params["q"], "M": d.params["M"], "lhs": d.lhs, "rhs": d.rhs,
            "residual": d.residual, "baseline": baselines.logarithmic(x, d.params["q"]),
            "in_range": d.in_range, "abel_gap": abs(direct - parts)}


def _char_identity(p: dict) -> dict:
    q, x, a, seed = int(p["q"]), float(p["x"]), int(p["a"]), int(p["seed"])
    gap = char_identity_check(_f_seed(seed), x, a, q)
    return {"f": "one" if seed < 0 else "steinhaus", "discrepancy": gap, "ok": gap < 1e-8}


def _example_2_3(p: dict) -> dict:
    ell, x = int(p["ell"]), float(p["x"])
    c = example_2_3(ell, x)
    q = c.info["q"]
    L = exp_sum(c.f, x, Fraction(1, q), mode="log").value
    return {"q": q, "bracket": c.info["bracket"], "L": L, "abs_L": abs(L),
            "baseline": c.predicted, "residual": abs(L) - c.predicted,
            "ratio": abs(L) / c.predicted}


def _example_3(p: dict) -> dict:
    q, r = int(p["q"]), int(p["r"])
    if math.gcd(q, r) != 1:
        raise DomainError("gcd(q, r) must be 1")
    a = pow(r, -1, q)
    c = character_pretender(q, a, r_cap=int(p["r_cap"]))
    H = head_sum(c.f, q, a)
    rr = c.info["r"]
    diff = abs(H - c.predicted)
    return {"a": a, "b": c.info["b"], "r_found": rr, "head": H, "predicted": c.predicted,
            "abs_predicted": abs(c.predicted), "magnitude": math.log(q) / math.sqrt(rr),
            "difference": diff, "C_fit": diff / math.log(rr) if rr > 1 else None}


def _example_4(p: dict) -> dict:
    q, x, r = int(p["q"]), float(p["x"]), int(p["r"])
    y = p.get("y")
    c = hybrid_example(q, x, r=r, y=None if y is None else float(y))
    a, alpha, cut = c.info["a"], c.info["alpha"], c.info["cut"]
    head = head_sum(c.f, q, a)
    tail = exp_sum(c.f, x, alpha, mode="log", lo=cut).value
    tail_primes = prime_sum(c.f, cut, x, alpha, mode="log")
    return {"a": a, "b": c.info["b"], "head": head, "head_predicted": c.predicted,
            "tail": tail, "tail_primes": tail_primes, "tail_prime_sum": c.info["tail_prime_sum"],
            "total": head + tail, "lower_bound": c.info["lower_bound"],
            "equidistributed": c.info["equidistributed"],
            "equidistribution_vacuous": c.info["equidistribution_vacuous"],
            "equidistribution_gap": c.info["equidistribution_gap"],
            "l2_constant": l2_constant(int(p["l2_terms"]))}


def _mv(p: dict) -> dict:
    x = float(p["x"])
    alpha = parse_alpha(p["alpha"])
    c = montgomery_vaughan(steinhaus(int(p["seed"])), x, alpha)
    S = exp_sum(c.f, x, alpha).value
    band = c.info["band"]
    base = x / math.log(x)
    return {"S": S, "abs_S": abs(S), "predicted": c.predicted, "band": band,
            "gap": abs(abs(S) - c.predicted), "ok": abs(S) >= band,
            "baseline": base, "ratio": abs(S) / base}


def _example_1b(p: dict) -> dict:
    x = float(p["x"])
    alpha = parse_alpha(p["alpha"])
    c = example_1b(x, alpha)
    S = exp_sum(c.f, x, alpha).value
    w = witness_search(c.f, x, alpha, float(p["c"]))
    need = 0.15 * x / math.log(x)
    ws = abs(w.prime_sum) if w else 0.0
    return {"y": c.info["y"], "delta": c.info["delta"], "S": S, "predicted": c.predicted,
            "gap": abs(S - c.predicted), "witness_h": w.h if w else None,
            "witness_z": w.z if w else None, "witness_sum": ws, "threshold": need,
            "ratio": ws / (x / (4 * math.log(x))), "ok": abs(S - c.predicted) < 1e-6 and ws > need}


def _smooth_minor(p: dict) -> dict:
    x, y, q, a = float(p["x"]), float(p["y"]), int(p["q"]), int(p["a"])
    c = smooth_minor_extremal(x, y, q, a, int(p["seed"]), c0=float(p["c0"]))
    S = exp_sum(c.f, x, Fraction(a, q)).value
    P = psi(x, y)
    base = baselines.smooth_minor(x, y, q, P)
    return {"S": S, "predicted": c.predicted, "alignment_gap": abs(S - c.predicted),
            "top_sum": c.info["top_sum"], "rest": c.info["rest"], "A1": c.info["A1"],
            "A2": c.info["A2"], "in_range": c.info["in_range"], "psi": P,
            "baseline": base, "ratio": abs(S) / base}


def _smooth_major(p: dict) -> dict:
    q, x, y, a = int(p["q"]), float(p["x"]), float(p["y"]), int(p["a"])
    P = psi(x, y)
    base = baselines.smooth_major(P, q)
    ratios, gaps = [], []
    for chi in primitive_characters(q):
        s = smooth_character_sum(chi, x, y, a)
        gaps.append(abs(s - smooth_character_sum_by_classes(chi, x, y, a)))
        ratios.append(abs(s) / base)
    return {"psi": P, "baseline": base, "min_ratio": min(ratios), "max_ratio": max(ratios),
            "route_gap": max(gaps), "ok": min(ratios) >= 0.2}


def _psi_rho(p: dict) -> dict:
    x, u = float(p["x"]), float(p["u"])
    y = x ** (1.0 / u)
    P = psi(x, y)
    r = dickman_rho(u)
    ratio = P / (r * x)
    return {"y": y, "psi": P, "rho": r, "ratio": ratio, "in_band": 0.9 <= ratio <= 1.1}


def _saddle(p: dict) -> dict:
    x, y = float(p["x"]), float(p["y"])
    lam = saddle_point(x, y)
    est = saddle_point_estimate(x, y)
    return {"lambda": lam, "estimate": est, "residual": abs(saddle_function(lam, y) - math.log(x)),
            "relative_gap": abs(est - lam) / lam}


def _ramanujan(p: dict) -> dict:
    q = int(p["q"])
    worst = 0.0
    for ell in range(q):
        d = ramanujan_sum_divisor(q, ell)
        c = ramanujan_sum_closed(q, ell)
        e = ramanujan_sum_exp(q, ell)
        worst = max(worst, abs(d - c), abs(e - d))
    ds = ramanujan_double_sum(q)
    fq = factorize(q)
    formula = q * fq.phi * 2 ** fq.omega
    tau_gap = 0.0
    for chi in enumerate_characters(q):
        tau_gap = max(tau_gap, abs(gauss_sum(chi) - gauss_sum_induced(chi)))
    return {"route_gap": worst, "double_sum": ds, "formula": formula,
            "double_ok": ds == formula, "tau_gap": tau_gap}


def _witness(p: dict) -> dict:
    x = float(p["x"])
    alpha = parse_alpha(p["alpha"])
    kind = str(p["construction"])
    if kind == "example-1b":
        f = example_1b(x, alpha).f
    elif kind == "mv":
        f = montgomery_vaughan(steinhaus(int(p["seed"])), x, alpha).f
    elif kind == "steinhaus":
        f = steinhaus(int(p["seed"]))
    else:
        raise DomainError(f"unknown construction {kind!r}")
    c = float(p["c"])
    S = exp_sum(f, x, alpha).value
    w = witness_search(f, x, alpha, c)
    return {"abs_S": abs(S), "scaled_S": abs(S) * math.log(x) / x, "found": w is not None,
            "h": w.h if w else None, "z": w.z if w else None,
            "prime_sum": w.prime_sum if w else None, "score": w.score if w else None,
            "threshold": c ** 3 / math.log(1 / c)}


def _moments(p: dict) -> dict:
    T, k, n, s0 = int(p["T"]), int(p["power"]), int(p["samples"]), int(p["seed"])
    m = steinhaus_moments(T, range(s0, s0 + n), power=k)
    if k == 2:
        expected = float(T)
    elif k == 4:
        expected = T * T * math.log(T)
    else:
        expected = None
    return {"mean": m.mean, "stderr": m.stderr, "samples": m.samples, "expected": expected,
            "ratio": m.mean / expected if expected else None,
            "z_score": (m.mean - expected) / m.stderr if k == 2 else None}


CATALOG: dict[str, Experiment] = {e.name: e for e in [
    Experiment("gauss-main-term", "character sums on major arcs against their Gauss-sum main term",
               {"q": [7, 13], "x": [1e3, 1e4, 1e5], "a": 1}, ("q", "x", "a"), _gauss_main_term),
    Experiment("thm1-decomposition", "unweighted sum against its large-prime decomposition",
               {"x": 1e6, "M": 8, "alpha": "1000/3001", "seed": list(range(3))},
               ("x", "M", "alpha", "seed"), _thm1),
    Experiment("logcut-decomposition", "log-weighted sum beyond q^2 against its prime decomposition",
               {"x": 1e6, "alpha": "100/331", "seed": list(range(3))}, ("x", "alpha", "seed"), _logcut),
    Experiment("char-identity", "character expansion of a major-arc log sum (seed -1 is f = 1)",
               {"q": [6, 12, 15], "x": 1e4, "a": 1, "seed": [-1, 0, 1]}, ("q", "x", "a", "seed"),
               _char_identity),
    Experiment("example-2-3", "g times a character mod ell with its exact six-term bracket",
               {"ell": 5, "x": [1e4, 1e5, 1e6]}, ("ell", "x"), _example_2_3),
    Experiment("example-3-pretender", "character pretender head sums against the predicted main term",
               {"q": [101, 211, 307], "r": [1, 3, 5], "r_cap": 50}, ("q", "r", "r_cap"), _example_3),
    Experiment("example-4-hybrid", "pretender below q^2 and aligned primes above",
               {"q": [11, 13], "x": 1e6, "r": 3, "y": None, "l2_terms": 100000},
               ("q", "x", "r"), _example_4),
    Experiment("mv-extremal", "large primes aligned against e(p alpha)",
               {"x": [1e4, 1e5, 1e6], "alpha": ["golden", "sqrt2", "e"], "seed": 0},
               ("x", "alpha", "seed"), _mv),
    Experiment("example-1b", "balanced signs: tiny full sum, large witness",
               {"x": 1e5, "alpha": "golden", "c": 0.25}, ("x", "alpha", "c"), _example_1b),
    Experiment("smooth-minor", "aligned top band on a minor arc with the A1 / A2 events",
               {"x": 1e6, "y": 2e5, "q": 90007, "a": 12345, "seed": list(range(5)), "c0": 0.1},
               ("x", "y", "q", "a", "seed", "c0"), _smooth_minor),
    Experiment("smooth-major", "smooth-restricted character sums on a major arc",
               {"q": 7, "x": 1e6, "y": 1e3, "a": 1}, ("q", "x", "y", "a"), _smooth_major),
    Experiment("psi-vs-rho", "smooth counts against the Dickman approximation",
               {"x": 1e6, "u": [1.5, 2.0, 2.5, 3.0]}, ("x", "u"), _psi_rho),
    Experiment("saddle-vs-approx", "saddle point against its closed-form approximation",
               {"x": [1e6, 1e8], "y": [1e2, 1e3, 1e4]}, ("x", "y"), _saddle),
    Experiment("ramanujan-identities", "three routes to c_q(l), the double sum and induced Gauss sums",
               {"q": list(range(1, 41))}, ("q",), _ramanujan),
    Experiment("witness-search", "best (h, z) prime window for constructed functions",
               {"construction": ["example-1b", "mv", "steinhaus"], "x": 1e5, "alpha": "golden",
                "c": 0.25, "seed": 0}, ("construction", "x", "alpha", "c", "seed"), _witness),
    Experiment("steinhaus-moments", "empirical moments of Steinhaus partial sums",
               {"T": 1000, "power": [2, 4], "samples": 200, "seed": 0},
               ("T", "power", "samples", "seed"), _moments),
]}
