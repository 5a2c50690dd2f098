"""Extremal and illustrative multiplicative functions.

Every generator returns a :class:`Construction`: the function, the value the
construction is designed to produce, and the auxiliary quantities that went
into it.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .arith import factorize, prime_pi, primes_between, primes_up_to
from .characters import DirichletCharacter, enumerate_characters, gauss_sum, primitive_characters
from .errors import ConstructionError, DomainError
from .expsum import _Alpha, e_of, exp_sum, fsum_complex, log_cut_M, prime_sum
from .multfun import MultiplicativeFunction, from_character, steinhaus
from .smooth import smooth_enumerate

log = logging.getLogger(__name__)


@dataclass
class Construction:
    """A constructed function with its designed value and side data."""

    f: MultiplicativeFunction
    predicted: complex | float | None = None
    info: dict = field(default_factory=dict)


def _zeros(p: np.ndarray) -> np.ndarray:
    return np.zeros(p.shape, dtype=np.complex128)


# --------------------------------------------------------------------------
# large primes aligned against e(p alpha)


def montgomery_vaughan(f_small: MultiplicativeFunction, x: float, alpha) -> Construction:
    """Align every prime in ``(x/2, x]`` with the sum over the rest.

    With ``r e(theta)`` the sum of ``f_small(n) e(n alpha)`` over
    ``x/2``-smooth ``n <= x``, setting ``f(p) = e(theta - p alpha)`` on
    ``(x/2, x]`` makes ``|S_f(x, alpha)| = r + pi(x) - pi(x/2)``.
    """
    half = x / 2.0
    al = _Alpha.of(alpha)

    def small_rule(p: np.ndarray) -> np.ndarray:
        out = _zeros(p)
        keep = p <= half
        out[keep] = f_small.prime_values(p[keep])
        return out

    power = None
    if not f_small.completely_multiplicative:
        power = lambda p, k: f_small.value(p, k) if p <= half else 0.0
    base = MultiplicativeFunction(small_rule, power, name=f"{f_small.name}|<=x/2")
    smooth_part = exp_sum(base, x, alpha).value
    r = abs(smooth_part)
    theta = math.atan2(smooth_part.imag, smooth_part.real) / (2 * math.pi) if r > 0 else 0.0

    def rule(p: np.ndarray) -> np.ndarray:
        out = small_rule(p)
        top = (p > half) & (p <= x)
        out[top] = np.exp(2j * np.pi * (theta - al.phases(p[top])))
        return out

    f = MultiplicativeFunction(rule, power, name="montgomery-vaughan")
    band = prime_pi(x) - prime_pi(half)
    return Construction(f, r + band, {"r": r, "theta": theta, "band": band,
                                      "smooth_part": smooth_part})


def example_1(x: float, alpha, z: float, h: int = 1, seed: int = 0) -> Construction:
    """Aligned window ``(z, 2z]`` with ``f(p) = e(-h p alpha)``, Steinhaus elsewhere."""
    if not 0 < z <= x / 2:
        raise DomainError("need 0 < z <= x/2")
    al = _Alpha.of(alpha)
    rnd = steinhaus(seed)

    def rule(p: np.ndarray) -> np.ndarray:
        out = rnd.prime_values(p)
        win = (p > z) & (p <= 2 * z)
        out[win] = np.exp(-2j * np.pi * al.phases(h * p[win]))
        return out

    f = MultiplicativeFunction(rule, seed=seed, name="example-1")
    band = prime_pi(2 * z) - prime_pi(z)
    return Construction(f, float(band), {"z": z, "h": h, "band": band})


def example_1b(x: float, alpha) -> Construction:
    """Balanced signs on ``(x/2, x]`` so the full sum collapses to ``e(alpha) + delta``.

    ``y`` is the prime with ``pi(x) - pi(y) = pi(y) - pi(x/2) - delta``;
    ``f(p) = e(-p alpha)`` on ``(x/2, y]``, ``-e(-p alpha)`` on ``(y, x]`` and
    0 on primes up to ``x/2``.
    """
    if x < 100:
        raise DomainError("example_1b needs x >= 100")
    half = x / 2.0
    band = primes_between(half, x)
    N = band.size
    delta = N % 2
    k = (N + delta) // 2
    y = int(band[k - 1])
    al = _Alpha.of(alpha)

    def rule(p: np.ndarray) -> np.ndarray:
        out = _zeros(p)
        top = (p > half) & (p <= x)
        sign = np.where(p[top] <= y, 1.0, -1.0)
        out[top] = sign * np.exp(-2j * np.pi * al.phases(p[top]))
        return out

    f = MultiplicativeFunction(rule, name="example-1b")
    predicted = e_of(Fraction(alpha)) + delta
    return Construction(f, predicted, {"y": y, "delta": delta, "z": y / 2.0,
                                       "aligned": k, "band": N})


# --------------------------------------------------------------------------
# logarithmic sums


def find_secondary(a: int, q: int, r_cap: int | None = None) -> list[tuple[int, int]]:
    """All ``(b, r)`` with ``|a/q - b/r| = 1/(qr)``, ``r < q``, ``r <= r_cap``, ascending in ``r``."""
    out = []
    cap = q - 1 if r_cap is None else min(r_cap, q - 1)
    for r in range(1, cap + 1):
        for s in (1, -1):
            if (a * r - s) % q == 0:
                b = (a * r - s) // q
                if math.gcd(b, r) == 1 and 0 <= b <= r:
                    out.append((b, r))
    return out


def character_pretender(q: int, a: int, chi: DirichletCharacter | None = None,
                        x: float | None = None, r_cap: int = 50,
                        tail_seed: int | None = None) -> Construction:
    """``f(p) = chi(p)`` up to ``q^2`` for a primitive ``chi mod r`` with ``|a/q - b/r| = 1/(qr)``.

    The head sum ``sum_{n <= q^2} f(n) e(na/q)/n`` is designed to be
    ``conj(chi(b)) tau(chi) log(q) / r``. When ``chi`` is omitted the smallest
    admissible ``r`` is used with its first primitive character. Above
    ``q^2`` the function continues as ``chi`` unless ``tail_seed`` asks for
    Steinhaus values there.
    """
    if math.gcd(a, q) != 1:
        raise DomainError("a must be coprime to q")
    pairs = find_secondary(a, q, r_cap if chi is None else chi.q)
    if chi is not None:
        pairs = [(b, r) for b, r in pairs if r == chi.q]
        if not chi.is_primitive:
            raise DomainError("chi must be primitive")
    else:
        pairs = [(b, r) for b, r in pairs if primitive_characters(r)]
    if not pairs:
        raise ConstructionError(f"no (b, r) with |{a}/{q} - b/r| = 1/(qr) and r <= {r_cap}")
    b, r = pairs[0]
    if chi is None:
        chi = primitive_characters(r)[-1]
    cut = q * q
    tail = steinhaus(tail_seed) if tail_seed is not None else None

    def rule(p: np.ndarray) -> np.ndarray:
        out = chi.values[p % chi.q].astype(np.complex128)
        if tail is not None:
            hi = p > cut
            out[hi] = tail.prime_values(p[hi])
        return out

    f = MultiplicativeFunction(rule, name="character-pretender")
    tau = gauss_sum(chi)
    predicted = np.conj(chi(b)) * tau * math.log(q) / r
    return Construction(f, complex(predicted), {"b": b, "r": r, "chi": chi, "tau": tau,
                                                "cut": cut, "x": x})


def head_sum(f: MultiplicativeFunction, q: int, a: int, upto: float | None = None) -> complex:
    """``sum_{n <= q^2} f(n) e(na/q) / n``."""
    return exp_sum(f, q * q if upto is None else upto, Fraction(a, q), mode="log").value


def example_2(q: int, x: float, alpha, h: int = 1, seed: int = 0) -> Construction:
    """``f(p) = e(-h p alpha)`` above ``q^2``, independent Steinhaus prime powers below."""
    cut = q * q
    al = _Alpha.of(alpha)
    rnd = steinhaus(seed, completely=False)

    def rule(p: np.ndarray) -> np.ndarray:
        out = rnd.prime_values(p)
        hi = p > cut
        out[hi] = np.exp(-2j * np.pi * al.phases(h * p[hi]))
        return out

    def power(p: int, k: int) -> complex:
        if p > cut:
            return complex(np.exp(-2j * np.pi * k * al.phases(np.array([h * p]))[0]))
        return rnd.value(p, k)

    f = MultiplicativeFunction(rule, power, seed=seed, name="example-2")
    G = prime_sum(f, cut, x, alpha, h, mode="log")
    return Construction(f, G, {"q": q, "h": h, "cut": cut})


def example_2b(q: int, x: float, alpha, M: float | None = None) -> Construction:
    """``f(2) = -1``; ``e(-2p alpha)`` on ``[q^2, y]``; ``e(-p alpha)`` on ``(y, x]``.

    ``y = exp((log x)^{2/3} (2 log q)^{1/3})``. Every other prime power,
    including those up to ``M``, is 0. The log sum over ``(q^2, x]`` stays
    bounded although the prime sums with ``h = 1, 2`` are large.
    """
    if M is None:
        M = log_cut_M(x)
    cut = q * q
    y = math.exp(math.log(x) ** (2 / 3) * (2 * math.log(q)) ** (1 / 3))
    al = _Alpha.of(alpha)

    def rule(p: np.ndarray) -> np.ndarray:
        out = _zeros(p)
        out[p == 2] = -1.0
        mid = (p >= cut) & (p <= y)
        out[mid] = np.exp(-2j * np.pi * al.phases(2 * p[mid]))
        hi = (p > y) & (p <= x)
        out[hi] = np.exp(-2j * np.pi * al.phases(p[hi]))
        return out

    f = MultiplicativeFunction(rule, lambda p, k: 0.0, name="example-2b")
    return Construction(f, None, {"q": q, "y": y, "M": M, "cut": cut})


def six_term_bracket(ell: int) -> complex:
    """``sum_{a=1}^{6} g(a) e((a - 6 b_a)/(6 ell))`` with ``6 b_a = a mod ell``.

    ``g(2^k) = g(3^k) = -1``, ``g = 1`` on other prime powers. Each phase is a
    multiple of ``1/6``, reduced exactly.
    """
    inv6 = pow(6, -1, ell)
    total = 0j
    for a in range(1, 7):
        b = a * inv6 % ell
        g = _g23(a)
        total += g * e_of(Fraction(a - 6 * b, 6 * ell))
    return total


def _g23(n: int) -> int:
    out = 1
    for p, _ in factorize(n).factors:
        if p in (2, 3):
            out = -out
    return out


def example_2_3(ell: int, x: float | None = None, chi: DirichletCharacter | None = None) -> Construction:
    """``f = g chi`` with ``chi`` primitive mod a squarefree ``ell`` coprime to 6.

    Here ``g(2^k) = g(3^k) = -1`` and ``g = 1`` elsewhere, and ``q = 6 ell``.
    The predicted size of ``|sum_{n <= x} f(n) e(n/q)/n|`` is
    ``(4/sqrt 6) log x / sqrt q``.
    """
    if ell < 5 or math.gcd(ell, 6) != 1 or factorize(ell).mobius == 0:
        raise DomainError(f"ell = {ell} must be squarefree, coprime to 6 and above 2")
    if chi is None:
        prims = primitive_characters(ell)
        if not prims:
            raise DomainError(f"no primitive character modulo {ell}")
        chi = prims[0]
    elif chi.q != ell or not chi.is_primitive:
        raise DomainError("chi must be primitive modulo ell")

    def rule(p: np.ndarray) -> np.ndarray:
        out = chi.values[p % ell].astype(np.complex128)
        out[(p == 2) | (p == 3)] *= -1.0
        return out

    def power(p: int, k: int) -> complex:
        v = chi(p) ** k
        return -v if p in (2, 3) else v

    f = MultiplicativeFunction(rule, power, name=f"example-2.3[{ell}]")
    q = 6 * ell
    info = {"q": q, "chi": chi, "bracket": six_term_bracket(ell)}
    predicted = None
    if x is not None:
        predicted = 4.0 / math.sqrt(6.0) * math.log(x) / math.sqrt(q)
    return Construction(f, predicted, info)


def l2_constant(terms: int = 10**6) -> float:
    """``(sum_{2 <= m <= terms} m^{-2})^{1/2}``, approaching ``sqrt(pi^2/6 - 1)``."""
    m = np.arange(2, terms + 1, dtype=np.float64)
    return math.sqrt(math.fsum(1.0 / (m * m)))


def equidistribution_gap(q: int, lo: float, hi: float) -> tuple[float, float]:
    """``(max_b |sum_{lo<p<=hi, p=b (q)} 1/p - S/phi(q)|, S)`` over reduced ``b``."""
    p = primes_between(lo, hi)
    p = p[np.gcd(p, q) == 1]
    w = 1.0 / p.astype(np.float64)
    S = math.fsum(w)
    per = np.bincount(p % q, weights=w, minlength=q)
    units = np.flatnonzero(np.gcd(np.arange(q), q) == 1)
    gap = float(np.max(np.abs(per[units] - S / factorize(q).phi))) if units.size else 0.0
    return gap, S


def hybrid_example(q: int, x: float, r: int = 3, chi: DirichletCharacter | None = None,
                   y: float | None = None, tol_fraction: float = 0.05) -> Construction:
    """Character pretender below ``q^2`` and ``f(p) = e(-p alpha)`` above, ``alpha = a/q``.

    ``a = r^{-1} mod q`` so that ``|a/q - b/r| = 1/(qr)``. Equidistribution of
    ``1/p`` over classes mod ``q`` on ``(y, x/y]`` (``y = q^3`` by default) is
    measured and accepted when the worst deviation is at most
    ``tol_fraction * S`` with ``S`` the full sum of ``1/p``; failure is logged
    and flagged, not fatal. The check is vacuous when ``x <= y^2``.
    """
    if math.gcd(r, q) != 1 or r >= q:
        raise DomainError("need gcd(r, q) = 1 and r < q")
    a = pow(r, -1, q)
    if chi is None:
        prims = primitive_characters(r)
        if not prims:
            raise ConstructionError(f"no primitive character modulo {r}")
        chi = prims[-1]
    alpha = Fraction(a, q)
    cut = q * q
    al = _Alpha.of(alpha)

    def rule(p: np.ndarray) -> np.ndarray:
        out = chi.values[p % chi.q].astype(np.complex128)
        hi = p > cut
        out[hi] = np.exp(-2j * np.pi * al.phases(p[hi]))
        return out

    f = MultiplicativeFunction(rule, name="hybrid")
    if y is None:
        y = float(q) ** 3
    vacuous = x / y <= y
    gap, S = (0.0, 0.0) if vacuous else equidistribution_gap(q, y, x / y)
    tol = tol_fraction * S
    ok = gap <= tol
    if not ok:
        log.warning("equidistribution check failed for q=%d: gap %.3g > %.3g", q, gap, tol)
    b = (a * r - 1) // q
    tau = gauss_sum(chi)
    head_pred = complex(np.conj(chi(b)) * tau * math.log(q) / r)
    tail_exact = math.fsum(1.0 / primes_between(cut, x).astype(np.float64))
    return Construction(f, head_pred, {
        "a": a, "b": b, "r": r, "alpha": alpha, "chi": chi, "cut": cut,
        "tail_prime_sum": tail_exact, "equidistributed": ok, "equidistribution_vacuous": vacuous,
        "equidistribution_gap": gap, "equidistribution_tol": tol,
        "lower_bound": math.log(math.log(x) / math.log(q)) / 6.0,
    })


# --------------------------------------------------------------------------
# random functions


def steinhaus_sampler(seed: int, prime_range: float | None = None) -> MultiplicativeFunction:
    """Completely multiplicative, ``f(p)`` i.i.d. uniform on the unit circle."""
    return steinhaus(seed, limit=prime_range)


@dataclass(frozen=True)
class MomentEstimate:
    mean: float
    stderr: float
    samples: int


def steinhaus_moments(T: int, seeds, power: int = 2) -> MomentEstimate:
    """Empirical ``E |sum_{n <= T} f(n)|^power`` over Steinhaus functions."""
    vals = np.array([abs(steinhaus(s).values(T)[1:].sum()) ** power for s in seeds])
    err = float(vals.std(ddof=1) / math.sqrt(vals.size)) if vals.size > 1 else math.inf
    return MomentEstimate(float(vals.mean()), err, int(vals.size))


def smooth_minor_extremal(x: float, y: float, q: int, a: int, seed: int,
                          c0: float = 0.1, eps: float = 0.05) -> Construction:
    """Steinhaus below ``2x/y``, zero on ``(2x/y, y/2]``, aligned top band ``(y/2, y]``.

    Each top prime gets ``f(p) = e^{-i theta_p}`` with ``theta_p`` the argument
    of ``sum_{n <= x/p} f(n) e(n p a/q)``, so the ``y``-smooth sum equals
    ``sum_p |inner_p|`` plus the sum over ``2x/y``-smooth ``n``.
    """
    if math.gcd(a, q) != 1:
        raise DomainError("a must be coprime to q")
    if 4 * x >= y * y:
        raise ConstructionError("need x < y^2/4 so that top-band primes cannot pair up")
    low = 2 * x / y
    rnd = steinhaus(seed)
    N0 = int(math.floor(low))
    small = rnd.values(N0)
    top = primes_between(y / 2, y)
    inner = np.empty(top.size, dtype=np.complex128)
    n = np.arange(1, N0 + 1, dtype=np.int64)
    chunk = max(1, (1 << 22) // max(N0, 1))
    for s in range(0, top.size, chunk):
        p = top[s:s + chunk]
        lim = (x // p).astype(np.int64)
        ph = ((np.outer(p % q, n) % q) * a) % q
        terms = small[1:] * np.exp(2j * np.pi * ph / q)
        terms[n[None, :] > lim[:, None]] = 0
        inner[s:s + chunk] = terms.sum(axis=1)
    align = np.where(np.abs(inner) > 0, np.exp(-1j * np.angle(inner)), 1.0)
    table = dict(zip(top.tolist(), align.tolist()))
    keys = top

    def rule(p: np.ndarray) -> np.ndarray:
        out = _zeros(p)
        lo = p <= low
        out[lo] = rnd.prime_values(p[lo])
        hi = (p > y / 2) & (p <= y)
        if hi.any():
            pos = np.searchsorted(keys, p[hi])
            out[hi] = align[pos]
        return out

    def power(p: int, k: int) -> complex:
        if p <= low:
            return rnd.value(p) ** k
        if y / 2 < p <= y:
            return table[p] ** k
        return 0.0

    f = MultiplicativeFunction(rule, power, seed=seed, name="smooth-minor")
    smooth_n = smooth_enumerate(x, low)
    rest = fsum_complex(rnd.values_at(smooth_n, prime_bound=low)
                        * _Alpha.of(Fraction(a, q)).unit(smooth_n))
    top_sum = math.fsum(np.abs(inner))
    Lx = math.log(x)
    scale = math.sqrt(x * y) / Lx
    in_range = (y >= x * math.exp(-(0.5 - eps) * math.sqrt(Lx))
                and ((x / y) ** 2 * Lx ** 1.5) ** (1 + eps) <= q <= x * math.exp(-1.5 * math.sqrt(Lx)))
    return Construction(f, rest + top_sum, {
        "rest": rest, "top_sum": top_sum, "A1": abs(rest) <= 2 * math.sqrt(x),
        "A2": top_sum >= c0 * scale, "scale": scale, "in_range": in_range,
    })
