"""Exponential sums with multiplicative coefficients.

Phases ``n alpha mod 1`` are computed exactly: a rational ``alpha = a/q``
reduces in integer arithmetic, and a float ``alpha`` is carried as a 62-bit
fixed-point fraction whose products with ``n`` are reduced in ``uint64``.
Long sums are accumulated with :func:`math.fsum` block by block.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Literal

import numpy as np

from .arith import factorize, primes_between, primes_up_to
from .characters import DirichletCharacter, enumerate_characters, gauss_sum
from .errors import DomainError, ResourceError
from .multfun import BLOCK, MultiplicativeFunction
from .smooth import smooth_enumerate

SUM_CAP = 10**8
SMOOTH_CAP = 10**7

Mode = Literal["unweighted", "log"]

_FIX_BITS = 62
_FIX_ONE = 1 << _FIX_BITS
_LOW_BITS = 31


# --------------------------------------------------------------------------
# phases


def e_of(theta) -> complex:
    """``exp(2 pi i theta)`` after reducing ``theta`` mod 1.

    ``Fraction`` and ``int`` arguments are reduced exactly; quarter turns
    return exact values.
    """
    if isinstance(theta, (int, Fraction)):
        r = Fraction(theta) % 1
        if (4 * r).denominator == 1:
            return (1 + 0j, 1j, -1 + 0j, -1j)[int(4 * r)]
        r = float(r)
    else:
        theta = float(theta)
        if not math.isfinite(theta):
            raise DomainError(f"e(theta) needs finite theta, got {theta}")
        r = theta - math.floor(theta)
        if 4 * r == int(4 * r):
            return (1 + 0j, 1j, -1 + 0j, -1j)[int(4 * r) % 4]
    ang = 2.0 * math.pi * r
    return complex(math.cos(ang), math.sin(ang))


@dataclass(frozen=True)
class _Alpha:
    """``alpha`` as an exact rational ``num/den`` or a 62-bit fixed-point value."""

    num: int
    den: int

    @classmethod
    def of(cls, alpha) -> _Alpha:
        if isinstance(alpha, RationalApprox):
            alpha = alpha.alpha
        if isinstance(alpha, _Alpha):
            return alpha
        frac = Fraction(alpha) % 1
        if frac.denominator < (1 << _LOW_BITS):
            return cls(frac.numerator, frac.denominator)
        return cls(int(round(frac * _FIX_ONE)) % _FIX_ONE, _FIX_ONE)

    def phases(self, n: np.ndarray) -> np.ndarray:
        """``n alpha mod 1`` in ``[0, 1)`` for nonnegative ``n < 2^32``."""
        n = np.asarray(n, dtype=np.int64)
        if self.den < (1 << _LOW_BITS):
            return ((n % self.den) * self.num % self.den) / self.den
        un = n.astype(np.uint64)
        hi = np.uint64(self.num >> _LOW_BITS)
        lo = np.uint64(self.num & ((1 << _LOW_BITS) - 1))
        low_mask = np.uint64((1 << _LOW_BITS) - 1)
        part = ((un * hi) & low_mask) << np.uint64(_LOW_BITS)
        total = (part + un * lo) & np.uint64(_FIX_ONE - 1)
        return total.astype(np.float64) / float(_FIX_ONE)

    def unit(self, n: np.ndarray) -> np.ndarray:
        """``e(n alpha)``."""
        return np.exp(2j * np.pi * self.phases(n))


def e_n_alpha(n, alpha) -> np.ndarray:
    """``e(n alpha)`` for an integer array ``n`` with exact phase reduction."""
    return _Alpha.of(alpha).unit(n)


# --------------------------------------------------------------------------
# rational approximation


@dataclass(frozen=True)
class RationalApprox:
    """A convergent ``a/q`` of ``alpha`` with ``|alpha - a/q| <= 1/(q Q)``."""

    alpha: float | Fraction
    a: int
    q: int
    Q: float
    error: float

    @property
    def certified(self) -> bool:
        return self.error <= 1.0 / (self.q * self.Q) and math.gcd(self.a, self.q) == 1

    def as_fraction(self) -> Fraction:
        return Fraction(self.a, self.q)


def convergents(alpha, limit: int = 200):
    """Continued-fraction convergents ``(p_k, q_k)`` of the exact value of ``alpha``."""
    x = Fraction(alpha)
    p0, q0, p1, q1 = 0, 1, 1, 0
    for _ in range(limit):
        a = math.floor(x)
        p0, q0, p1, q1 = p1, q1, a * p1 + p0, a * q1 + q0
        yield p1, q1
        frac = x - a
        if frac == 0:
            return
        x = 1 / frac


def best_approx(alpha, Q: float) -> RationalApprox:
    """The last convergent ``a/q`` of ``alpha`` with ``q <= Q``.

    Dirichlet's theorem guarantees ``|alpha - a/q| <= 1/(q Q)``; the
    certificate is checked and stored on the result.
    """
    if Q < 1:
        raise DomainError(f"Q must be at least 1, got {Q}")
    exact = Fraction(alpha)
    if not 0 <= exact < 1:
        raise DomainError(f"alpha must lie in [0, 1), got {alpha}")
    a, q = 0, 1
    for p_k, q_k in convergents(exact):
        if q_k > Q:
            break
        a, q = p_k, q_k
    err = float(abs(exact - Fraction(a, q)))
    out = RationalApprox(alpha, a, q, float(Q), err)
    if not out.certified:
        raise AssertionError(f"convergent {a}/{q} fails the Dirichlet certificate")
    return out


# --------------------------------------------------------------------------
# sums


@dataclass(frozen=True)
class SumResult:
    """A compensated exponential sum and its diagnostics.

    Attributes:
        value: The sum.
        n_terms: Number of ``n`` summed over.
        mode: ``"unweighted"`` or ``"log"`` (terms divided by ``n``).
        y: Smoothness cap, or None.
        error_estimate: ``|fsum - naive sum|``, a proxy for rounding error.
    """

    value: complex
    n_terms: int
    mode: str
    y: float | None = None
    error_estimate: float = 0.0
    x: float = 0.0
    lo: float = 0.0

    def __abs__(self) -> float:
        return abs(self.value)


class _Accumulator:
    def __init__(self) -> None:
        self.re: list[float] = []
        self.im: list[float] = []
        self.naive = 0j
        self.count = 0

    def add(self, terms: np.ndarray) -> None:
        self.re.append(math.fsum(terms.real))
        self.im.append(math.fsum(terms.imag))
        self.naive += complex(terms.sum())
        self.count += terms.size

    def total(self) -> tuple[complex, float]:
        val = complex(math.fsum(self.re), math.fsum(self.im))
        return val, abs(val - self.naive)


def _check_cap(x: float, cap: int, what: str) -> None:
    if x > cap:
        raise ResourceError(f"x = {x:g} exceeds the {what} cap {cap:g}")


def exp_sum(f: MultiplicativeFunction, x: float, alpha, mode: Mode = "unweighted",
            y: float | None = None, lo: float = 0) -> SumResult:
    """``sum_{lo < n <= x} f(n) e(n alpha)`` (divided by ``n`` in log mode).

    With ``y`` below ``x`` only ``y``-smooth ``n`` are included; a cap at or
    above ``x`` is the unrestricted sum.
    """
    if mode not in ("unweighted", "log"):
        raise DomainError(f"unknown weight mode {mode!r}")
    N = int(math.floor(x))
    start = max(int(math.floor(lo)) + 1, 1)
    al = _Alpha.of(alpha)
    acc = _Accumulator()
    if y is not None and y < N:
        _check_cap(x, SMOOTH_CAP, "smooth-sum")
        n = smooth_enumerate(N, y)
        n = n[n >= start]
        for s in range(0, n.size, BLOCK):
            blk = n[s:s + BLOCK]
            terms = f.values_at(blk, prime_bound=y) * al.unit(blk)
            if mode == "log":
                terms = terms / blk
            acc.add(terms)
    else:
        _check_cap(x, SUM_CAP, "sum")
        for b in range(start, N + 1, BLOCK):
            e = min(N + 1, b + BLOCK)
            n = np.arange(b, e, dtype=np.int64)
            terms = f.values_range(b, e) * al.unit(n)
            if mode == "log":
                terms = terms / n
            acc.add(terms)
    val, err = acc.total()
    return SumResult(val, acc.count, mode, y, err, float(x), float(lo))


def fsum_complex(z: np.ndarray) -> complex:
    return complex(math.fsum(np.real(z)), math.fsum(np.imag(z)))


def prefix_sums(f: MultiplicativeFunction, x: float, alpha) -> np.ndarray:
    """``S[N] = sum_{n <= N} f(n) e(n alpha)`` for ``0 <= N <= x``."""
    N = int(math.floor(x))
    vals = f.values(N)
    vals[1:] *= _Alpha.of(alpha).unit(np.arange(1, N + 1))
    return np.cumsum(vals)


def prime_sum(f: MultiplicativeFunction, lo: float, hi: float, alpha, h: int = 1,
              mode: Mode = "unweighted") -> complex:
    """``sum_{lo < p <= hi} f(p) e(h p alpha)`` (divided by ``p`` in log mode)."""
    p = primes_between(lo, hi)
    terms = f.prime_values(p) * _Alpha.of(alpha).unit(h * p)
    if mode == "log":
        terms = terms / p
    return fsum_complex(terms)


# --------------------------------------------------------------------------
# decompositions


@dataclass(frozen=True)
class Decomposition:
    """Both sides of a decomposition identity and their gap."""

    lhs: complex
    rhs: complex
    residual: float
    benchmark: float
    in_range: bool
    params: dict = field(default_factory=dict)

    def __iter__(self):
        return iter((self.lhs, self.rhs, self.residual))

    @property
    def ratio(self) -> float:
        return self.residual / self.benchmark if self.benchmark else math.inf


def minor_arc_range(x: float, q: int, eps: float = 0.05) -> bool:
    """Whether ``(log x)^{2+eps} <= q <= x/(log x)^{2+eps}``."""
    L = math.log(x) ** (2 + eps)
    return L <= q <= x / L


def decompose_thm_unweighted(f: MultiplicativeFunction, x: float, alpha, M: int,
                             q: int | None = None, eps: float = 0.05) -> Decomposition:
    """Compare ``sum_{n <= x} f(n) e(n alpha)`` with the large-prime sum
    ``sum_{m <= M} f(m) sum_{x/M < p <= x/m} f(p) e(m p alpha)``.

    The benchmark is ``x / (sqrt(M) log x)``. The range flag records whether
    ``q`` (found from ``alpha`` when omitted) satisfies the minor-arc range and
    ``2 <= M <= q^{1-eps/4} / (log x)^2``.
    """
    if M < 2:
        raise DomainError("M must be at least 2")
    M = int(M)
    lhs = exp_sum(f, x, alpha).value
    al = _Alpha.of(alpha)
    p = primes_between(x / M, x)
    fp = f.prime_values(p)
    parts = []
    for m in range(1, M + 1):
        fm = f(m)
        if fm == 0:
            continue
        sel = p <= x / m
        parts.append(fm * fp[sel] * al.unit(m * p[sel]))
    rhs = fsum_complex(np.concatenate(parts)) if parts else 0j
    if q is None:
        q = best_approx(alpha, x).q
    Lx = math.log(x)
    ok = minor_arc_range(x, q, eps) and q <= x ** (1 - eps) and M <= q ** (1 - eps / 4) / Lx ** 2
    return Decomposition(lhs, rhs, abs(lhs - rhs), x / (math.sqrt(M) * Lx), ok,
                         {"x": x, "M": M, "q": q})


def log_cut_M(x: float) -> float:
    """``(log log x)^3``."""
    return math.log(math.log(x)) ** 3


def decompose_log(f: MultiplicativeFunction, x: float, alpha, q: int | None = None,
                  M: float | None = None, eps: float = 0.05) -> Decomposition:
    """Compare ``sum_{q^2 < n <= x} f(n) e(n alpha)/n`` with
    ``sum_{m <= M} f(m)/m sum_{q^2 < p <= x/m} f(p) e(m p alpha)/p``.

    ``q`` comes from ``alpha`` when it is a :class:`RationalApprox`, else from
    the best approximation with denominator at most ``sqrt(x)``. ``M``
    defaults to ``(log log x)^3``. The benchmark is 1.
    """
    if q is None:
        q = alpha.q if isinstance(alpha, RationalApprox) else best_approx(alpha, math.sqrt(x)).q
    if M is None:
        M = log_cut_M(x)
    q2 = q * q
    if q2 >= x:
        raise DomainError(f"q^2 = {q2} must be below x = {x}")
    lhs = exp_sum(f, x, alpha, mode="log", lo=q2).value
    al = _Alpha.of(alpha)
    p = primes_between(q2, x)
    fp = f.prime_values(p) / p
    parts = []
    for m in range(1, int(math.floor(M)) + 1):
        fm = f(m)
        if fm == 0:
            continue
        sel = p <= x / m
        parts.append((fm / m) * fp[sel] * al.unit(m * p[sel]))
    rhs = fsum_complex(np.concatenate(parts)) if parts else 0j
    ok = minor_arc_range(x, q, eps) and q <= x ** (0.5 - eps)
    return Decomposition(lhs, rhs, abs(lhs - rhs), 1.0, ok, {"x": x, "M": M, "q": q})


# --------------------------------------------------------------------------
# character expansion on major arcs


def char_identity_check(f: MultiplicativeFunction, x: float, a: int, q: int) -> float:
    """Largest gap between the two sides of the character expansion

    ``sum_{q^3 <= n <= x} f(n) e(an/q)/n = sum_{r | q} f(r)/r 1/phi(q/r)
    sum_{chi mod q/r} tau(chi) conj(chi(a)) sum_{q^3/r <= n <= x/r} f(n) conj(chi(n))/n``

    for completely multiplicative ``f``. Returns ``|lhs - rhs|``.
    """
    if math.gcd(a, q) != 1:
        raise DomainError("a must be coprime to q")
    if q ** 3 >= x:
        raise DomainError(f"q^3 = {q ** 3} must be below x = {x}")
    if not f.completely_multiplicative:
        raise DomainError("the expansion needs a completely multiplicative f")
    lhs, rhs = char_identity_sides(f, x, a, q)
    return abs(lhs - rhs)


def char_identity_sides(f: MultiplicativeFunction, x: float, a: int, q: int) -> tuple[complex, complex]:
    N = int(math.floor(x))
    fv = f.values(N)
    n = np.arange(N + 1)
    lo = q ** 3
    lhs = fsum_complex(fv[lo:] * _Alpha.of(Fraction(a, q)).unit(n[lo:]) / n[lo:])
    rhs = []
    for r in factorize(q).divisors:
        Q = q // r
        start = -(-lo // r)
        stop = N // r
        m = n[start:stop + 1]
        w = fv[start:stop + 1] / m
        outer = f(r) / r / factorize(Q).phi
        if outer == 0 or m.size == 0:
            continue
        inner = []
        for chi in enumerate_characters(Q):
            coeff = gauss_sum(chi) * np.conj(chi(a))
            inner.append(coeff * fsum_complex(w * np.conj(chi.values[m % Q])))
        rhs.append(outer * fsum_complex(np.array(inner)))
    return lhs, fsum_complex(np.array(rhs)) if rhs else 0j


def gauss_main_term(chi: DirichletCharacter, a: int, x: float) -> complex:
    """``conj(chi(a)) tau(chi) x / q``."""
    return np.conj(chi(a)) * gauss_sum(chi) * x / chi.q


def gauss_residuals(chi: DirichletCharacter, a: int, x: float) -> np.ndarray:
    """``|S_chi(N, a/q) - conj(chi(a)) tau(chi) N / q|`` for every ``N <= x``."""
    q = chi.q
    N = int(math.floor(x))
    n = np.arange(1, N + 1)
    terms = chi.values[n % q] * _Alpha.of(Fraction(a, q)).unit(n)
    S = np.cumsum(terms)
    main = np.conj(chi(a)) * gauss_sum(chi) * n / q
    return np.abs(S - main)


def smooth_character_sum(chi: DirichletCharacter, x: float, y: float, a: int) -> complex:
    """``sum_{n <= x, P^+(n) <= y} chi(n) e(an/q)`` by direct summation."""
    q = chi.q
    n = smooth_enumerate(x, y)
    return fsum_complex(chi.values[n % q] * _Alpha.of(Fraction(a, q)).unit(n))


def smooth_character_sum_by_classes(chi: DirichletCharacter, x: float, y: float, a: int) -> complex:
    """The same sum regrouped by residue class:
    ``sum_{b mod q} chi(b) e(ab/q) Psi(x, y; q, b)``."""
    q = chi.q
    n = smooth_enumerate(x, y)
    counts = np.bincount(n % q, minlength=q)
    b = np.arange(q)
    return fsum_complex(chi.values * _Alpha.of(Fraction(a, q)).unit(b) * counts)


# --------------------------------------------------------------------------
# witnesses


@dataclass(frozen=True)
class Witness:
    """A window ``(z, 2z]`` and frequency ``h`` with a large prime sum."""

    h: int
    z: float
    prime_sum: complex
    score: float
    threshold: float


def witness_h_max(c: float, C: float = 4.0) -> int:
    return max(1, math.ceil(C * (1.0 / c) ** 2 * math.log(1.0 / c)))


def witness_search(f: MultiplicativeFunction, x: float, alpha, c: float, C: float = 4.0,
                   h_max: int | None = None, z_min: float | None = None) -> Witness | None:
    """Search ``h <= C (1/c)^2 log(1/c)`` and ``z`` for a large
    ``|sum_{z < p <= 2z} f(p) e(h p alpha)|``.

    Windows must satisfy ``z_min <= z <= x/(2h)`` with ``z_min`` defaulting to
    ``c^2 x / log(1/c)``. Every window endpoint at which the sum can change
    (``z = p`` or ``z = p/2``) is scanned, so the maximum of the normalised
    score ``|sum| log z / z`` is exact. Returns None when the best score is
    below ``c^3 / log(1/c)``.
    """
    if not 0 < c < 1:
        raise DomainError("c must lie in (0, 1)")
    if h_max is None:
        h_max = witness_h_max(c, C)
    if z_min is None:
        z_min = c * c * x / math.log(1.0 / c)
    threshold = c ** 3 / math.log(1.0 / c)
    p = primes_up_to(x)
    if p.size == 0:
        return None
    fp = f.prime_values(p)
    live = fp != 0
    al = _Alpha.of(alpha)
    pf = p.astype(np.float64)
    breaks = np.unique(np.concatenate([pf, pf / 2.0]))
    best = None
    for h in range(1, h_max + 1):
        z_hi = x / (2 * h)
        if z_hi < max(z_min, 2.0):
            break
        zs = breaks[(breaks >= z_min) & (breaks <= z_hi)]
        zs = np.unique(np.append(zs, z_hi))
        terms = np.where(live, fp * al.unit(h * p), 0)
        S = np.concatenate([[0], np.cumsum(terms)])
        i_lo = np.searchsorted(pf, zs, side="right")
        i_hi = np.searchsorted(pf, 2 * zs, side="right")
        sums = S[i_hi] - S[i_lo]
        scores = np.abs(sums) * np.log(zs) / zs
        k = int(np.argmax(scores))
        if best is None or scores[k] > best[0]:
            best = (float(scores[k]), h, float(zs[k]))
    if best is None or best[0] < threshold:
        return None
    _, h, z = best
    ps = prime_sum(f, z, 2 * z, alpha, h)
    return Witness(h, z, ps, abs(ps) * math.log(z) / z, threshold)


def log_witness(f: MultiplicativeFunction, x: float, alpha, h_max: int,
                lo: float = 0) -> list[tuple[int, complex]]:
    """``sum_{lo < p <= x} f(p) e(h p alpha) / p`` for ``h = 1..h_max``."""
    return [(h, prime_sum(f, lo, x, alpha, h, mode="log")) for h in range(1, h_max + 1)]


# --------------------------------------------------------------------------
# cross-checks


def transfer_check(f: MultiplicativeFunction, x: float, a: int, q: int,
                   beta: float) -> tuple[float, float]:
    """``(|S(x, a/q + beta)|, (1 + 2 pi) max_{N <= x} |S(N, a/q)|)``.

    For ``|beta| <= 1/x`` summation by parts gives ``lhs <= rhs``.
    """
    N = int(math.floor(x))
    fv = f.values(N)[1:]
    n = np.arange(1, N + 1)
    base = fv * _Alpha.of(Fraction(a, q)).unit(n)
    S = np.cumsum(base)
    lhs = abs(fsum_complex(base * np.exp(2j * np.pi * beta * n)))
    return lhs, (1.0 + 2.0 * math.pi) * float(np.max(np.abs(S)))


def abel_check(f: MultiplicativeFunction, x: float, alpha) -> tuple[complex, complex]:
    """Log-weighted sum directly and via summation by parts from the
    unweighted prefix sums: ``S(N)/N + sum_{n < N} S(n) (1/n - 1/(n+1))``."""
    N = int(math.floor(x))
    direct = exp_sum(f, N, alpha, mode="log").value
    S = prefix_sums(f, N, alpha)[1:]
    n = np.arange(1, N + 1, dtype=np.float64)
    parts = S[:-1] * (1.0 / n[:-1] - 1.0 / n[1:])
    return direct, S[-1] / N + fsum_complex(parts)
