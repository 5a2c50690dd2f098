"""Smooth-number counts, the Dickman function and the saddle point.

Counting caps are module-level configuration values; exceeding one raises
:class:`~explab.errors.ResourceError` rather than falling back to an
approximation.
"""

from __future__ import annotations

import math
import sys
import threading
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _cache
from .arith import primes_up_to
from .errors import DomainError, ResourceError

PSI_CAP = 10**10          # largest x for the Buchstab count
ENUM_CAP = 20_000_000     # largest number of smooth integers materialised
SIEVE_ENUM_CAP = 10**8    # largest x for the factor-table enumeration

RHO_STEP = 1e-3
RHO_UMAX = 50.0


@dataclass(frozen=True)
class SmoothCountQuery:
    """Parameters of a smooth-number count.

    At most one of ``coprime_to`` and ``progression`` may be given.

    Attributes:
        x: Upper limit of the count.
        y: Smoothness bound.
        coprime_to: Count only ``n`` coprime to this modulus.
        progression: ``(q, a)`` to count only ``n = a mod q``; needs ``gcd(a, q) = 1``.
    """

    x: float
    y: float
    coprime_to: int | None = None
    progression: tuple[int, int] | None = None

    def __post_init__(self) -> None:
        if self.x < 0:
            raise DomainError(f"x must be nonnegative, got {self.x}")
        if self.y < 1:
            raise DomainError(f"y must be at least 1, got {self.y}")
        if self.coprime_to is not None and self.progression is not None:
            raise DomainError("give at most one of coprime_to and progression")
        if self.coprime_to is not None and self.coprime_to < 1:
            raise DomainError("coprime_to must be a positive integer")
        if self.progression is not None:
            q, a = self.progression
            if q < 1 or math.gcd(a, q) != 1:
                raise DomainError(f"progression needs gcd(a, q) = 1, got a={a}, q={q}")


# --------------------------------------------------------------------------
# Buchstab recursion


class _Buchstab:
    """Memoised ``Psi(N, p_k)`` via ``Psi(N, p_k) = 1 + sum_{i<=k} Psi(N // p_i, p_i)``."""

    def __init__(self) -> None:
        self.lock = threading.Lock()
        self.primes = primes_up_to(1000)
        self.memo: dict[tuple[int, int], int] = {}

    def _ensure(self, limit: int) -> None:
        if self.primes[-1] < limit:
            self.primes = primes_up_to(max(limit, 2 * int(self.primes[-1])))

    def count(self, N: int, y: float) -> int:
        with self.lock:
            self._ensure(min(N, int(y)) + 1)
            k = int(np.searchsorted(self.primes, math.floor(y), side="right")) - 1
            old = sys.getrecursionlimit()
            sys.setrecursionlimit(max(old, 10000))
            try:
                return self._psi(N, k)
            finally:
                sys.setrecursionlimit(old)

    def _psi(self, N: int, k: int) -> int:
        if N <= 1:
            return max(N, 0)
        if k < 0:
            return 1
        P = self.primes
        if P[k] >= N:
            return N
        if k == 0:
            return N.bit_length()
        key = (N, k)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        j = int(np.searchsorted(P, math.isqrt(N), side="right")) - 1
        total = 1
        if j < k:
            # primes above sqrt(N): every cofactor N // p < p is p-smooth
            total += int(np.sum(N // P[j + 1:k + 1]))
            k = j
        for i in range(k + 1):
            total += self._psi(N // int(P[i]), i)
        self.memo[key] = total
        return total


_BUCHSTAB = _Buchstab()


def psi_buchstab(x: float, y: float) -> int:
    """``Psi(x, y)`` from the memoised Buchstab recursion."""
    if x > PSI_CAP:
        raise ResourceError(f"x = {x:g} exceeds PSI_CAP = {PSI_CAP:g}; use dickman_rho(u) * x instead")
    if x < 1:
        return 0
    return _BUCHSTAB.count(int(math.floor(x)), y)


def psi(query: SmoothCountQuery | float, y: float | None = None) -> int:
    """Exact count of ``y``-smooth integers ``n <= x``, optionally restricted.

    Accepts either a :class:`SmoothCountQuery` or plain ``(x, y)``. Plain
    counts use the Buchstab recursion; restricted counts enumerate.
    """
    if not isinstance(query, SmoothCountQuery):
        query = SmoothCountQuery(float(query), float(y))
    if query.coprime_to is None and query.progression is None:
        return psi_buchstab(query.x, query.y)
    n = smooth_enumerate(query.x, query.y)
    if query.coprime_to is not None:
        return int(np.count_nonzero(np.gcd(n, query.coprime_to) == 1))
    q, a = query.progression
    return int(np.count_nonzero(n % q == a % q))


def psi_coprime(x: float, y: float, q: int) -> int:
    """``Psi_q(x, y)``: ``y``-smooth ``n <= x`` coprime to ``q``."""
    return psi(SmoothCountQuery(x, y, coprime_to=q))


def psi_progression(x: float, y: float, q: int, a: int) -> int:
    """``Psi(x, y; q, a)``: ``y``-smooth ``n <= x`` with ``n = a mod q``."""
    return psi(SmoothCountQuery(x, y, progression=(q, a)))


# --------------------------------------------------------------------------
# enumeration


def largest_prime_factor_range(lo: int, hi: int) -> np.ndarray:
    """``P^+(n)`` for ``lo <= n < hi`` (``P^+(1) = 1``)."""
    size = hi - lo
    rem = np.arange(lo, hi, dtype=np.int64)
    big = np.ones(size, dtype=np.int64)
    for p in primes_up_to(max(2, math.isqrt(max(hi - 1, 1)))).tolist():
        start = (-lo) % p
        if start >= size:
            continue
        idx = np.arange(start, size, p)
        sub = rem[idx]
        live = sub % p == 0
        while live.any():
            sub[live] //= p
            live &= sub % p == 0
        rem[idx] = sub
        big[idx] = p
    return np.where(rem > 1, rem, big)


def _enumerate_by_products(x: int, primes: np.ndarray) -> np.ndarray:
    arr = np.array([1], dtype=np.int64)
    for p in primes.tolist():
        parts = [arr]
        cur = arr
        while True:
            cur = cur[cur <= x // p] * p
            if cur.size == 0:
                break
            parts.append(cur)
        arr = np.concatenate(parts)
        if arr.size > ENUM_CAP:
            raise ResourceError(f"more than ENUM_CAP = {ENUM_CAP} smooth integers")
    arr.sort()
    return arr


def smooth_enumerate(x: float, y: float) -> np.ndarray:
    """All ``y``-smooth integers ``1 <= n <= x`` in ascending order."""
    if x < 1:
        return np.zeros(0, dtype=np.int64)
    X = int(math.floor(x))
    primes = primes_up_to(min(y, X)) if y >= 2 else np.zeros(0, dtype=np.int64)
    if primes.size <= 64 or X > SIEVE_ENUM_CAP:
        if X > SIEVE_ENUM_CAP and primes.size > 64 and psi(X, y) > ENUM_CAP:
            raise ResourceError(f"Psi({X}, {y}) exceeds ENUM_CAP = {ENUM_CAP}")
        return _enumerate_by_products(X, primes)
    out = []
    count = 0
    for lo in range(1, X + 1, 1 << 20):
        hi = min(X + 1, lo + (1 << 20))
        n = np.arange(lo, hi, dtype=np.int64)
        keep = n[largest_prime_factor_range(lo, hi) <= y]
        count += keep.size
        if count > ENUM_CAP:
            raise ResourceError(f"more than ENUM_CAP = {ENUM_CAP} smooth integers")
        out.append(keep)
    return np.concatenate(out)


# --------------------------------------------------------------------------
# Dickman rho


_INTERIOR = np.array([-1.0, 9.0, 9.0, -1.0]) / 16.0
_LEFT = np.array([5.0, 15.0, -5.0, 1.0]) / 16.0


def _midpoints(seg: np.ndarray) -> np.ndarray:
    """Cubic midpoint interpolation inside one smooth segment (len >= 4)."""
    m = seg.size - 1
    mid = np.empty(m)
    mid[1:m - 1] = (_INTERIOR[0] * seg[0:m - 2] + _INTERIOR[1] * seg[1:m - 1]
                    + _INTERIOR[2] * seg[2:m] + _INTERIOR[3] * seg[3:m + 1])
    mid[0] = _LEFT @ seg[0:4]
    mid[m - 1] = _LEFT[::-1] @ seg[m - 3:m + 1]
    return mid


def _build_rho(h: float, umax: float) -> np.ndarray:
    per = int(round(1.0 / h))
    n_int = int(math.ceil(umax))
    rho = np.ones(per * n_int + 1)
    for k in range(1, n_int):
        prev = rho[(k - 1) * per:k * per + 1]
        u = k + h * np.arange(per + 1)
        g = prev / u
        gm = _midpoints(prev) / (u[:-1] + h / 2)
        steps = (h / 6.0) * (g[:-1] + 4.0 * gm + g[1:])
        rho[k * per + 1:(k + 1) * per + 1] = rho[k * per] - np.cumsum(steps)
    return rho


class _RhoTable:
    def __init__(self) -> None:
        self.lock = threading.Lock()
        self.table: np.ndarray | None = None

    def get(self) -> np.ndarray:
        if self.table is None:
            with self.lock:
                if self.table is None:
                    key = f"rho:h={RHO_STEP!r}:umax={RHO_UMAX!r}"
                    tab = _cache.load(key)
                    if tab is None:
                        tab = _build_rho(RHO_STEP, RHO_UMAX)
                        _cache.store(key, tab)
                    self.table = tab
        return self.table


_RHO = _RhoTable()


def dickman_rho(u: float) -> float:
    """The Dickman function on ``0 <= u <= 50``.

    Grid values come from per-step Simpson integration of ``u rho'(u) =
    -rho(u-1)``; values between grid points use cubic interpolation that stays
    within one unit interval, where rho is smooth.
    """
    if u < 0:
        raise DomainError(f"rho is defined for u >= 0, got {u}")
    if u > RHO_UMAX:
        raise DomainError(f"rho table stops at u = {RHO_UMAX}")
    if u <= 1:
        return 1.0
    if u <= 2:
        return 1.0 - math.log(u)
    tab = _RHO.get()
    per = int(round(1.0 / RHO_STEP))
    k = min(int(u), int(RHO_UMAX) - 1)
    pos = (u - k) * per
    i = min(int(pos), per - 1)
    j0 = min(max(i - 1, 0), per - 3)
    s = pos - j0
    seg = tab[k * per + j0:k * per + j0 + 4]
    nodes = np.arange(4.0)
    w = np.array([np.prod([(s - nodes[m]) / (nodes[l] - nodes[m]) for m in range(4) if m != l])
                  for l in range(4)])
    return float(w @ seg)


# --------------------------------------------------------------------------
# saddle point


@lru_cache(maxsize=64)
def _log_primes(y: float) -> np.ndarray:
    return np.log(primes_up_to(y).astype(np.float64))


def saddle_function(lam: float, y: float) -> float:
    """``sum_{p <= y} log p / (p^lam - 1)``."""
    lp = _log_primes(float(y))
    return math.fsum(lp / np.expm1(lam * lp))


def _saddle_derivative(lam: float, lp: np.ndarray) -> float:
    em = np.expm1(lam * lp)
    return -math.fsum(lp * lp * (em + 1.0) / (em * em))


def saddle_point(x: float, y: float, tol: float = 1e-9) -> float:
    """The root ``lambda > 0`` of ``sum_{p <= y} log p / (p^lambda - 1) = log x``.

    The left side is strictly decreasing, so bisection on a bracket down to
    width ``1e-3`` is followed by Newton steps with the analytic derivative,
    falling back to bisection if a step leaves the bracket.
    """
    if y < 2 or x <= 1:
        raise DomainError("saddle point needs y >= 2 and x > 1")
    lp = _log_primes(float(y))
    target = math.log(x)
    g = lambda lam: math.fsum(lp / np.expm1(lam * lp)) - target
    lo, hi = 1e-6, 2.0
    while g(lo) <= 0:
        lo /= 16
    while g(hi) > 0:
        hi *= 2
    while hi - lo > 1e-3:
        mid = 0.5 * (lo + hi)
        if g(mid) > 0:
            lo = mid
        else:
            hi = mid
    lam = 0.5 * (lo + hi)
    for _ in range(100):
        val = g(lam)
        if abs(val) < tol:
            break
        if val > 0:
            lo = lam
        else:
            hi = lam
        step = lam - val / _saddle_derivative(lam, lp)
        lam = step if lo < step < hi else 0.5 * (lo + hi)
    return lam


def saddle_point_estimate(x: float, y: float) -> float:
    """``1 - log(u log(u + 1)) / log y``, the leading-order saddle-point approximation."""
    u = math.log(x) / math.log(y)
    return 1.0 - math.log(u * math.log(u + 1.0)) / math.log(y)
