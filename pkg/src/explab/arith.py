"""Integer foundations: prime sieves, factorization, arithmetic functions and
the structure of the unit group (Z/qZ)*.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import NamedTuple

import numpy as np

from . import _cache
from .errors import DomainError, ResourceError

#: Largest limit accepted by :func:`sieve_primes`.
SIEVE_CAP = 2_000_000_000
#: Segment length (in integers) of the segmented sieve.
SEGMENT = 1 << 22
#: Trial division bound used by :func:`factorize`.
TRIAL_BOUND = 1_000_000
#: Discrete-log tables are used for cyclic components of order at most this.
DLOG_TABLE_MAX = 1 << 16

_SIMPLE_SIEVE_MAX = 10_000_000
_CACHE_MIN = 10_000_000


def _simple_sieve(limit: int) -> np.ndarray:
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    for i in range(2, math.isqrt(limit) + 1):
        if is_prime[i]:
            is_prime[i * i::i] = False
    return np.flatnonzero(is_prime).astype(np.int64)


def _segmented_sieve(limit: int) -> np.ndarray:
    base = _simple_sieve(math.isqrt(limit))
    chunks = [base]
    lo = int(base[-1]) + 1 if base.size else 2
    while lo <= limit:
        hi = min(lo + SEGMENT, limit + 1)
        seg = np.ones(hi - lo, dtype=bool)
        for p in base:
            p = int(p)
            if p * p >= hi:
                break
            start = max(p * p, ((lo + p - 1) // p) * p)
            seg[start - lo::p] = False
        chunks.append(np.flatnonzero(seg).astype(np.int64) + lo)
        lo = hi
    return np.concatenate(chunks)


def sieve_primes(limit: int) -> np.ndarray:
    """Return the primes ``<= limit`` in ascending order as an int64 array.

    Limits above ten million go through a segmented sieve so memory stays
    bounded by the segment length plus the output.

    Raises:
        DomainError: if ``limit < 2``.
        ResourceError: if ``limit`` exceeds :data:`SIEVE_CAP`.
    """
    limit = int(limit)
    if limit < 2:
        raise DomainError(f"sieve limit must be >= 2, got {limit}")
    if limit > SIEVE_CAP:
        raise ResourceError(f"sieve limit {limit} exceeds cap {SIEVE_CAP}")
    if limit <= _SIMPLE_SIEVE_MAX:
        return _simple_sieve(limit)
    return _segmented_sieve(limit)


class _PrimeTable:
    """Process-wide table of primes, grown on demand."""

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self._limit = 0
        self._primes = np.empty(0, dtype=np.int64)

    def upto(self, limit: int) -> np.ndarray:
        limit = max(int(limit), 2)
        primes, known = self._primes, self._limit
        if known < limit:
            with self._lock:
                if self._limit < limit:
                    new_limit = max(limit, 2 * self._limit, 1 << 16)
                    new_limit = min(max(new_limit, limit), SIEVE_CAP)
                    self._primes = self._build(new_limit)
                    self._limit = new_limit
                primes, known = self._primes, self._limit
        return primes[: np.searchsorted(primes, limit, side="right")]

    @staticmethod
    def _build(limit: int) -> np.ndarray:
        if limit < _CACHE_MIN:
            return sieve_primes(limit)
        key = f"primes:{limit}"
        cached = _cache.load(key)
        if cached is not None:
            return cached
        primes = sieve_primes(limit)
        _cache.store(key, primes)
        return primes


_PRIMES = _PrimeTable()


def primes_up_to(limit: float) -> np.ndarray:
    """Cached ascending primes ``<= limit`` (empty for ``limit < 2``)."""
    if limit < 2:
        return np.empty(0, dtype=np.int64)
    return _PRIMES.upto(int(math.floor(limit)))


def prime_pi(x: float) -> int:
    """Number of primes ``<= x``."""
    return int(primes_up_to(x).size)


def primes_between(lo: float, hi: float) -> np.ndarray:
    """Primes ``p`` with ``lo < p <= hi``."""
    primes = primes_up_to(hi)
    return primes[np.searchsorted(primes, math.floor(lo), side="right"):]


# --------------------------------------------------------------------------
# primality and factorization

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for ``n < 3.3 * 10**24``."""
    n = int(n)
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class Factorization:
    """Prime-power decomposition ``n = prod p**e``."""

    n: int
    factors: tuple[tuple[int, int], ...] = ()

    def __post_init__(self) -> None:
        prod = 1
        last = 1
        for p, e in self.factors:
            if p <= last or e < 1:
                raise DomainError(f"malformed factorization {self.factors}")
            prod *= p**e
            last = p
        if prod != self.n:
            raise DomainError(f"factors {self.factors} do not multiply to {self.n}")

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.factors)

    @property
    def phi(self) -> int:
        out = 1
        for p, e in self.factors:
            out *= p ** (e - 1) * (p - 1)
        return out

    @property
    def mobius(self) -> int:
        if any(e > 1 for _, e in self.factors):
            return 0
        return -1 if len(self.factors) % 2 else 1

    @property
    def omega(self) -> int:
        return len(self.factors)

    @property
    def divisor_count(self) -> int:
        return math.prod(e + 1 for _, e in self.factors)

    @cached_property
    def divisors(self) -> tuple[int, ...]:
        divs = [1]
        for p, e in self.factors:
            divs = [d * p**k for d in divs for k in range(e + 1)]
        return tuple(sorted(divs))

    @property
    def largest_prime(self) -> int:
        """``P+(n)``, with ``P+(1) = 1``."""
        return self.factors[-1][0] if self.factors else 1

    @property
    def smallest_prime(self) -> float:
        """``P-(n)``, with ``P-(1) = inf``."""
        return self.factors[0][0] if self.factors else math.inf

    @property
    def radical(self) -> int:
        return math.prod(self.primes)

    def exponent(self, p: int) -> int:
        for r, e in self.factors:
            if r == p:
                return e
        return 0


def factorize(n: int) -> Factorization:
    """Factor ``n >= 1``.

    Trial division by the sieved primes up to ``min(sqrt(n), 10**6)``; any
    remaining cofactor is prime whenever ``n <= 10**12``. Larger inputs get a
    Miller-Rabin test on the cofactor and, if it is composite, are handed to
    sympy.
    """
    n = int(n)
    if n < 1:
        raise DomainError(f"cannot factor {n}")
    factors: list[tuple[int, int]] = []
    m = n
    bound = min(math.isqrt(n), TRIAL_BOUND)
    if bound >= 2:
        small = primes_up_to(bound)
        if n < (1 << 63):
            hits = small[np.asarray(n, dtype=np.int64) % small == 0]
        else:
            hits = [p for p in small.tolist() if n % p == 0]
        for p in (int(p) for p in hits):
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            factors.append((p, e))
    if m > 1:
        if m <= TRIAL_BOUND**2 or is_prime(m):
            factors.append((m, 1))
        else:
            import sympy

            factors.extend(sorted(sympy.factorint(m).items()))
    return Factorization(n, tuple(factors))


class ArithmeticFunctions(NamedTuple):
    phi: int
    mobius: int
    omega: int
    divisor_count: int
    divisors: tuple[int, ...]


def arithmetic_functions(f: Factorization) -> ArithmeticFunctions:
    """Euler phi, Moebius, omega, the divisor function and the divisor list."""
    return ArithmeticFunctions(f.phi, f.mobius, f.omega, f.divisor_count, f.divisors)


@lru_cache(maxsize=4096)
def _factor_cached(n: int) -> Factorization:
    return factorize(n)


def phi(n: int) -> int:
    return _factor_cached(int(n)).phi


def mobius(n: int) -> int:
    return _factor_cached(int(n)).mobius


def omega(n: int) -> int:
    return _factor_cached(int(n)).omega


def divisors(n: int) -> tuple[int, ...]:
    return _factor_cached(int(n)).divisors


def smallest_prime_factor_table(limit: int) -> np.ndarray:
    """``spf[n]`` = least prime factor of ``n`` for ``2 <= n <= limit``."""
    spf = np.zeros(limit + 1, dtype=np.int64)
    for p in primes_up_to(math.isqrt(limit)).tolist():
        block = spf[p * p::p]
        block[block == 0] = p
    rest = spf == 0
    rest[:2] = False
    spf[rest] = np.flatnonzero(rest)
    return spf


def mobius_table(limit: int) -> np.ndarray:
    """Moebius function on ``0..limit`` (``mu[0] = 0``)."""
    mu = np.ones(limit + 1, dtype=np.int64)
    mu[0] = 0
    for p in primes_up_to(limit).tolist():
        mu[p::p] *= -1
        if p * p <= limit:
            mu[p * p::p * p] = 0
    return mu


def phi_table(limit: int) -> np.ndarray:
    """Euler phi on ``0..limit``."""
    ph = np.arange(limit + 1, dtype=np.int64)
    for p in primes_up_to(limit).tolist():
        ph[p::p] -= ph[p::p] // p
    return ph


# --------------------------------------------------------------------------
# unit group


def _primitive_root_prime(p: int) -> int:
    if p == 2:
        return 1
    fac = factorize(p - 1).primes
    for g in range(2, p):
        if all(pow(g, (p - 1) // r, p) != 1 for r in fac):
            return g
    raise AssertionError("unreachable")


def _bsgs(g: int, h: int, order: int, mod: int) -> int:
    """Solve ``g**k == h (mod mod)`` with ``0 <= k < order``."""
    m = math.isqrt(order) + 1
    baby = {}
    cur = 1
    for j in range(m):
        baby.setdefault(cur, j)
        cur = cur * g % mod
    giant = pow(g, -m, mod)
    cur = h % mod
    for i in range(m + 1):
        j = baby.get(cur)
        if j is not None:
            return (i * m + j) % order
        cur = cur * giant % mod
    raise DomainError(f"{h} is not a power of {g} modulo {mod}")


@dataclass
class _Cyclic:
    """A cyclic factor ``<g>`` of (Z/p^e Z)* with its discrete-log solver."""

    mod: int
    g: int
    order: int
    table: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        if self.order <= DLOG_TABLE_MAX:
            table = np.full(self.mod, -1, dtype=np.int64)
            cur = 1
            for k in range(self.order):
                table[cur] = k
                cur = cur * self.g % self.mod
            self.table = table

    def log(self, u: int) -> int:
        if self.table is not None:
            k = int(self.table[u % self.mod])
            if k < 0:
                raise DomainError(f"{u} is not in <{self.g}> mod {self.mod}")
            return k
        return _bsgs(self.g, u, self.order, self.mod)


class _Component:
    """(Z/p^e Z)* written as a product of at most two cyclic groups."""

    def __init__(self, p: int, e: int) -> None:
        self.p, self.e, self.mod = p, e, p**e
        self.cyclic: list[_Cyclic] = []
        if p == 2:
            if e == 2:
                self.cyclic.append(_Cyclic(4, 3, 2))
            elif e >= 3:
                self.cyclic.append(_Cyclic(self.mod, self.mod - 1, 2))
                self.cyclic.append(_Cyclic(self.mod, 5, 1 << (e - 2)))
        else:
            g = _primitive_root_prime(p)
            if e > 1 and pow(g, p - 1, p * p) == 1:
                g += p
            self.cyclic.append(_Cyclic(self.mod, g, p ** (e - 1) * (p - 1)))

    def logs(self, u: int) -> list[int]:
        u %= self.mod
        if self.p == 2 and self.e >= 3:
            sign = 0 if u % 4 == 1 else 1
            w = u if sign == 0 else (-u) % self.mod
            return [sign, self.cyclic[1].log(w)]
        return [c.log(u) for c in self.cyclic]

    def log_array(self, residues: np.ndarray) -> np.ndarray:
        """Vectorized logs for residues known to be units (tables only)."""
        r = residues % self.mod
        if self.p == 2 and self.e >= 3:
            sign = (r % 4 != 1).astype(np.int64)
            w = np.where(sign == 0, r, (-r) % self.mod)
            return np.stack([sign, self.cyclic[1].table[w]], axis=1)
        return np.stack([c.table[r] for c in self.cyclic], axis=1)


class UnitGroup:
    """The multiplicative group (Z/qZ)* as a product of cyclic groups.

    ``generators[j]`` has order ``orders[j]``; every unit ``u`` is uniquely
    ``prod generators[j] ** dlog(u)[j]`` with ``0 <= dlog(u)[j] < orders[j]``.
    For ``q = 2^k`` with ``k >= 3`` the 2-part contributes the pair
    ``(-1, 5)``.
    """

    def __init__(self, q: int) -> None:
        q = int(q)
        if q < 1:
            raise DomainError(f"modulus must be positive, got {q}")
        self.q = q
        self.factorization = factorize(q)
        self._components = [_Component(p, e) for p, e in self.factorization.factors]
        gens: list[int] = []
        orders: list[int] = []
        for comp in self._components:
            rest = q // comp.mod
            # CRT: x = g (mod p^e), x = 1 (mod rest)
            inv = pow(rest, -1, comp.mod) if comp.mod > 1 else 0
            for cyc in comp.cyclic:
                x = (1 + (cyc.g - 1) * rest * inv) % q if rest > 1 else cyc.g % q
                gens.append(x)
                orders.append(cyc.order)
        self.generators: tuple[int, ...] = tuple(gens)
        self.orders: tuple[int, ...] = tuple(orders)
        self._dlog_array: np.ndarray | None = None
        self._lock = threading.Lock()

    @property
    def phi(self) -> int:
        return self.factorization.phi

    @property
    def rank(self) -> int:
        return len(self.generators)

    @property
    def exponent(self) -> int:
        """Least common multiple of the generator orders."""
        return math.lcm(*self.orders) if self.orders else 1

    def dlog(self, u: int) -> tuple[int, ...]:
        u = int(u)
        if math.gcd(u, self.q) != 1:
            raise DomainError(f"{u} is not a unit modulo {self.q}")
        out: list[int] = []
        for comp in self._components:
            out.extend(comp.logs(u))
        return tuple(out)

    def exp(self, vec) -> int:
        out = 1 % self.q
        for g, k in zip(self.generators, vec):
            out = out * pow(g, int(k), self.q) % self.q
        return out

    def units(self) -> np.ndarray:
        r = np.arange(self.q, dtype=np.int64)
        return r[np.gcd(r, self.q) == 1] if self.q > 1 else np.array([0], dtype=np.int64)

    def dlog_table(self) -> np.ndarray:
        """Array of shape ``(q, rank)`` of discrete logs; rows of non-units are -1."""
        if self._dlog_array is None:
            with self._lock:
                if self._dlog_array is None:
                    self._dlog_array = self._build_dlog_table()
        return self._dlog_array

    def _build_dlog_table(self) -> np.ndarray:
        table = np.full((self.q, self.rank), -1, dtype=np.int64)
        units = self.units() if self.q > 1 else np.empty(0, dtype=np.int64)
        if self.rank == 0:
            return table
        if all(c.table is not None for comp in self._components for c in comp.cyclic):
            cols = [comp.log_array(units) for comp in self._components if comp.cyclic]
            table[units] = np.concatenate(cols, axis=1)
        else:
            for u in units.tolist():
                table[u] = self.dlog(u)
        return table


@lru_cache(maxsize=512)
def unit_group(q: int) -> UnitGroup:
    """Cached :class:`UnitGroup` for modulus ``q``."""
    return UnitGroup(q)
