"""Multiplicative functions with values in the unit disc.

A :class:`MultiplicativeFunction` is described by its values on prime
powers. Prime values come from a vectorised rule so that long sums over
``n <= x`` can be evaluated block by block; higher prime powers either follow
from complete multiplicativity or from a scalar rule. Scalar lookups are
memoised in a lock-protected map keyed by ``(p, k)``.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .arith import factorize, primes_up_to
from .characters import DirichletCharacter, enumerate_characters, primitive_characters
from .errors import DomainError

PrimeRule = Callable[[np.ndarray], np.ndarray]
PowerRule = Callable[[int, int], complex]

BLOCK = 1 << 18

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)


# --------------------------------------------------------------------------
# counter-based random numbers


def _splitmix(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = z + _GOLDEN
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


def uniform_hash(seed: int, p: np.ndarray, k: int = 1, stream: int = 0) -> np.ndarray:
    """Uniform doubles in ``[0, 1)`` determined by ``(seed, stream, p, k)`` only.

    The value at a given prime power never depends on which other primes were
    requested or in what order, so sampled functions are reproducible across
    block sizes and thread counts.
    """
    key = _splitmix(np.uint64((int(seed) * 0x2545F4914F6CDD1D + stream) & 0xFFFFFFFFFFFFFFFF))
    counter = np.asarray(p, dtype=np.uint64) | (np.uint64(k) << np.uint64(48))
    h = _splitmix(counter ^ key)
    return (h >> np.uint64(11)).astype(np.float64) * (1.0 / (1 << 53))


# --------------------------------------------------------------------------
# the function type


class MultiplicativeFunction:
    """A multiplicative function ``f: N -> C`` fixed by its prime-power values.

    Args:
        prime_rule: Vectorised map from an int64 array of primes to their
            complex values.
        power_rule: Optional scalar ``(p, k) -> f(p^k)`` for ``k >= 2``. When
            omitted the function is completely multiplicative.
        bound: Modulus bound on prime-power values (1 for functions into the
            unit disc; auxiliary convolution factors may reach 2).
        limit: Largest prime on which the function is defined, or None.
        seed: Seed record for randomised functions.
        name: Label used in reprs and reports.
    """

    def __init__(self, prime_rule: PrimeRule, power_rule: PowerRule | None = None, *,
                 bound: float = 1.0, limit: float | None = None, seed: int | None = None,
                 name: str = "f") -> None:
        self._prime_rule = prime_rule
        self._power_rule = power_rule
        self.bound = float(bound)
        self.limit = limit
        self.seed = seed
        self.name = name
        self._memo: dict[tuple[int, int], complex] = {}
        self._lock = threading.Lock()

    def __repr__(self) -> str:
        kind = "completely multiplicative" if self.completely_multiplicative else "multiplicative"
        return f"<MultiplicativeFunction {self.name!r} ({kind})>"

    @property
    def completely_multiplicative(self) -> bool:
        return self._power_rule is None

    # -- prime-power values -------------------------------------------------

    def _check_primes(self, primes: np.ndarray) -> None:
        if self.limit is not None and primes.size and primes.max() > self.limit:
            raise DomainError(f"{self.name} is undefined at primes above {self.limit}")

    def prime_values(self, primes) -> np.ndarray:
        """``f(p)`` for an array of primes."""
        primes = np.asarray(primes, dtype=np.int64)
        self._check_primes(primes)
        if primes.size == 0:
            return np.zeros(0, dtype=np.complex128)
        return np.asarray(self._prime_rule(primes), dtype=np.complex128)

    def value(self, p: int, k: int = 1) -> complex:
        """``f(p^k)`` for a prime ``p``; memoised."""
        if k == 0:
            return 1.0 + 0j
        key = (int(p), int(k))
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        if k == 1:
            val = complex(self.prime_values(np.array([p]))[0])
        elif self._power_rule is None:
            val = self.value(p, 1) ** k
        else:
            self._check_primes(np.array([p]))
            val = complex(self._power_rule(int(p), int(k)))
        with self._lock:
            self._memo.setdefault(key, val)
        return val

    def power_table(self, p: int, kmax: int) -> np.ndarray:
        """``[f(1), f(p), ..., f(p^kmax)]``."""
        out = np.empty(kmax + 1, dtype=np.complex128)
        out[0] = 1.0
        if kmax >= 1:
            fp = self.value(p, 1)
            for k in range(1, kmax + 1):
                out[k] = fp ** k if self._power_rule is None else self.value(p, k)
        return out

    # -- evaluation ---------------------------------------------------------

    def __call__(self, n: int) -> complex:
        n = int(n)
        if n < 1:
            raise DomainError(f"f(n) needs n >= 1, got {n}")
        out = 1.0 + 0j
        for p, k in factorize(n).factors:
            out *= self.value(p, k)
        return out

    def eval(self, n: int) -> complex:
        return self(n)

    def values_range(self, lo: int, hi: int) -> np.ndarray:
        """``f(n)`` for ``lo <= n < hi`` (with ``lo >= 1``) by segmented factorisation."""
        lo, hi = int(lo), int(hi)
        if lo < 1:
            raise DomainError("values_range needs lo >= 1")
        size = hi - lo
        if size <= 0:
            return np.zeros(0, dtype=np.complex128)
        rem = np.arange(lo, hi, dtype=np.int64)
        out = np.ones(size, dtype=np.complex128)
        for p in primes_up_to(math.isqrt(hi - 1)).tolist():
            start = (-lo) % p
            if start >= size:
                continue
            idx = np.arange(start, size, p)
            k = np.zeros(idx.size, dtype=np.int64)
            sub = rem[idx]
            live = np.ones(idx.size, dtype=bool)
            while live.any():
                sub[live] //= p
                k[live] += 1
                live &= sub % p == 0
            rem[idx] = sub
            out[idx] *= self.power_table(p, int(k.max()))[k]
        big = rem > 1
        if big.any():
            out[big] *= self.prime_values(rem[big])
        return out

    def values(self, N: int) -> np.ndarray:
        """Array ``a`` of length ``N + 1`` with ``a[n] = f(n)`` and ``a[0] = 0``."""
        N = int(N)
        out = np.zeros(N + 1, dtype=np.complex128)
        for lo in range(1, N + 1, BLOCK):
            hi = min(N + 1, lo + BLOCK)
            out[lo:hi] = self.values_range(lo, hi)
        return out

    def values_at(self, n: np.ndarray, prime_bound: float | None = None) -> np.ndarray:
        """``f(n)`` at arbitrary positive integers.

        When every ``n`` is known to be ``prime_bound``-smooth, trial division
        stops there instead of at ``sqrt(max n)``.
        """
        n = np.asarray(n, dtype=np.int64)
        out = np.ones(n.size, dtype=np.complex128)
        if n.size == 0:
            return out
        if n.min() < 1:
            raise DomainError("values_at needs positive integers")
        top = math.isqrt(int(n.max()))
        if prime_bound is not None:
            top = min(top, int(prime_bound))
        rem = n.copy()
        for p in primes_up_to(max(top, 2)).tolist():
            live = rem % p == 0
            if not live.any():
                continue
            idx = np.flatnonzero(live)
            sub = rem[idx] // p
            k = np.ones(idx.size, dtype=np.int64)
            more = sub % p == 0
            while more.any():
                sub[more] //= p
                k[more] += 1
                more &= sub % p == 0
            rem[idx] = sub
            out[idx] *= self.power_table(p, int(k.max()))[k]
        big = rem > 1
        if big.any():
            out[big] *= self.prime_values(rem[big])
        return out

    def iter_blocks(self, N: int, block: int = BLOCK):
        """Yield ``(n, f(n))`` array pairs covering ``1 <= n <= N``."""
        for lo in range(1, int(N) + 1, block):
            hi = min(int(N) + 1, lo + block)
            yield np.arange(lo, hi, dtype=np.int64), self.values_range(lo, hi)

    # -- derived functions --------------------------------------------------

    def times(self, other: MultiplicativeFunction, name: str | None = None) -> MultiplicativeFunction:
        """Pointwise product, which is again multiplicative."""
        rule = lambda p: self.prime_values(p) * other.prime_values(p)
        power = None
        if not (self.completely_multiplicative and other.completely_multiplicative):
            power = lambda p, k: self.value(p, k) * other.value(p, k)
        return MultiplicativeFunction(rule, power, bound=self.bound * other.bound,
                                      limit=_min_limit(self.limit, other.limit),
                                      name=name or f"{self.name}*{other.name}")

    def conj(self) -> MultiplicativeFunction:
        power = None
        if not self.completely_multiplicative:
            power = lambda p, k: self.value(p, k).conjugate()
        return MultiplicativeFunction(lambda p: np.conj(self.prime_values(p)), power,
                                      bound=self.bound, limit=self.limit,
                                      name=f"conj({self.name})")

    def check_bound(self, primes: np.ndarray, kmax: int = 3, tol: float = 1e-12) -> bool:
        """True when ``|f(p^k)| <= bound`` for the given primes and ``k <= kmax``."""
        primes = np.asarray(primes, dtype=np.int64)
        if np.any(np.abs(self.prime_values(primes)) > self.bound + tol):
            return False
        if self.completely_multiplicative:
            return True
        return all(abs(self.value(p, k)) <= self.bound + tol
                   for p in primes.tolist() for k in range(2, kmax + 1))


def _min_limit(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def evaluate(f: MultiplicativeFunction, n: int) -> complex:
    """``f(n)`` as the product over the prime-power parts of ``n``."""
    return f(n)


# --------------------------------------------------------------------------
# standard functions


def constant_one() -> MultiplicativeFunction:
    return MultiplicativeFunction(lambda p: np.ones(p.shape, dtype=np.complex128), name="1")


def liouville() -> MultiplicativeFunction:
    return MultiplicativeFunction(lambda p: -np.ones(p.shape, dtype=np.complex128), name="lambda")


def mobius_function() -> MultiplicativeFunction:
    return MultiplicativeFunction(lambda p: -np.ones(p.shape, dtype=np.complex128),
                                  lambda p, k: 0.0, name="mu")


def archimedean(t: float) -> MultiplicativeFunction:
    """The completely multiplicative ``n -> n^{it}``."""
    return MultiplicativeFunction(lambda p: np.exp(1j * t * np.log(p.astype(np.float64))),
                                  name=f"n^(i*{t:g})")


def from_character(chi: DirichletCharacter) -> MultiplicativeFunction:
    """A Dirichlet character as a completely multiplicative function."""
    return MultiplicativeFunction(lambda p: chi.values[p % chi.q],
                                  name=f"chi{chi.q}{list(chi.index)}")


def from_prime_values(table: dict[int, complex], default: complex = 0.0,
                      powers: dict[tuple[int, int], complex] | None = None,
                      name: str = "f") -> MultiplicativeFunction:
    """A function from explicit prime values (and optional prime-power values)."""
    keys = np.array(sorted(table), dtype=np.int64)
    vals = np.array([table[int(k)] for k in keys], dtype=np.complex128)

    def rule(p: np.ndarray) -> np.ndarray:
        out = np.full(p.shape, default, dtype=np.complex128)
        if keys.size:
            pos = np.clip(np.searchsorted(keys, p), 0, keys.size - 1)
            hit = keys[pos] == p
            out[hit] = vals[pos[hit]]
        return out

    power = None
    if powers is not None:
        def power(p: int, k: int) -> complex:
            return powers.get((p, k), 0.0)
    return MultiplicativeFunction(rule, power, name=name)


def steinhaus(seed: int, *, completely: bool = True, disc: bool = False,
              limit: float | None = None, name: str | None = None) -> MultiplicativeFunction:
    """Random function with ``f(p)`` i.i.d. uniform on the unit circle.

    Args:
        seed: Stream seed; equal seeds give bit-identical values.
        completely: Extend completely multiplicatively. Otherwise each
            ``f(p^k)`` is drawn independently.
        disc: Draw uniformly from the closed disc instead of the circle.
        limit: Largest prime at which the function is defined.
        name: Report label.
    """

    def draw(p: np.ndarray, k: int) -> np.ndarray:
        phase = np.exp(2j * np.pi * uniform_hash(seed, p, k, stream=0))
        if disc:
            phase *= np.sqrt(uniform_hash(seed, p, k, stream=1))
        return phase

    power = None if completely else (lambda p, k: complex(draw(np.array([p]), k)[0]))
    return MultiplicativeFunction(lambda p: draw(p, 1), power, limit=limit, seed=seed,
                                  name=name or f"steinhaus[{seed}]")


# --------------------------------------------------------------------------
# convolution structure


def kappa_decompose(f: MultiplicativeFunction, chi: DirichletCharacter) -> MultiplicativeFunction:
    """The function ``kappa`` with ``f = kappa * chi`` (Dirichlet convolution).

    On prime powers ``kappa(p^k) = f(p^k) - chi(p) f(p^{k-1})``.
    """

    def rule(p: np.ndarray) -> np.ndarray:
        return f.prime_values(p) - chi.values[p % chi.q]

    def power(p: int, k: int) -> complex:
        return f.value(p, k) - chi(p) * f.value(p, k - 1)

    return MultiplicativeFunction(rule, power, bound=2.0 * f.bound, limit=f.limit,
                                  name=f"kappa[{f.name}]")


def cm_remainder(f: MultiplicativeFunction) -> tuple[MultiplicativeFunction, MultiplicativeFunction]:
    """Split ``f = g * h`` with ``g`` completely multiplicative and ``g(p) = f(p)``.

    Then ``h(p) = 0`` and ``h(p^j) = f(p^j) - f(p) f(p^{j-1})``.
    """
    g = MultiplicativeFunction(f.prime_values, None, bound=f.bound, limit=f.limit,
                               name=f"cm[{f.name}]")

    def power(p: int, k: int) -> complex:
        return f.value(p, k) - f.value(p, 1) * f.value(p, k - 1)

    h = MultiplicativeFunction(lambda p: np.zeros(p.shape, dtype=np.complex128), power,
                               bound=2.0, limit=f.limit, name=f"h[{f.name}]")
    return g, h


def convolve(f: MultiplicativeFunction, g: MultiplicativeFunction) -> MultiplicativeFunction:
    """The Dirichlet convolution ``f * g`` as a multiplicative function."""

    def power(p: int, k: int) -> complex:
        return sum(f.value(p, j) * g.value(p, k - j) for j in range(k + 1))

    return MultiplicativeFunction(lambda p: f.prime_values(p) + g.prime_values(p), power,
                                  bound=f.bound + g.bound, limit=_min_limit(f.limit, g.limit),
                                  name=f"({f.name})*({g.name})")


def dirichlet_convolve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Dirichlet convolution of two arrays indexed from 0 (index 0 ignored).

    ``out[n] = sum_{d | n} a[d] b[n/d]`` for ``1 <= n < len``.
    """
    N = min(len(a), len(b)) - 1
    out = np.zeros(N + 1, dtype=np.result_type(a, b, np.complex128))
    for d in range(1, N + 1):
        if a[d] != 0:
            m = N // d
            out[d::d][:m] += a[d] * b[1:m + 1]
    return out


# --------------------------------------------------------------------------
# pretentious distance


@dataclass(frozen=True)
class DistanceResult:
    """Squared pretentious distance, with the minimiser when one was searched."""

    value: float
    t: float | None = None
    chi: DirichletCharacter | None = None
    chi_position: int | None = None

    @property
    def distance(self) -> float:
        return math.sqrt(max(self.value, 0.0))


def _prime_data(x: float, exclude: int = 1) -> tuple[np.ndarray, np.ndarray]:
    primes = primes_up_to(x)
    if exclude > 1:
        primes = primes[np.gcd(primes, exclude) == 1]
    return primes, 1.0 / primes.astype(np.float64)


def pretentious_distance(f: MultiplicativeFunction, g: MultiplicativeFunction, x: float) -> DistanceResult:
    """``D(f, g; x)^2 = sum_{p <= x} (1 - Re f(p) conj(g(p))) / p``."""
    if x < 2:
        raise DomainError("pretentious distance needs x >= 2")
    primes, w = _prime_data(x)
    terms = (1.0 - np.real(f.prime_values(primes) * np.conj(g.prime_values(primes)))) * w
    return DistanceResult(max(math.fsum(terms), 0.0))


class _TObjective:
    """``t -> sum_p (1 - Re a_p p^{-it}) / p`` over a fixed prime set."""

    def __init__(self, coeffs: np.ndarray, primes: np.ndarray) -> None:
        w = 1.0 / primes.astype(np.float64)
        self.base = math.fsum(w)
        self.cw = coeffs * w
        self.logp = np.log(primes.astype(np.float64))

    def __call__(self, t: float) -> float:
        return self.base - float(np.real(np.dot(self.cw, np.exp(-1j * t * self.logp))))

    def grid(self, ts: np.ndarray, chunk: int = 1 << 22) -> np.ndarray:
        out = np.empty(ts.size)
        rows = max(1, chunk // max(self.logp.size, 1))
        for s in range(0, ts.size, rows):
            block = ts[s:s + rows]
            phase = np.exp(-1j * np.outer(block, self.logp))
            out[s:s + rows] = self.base - np.real(phase @ self.cw)
        return out


def _minimise_t(obj: _TObjective, x: float, T: float, refine: int = 5) -> tuple[float, float]:
    step = 1.0 / (4.0 * math.log(x))
    n = max(2, int(math.ceil(2 * T / step)) + 1)
    ts = np.linspace(-T, T, n)
    vals = obj.grid(ts)
    interior = np.r_[False, (vals[1:-1] <= vals[:-2]) & (vals[1:-1] <= vals[2:]), False]
    cand = np.flatnonzero(interior).tolist() + [0, n - 1]
    cand = sorted(set(cand), key=lambda i: (vals[i], i))[:refine]
    h = ts[1] - ts[0]
    best_t, best_v = float(ts[cand[0]]), float(vals[cand[0]])
    for i in cand:
        lo, hi = max(-T, ts[i] - h), min(T, ts[i] + h)
        res = minimize_scalar(obj, bounds=(lo, hi), method="bounded",
                              options={"xatol": 1e-10})
        if res.fun < best_v:
            best_t, best_v = float(res.x), float(res.fun)
    return best_t, max(best_v, 0.0)


def min_distance_t(f: MultiplicativeFunction, x: float, T: float, *,
                   exclude: int = 1) -> DistanceResult:
    """``M(f; x, T) = min_{|t| <= T} D(f, n^{it}; x)^2`` and its minimiser.

    A grid at spacing ``1/(4 log x)`` locates the candidate basins, the best
    few of which are refined by bounded Brent minimisation. Primes dividing
    ``exclude`` are left out of the sum.
    """
    if T <= 0 or x < 2:
        raise DomainError("min_distance_t needs T > 0 and x >= 2")
    primes, _ = _prime_data(x, exclude)
    t, v = _minimise_t(_TObjective(f.prime_values(primes), primes), x, T)
    return DistanceResult(v, t)


class CharacterFit(NamedTuple):
    M: float
    best_chi: DirichletCharacter
    t_star: float


def rank_characters(f: MultiplicativeFunction, characters: Sequence[DirichletCharacter],
                    x: float, T: float, exclude: int = 1) -> list[DistanceResult]:
    """``M(f conj(chi); x, T)`` for each character, sorted ascending.

    Exact ties keep the order of ``characters``.
    """
    primes, _ = _prime_data(x, exclude)
    fp = f.prime_values(primes)
    out = []
    for pos, chi in enumerate(characters):
        obj = _TObjective(fp * np.conj(chi.values[primes % chi.q]), primes)
        t, v = _minimise_t(obj, x, T)
        out.append(DistanceResult(v, t, chi, pos))
    out.sort(key=lambda r: (r.value, r.chi_position))
    return out


def min_over_characters(f: MultiplicativeFunction, q: int, x: float, T: float) -> CharacterFit:
    """``M(f, q, x, T)``: the least distance to ``chi(n) n^{it}`` over ``chi mod q``, ``|t| <= T``.

    Primes dividing ``q`` are excluded from the distance sum.
    """
    best = rank_characters(f, enumerate_characters(q), x, T, exclude=q)[0]
    return CharacterFit(best.value, best.chi, best.t)


def order_primitive_characters(f: MultiplicativeFunction, q: int, x: float,
                               T: float) -> list[DistanceResult]:
    """Primitive characters of every conductor dividing ``q``, ordered by
    ``M(f conj(chi); x, T)``. Ties are broken by conductor then index."""
    chars = [c for ell in factorize(q).divisors for c in primitive_characters(ell)]
    return rank_characters(f, chars, x, T)


# --------------------------------------------------------------------------
# main-term computations attached to a character


def euler_factor(f: MultiplicativeFunction, chi: DirichletCharacter, p: int, e: int,
                 terms: int = 60) -> complex:
    """``sum_{j >= 0} conj(chi(p^j)) kappa(p^{e+j}) / p^j``, truncated after ``terms``.

    Its modulus is at most 2 for 1-bounded ``f``.
    """
    kappa = kappa_decompose(f, chi)
    cp = np.conj(chi(p))
    out, w = 0j, 1.0 + 0j
    for j in range(terms):
        out += w * kappa.value(p, e + j)
        w *= cp / p
        if abs(w) < 1e-18:
            break
    return out


def cor19_main_term(f: MultiplicativeFunction, chi: DirichletCharacter, q: int, a: int,
                    x: float, tau: complex | None = None) -> complex:
    """``conj(chi(a)) tau(chi) / phi(q) * sum_{n <= x} F(n) conj(chi(n)) / n``.

    ``chi`` is primitive modulo some ``l | q``. ``F`` agrees with ``f`` on
    prime powers coprime to ``q``; for ``p | q`` with ``p^e || q/l`` it takes
    ``F(p^k) = kappa(p^{k+e})``, where ``f = kappa * chi``.
    """
    from .characters import gauss_sum

    ell = chi.q
    if q % ell:
        raise DomainError(f"character modulus {ell} does not divide {q}")
    if tau is None:
        tau = gauss_sum(chi)
    kappa = kappa_decompose(f, chi)
    parts = [(p, factorize(q // ell).exponent(p)) for p in factorize(q).primes]
    N = int(math.floor(x))
    n = np.arange(1, N + 1, dtype=np.int64)
    rem = n.copy()
    val = np.ones(N, dtype=np.complex128)
    for p, e in parts:
        k = np.zeros(N, dtype=np.int64)
        live = rem % p == 0
        while live.any():
            rem[live] //= p
            k[live] += 1
            live &= rem % p == 0
        val *= np.array([kappa.value(p, j + e) for j in range(int(k.max()) + 1)])[k]
    fvals = f.values(N)
    terms = val * fvals[rem] * np.conj(chi.values[n % ell]) / n
    return np.conj(chi(a)) * tau / factorize(q).phi * _fsum_complex(terms)


def _fsum_complex(z: np.ndarray) -> complex:
    return complex(math.fsum(z.real), math.fsum(z.imag))
